"""Executor for the non-interactive schemes.

Every node sends one partial result to all others.  A node finalizes as soon
as it holds t+1 partial results that pass verification; bad shares are
counted and skipped, so the protocol is robust against up to t faulty nodes.
"""

from __future__ import annotations

import random
from typing import Any

from ..rng import system_rng
from ..schemes import registry
from ..schemes.core import KeyShare, PartialResult
from ..schemes.errors import MalformedError
from .base import Meter, ProtocolResult, ProtocolStateError, TriProtocol, _no_meter
from .messages import ProtocolMessage


class SingleRoundProtocol(TriProtocol):
    round_count = 1

    def __init__(self, instance_id: bytes, share: KeyShare, request: Any, *,
                 rng: random.Random | None = None, meter: Meter = _no_meter):
        super().__init__(instance_id, share, meter=meter)
        self.request = request
        self.rng = rng or system_rng()
        self.impl = registry.get(share.scheme)
        self.pk = share.public
        self.valid: dict[int, PartialResult] = {}
        self._seen: set[int] = set()

    def _do_round(self) -> ProtocolMessage:
        if self.current_round >= 1:
            raise ProtocolStateError("single-round protocol has no second round")
        self.meter("share")
        partial = self.impl.create_share(self.share, self.request, self.rng)
        self.current_round = 1
        return self._message(self.impl.partial_to_bytes(partial))

    def _update(self, m: ProtocolMessage) -> None:
        if m.round != 1 or not 1 <= m.sender <= self.params.n:
            self.counters.rejected += 1
            return
        if m.sender in self._seen:
            self.counters.duplicate += 1
            return
        self._seen.add(m.sender)
        if len(self.valid) >= self.params.quorum:
            return  # quorum reached; nothing left to check
        try:
            partial = self.impl.partial_from_bytes(m.payload)
        except MalformedError:
            self.counters.rejected += 1
            return
        if partial.index != m.sender:
            self.counters.rejected += 1
            return
        if m.sender == self.index:
            ok = True  # produced locally
        else:
            self.meter("verify_share")
            try:
                ok = self.impl.verify_share(self.pk, self.request, partial)
            except MalformedError:
                ok = False
        if ok:
            self.valid[m.sender] = partial
        else:
            self.counters.rejected += 1

    def is_ready_for_next_round(self) -> bool:
        return False

    def is_ready_to_finalize(self) -> bool:
        return not self.terminated and len(self.valid) >= self.params.quorum

    def _finalize(self) -> ProtocolResult:
        self.meter("combine")
        result = self.impl.combine(self.pk, self.request, self.valid.values())
        if not self.impl.verify_result(self.pk, self.request, result):
            return ProtocolResult(False, error="combined result failed verification")
        return ProtocolResult(True, result, self.impl.result_to_bytes(result, self.pk))
