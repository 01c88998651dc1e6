"""Structured event log: one JSON object per line."""

from __future__ import annotations

import json
import logging
import threading
from collections.abc import Callable

logger = logging.getLogger("quorumcrypt.events")

INSTANCE_STARTED = "instance_started"
INSTANCE_FINISHED = "instance_finished"
INSTANCE_FAILED = "instance_failed"
SHARE_REJECTED = "share_rejected"
LATE_MESSAGE = "late_message"
MESSAGE_DROPPED = "message_dropped"
PENDING_EVICTED = "pending_evicted"


class EventLog:
    """Fans events out to the ``quorumcrypt.events`` logger and optional sinks.

    ``keep=True`` also retains events in memory, which the simulated bench uses.
    """

    def __init__(self, keep: bool = False, sinks: list[Callable[[dict], None]] = ()):
        self.keep = keep
        self.records: list[dict] = []
        self.sinks = list(sinks)
        self._lock = threading.Lock()

    def emit(self, event: str, **fields) -> dict:
        record = {"event": event, **fields}
        if self.keep:
            with self._lock:
                self.records.append(record)
        for sink in self.sinks:
            sink(record)
        if logger.isEnabledFor(logging.INFO):
            logger.info(json.dumps(record, sort_keys=True, separators=(",", ":")))
        return record

    def of_type(self, event: str) -> list[dict]:
        return [r for r in self.records if r["event"] == event]


def parse_lines(lines) -> list[dict]:
    """Read back events written one per line (non-JSON lines are skipped)."""
    out = []
    for line in lines:
        line = line.strip()
        start = line.find("{")
        if start < 0:
            continue
        try:
            record = json.loads(line[start:])
        except json.JSONDecodeError:
            continue
        if isinstance(record, dict) and "event" in record:
            out.append(record)
    return out
