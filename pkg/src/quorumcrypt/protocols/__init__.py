"""Round-based protocol executors behind the Threshold Round Interface."""

from .base import (
    MessageCounters,
    Progress,
    ProtocolAbortError,
    ProtocolError,
    ProtocolResult,
    ProtocolStateError,
    ProtocolTerminatedError,
    TriProtocol,
)
from .frost import FrostProtocol, PrecomputedSlot
from .messages import CONTROL_ROUND, Channel, DecodeError, ProtocolMessage
from .single_round import SingleRoundProtocol

__all__ = [
    "CONTROL_ROUND", "Channel", "DecodeError", "FrostProtocol", "MessageCounters", "PrecomputedSlot", "Progress",
    "ProtocolAbortError", "ProtocolError", "ProtocolMessage", "ProtocolResult", "ProtocolStateError",
    "ProtocolTerminatedError", "SingleRoundProtocol", "TriProtocol",
]
