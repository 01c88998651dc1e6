"""Execution engine: instance manager, key store and structured events."""

from .events import EventLog
from .keystore import KeyEntry, KeyStore, UnknownKeyError
from .manager import (
    InstanceManager,
    InstanceRecord,
    InstanceState,
    InvalidRequestError,
    OrchestrationConfig,
    PollResult,
)
from .requests import RequestKind, ThresholdRequest

__all__ = [
    "EventLog", "InstanceManager", "InstanceRecord", "InstanceState", "InvalidRequestError", "KeyEntry",
    "KeyStore", "OrchestrationConfig", "PollResult", "RequestKind", "ThresholdRequest", "UnknownKeyError",
]
