# core/check_events.py
# Event types and payloads emitted while the self-test battery runs.

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict


class EventType(Enum):
    """Enumeration of all self-test events"""
    # Battery flow events
    SELFTEST_START = "selftest_start"
    SELFTEST_END = "selftest_end"

    # Per-criterion events
    CHECK_STARTED = "check_started"
    CHECK_PASSED = "check_passed"
    CHECK_FAILED = "check_failed"
    BUDGET_REFUSED = "budget_refused"


@dataclass
class CheckEvent:
    """
    A self-test event with its type, associated data, and metadata.

    Attributes:
        type (EventType): The type of event
        data (Dict[str, Any]): Event-specific data (criterion name, detail, counts)
        timestamp (datetime): When the event occurred
        debug_data (Dict[str, Any]): Optional witnesses for failed checks
    """
    type: EventType
    data: Dict[str, Any]
    timestamp: datetime = field(default_factory=datetime.now)
    debug_data: Dict[str, Any] = field(default_factory=dict)
