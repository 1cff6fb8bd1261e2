# tests/core/test_check_events_manager.py
# Unit tests for self-test event dispatch.

import pytest

from core.check_events import CheckEvent, EventType
from core.check_events_manager import CheckEventManager


@pytest.fixture
def manager():
    return CheckEventManager(max_history_size=3)


def test_subscribe_and_emit(manager):
    received = []
    manager.subscribe(EventType.CHECK_PASSED, received.append)
    manager.emit(CheckEvent(type=EventType.CHECK_PASSED, data={"criterion": 1}))
    manager.emit(CheckEvent(type=EventType.CHECK_FAILED, data={"criterion": 2}))
    assert [e.data["criterion"] for e in received] == [1]


def test_unsubscribe(manager):
    received = []
    manager.subscribe(EventType.CHECK_STARTED, received.append)
    manager.unsubscribe(EventType.CHECK_STARTED, received.append)
    manager.emit(CheckEvent(type=EventType.CHECK_STARTED, data={}))
    assert received == []


def test_failing_listener_does_not_block_others(manager):
    received = []

    def broken(event):
        raise RuntimeError("listener failure")

    manager.subscribe(EventType.CHECK_FAILED, broken)
    manager.subscribe(EventType.CHECK_FAILED, received.append)
    manager.emit(CheckEvent(type=EventType.CHECK_FAILED, data={}))
    assert len(received) == 1


def test_history_is_bounded(manager):
    for i in range(5):
        manager.emit(CheckEvent(type=EventType.CHECK_PASSED, data={"i": i}))
    manager.emit(CheckEvent(type=EventType.SELFTEST_END, data={}))
    history = manager.get_recent_events()
    assert len(history) == 3
    assert [e.data.get("i") for e in manager.get_recent_events(EventType.CHECK_PASSED)] == [3, 4]


def test_subscribe_all(manager):
    received = []
    manager.subscribe_all(received.append)
    for event_type in EventType:
        manager.emit(CheckEvent(type=event_type, data={}))
    assert len(received) == len(EventType)
