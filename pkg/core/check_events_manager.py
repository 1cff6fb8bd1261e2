# core/check_events_manager.py
# Observer-style dispatch of self-test events to subscribed listeners.

import logging
from collections import defaultdict
from typing import Callable, Dict, List, Optional

from core.check_events import CheckEvent, EventType


class CheckEventManager:
    """
    Handles event subscription, emission and a bounded event history.

    A failing listener is logged and skipped so one broken reporter never
    hides the outcome of a check from the others.
    """

    def __init__(self, max_history_size: int = 1000):
        # Dictionary of event types to list of callback functions
        self.listeners: Dict[EventType, List[Callable[[CheckEvent], None]]] = defaultdict(list)
        self.event_history: List[CheckEvent] = []
        self.max_history_size = max_history_size
        self.logger = logging.getLogger(__name__)

    def subscribe(self, event_type: EventType, callback: Callable[[CheckEvent], None]) -> None:
        """
        Subscribe a callback function to a specific event type.

        Args:
            event_type: The type of event to subscribe to
            callback: Function to call when event occurs
        """
        self.listeners[event_type].append(callback)
        self.logger.debug(f"Subscribed to {event_type.value}")

    def subscribe_all(self, callback: Callable[[CheckEvent], None]) -> None:
        for event_type in EventType:
            self.subscribe(event_type, callback)

    def unsubscribe(self, event_type: EventType, callback: Callable[[CheckEvent], None]) -> None:
        if event_type in self.listeners and callback in self.listeners[event_type]:
            self.listeners[event_type].remove(callback)
            self.logger.debug(f"Unsubscribed from {event_type.value}")

    def emit(self, event: CheckEvent) -> None:
        """
        Emit an event to all subscribed listeners.

        Args:
            event: The CheckEvent to emit
        """
        self.event_history.append(event)
        if len(self.event_history) > self.max_history_size:
            self.event_history.pop(0)

        for callback in self.listeners[event.type]:
            try:
                callback(event)
            except Exception as e:
                self.logger.error(f"Error in event listener: {e}")

    def get_recent_events(self, event_type: Optional[EventType] = None) -> List[CheckEvent]:
        if event_type is None:
            return self.event_history.copy()
        return [e for e in self.event_history if e.type == event_type]
