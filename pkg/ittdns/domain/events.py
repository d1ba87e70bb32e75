"""
🎪 Domain Events
Events emitted while a run progresses
"""
import uuid
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Callable, Deque, Dict, List, Optional

from loguru import logger


class DomainEvent(ABC):
    """Base class for all domain events"""

    def __init__(self):
        self.event_id = str(uuid.uuid4())
        self.occurred_at = datetime.now(timezone.utc)
        self.version = 1

    @abstractmethod
    def data(self) -> Dict[str, Any]:
        """Event payload"""

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization"""
        return {
            'event_id': self.event_id,
            'event_type': type(self).__name__,
            'occurred_at': self.occurred_at.isoformat(),
            'version': self.version,
            'data': self.data(),
        }


@dataclass
class RunStarted(DomainEvent):
    """A run has been configured and is about to step"""
    label: str
    d: int
    resolution: int
    dt: float
    t_end: float
    start_step: int = 0
    start_time: float = 0.0

    def __post_init__(self):
        super().__init__()

    def data(self) -> Dict[str, Any]:
        return {
            'label': self.label,
            'd': self.d,
            'resolution': self.resolution,
            'dt': self.dt,
            't_end': self.t_end,
            'start_step': self.start_step,
            'start_time': self.start_time,
        }


@dataclass
class SampleRecorded(DomainEvent):
    """A diagnostics sample was taken"""
    step: int
    time: float
    energy: float
    cfl: float
    sample_index: int = 0

    def __post_init__(self):
        super().__init__()

    def data(self) -> Dict[str, Any]:
        return {
            'step': self.step,
            'time': self.time,
            'energy': self.energy,
            'cfl': self.cfl,
            'sample_index': self.sample_index,
        }


@dataclass
class CflExceeded(DomainEvent):
    """The CFL number went above the configured ceiling"""
    step: int
    time: float
    cfl: float
    limit: float

    def __post_init__(self):
        super().__init__()

    def data(self) -> Dict[str, Any]:
        return {'step': self.step, 'time': self.time, 'cfl': self.cfl, 'limit': self.limit}


@dataclass
class CheckpointWritten(DomainEvent):
    """A checkpoint file was saved"""
    path: str
    step: int
    time: float

    def __post_init__(self):
        super().__init__()

    def data(self) -> Dict[str, Any]:
        return {'path': self.path, 'step': self.step, 'time': self.time}


@dataclass
class BlowupDetected(DomainEvent):
    """The integrator aborted on a non-finite or runaway state"""
    message: str
    step: Optional[int] = None
    time: Optional[float] = None
    max_amplitude: Optional[float] = None
    checkpoint_path: Optional[str] = None

    def __post_init__(self):
        super().__init__()

    def data(self) -> Dict[str, Any]:
        return {
            'message': self.message,
            'step': self.step,
            'time': self.time,
            'max_amplitude': self.max_amplitude,
            'checkpoint_path': self.checkpoint_path,
        }


@dataclass
class RunCompleted(DomainEvent):
    """The time loop reached t_end and outputs were written"""
    label: str
    steps: int
    time: float
    samples: int
    wall_seconds: float
    outputs: List[str] = field(default_factory=list)

    def __post_init__(self):
        super().__init__()

    def data(self) -> Dict[str, Any]:
        return {
            'label': self.label,
            'steps': self.steps,
            'time': self.time,
            'samples': self.samples,
            'wall_seconds': self.wall_seconds,
            'outputs': list(self.outputs),
        }


Handler = Callable[[DomainEvent], Any]


class EventBus:
    """Synchronous event bus with a bounded history"""

    def __init__(self, history_size: int = 1000):
        self._handlers: Dict[str, List[Handler]] = {}
        self._event_history: Deque[DomainEvent] = deque(maxlen=history_size)

    def subscribe(self, event_type: str, handler: Handler) -> None:
        """Subscribe to an event type; a handler is registered at most once"""
        handlers = self._handlers.setdefault(event_type, [])
        if handler not in handlers:
            handlers.append(handler)

    def unsubscribe(self, event_type: str, handler: Handler) -> None:
        """Unsubscribe from an event type"""
        handlers = self._handlers.get(event_type)
        if handlers and handler in handlers:
            handlers.remove(handler)

    def publish(self, event: DomainEvent) -> None:
        """Publish an event to all subscribers"""
        self._event_history.append(event)

        event_type = type(event).__name__
        for handler in list(self._handlers.get(event_type, [])):
            try:
                handler(event)
            except Exception as e:
                # Log error but don't stop other handlers
                logger.error(f"❌ Error in event handler for {event_type}: {e}")

    def get_event_history(self, limit: int = 100) -> List[DomainEvent]:
        """Get recent event history"""
        history = list(self._event_history)
        return history[-limit:] if limit else []

    def clear_history(self) -> None:
        """Clear event history"""
        self._event_history.clear()


# Global event bus instance
event_bus = EventBus()
