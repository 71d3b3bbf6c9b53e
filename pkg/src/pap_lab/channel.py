"""Simulated forward (reader-to-tag) and backward (tag-to-reader) radio
channels with adversary interception hooks and full transcript recording.

The channel is lossless and instant absent adversary action. Interceptors
see a message only on directions the adversary may eavesdrop; replacing or
dropping additionally requires the intercept capability. Replaced messages
are re-framed (re-CRC'd) on delivery, so endpoints always see well-formed
frames.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Union

from .errors import CapabilityViolation
from .model import AdversaryCapabilities
from .wire import Message, encode_message, fields_hex, message_type_name


class Direction(Enum):
    FORWARD = "forward"     # reader -> tag
    BACKWARD = "backward"   # tag -> reader


@dataclass(frozen=True)
class Pass:
    """Leave the message untouched."""


@dataclass(frozen=True)
class Replace:
    message: Message


@dataclass(frozen=True)
class Drop:
    """Suppress delivery entirely."""


InterceptAction = Union[Pass, Replace, Drop]


@dataclass
class Interceptor:
    """Adversary hook applied to every transmission it is allowed to observe.

    `requires` documents the capability subset the hook needs; the channel
    enforces the granted capabilities at act time regardless.
    """

    transform: Callable[[Message, Direction], InterceptAction]
    requires: AdversaryCapabilities = field(default_factory=AdversaryCapabilities.none)
    label: str = "interceptor"


@dataclass
class TranscriptEvent:
    seq: int
    direction: Direction
    sender: str
    receiver: str
    original: Message
    delivered: Message | None   # None when dropped
    intercepted: bool
    dropped: bool


class SeqCounter:
    """Shared monotone sequence source; lets multiple channels interleave
    into one strictly increasing transcript."""

    def __init__(self, start: int = 0):
        self._next = start

    def take(self) -> int:
        value = self._next
        self._next += 1
        return value


class Channel:
    """One radio link instance; append-only transcript of every transmission."""

    def __init__(self, capabilities: AdversaryCapabilities | None = None,
                 seq: SeqCounter | None = None):
        self.capabilities = capabilities or AdversaryCapabilities.none()
        self.interceptors: list[Interceptor] = []
        self.events: list[TranscriptEvent] = []
        self._seq = seq or SeqCounter()

    def attach(self, interceptor: Interceptor) -> None:
        self.interceptors.append(interceptor)

    def _may_observe(self, direction: Direction) -> bool:
        if direction is Direction.FORWARD:
            return self.capabilities.eavesdrop_forward
        return self.capabilities.eavesdrop_backward

    def transmit(self, direction: Direction, msg: Message,
                 sender: str, receiver: str) -> Message | None:
        """Send one message; returns the delivered message, or None if dropped."""
        encode_message(msg)  # honest endpoints only emit encodable frames
        delivered: Message | None = msg
        intercepted = False
        dropped = False
        for hook in self.interceptors:
            if not self._may_observe(direction):
                continue  # invisible to the adversary on this direction
            action = hook.transform(delivered, direction)
            if isinstance(action, Pass):
                continue
            if not self.capabilities.intercept:
                raise CapabilityViolation(
                    f"{hook.label} attempted {type(action).__name__} without intercept capability"
                )
            if isinstance(action, Replace):
                delivered = action.message
                encode_message(delivered)  # adversary frames are re-framed/re-CRC'd
                intercepted = True
            elif isinstance(action, Drop):
                delivered = None
                intercepted = True
                dropped = True
                break
            else:
                raise TypeError(f"not an intercept action: {action!r}")
        self.events.append(TranscriptEvent(
            seq=self._seq.take(),
            direction=direction,
            sender=sender,
            receiver=receiver,
            original=msg,
            delivered=delivered,
            intercepted=intercepted,
            dropped=dropped,
        ))
        return delivered

    def eavesdrop_log(self, capabilities: AdversaryCapabilities) -> list[tuple[Direction, Message]]:
        """Delivered messages on the directions the given capabilities may observe."""
        log = []
        for event in self.events:
            if event.dropped:
                continue
            if event.direction is Direction.FORWARD and not capabilities.eavesdrop_forward:
                continue
            if event.direction is Direction.BACKWARD and not capabilities.eavesdrop_backward:
                continue
            log.append((event.direction, event.delivered))
        return log


def event_to_json(event: TranscriptEvent) -> dict:
    """One transcript event in the fixed JSONL field order."""
    msg = event.original if event.dropped else event.delivered
    return {
        "seq": event.seq,
        "direction": event.direction.value,
        "from": event.sender,
        "to": event.receiver,
        "msg_type": message_type_name(msg),
        "fields_hex": fields_hex(msg),
        "intercepted": event.intercepted,
        "dropped": event.dropped,
    }


def transcript_lines(events: Iterable[TranscriptEvent]) -> list[str]:
    return [json.dumps(event_to_json(e), separators=(",", ":")) for e in events]


def write_transcript(events: Iterable[TranscriptEvent], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in transcript_lines(events):
            fh.write(line + "\n")
