"""Actuator command protocol and onboard safety state machines.

Two logical endpoints exchange newline-terminated ASCII frames over an
ordered byte link: a central endpoint on the planner side and an onboard
endpoint holding one finite state machine per actuator channel. Onboard
watchdog timers force any channel OFF if no deactivation arrives within
the safety timeout, preventing actuator burnout even when frames are
lost.

Wire grammar (bit-exact):

    SMA <ii> <b>\\n    set channel ii (zero-padded, 00..19) to b (0 or 1)
    ALLOFF\\n          deactivate every channel
    PING\\n            liveness check

Responses are ``OK\\n`` or ``ERR <code>\\n``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, List, Optional, Tuple

import numpy as np

from .primitives import NUM_CHANNELS, DEFAULT_SAFETY_TIMEOUT_S, GaitSchedule

DEFAULT_TICK_INTERVAL_S = 0.05


class CommandKind(Enum):
    SMA_SET = "SMA_SET"
    ALL_OFF = "ALL_OFF"
    PING = "PING"


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    sma_index: Optional[int] = None   # SMA_SET only
    level: Optional[int] = None       # SMA_SET only, 0 or 1

    def __post_init__(self):
        if self.kind is CommandKind.SMA_SET:
            if self.sma_index is None or not 0 <= self.sma_index < NUM_CHANNELS:
                raise ValueError(f"sma_index out of range: {self.sma_index}")
            if self.level not in (0, 1):
                raise ValueError(f"level must be 0 or 1, got {self.level}")
        elif self.sma_index is not None or self.level is not None:
            raise ValueError(f"{self.kind.value} takes no arguments")


class ProtocolParseError(ValueError):
    """A received line does not match the wire grammar."""

    def __init__(self, message: str, token: str):
        super().__init__(f"{message}: {token!r}")
        self.token = token


_SMA_LINE = re.compile(r"^SMA (\d{2}) ([01])$")


def encode(command: Command) -> bytes:
    """Serialize a command to one wire frame."""
    if command.kind is CommandKind.SMA_SET:
        return f"SMA {command.sma_index:02d} {command.level}\n".encode("ascii")
    if command.kind is CommandKind.ALL_OFF:
        return b"ALLOFF\n"
    return b"PING\n"


def decode(frame: bytes) -> Command:
    """Parse one wire frame back into a command."""
    try:
        text = frame.decode("ascii")
    except UnicodeDecodeError:
        raise ProtocolParseError("non-ASCII frame", repr(frame))
    if not text.endswith("\n"):
        raise ProtocolParseError("missing newline terminator", text)
    line = text[:-1]
    if line == "ALLOFF":
        return Command(CommandKind.ALL_OFF)
    if line == "PING":
        return Command(CommandKind.PING)
    if line.startswith("SMA"):
        match = _SMA_LINE.match(line)
        if not match:
            raise ProtocolParseError("malformed SMA command", line)
        index = int(match.group(1))
        if index >= NUM_CHANNELS:
            raise ProtocolParseError("SMA index out of range", match.group(1))
        return Command(CommandKind.SMA_SET, sma_index=index, level=int(match.group(2)))
    raise ProtocolParseError("unknown command", line.split(" ")[0] if line else "")


class ActuatorState(Enum):
    OFF = "OFF"
    ON = "ON"


@dataclass
class ActuatorFSM:
    """One channel's state machine with its watchdog deadline."""

    state: ActuatorState = ActuatorState.OFF
    on_deadline: float = 0.0   # valid only while ON

    def set(self, level: int, now: float, safety_timeout: float) -> None:
        if level == 1:
            # Re-sending ON refreshes the watchdog.
            self.state = ActuatorState.ON
            self.on_deadline = now + safety_timeout
        else:
            self.state = ActuatorState.OFF


class TimeRegressionError(ValueError):
    """Onboard clock may never run backwards."""


@dataclass
class OnboardState:
    """The robot-side endpoint: 20 actuator FSMs and a monotone clock."""

    safety_timeout: float = DEFAULT_SAFETY_TIMEOUT_S
    fsms: List[ActuatorFSM] = field(
        default_factory=lambda: [ActuatorFSM() for _ in range(NUM_CHANNELS)])
    clock: float = 0.0

    def active_channels(self) -> List[int]:
        return [i for i, f in enumerate(self.fsms) if f.state is ActuatorState.ON]


def apply_command(onboard: OnboardState, command: Command, now: float) -> bytes:
    """Execute one decoded command against the onboard state."""
    if now < onboard.clock:
        return b"ERR time_regression\n"
    onboard.clock = now
    if command.kind is CommandKind.SMA_SET:
        if not 0 <= command.sma_index < NUM_CHANNELS:
            return b"ERR index\n"
        onboard.fsms[command.sma_index].set(command.level, now, onboard.safety_timeout)
    elif command.kind is CommandKind.ALL_OFF:
        for fsm in onboard.fsms:
            fsm.state = ActuatorState.OFF
    # PING touches nothing.
    return b"OK\n"


def fsm_tick(onboard: OnboardState, now: float) -> List[int]:
    """Run the watchdog: trip every FSM whose deadline has passed."""
    if now < onboard.clock:
        raise TimeRegressionError(f"tick at {now} before clock {onboard.clock}")
    onboard.clock = now
    tripped = []
    for i, fsm in enumerate(onboard.fsms):
        if fsm.state is ActuatorState.ON and fsm.on_deadline <= now:
            fsm.state = ActuatorState.OFF
            tripped.append(i)
    return tripped


@dataclass
class TranscriptEntry:
    t: float
    direction: str   # "tx" central->onboard, "rx" onboard->central
    frame: bytes


class SerialLink:
    """Ordered, at-most-once byte link with optional frame loss injection."""

    def __init__(self, loss_probability: float = 0.0,
                 rng: Optional[np.random.Generator] = None,
                 keep_transcript: bool = False):
        if not 0.0 <= loss_probability < 1.0:
            raise ValueError(f"loss probability must be in [0, 1), got {loss_probability}")
        if loss_probability > 0 and rng is None:
            raise ValueError("loss injection requires a random generator")
        self.loss_probability = loss_probability
        self.rng = rng
        self.queue: Deque[bytes] = deque()
        self.transcript: Optional[List[TranscriptEntry]] = [] if keep_transcript else None

    def send(self, frame: bytes, t: float = 0.0) -> None:
        if self.transcript is not None:
            self.transcript.append(TranscriptEntry(t, "tx", frame))
        if self.loss_probability > 0 and self.rng.random() < self.loss_probability:
            return
        self.queue.append(frame)

    def receive(self) -> Optional[bytes]:
        return self.queue.popleft() if self.queue else None


class CentralEndpoint:
    """Planner-side driver: plays gait schedules to the onboard endpoint.

    The onboard watchdog ticks at a fixed interval while frames are held,
    so a lost OFF command can leave a channel ON for at most the safety
    timeout plus one tick.
    """

    def __init__(self, onboard: OnboardState, link: Optional[SerialLink] = None,
                 tick_interval: float = DEFAULT_TICK_INTERVAL_S):
        self.onboard = onboard
        self.link = link if link is not None else SerialLink()
        self.tick_interval = tick_interval

    def _deliver(self, t: float) -> List[bytes]:
        responses = []
        while (frame := self.link.receive()) is not None:
            command = decode(frame)
            responses.append(apply_command(self.onboard, command, t))
        return responses

    def play_schedule(self, schedule: GaitSchedule, start_time: float) -> float:
        """Send a schedule's frames in real order; returns the end time."""
        t = start_time
        previous = (False,) * NUM_CHANNELS
        for frame in schedule.frames:
            for ch in range(NUM_CHANNELS):
                if frame.channels[ch] != previous[ch]:
                    cmd = Command(CommandKind.SMA_SET, sma_index=ch,
                                  level=1 if frame.channels[ch] else 0)
                    self.link.send(encode(cmd), t)
            self._deliver(t)
            hold_end = t + frame.hold_duration
            # Watchdog keeps running while the frame is held.
            while t + self.tick_interval < hold_end:
                t += self.tick_interval
                fsm_tick(self.onboard, t)
                # Refresh channels the frame still wants ON (mirrors the
                # hardware practice of periodic re-sends under lossy radio).
                for ch in frame.active_channels():
                    self.link.send(encode(Command(
                        CommandKind.SMA_SET, sma_index=ch, level=1)), t)
                self._deliver(t)
            t = hold_end
            fsm_tick(self.onboard, t)
            previous = frame.channels
        self.link.send(encode(Command(CommandKind.ALL_OFF)), t)
        self._deliver(t)
        fsm_tick(self.onboard, t)
        return t
