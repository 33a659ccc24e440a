"""Motion primitive library: five leading-limb gaits over 20 actuator channels.

Each of the five limbs carries four shape-memory-alloy channels, grouped
as two antagonistic pairs: a vertical pair (dorsal / ventral, lifting and
planting the limb tip) and a horizontal pair (forward / backward bend,
swinging and pushing). A motion primitive is a timed sequence of 20-bit
actuator frames that drives the four non-leading limbs through a
lift-swing-plant-push cycle, propelling the body toward the leader.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

NUM_LIMBS = 5
CHANNELS_PER_LIMB = 4
NUM_CHANNELS = NUM_LIMBS * CHANNELS_PER_LIMB

DEFAULT_R_CM = 5.0
# Heading offsets of the five leading-limb primitives, degrees. Limb 0
# points along +Y at 90 deg; successive limbs step by -72 deg (mod 360).
PHI_TABLE_DEG = (90.0, 18.0, 306.0, 234.0, 162.0)

DEFAULT_MAX_SIMULTANEOUS_ON = 8
DEFAULT_SAFETY_TIMEOUT_S = 2.0


@dataclass(frozen=True)
class GaitTiming:
    """Durations of the four swing-stance phases (seconds).

    Defaults total 2.52 s, matching the measured mean execution time of
    one primitive.
    """

    lift_s: float = 0.6
    swing_s: float = 0.6
    plant_s: float = 0.4
    push_s: float = 0.92

    def total(self) -> float:
        return self.lift_s + self.swing_s + self.plant_s + self.push_s


@dataclass(frozen=True)
class ActuatorFrame:
    """One 20-channel activation mask held for a fixed duration."""

    channels: Tuple[bool, ...]
    hold_duration: float

    def __post_init__(self):
        if len(self.channels) != NUM_CHANNELS:
            raise ValueError(f"expected {NUM_CHANNELS} channels, got {len(self.channels)}")
        if not self.hold_duration > 0:
            raise ValueError(f"hold_duration must be positive, got {self.hold_duration}")

    def active_channels(self) -> List[int]:
        return [i for i, on in enumerate(self.channels) if on]


@dataclass(frozen=True)
class GaitSchedule:
    """Ordered sequence of actuator frames forming one primitive execution."""

    frames: Tuple[ActuatorFrame, ...]

    def total_duration(self) -> float:
        return sum(f.hold_duration for f in self.frames)


@dataclass(frozen=True)
class MotionPrimitive:
    """One planning action: polar displacement parameters plus its gait."""

    id: int
    phi: float          # rad
    r_nominal: float    # cm
    schedule: GaitSchedule

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.r_nominal)):
            raise ValueError("primitive parameters must be finite")
        if self.r_nominal < 0:
            raise ValueError(f"r_nominal must be >= 0, got {self.r_nominal}")


# Roles of the four channels within a limb, in slot order.
DORSAL, VENTRAL, FORWARD, BACKWARD = range(CHANNELS_PER_LIMB)

ANTAGONIST_SLOTS = ((DORSAL, VENTRAL), (FORWARD, BACKWARD))


@dataclass(frozen=True)
class LimbMap:
    """Assignment of the 20 channel indices to limb/role slots.

    ``channels[limb][slot]`` is the global channel index for that limb's
    dorsal, ventral, forward, or backward actuator. The default packs
    limb i onto channels 4i..4i+3; the hardware assignment is arbitrary
    but must be a bijection.
    """

    channels: Tuple[Tuple[int, ...], ...] = field(
        default_factory=lambda: tuple(
            tuple(range(limb * CHANNELS_PER_LIMB, (limb + 1) * CHANNELS_PER_LIMB))
            for limb in range(NUM_LIMBS)
        )
    )

    def __post_init__(self):
        flat = [c for limb in self.channels for c in limb]
        if sorted(flat) != list(range(NUM_CHANNELS)):
            raise ValueError("limb map must cover each of the 20 channels exactly once")

    def channel(self, limb: int, slot: int) -> int:
        return self.channels[limb][slot]

    def antagonist_pairs(self) -> List[Tuple[int, int]]:
        """All (channel, channel) antagonistic pairs across limbs."""
        pairs = []
        for limb in range(NUM_LIMBS):
            for a, b in ANTAGONIST_SLOTS:
                pairs.append((self.channel(limb, a), self.channel(limb, b)))
        return pairs


def _mask(limb_map: LimbMap, active: Sequence[Tuple[int, int]]) -> Tuple[bool, ...]:
    channels = [False] * NUM_CHANNELS
    for limb, slot in active:
        channels[limb_map.channel(limb, slot)] = True
    return tuple(channels)


def gait_for(leading_limb: int, timing: GaitTiming | None = None,
             limb_map: LimbMap | None = None) -> GaitSchedule:
    """Build the swing-stance schedule that leads with the given limb.

    The two limbs to each side of the leader (all four non-leaders) cycle
    together: lift (dorsal on), swing (dorsal + forward bend), plant
    (release dorsal, keep forward), push (backward bend). The leader's
    channels stay off. Schedules for different leaders are identical up
    to rotation of limb indices.
    """
    if not 0 <= leading_limb < NUM_LIMBS:
        raise ValueError(f"leading limb must be in 0..{NUM_LIMBS - 1}, got {leading_limb}")
    timing = timing or GaitTiming()
    limb_map = limb_map or LimbMap()
    pushers = [(leading_limb + k) % NUM_LIMBS for k in (1, 2, 3, 4)]

    frames = (
        ActuatorFrame(_mask(limb_map, [(l, DORSAL) for l in pushers]), timing.lift_s),
        ActuatorFrame(_mask(limb_map, [(l, DORSAL) for l in pushers]
                            + [(l, FORWARD) for l in pushers]), timing.swing_s),
        ActuatorFrame(_mask(limb_map, [(l, FORWARD) for l in pushers]), timing.plant_s),
        ActuatorFrame(_mask(limb_map, [(l, BACKWARD) for l in pushers]), timing.push_s),
    )
    return GaitSchedule(frames)


def build_default_library(timing: GaitTiming | None = None,
                          limb_map: LimbMap | None = None,
                          r_nominal: float = DEFAULT_R_CM) -> List[MotionPrimitive]:
    """The five leading-limb primitives with the standard polar table."""
    return [
        MotionPrimitive(
            id=i,
            phi=math.radians(PHI_TABLE_DEG[i]),
            r_nominal=r_nominal,
            schedule=gait_for(i, timing=timing, limb_map=limb_map),
        )
        for i in range(NUM_LIMBS)
    ]


@dataclass
class ScheduleViolation:
    kind: str       # "overlong_on" or "antagonist_coactivation"
    channel: int
    detail: str


@dataclass
class ValidationReport:
    violations: List[ScheduleViolation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_schedule(schedule: GaitSchedule,
                      safety_timeout: float = DEFAULT_SAFETY_TIMEOUT_S,
                      limb_map: LimbMap | None = None,
                      max_simultaneous_on: int = DEFAULT_MAX_SIMULTANEOUS_ON,
                      forbid_coactivation: bool = True) -> ValidationReport:
    """Static safety check of a gait schedule.

    Flags any channel held continuously ON longer than the safety timeout
    (the onboard watchdog would trip mid-gait), any frame co-activating
    both channels of an antagonistic pair, and any frame exceeding the
    simultaneous-activation budget.
    """
    limb_map = limb_map or LimbMap()
    report = ValidationReport()

    def close_run(ch: int, run: float) -> None:
        if run > safety_timeout:
            report.violations.append(ScheduleViolation(
                "overlong_on", ch,
                f"channel {ch} ON for {run:.3f}s > timeout {safety_timeout:.3f}s"))

    on_since: Dict[int, float] = {}
    t = 0.0
    for frame in schedule.frames:
        for ch in range(NUM_CHANNELS):
            if frame.channels[ch]:
                on_since.setdefault(ch, t)
            elif ch in on_since:
                close_run(ch, t - on_since.pop(ch))
        t += frame.hold_duration

        n_on = sum(frame.channels)
        if n_on > max_simultaneous_on:
            report.violations.append(ScheduleViolation(
                "too_many_on", -1,
                f"{n_on} channels active > budget {max_simultaneous_on}"))
        if forbid_coactivation:
            for a, b in limb_map.antagonist_pairs():
                if frame.channels[a] and frame.channels[b]:
                    report.violations.append(ScheduleViolation(
                        "antagonist_coactivation", a,
                        f"channels {a} and {b} co-activated"))
    for ch, start in on_since.items():
        close_run(ch, t - start)
    return report
