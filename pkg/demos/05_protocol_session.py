"""A look at the actuator wire protocol and its watchdog.

Plays one gait schedule through the central endpoint with a transcript
enabled, then shows a safety-timer trip when an OFF command never
arrives.
"""

from pentapod import build_default_library
from pentapod.protocol import (CentralEndpoint, Command, CommandKind,
                               OnboardState, SerialLink, apply_command,
                               encode, fsm_tick)

print("--- playing the primitive-0 gait over the link ---")
onboard = OnboardState()
link = SerialLink(keep_transcript=True)
central = CentralEndpoint(onboard, link)
end = central.play_schedule(build_default_library()[0].schedule, 0.0)

frames = [e for e in link.transcript]
print(f"schedule finished at t = {end:.2f} s, {len(frames)} frames sent")
print("first frames on the wire:")
for entry in frames[:6]:
    print(f"  t={entry.t:5.2f}  {entry.frame!r}")
print(f"channels still ON afterwards: {onboard.active_channels()}")

print("\n--- watchdog trip when the OFF command is lost ---")
onboard = OnboardState(safety_timeout=2.0)
print(f"send {encode(Command(CommandKind.SMA_SET, sma_index=3, level=1))!r} at t=0")
apply_command(onboard, Command(CommandKind.SMA_SET, sma_index=3, level=1), 0.0)
for t in (1.0, 1.95, 2.0):
    tripped = fsm_tick(onboard, t)
    state = "ON" if 3 in onboard.active_channels() else "OFF"
    note = f"  <- watchdog tripped {tripped}" if tripped else ""
    print(f"tick at t={t:4.2f}: channel 3 is {state}{note}")
