"""Tour of the motion primitive library.

Prints the polar parameter table, the actuator frames of one gait, and
the safety validator's verdict on every default schedule.
"""

import math

from pentapod import build_default_library, validate_schedule

library = build_default_library()

print("Primitive table (leading limb -> heading offset, nominal displacement):")
for prim in library:
    print(f"  primitive {prim.id}: phi = {math.degrees(prim.phi):6.1f} deg, "
          f"r = {prim.r_nominal:.1f} cm, "
          f"gait duration = {prim.schedule.total_duration():.2f} s")

print("\nGait frames for primitive 0 (channels listed are ON):")
for k, frame in enumerate(library[0].schedule.frames):
    phase = ["lift", "swing", "plant", "push"][k]
    print(f"  frame {k} ({phase:5s}, {frame.hold_duration:.2f} s): "
          f"{frame.active_channels()}")

print("\nSafety validation (watchdog timeout 2.0 s, no antagonist co-activation):")
for prim in library:
    report = validate_schedule(prim.schedule)
    status = "ok" if report.valid else f"VIOLATIONS: {report.violations}"
    print(f"  primitive {prim.id}: {status}")
