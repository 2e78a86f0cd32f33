"""Drive the actuator with one slow pressure triangle and look at the loop.

Only the pressure loop runs here. The angle lags behind on the way up and
stays high on the way down; the flat stretches right after each turn are the
dead zones the adaptive tuner is built to push through.
"""
import sys
from pathlib import Path

import numpy as np

from pneutrack import RunConfig, identify_hysteresis
from pneutrack import csvio

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
cfg = RunConfig()
loop = identify_hysteresis(cfg)
csvio.write_loop(loop, out / "loop.csv")

top = int(np.argmax(loop.pressure))
print(f"triangle 0 -> {loop.pressure[top]:.0f} -> 0 kPa over {loop.t[-1]:.0f} s")
print(f"angle range {loop.angle.min():.1f} .. {loop.angle.max():.1f} deg")

# the two branches at a few pressures
print("\n  P [kPa]   loading [deg]   unloading [deg]")
up_p, up_a = loop.pressure[: top + 1], loop.angle[: top + 1]
dn_p, dn_a = loop.pressure[top:][::-1], loop.angle[top:][::-1]
for p in (50, 100, 200, 300, 350):
    print(f"  {p:7.0f}   {np.interp(p, up_p, up_a):13.2f}   {np.interp(p, dn_p, dn_a):15.2f}")

upper, lower = loop.dead_zones()
print(f"\nloop area       {loop.area():.0f} deg*kPa")
print(f"dead zone after the bottom turn  {lower:.1f} kPa")
print(f"dead zone after the top turn     {upper:.1f} kPa  ({upper / lower:.2f}x wider)")
print(f"\nloop written to {out / 'loop.csv'}")
