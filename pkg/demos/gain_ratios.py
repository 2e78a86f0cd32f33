"""How the two live gains move during the rapid reference.

Both gains grow while the reference decelerates into a turn and shrink once
it has turned. The printout lists every stretch where a gain sits above its
starting value, with its peak ratio and whether a reversal falls inside.
"""
import numpy as np

from pneutrack import RunConfig, run_episode

tr = run_episode(RunConfig(), "two_dof")
dt = tr.t[1] - tr.t[0]

v = np.sign(np.diff(tr.theta_ref))
nz = np.flatnonzero(v != 0)
turns = nz[1:][v[nz[1:]] != v[nz[:-1]]]
print("reference turns at t =", ", ".join(f"{k * dt:.2f}" for k in turns), "s")


def stretches(ratio):
    edges = np.flatnonzero(np.diff(np.concatenate([[0], (ratio > 1).astype(int), [0]])))
    return list(zip(edges[::2], edges[1::2]))


for label, g in (("K_P ", tr.kp), ("K_ff", tr.kff)):
    ratio = g / g[0]
    print(f"\n{label}: peak ratio {ratio.max():.2f}")
    for a, b in stretches(ratio):
        inside = [k * dt for k in turns if a <= k < b]
        mark = f"turn at {inside[0]:.2f} s" if inside else "no turn"
        print(f"  {a * dt:6.2f} .. {b * dt:6.2f} s   peak {ratio[a:b].max():.2f}   {mark}")
