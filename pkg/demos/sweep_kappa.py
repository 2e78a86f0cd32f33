"""Sensitivity of the two-channel tuner to the error exponent kappa.

kappa sets how strongly a large tracking error shrinks gain increases and
speeds up gain decreases in the feedback channel. At kappa = 0 the error
plays no part at all.
"""
from pneutrack import RunConfig, sweep

cfg = RunConfig()
print(" kappa   RMSE [deg]   e_max [deg]   e_min [deg]")
for value, rep in sweep(cfg, "tuner.kappa", [0.0, 0.5, 1.0, 1.5, 2.0, 3.0], mode="two_dof"):
    print(f"{value:6.1f}   {rep.rmse:10.4f}   {rep.e_max:11.3f}   {rep.e_min:11.3f}")
