"""Adaptive anti-hysteresis tuner for the outer-loop gains.

Both the feedback proportional gain ``K_P`` and the feedforward derivative
gain ``K_ff`` are modulated from the reference kinematics. Every tick an
active channel computes a raw adjustment, scales it by its stabiliser and
applies the floor ``G(t) = max(G(0), G(t-1) + dG)``:

* feedback: error-driven ``f = max(1, |e|)**(-kappa*D)`` times the gain-centring
  ``g = (K_P(0)/K_P(t-1))**(lambda*D)``;
* feedforward: natural gain decrease, decreasing adjustments (``D = -1``) are
  enlarged by ``1 + mu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class Mode(str, Enum):
    PID = "pid"
    FF_STATIC = "ff_static"
    FF_ADAPTIVE = "ff_adaptive"
    FB_ADAPTIVE = "fb_adaptive"
    TWO_DOF = "two_dof"

    @property
    def adapts_fb(self) -> bool:
        return self in (Mode.FB_ADAPTIVE, Mode.TWO_DOF)

    @property
    def adapts_ff(self) -> bool:
        return self in (Mode.FF_ADAPTIVE, Mode.TWO_DOF)

    @property
    def uses_ff(self) -> bool:
        return self is not Mode.PID


MODES = tuple(Mode)


@dataclass(frozen=True)
class ChannelParams:
    """Gain-modulation constants of one channel.

    ``m1, b1, c1`` apply when the reference acceleration is negative,
    ``m2, b2, c2`` when it is positive.
    """

    m1: float
    b1: float
    c1: float
    m2: float
    b2: float
    c2: float

    @classmethod
    def symmetric(cls, m: float, b: float, c: float) -> "ChannelParams":
        return cls(m, b, c, m, b, c)

    def __post_init__(self):
        for name in ("m1", "b1", "c1", "m2", "b2", "c2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass(frozen=True)
class TunerParams:
    fb: ChannelParams = ChannelParams.symmetric(1.4, 20.0, 3.5e5)  # kPa/(deg s), deg/s, deg/s^2
    ff: ChannelParams = ChannelParams.symmetric(0.15, 30.0, 2.0e5)  # kPa/deg, deg/s, deg/s^2
    theta_max: float = 60.0  # deg
    kappa: float = 1.0
    lam: float = 0.20
    mu: float = 0.60
    mode: Mode = Mode.TWO_DOF
    literal_h: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.theta_max > 0:
            raise ValueError("theta_max must be positive")
        for name in ("kappa", "lam", "mu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass
class TunerState:
    kp0: float
    kff0: float
    kp: float = field(default=math.nan)
    kff: float = field(default=math.nan)
    direction: int = 0

    def __post_init__(self):
        if not self.kp0 > 0:
            raise ValueError("kp0 must be positive")
        if self.kff0 < 0:
            raise ValueError("kff0 must be non-negative")
        if math.isnan(self.kp):
            self.kp = self.kp0
        if math.isnan(self.kff):
            self.kff = self.kff0

    @classmethod
    def initial(cls, kp0: float, kff0: float, mode: Mode) -> "TunerState":
        kff0 = kff0 if Mode(mode).uses_ff else 0.0
        return cls(kp0=kp0, kff0=kff0)


def direction(d1: float, d2: float) -> int:
    """Direction modulator ``-sign(d1*d2)``: +1 approaching a U-turn, -1 leaving it."""
    prod = d1 * d2
    if prod > 0:
        return -1
    if prod < 0:
        return 1
    return 0


def raw_gain_delta(theta: float, d1: float, d2: float, p: ChannelParams, theta_max: float, D: int) -> float:
    if d2 < 0:
        a2 = -d2
        return p.m1 * theta * a2 / ((p.b1 + abs(d1)) * (p.c1 + a2)) * D
    if d2 > 0:
        return p.m2 * (theta_max - theta) * d2 / ((p.b2 + abs(d1)) * (p.c2 + d2)) * D
    return 0.0


def fb_stabilize(dkp: float, e: float, kp_prev: float, kp0: float, kappa: float, lam: float, D: int) -> float:
    """Scale a feedback adjustment by the error-driven and gain-centring factors."""
    if D == 0:
        return dkp
    f = max(1.0, abs(e)) ** (-kappa * D)
    g = (kp0 / kp_prev) ** (lam * D)
    return dkp * f * g


def ff_stabilize(dkff: float, mu: float, D: int, literal: bool = False) -> float:
    """Natural-gain-decreasing scaling of a feedforward adjustment.

    By default decreasing adjustments are multiplied by ``1 + mu`` and
    increasing ones are left alone. ``literal=True`` instead multiplies by
    ``(1 + (1 - D)/2 * mu) * D``, whose trailing ``D`` flips the sign of
    every decreasing adjustment.
    """
    if literal:
        return dkff * (1.0 + 0.5 * (1 - D) * mu) * D
    if D < 0:
        return dkff * (1.0 + mu)
    return dkff


def cutoff_update(g_prev: float, dg: float, g0: float) -> float:
    return max(g0, g_prev + dg)


def tuner_step(state: TunerState, params: TunerParams, theta: float, d1: float, d2: float, e: float) -> tuple[float, float]:
    """Advance both live gains by one tick; returns ``(K_P, K_ff)``."""
    mode = params.mode
    D = direction(d1, d2)
    state.direction = D
    if mode.adapts_fb:
        dkp = raw_gain_delta(theta, d1, d2, params.fb, params.theta_max, D)
        dkp = fb_stabilize(dkp, e, state.kp, state.kp0, params.kappa, params.lam, D)
        state.kp = cutoff_update(state.kp, dkp, state.kp0)
    if mode.adapts_ff:
        dkff = raw_gain_delta(theta, d1, d2, params.ff, params.theta_max, D)
        dkff = ff_stabilize(dkff, params.mu, D, params.literal_h)
        state.kff = cutoff_update(state.kff, dkff, state.kff0)
    return state.kp, state.kff
