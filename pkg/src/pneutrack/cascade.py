"""Two-loop cascade: bending-angle outer loop, pressure inner loop.

The outer loop builds the inner-loop pressure reference incrementally,
``P_d(t) = P_d(t-1) + dP_ff(t) + dP_fb(t)``, with ``dP_ff = K_ff * dtheta_d/dt``
added once per tick. How ``dP_fb`` is produced is selected by ``outer_form``:

* ``"accumulate"`` (default): ``dP_fb`` is the PID law evaluated on the
  current error, ``K_P*e + K_I*sum(e*dt) + K_D*de/dt``. ``P_d`` integrates it.
* ``"velocity"``: ``dP_fb`` is the velocity-form increment
  ``K_P*(e - e1) + K_I*e*dt + K_D*(e - 2*e1 + e2)/dt`` so that ``P_d`` itself
  follows the positional PID law.

The inner loop is a positional PID around the neutral valve voltage with
conditional-integration anti-windup.
"""
from __future__ import annotations

from dataclasses import dataclass

U_MIN = 0.0
U_MAX = 10.0

OUTER_FORMS = ("accumulate", "velocity")


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self):
        if min(self.kp, self.ki, self.kd) < 0:
            raise ValueError(f"PID gains must be non-negative, got {self}")


# Tuned cascade gains of the reference hardware
INNER_GAINS = PidGains(kp=8.0e-2, ki=2.0e-5, kd=0.0)  # V/kPa, V/(kPa s), V s/kPa
OUTER_GAINS = PidGains(kp=1.0e-1, ki=1.0e-5, kd=0.0)  # kPa/deg, kPa/(deg s), kPa s/deg
FEEDFORWARD_GAIN = 5.0e-3  # kPa s/deg


@dataclass(frozen=True)
class ControllerParams:
    outer: PidGains = OUTER_GAINS
    inner: PidGains = INNER_GAINS
    kff0: float = FEEDFORWARD_GAIN
    outer_form: str = "accumulate"

    def __post_init__(self):
        if self.kff0 < 0:
            raise ValueError("kff0 must be non-negative")
        if self.outer_form not in OUTER_FORMS:
            raise ValueError(f"outer_form must be one of {OUTER_FORMS}, got {self.outer_form!r}")


@dataclass
class LoopState:
    """Controller memory carried between ticks."""

    p_ref: float = 0.0  # P_d(t-1), kPa
    e1: float = 0.0  # outer error at t-1, deg
    e2: float = 0.0  # outer error at t-2, deg
    outer_integral: float = 0.0  # deg s
    inner_integral: float = 0.0  # kPa s
    inner_e1: float = 0.0  # kPa
    u: float = 5.0  # V


def ff_delta(kff: float, d1: float) -> float:
    """Feedforward pressure increment for one tick."""
    return kff * d1


def fb_delta(state: LoopState, e: float, gains: PidGains, dt: float) -> float:
    """Velocity-form PID increment. Does not mutate ``state``."""
    return (
        gains.kp * (e - state.e1)
        + gains.ki * e * dt
        + gains.kd * (e - 2.0 * state.e1 + state.e2) / dt
    )


def positional_pid(integral: float, e: float, e1: float, gains: PidGains, dt: float) -> float:
    """Positional PID output given the integral already including ``e*dt``."""
    return gains.kp * e + gains.ki * integral + gains.kd * (e - e1) / dt


def outer_step(
    state: LoopState,
    theta_ref: float,
    theta_meas: float,
    d1: float,
    kp: float,
    kff: float,
    params: ControllerParams,
    dt: float,
    p_min: float,
    p_max: float,
) -> float:
    """One outer-loop tick; updates ``state`` and returns the clamped ``P_d``.

    ``kp`` is the live proportional gain from the tuner and replaces
    ``params.outer.kp``.
    """
    e = theta_ref - theta_meas
    gains = PidGains(kp, params.outer.ki, params.outer.kd)
    if params.outer_form == "velocity":
        dfb = fb_delta(state, e, gains, dt)
    else:
        state.outer_integral += e * dt
        dfb = positional_pid(state.outer_integral, e, state.e1, gains, dt)
    p_ref = state.p_ref + ff_delta(kff, d1) + dfb
    p_ref = min(p_max, max(p_min, p_ref))
    state.e2 = state.e1
    state.e1 = e
    state.p_ref = p_ref
    return p_ref


def inner_step(
    state: LoopState,
    p_ref: float,
    p_meas: float,
    gains: PidGains,
    dt: float,
    u_neutral: float = 5.0,
) -> float:
    """Positional pressure PID; returns the valve voltage clamped to [0, 10] V.

    The integrator is frozen whenever the unclamped output is saturated and
    the error would drive it further into saturation.
    """
    e = p_ref - p_meas
    deriv = gains.kd * (e - state.inner_e1) / dt
    trial = state.inner_integral + e * dt
    u = u_neutral + gains.kp * e + gains.ki * trial + deriv
    if (u > U_MAX and e > 0) or (u < U_MIN and e < 0):
        u = u_neutral + gains.kp * e + gains.ki * state.inner_integral + deriv
    else:
        state.inner_integral = trial
    u = min(U_MAX, max(U_MIN, u))
    state.inner_e1 = e
    state.u = u
    return u
