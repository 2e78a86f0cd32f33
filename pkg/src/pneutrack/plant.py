"""Simulated pneumatic bending actuator.

Valve voltage drives chamber pressure through a linear flow integrator, a
bank of asymmetric play operators maps pressure to a quasi-static bending
angle, and a first-order lag produces the measured angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

# play-operator bank shipped as the default plant
DEFAULT_R_LOAD = (0.0, 30.0, 55.0, 80.0, 105.0)
DEFAULT_R_UNLOAD = (0.0, 50.0, 90.0, 130.0, 170.0)
# relative weight profile; scaled so that the loading branch reaches
# 60 deg at 500 kPa (see calibrated_weights)
DEFAULT_WEIGHT_PROFILE = (0.2, 1.0, 1.0, 1.0, 1.0)


def calibrated_weights(profile, r_unload, q, p_max, theta_max):
    """Scale a weight profile so the major loading branch hits ``theta_max`` at ``p_max``."""
    span = sum(w * max(0.0, p_max - r) for w, r in zip(profile, r_unload))
    if span <= 0:
        raise ValueError("weight profile produces no hysteretic contribution")
    k = (theta_max - q * p_max) / span
    return tuple(w * k for w in profile)


@dataclass(frozen=True)
class PlantParams:
    p_min: float = 0.0  # kPa
    p_max: float = 500.0  # kPa
    valve_gain: float = 80.0  # kPa/(V s)
    u_neutral: float = 5.0  # V
    weights: tuple[float, ...] = calibrated_weights(
        DEFAULT_WEIGHT_PROFILE, DEFAULT_R_UNLOAD, 0.02, 500.0, 60.0
    )  # deg/kPa
    r_load: tuple[float, ...] = DEFAULT_R_LOAD  # kPa
    r_unload: tuple[float, ...] = DEFAULT_R_UNLOAD  # kPa
    linear_gain: float = 0.02  # deg/kPa
    tau: float = 0.05  # s
    noise_std: float = 0.0  # deg
    quantization: float = 0.0  # deg

    def __post_init__(self):
        for name in ("weights", "r_load", "r_unload"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self):
        if not self.p_max > self.p_min:
            raise ValueError("p_max must exceed p_min")
        if not len(self.weights) == len(self.r_load) == len(self.r_unload):
            raise ValueError("weights, r_load and r_unload must have equal length")
        for rl, ru in zip(self.r_load, self.r_unload):
            if rl < 0 or ru < rl:
                raise ValueError(f"radii must satisfy r_unload >= r_load >= 0, got ({rl}, {ru})")
        if any(w < 0 for w in self.weights) or self.linear_gain < 0:
            raise ValueError("weights and linear_gain must be non-negative")
        if self.valve_gain <= 0 or self.tau <= 0:
            raise ValueError("valve_gain and tau must be positive")
        if self.noise_std < 0 or self.quantization < 0:
            raise ValueError("noise_std and quantization must be non-negative")

    @property
    def n_operators(self) -> int:
        return len(self.weights)

    def without_hysteresis(self) -> "PlantParams":
        """Same plant with every play radius set to zero."""
        zeros = (0.0,) * self.n_operators
        return replace(self, r_load=zeros, r_unload=zeros)


@dataclass(frozen=True)
class PlantState:
    P: float = 0.0
    y: tuple[float, ...] = field(default_factory=tuple)
    theta_qs: float = 0.0
    theta: float = 0.0
    t: float = 0.0


def play_update(y_prev: float, P: float, r_load: float, r_unload: float) -> float:
    """Asymmetric play operator: keep ``y`` inside ``[P - r_unload, P + r_load]``."""
    return max(P - r_unload, min(P + r_load, y_prev))


def hysteresis_output(params: PlantParams, state: PlantState) -> float:
    """Quasi-static angle ``q*P + sum(w_j * y_j)``."""
    return params.linear_gain * state.P + sum(w * y for w, y in zip(params.weights, state.y))


def rest_state(params: PlantParams) -> PlantState:
    return PlantState(P=0.0, y=(0.0,) * params.n_operators)


def loading_angle(params: PlantParams, P: float) -> float:
    """Quasi-static angle reached by monotone loading from rest to ``P``."""
    return params.linear_gain * P + sum(
        w * max(0.0, P - r) for w, r in zip(params.weights, params.r_unload)
    )


def state_at_angle(params: PlantParams, angle: float) -> PlantState:
    """Settled state reached by loading from rest until the angle equals ``angle``.

    The loading branch is piecewise linear with knots at the unloading radii,
    so the inverse is exact interpolation.
    """
    knots = sorted({params.p_min, params.p_max, *(r for r in params.r_unload if params.p_min < r < params.p_max)})
    angles = [loading_angle(params, p) for p in knots]
    if not angles[0] <= angle <= angles[-1]:
        raise ValueError(f"angle {angle} not reachable on the loading branch [{angles[0]}, {angles[-1]}]")
    P = float(np.interp(angle, angles, knots))
    state = rest_state(params)
    y = tuple(play_update(yj, P, rl, ru) for yj, rl, ru in zip(state.y, params.r_load, params.r_unload))
    state = PlantState(P=P, y=y)
    theta_qs = hysteresis_output(params, state)
    return PlantState(P=P, y=y, theta_qs=theta_qs, theta=theta_qs)


def apply_pressure(state: PlantState, P: float, params: PlantParams) -> PlantState:
    """Move the play operators to pressure ``P`` (no lag, no valve)."""
    y = tuple(play_update(yj, P, rl, ru) for yj, rl, ru in zip(state.y, params.r_load, params.r_unload))
    theta_qs = params.linear_gain * P + sum(w * yj for w, yj in zip(params.weights, y))
    return PlantState(P=P, y=y, theta_qs=theta_qs, theta=state.theta, t=state.t)


def step_plant(state: PlantState, u: float, dt: float, params: PlantParams) -> PlantState:
    """Advance one explicit-Euler step under valve voltage ``u``."""
    if not math.isfinite(u):
        raise ValueError(f"non-finite valve voltage {u!r}")
    P = state.P + params.valve_gain * (u - params.u_neutral) * dt
    P = min(params.p_max, max(params.p_min, P))
    y = tuple(play_update(yj, P, rl, ru) for yj, rl, ru in zip(state.y, params.r_load, params.r_unload))
    theta_qs = params.linear_gain * P + sum(w * yj for w, yj in zip(params.weights, y))
    theta = state.theta + (dt / params.tau) * (theta_qs - state.theta)
    return PlantState(P=P, y=y, theta_qs=theta_qs, theta=theta, t=state.t + dt)


def read_sensors(state: PlantState, params: PlantParams, rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Measured ``(angle, pressure)``; noise and quantisation apply to the angle."""
    theta = state.theta
    if params.noise_std > 0:
        if rng is None:
            raise ValueError("noise_std > 0 requires an rng")
        theta += params.noise_std * rng.standard_normal()
    if params.quantization > 0:
        theta = round(theta / params.quantization) * params.quantization
    return theta, state.P


def quasi_static_response(params: PlantParams, pressures, state: PlantState | None = None) -> np.ndarray:
    """Quasi-static angles along a prescribed pressure sequence."""
    state = rest_state(params) if state is None else state
    out = np.empty(len(pressures))
    for k, P in enumerate(pressures):
        state = apply_pressure(state, float(P), params)
        out[k] = state.theta_qs
    return out


def dead_zone_widths(pressure, angle, threshold: float = 0.05) -> tuple[float, float]:
    """Pressure excursions needed to move the angle after each transition of a single triangle.

    ``pressure``/``angle`` trace one rise-then-fall cycle from the depressurised
    state. The lower width is measured from the start (bottom transition), the
    upper width from the pressure peak. Movement means a change of at least
    ``threshold`` times the loop's angle span.

    Returns
    -------
    (upper, lower) : widths in kPa
    """
    pressure = np.asarray(pressure, dtype=float)
    angle = np.asarray(angle, dtype=float)
    span = angle.max() - angle.min()
    if span <= 0:
        return 0.0, 0.0
    delta = threshold * span

    def width(i0, sl):
        moved = np.nonzero(np.abs(angle[sl] - angle[i0]) >= delta)[0]
        if moved.size == 0:
            return math.nan
        return abs(pressure[sl][moved[0]] - pressure[i0])

    top = int(np.argmax(pressure))
    lower = width(0, slice(0, top + 1))
    upper = width(top, slice(top, None))
    return upper, lower


def loop_area(pressure, angle) -> float:
    """Signed area enclosed by a (pressure, angle) loop, positive when unloading lies above loading."""
    p = np.asarray(pressure, dtype=float)
    a = np.asarray(angle, dtype=float)
    # shoelace; loading left-to-right below the unloading branch runs counter-clockwise
    return 0.5 * float(np.sum(p * np.roll(a, -1) - np.roll(p, -1) * a))
