"""Closed-loop episodes, hysteresis identification and tracking metrics."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .cascade import LoopState, inner_step, outer_step
from .config import ConfigError, RunConfig, config_from_dict, config_to_dict
from .plant import (
    PlantState,
    dead_zone_widths,
    loop_area,
    read_sensors,
    rest_state,
    state_at_angle,
    step_plant,
)
from .signals import DiffState, gen_reference, pseudo_diff_step
from .tuner import MODES, Mode, TunerState, tuner_step

TRACE_COLUMNS = ("t", "theta_ref", "theta_meas", "error", "p_ref", "p_meas", "u", "kp", "kff")


@dataclass
class EpisodeTrace:
    """Per-tick samples of one episode, one numpy array per column."""

    t: np.ndarray
    theta_ref: np.ndarray
    theta_meas: np.ndarray
    error: np.ndarray
    p_ref: np.ndarray
    p_meas: np.ndarray
    u: np.ndarray
    kp: np.ndarray
    kff: np.ndarray
    mode: str = ""

    def __len__(self):
        return len(self.t)

    def as_array(self) -> np.ndarray:
        return np.column_stack([getattr(self, c) for c in TRACE_COLUMNS])

    def equals(self, other: "EpisodeTrace") -> bool:
        return all(np.array_equal(getattr(self, c), getattr(other, c)) for c in TRACE_COLUMNS)


@dataclass(frozen=True)
class MetricsReport:
    e_max: float  # deg
    e_min: float  # deg
    abs_e_ave_pct: float  # % of reference peak-to-peak range
    rmse: float  # deg
    var: float  # deg^2

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))


METRIC_NAMES = tuple(f.name for f in fields(MetricsReport))


def run_episode(cfg: RunConfig, mode: Mode | str | None = None) -> EpisodeTrace:
    """Simulate one closed-loop tracking episode.

    Per tick: read sensors, update the reference pseudo-differentials, step
    the tuner, the outer loop and the inner loop, then advance the plant. The
    plant starts settled at the reference's initial angle, reached by loading
    from rest, so the first error is zero.
    """
    if mode is not None:
        cfg = cfg.with_mode(mode)
    plant_p = cfg.plant
    ctrl = cfg.controller
    tparams = cfg.tuner
    ref = cfg.reference
    dt = cfg.dt
    n = cfg.n_ticks
    rng = np.random.default_rng(cfg.seed)

    plant = state_at_angle(plant_p, gen_reference(ref, 0.0))
    loop = LoopState(p_ref=plant.P, u=plant_p.u_neutral)
    diff = DiffState(smoothing=cfg.smoothing)
    tuner = TunerState.initial(ctrl.outer.kp, ctrl.kff0, tparams.mode)
    p_min, p_max, u0 = plant_p.p_min, plant_p.p_max, plant_p.u_neutral

    cols = np.empty((n, len(TRACE_COLUMNS)))
    for k in range(n):
        t = min(k * dt, ref.duration)
        theta_meas, p_meas = read_sensors(plant, plant_p, rng)
        theta_d, d1, d2 = pseudo_diff_step(diff, gen_reference(ref, t), dt)
        e = theta_d - theta_meas
        kp, kff = tuner_step(tuner, tparams, theta_d, d1, d2, e)
        p_ref = outer_step(loop, theta_d, theta_meas, d1, kp, kff, ctrl, dt, p_min, p_max)
        u = inner_step(loop, p_ref, p_meas, ctrl.inner, dt, u0)
        cols[k] = (k * dt, theta_d, theta_meas, e, p_ref, p_meas, u, kp, kff)
        plant = step_plant(plant, u, dt, plant_p)
    return EpisodeTrace(*cols.T.copy(), mode=tparams.mode.value)


@dataclass
class LoopTable:
    """Pressure/angle pairs recorded while driving a pressure triangle."""

    t: np.ndarray
    pressure: np.ndarray
    angle: np.ndarray
    p_ref: np.ndarray

    def area(self) -> float:
        return loop_area(self.pressure, self.angle)

    def dead_zones(self, threshold: float = 0.05) -> tuple[float, float]:
        """``(upper, lower)`` dead-zone widths in kPa."""
        return dead_zone_widths(self.pressure, self.angle, threshold)


def identify_hysteresis(cfg: RunConfig) -> LoopTable:
    """Drive the configured pressure triangle through the inner loop alone.

    The outer loop is bypassed: the triangle is the inner-loop pressure
    reference. The plant starts at rest.
    """
    ref = cfg.identify.reference()
    plant_p = cfg.plant
    dt = cfg.dt
    n = int(round(ref.duration / dt)) + 1
    rng = np.random.default_rng(cfg.seed)
    plant: PlantState = rest_state(plant_p)
    loop = LoopState(p_ref=0.0, u=plant_p.u_neutral)
    out = np.empty((n, 4))
    for k in range(n):
        t = min(k * dt, ref.duration)
        theta_meas, p_meas = read_sensors(plant, plant_p, rng)
        p_ref = gen_reference(ref, t)
        u = inner_step(loop, p_ref, p_meas, cfg.controller.inner, dt, plant_p.u_neutral)
        out[k] = (k * dt, p_meas, theta_meas, p_ref)
        plant = step_plant(plant, u, dt, plant_p)
    return LoopTable(*out.T.copy())


def compute_metrics(trace: EpisodeTrace) -> MetricsReport:
    """Tracking statistics of a trace.

    ``abs_e_ave_pct`` is the mean absolute error as a percentage of the
    reference's peak-to-peak range; ``var`` is the population variance.
    """
    e = np.asarray(trace.error, dtype=float)
    if e.size == 0:
        raise ValueError("empty trace")
    ref = np.asarray(trace.theta_ref, dtype=float)
    span = float(ref.max() - ref.min())
    mean_abs = float(np.mean(np.abs(e)))
    if span > 0:
        pct = 100.0 * mean_abs / span
    else:
        pct = 0.0 if mean_abs == 0 else math.inf
    return MetricsReport(
        e_max=float(e.max()),
        e_min=float(e.min()),
        abs_e_ave_pct=pct,
        rmse=float(np.sqrt(np.mean(e * e))),
        var=float(np.var(e)),
    )


@dataclass
class Comparison:
    """Metrics per method, in the order the methods were requested."""

    reports: dict[str, MetricsReport]
    traces: dict[str, EpisodeTrace]

    def best(self) -> dict[str, str]:
        """Best method per metric: largest ``e_min`` (closest to zero from below), smallest otherwise."""
        out = {}
        for name in METRIC_NAMES:
            vals = {m: getattr(r, name) for m, r in self.reports.items()}
            if name == "e_min":
                out[name] = max(vals, key=lambda m: vals[m])
            else:
                out[name] = min(vals, key=lambda m: abs(vals[m]))
        return out

    def ranking(self, metric: str = "rmse") -> list[str]:
        return sorted(self.reports, key=lambda m: abs(getattr(self.reports[m], metric)))

    def table(self) -> str:
        """Plain-text table; the best value in each column is starred."""
        best = self.best()
        header = ["method", "e_max[deg]", "e_min[deg]", "|e|_ave[%]", "RMSE[deg]", "Var[deg2]"]
        rows = [header]
        for method, rep in self.reports.items():
            cells = [method]
            for name in METRIC_NAMES:
                mark = "*" if best[name] == method else " "
                cells.append(f"{getattr(rep, name):.4g}{mark}")
            rows.append(cells)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows)


def compare_methods(cfg: RunConfig, modes=MODES, workers: int | None = None) -> Comparison:
    """Run one episode per mode on a shared plant, reference and seed.

    With ``workers`` > 1 the episodes run on a thread pool; results are
    keyed in the requested mode order either way.
    """
    modes = [Mode(m) for m in modes]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(lambda m: run_episode(cfg, m), modes))
    else:
        traces = [run_episode(cfg, m) for m in modes]
    return Comparison(
        reports={m.value: compute_metrics(tr) for m, tr in zip(modes, traces)},
        traces={m.value: tr for m, tr in zip(modes, traces)},
    )


def sweep(cfg: RunConfig, key: str, values, mode: Mode | str | None = None) -> list[tuple[float, MetricsReport]]:
    """Metrics of one episode per value of a dotted config key, e.g. ``tuner.m_fb``."""
    section, _, name = key.partition(".")
    results = []
    for value in values:
        doc = config_to_dict(cfg)
        if section not in doc or name not in doc[section]:
            raise ConfigError(key, "unknown key")
        doc[section][name] = value
        swept = config_from_dict(doc)
        results.append((value, compute_metrics(run_episode(swept, mode))))
    return results

