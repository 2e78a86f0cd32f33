"""CSV emission and parsing for traces, metrics, sweeps and hysteresis loops.

Floats are written with 9 significant digits, so re-running an identical
configuration reproduces byte-identical files.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .harness import TRACE_COLUMNS, EpisodeTrace, LoopTable, MetricsReport

TRACE_HEADER = ("t_s", "theta_ref_deg", "theta_meas_deg", "error_deg", "p_ref_kpa", "p_meas_kpa", "u_v", "kp_gain", "kff_gain")
METRICS_HEADER = ("method", "e_max_deg", "e_min_deg", "abs_e_ave_pct", "rmse_deg", "var_deg2")
LOOP_HEADER = ("t_s", "p_meas_kpa", "theta_meas_deg", "p_ref_kpa")
SWEEP_HEADER = ("param", "value", "method") + METRICS_HEADER[1:]


def fmt(x: float) -> str:
    return format(float(x), ".9g")


def _write(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _read(path, header):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        got = tuple(next(r))
        if got != tuple(header):
            raise ValueError(f"{path}: unexpected header {got}")
        return list(r)


def write_trace(trace: EpisodeTrace, path) -> Path:
    data = trace.as_array()
    return _write(path, TRACE_HEADER, ([fmt(x) for x in row] for row in data))


def read_trace(path) -> EpisodeTrace:
    rows = _read(path, TRACE_HEADER)
    data = np.array(rows, dtype=float).reshape(-1, len(TRACE_HEADER))
    return EpisodeTrace(**{c: data[:, i].copy() for i, c in enumerate(TRACE_COLUMNS)})


def write_metrics(reports: dict[str, MetricsReport], path) -> Path:
    rows = ([method] + [fmt(v) for v in rep.as_tuple()] for method, rep in reports.items())
    return _write(path, METRICS_HEADER, rows)


def read_metrics(path) -> dict[str, MetricsReport]:
    out = {}
    for row in _read(path, METRICS_HEADER):
        out[row[0]] = MetricsReport(*(float(x) for x in row[1:]))
    return out


def write_sweep(param: str, method: str, results, path) -> Path:
    rows = ([param, fmt(value), method] + [fmt(v) for v in rep.as_tuple()] for value, rep in results)
    return _write(path, SWEEP_HEADER, rows)


def read_sweep(path) -> list[tuple[str, float, str, MetricsReport]]:
    return [
        (row[0], float(row[1]), row[2], MetricsReport(*(float(x) for x in row[3:])))
        for row in _read(path, SWEEP_HEADER)
    ]


def write_loop(table: LoopTable, path) -> Path:
    data = np.column_stack([table.t, table.pressure, table.angle, table.p_ref])
    return _write(path, LOOP_HEADER, ([fmt(x) for x in row] for row in data))


def read_loop(path) -> LoopTable:
    data = np.array(_read(path, LOOP_HEADER), dtype=float).reshape(-1, len(LOOP_HEADER))
    return LoopTable(*(data[:, i].copy() for i in range(len(LOOP_HEADER))))

