import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from pneutrack.plant import (
    PlantParams,
    PlantState,
    apply_pressure,
    dead_zone_widths,
    hysteresis_output,
    loading_angle,
    loop_area,
    play_update,
    quasi_static_response,
    read_sensors,
    rest_state,
    state_at_angle,
    step_plant,
)

DEFAULT = PlantParams()


def triangle(peak=400.0, n=2001):
    up = np.linspace(0, peak, n)
    return np.concatenate([up, up[-2::-1]])


def test_play_rest_point():
    assert play_update(0.0, 0.0, 13.0, 71.0) == 0.0


def test_play_first_loading():
    assert play_update(0.0, 100.0, 10.0, 40.0) == oracles.PLAY_FIRST


def test_play_stays_inside_band():
    y = play_update(0.0, 200.0, 10.0, 40.0)
    assert y == 160.0
    assert play_update(y, 180.0, 10.0, 40.0) == oracles.PLAY_INSIDE_BAND


@given(
    y=st.floats(-1e3, 1e3),
    p=st.floats(-1e3, 1e3),
    rl=st.floats(0, 200),
    extra=st.floats(0, 200),
)
def test_play_band_and_idempotence(y, p, rl, extra):
    ru = rl + extra
    out = play_update(y, p, rl, ru)
    assert p - ru <= out <= p + rl
    assert play_update(out, p, rl, ru) == out


def test_all_zero_state_is_zero_angle():
    assert hysteresis_output(DEFAULT, rest_state(DEFAULT)) == 0.0


def test_full_load_angle_matches_closed_form():
    closed = DEFAULT.linear_gain * 500 + sum(w * (500 - r) for w, r in zip(DEFAULT.weights, DEFAULT.r_unload))
    assert loading_angle(DEFAULT, 500.0) == pytest.approx(closed)
    assert abs(closed - oracles.THETA_MAX) <= oracles.THETA_TOL * oracles.THETA_MAX


def test_params_validation():
    with pytest.raises(ValueError):
        PlantParams(r_load=(0, 60, 55, 80, 105))  # r_load > r_unload on one operator
    with pytest.raises(ValueError):
        PlantParams(weights=(-1, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        PlantParams(weights=(1, 1))
    with pytest.raises(ValueError):
        PlantParams(tau=0)


def test_triangle_loop_has_positive_area_and_unloading_above():
    p = triangle()
    a = quasi_static_response(DEFAULT, p)
    assert loop_area(p, a) > 0
    n = len(p) // 2
    mid_up = np.interp(200, p[: n + 1], a[: n + 1])
    mid_down = np.interp(200, p[n:][::-1], a[n:][::-1])
    assert mid_down > mid_up


def test_loading_branch_monotone():
    a = quasi_static_response(DEFAULT, np.linspace(0, 500, 1001))
    assert np.all(np.diff(a) >= 0)


def test_dead_zone_upper_wider_than_lower():
    p = triangle()
    upper, lower = dead_zone_widths(p, quasi_static_response(DEFAULT, p))
    assert upper > lower > 0


def test_loop_closure_after_first_cycle():
    cyc = np.concatenate([np.linspace(0, 450, 901), np.linspace(450, 0, 901)[1:]])
    s = rest_state(DEFAULT)
    ends = []
    for _ in range(4):
        for p in cyc:
            s = apply_pressure(s, float(p), DEFAULT)
        ends.append(s.y)
    assert ends[1] == ends[2] == ends[3]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-100, 700), min_size=1, max_size=60))
def test_boundedness(pressures):
    s = rest_state(DEFAULT)
    for p in pressures:
        s = apply_pressure(s, min(500.0, max(0.0, p)), DEFAULT)
        assert 0.0 <= s.theta_qs <= 60 * 1.02
        for yj, rl, ru in zip(s.y, DEFAULT.r_load, DEFAULT.r_unload):
            assert s.P - ru <= yj <= s.P + rl


def test_state_at_angle_inverts_loading_branch():
    for angle in (0.0, 5.0, 17.3, 42.0, 59.0):
        s = state_at_angle(DEFAULT, angle)
        assert s.theta == pytest.approx(angle, abs=1e-9)
        assert loading_angle(DEFAULT, s.P) == pytest.approx(angle, abs=1e-9)
    with pytest.raises(ValueError):
        state_at_angle(DEFAULT, 70.0)


def test_neutral_valve_holds_pressure():
    s = PlantState(P=123.0, y=(123.0,) * 5)
    for _ in range(1000):
        s = step_plant(s, 5.0, 0.002, DEFAULT)
    assert s.P == 123.0


def test_valve_integration():
    s = rest_state(DEFAULT)
    for _ in range(500):
        s = step_plant(s, 6.0, 0.002, DEFAULT)
    assert s.P == pytest.approx(oracles.VALVE_ONE_SECOND, rel=1e-12)
    assert s.t == pytest.approx(1.0)


def test_pressure_clamped():
    s = rest_state(DEFAULT)
    for _ in range(2000):
        s = step_plant(s, 10.0, 0.002, DEFAULT)
    assert s.P == 500.0
    for _ in range(2000):
        s = step_plant(s, 0.0, 0.002, DEFAULT)
    assert s.P == 0.0


def test_lag_after_three_tau():
    s = apply_pressure(rest_state(DEFAULT), 300.0, DEFAULT)
    gap0 = s.theta_qs - s.theta
    for _ in range(int(round(3 * DEFAULT.tau / 0.002))):
        s = step_plant(s, 5.0, 0.002, DEFAULT)
    assert abs(s.theta_qs - s.theta) < oracles.LAG_3TAU_BOUND * gap0


def test_non_finite_voltage_rejected():
    with pytest.raises(ValueError):
        step_plant(rest_state(DEFAULT), float("nan"), 0.002, DEFAULT)


def test_sensors_pass_through_and_quantise():
    s = PlantState(P=42.0, y=(0.0,) * 5, theta=12.34)
    assert read_sensors(s, DEFAULT) == (12.34, 42.0)
    q = PlantParams(quantization=0.1)
    assert read_sensors(s, q)[0] == pytest.approx(oracles.QUANTISED)


def test_sensor_noise_statistics_and_reproducibility():
    p = PlantParams(noise_std=0.02)
    s = PlantState(P=0.0, y=(0.0,) * 5, theta=10.0)
    rng = np.random.default_rng(11)
    draws = np.array([read_sensors(s, p, rng)[0] for _ in range(100_000)])
    assert np.var(draws) == pytest.approx(oracles.NOISE_VAR, rel=0.05)
    rng2 = np.random.default_rng(11)
    assert [read_sensors(s, p, rng2)[0] for _ in range(10)] == list(draws[:10])


def test_without_hysteresis_has_no_loop():
    p = triangle()
    a = quasi_static_response(DEFAULT.without_hysteresis(), p)
    assert abs(loop_area(p, a)) < 1e-6
