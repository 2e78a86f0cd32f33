import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pneutrack import RunConfig, compute_metrics, run_episode
from pneutrack import csvio
from pneutrack.config import ConfigError, config_from_dict, dumps_config, load_config, loads_config
from pneutrack.harness import LoopTable
from pneutrack.signals import rapid_reference
from pneutrack.tuner import Mode


def test_empty_file_gives_defaults(tmp_path):
    f = tmp_path / "empty.toml"
    f.write_text("")
    assert load_config(f) == RunConfig()


def test_round_trip_defaults():
    cfg = RunConfig()
    assert loads_config(dumps_config(cfg)) == cfg


def test_checked_in_default_config_matches(tmp_path):
    from pathlib import Path

    shipped = Path(__file__).parents[1] / "configs" / "default.toml"
    assert load_config(shipped) == RunConfig()


def test_dotted_and_sectioned_keys():
    a = loads_config("tuner.kappa = 2.0\ntuner.mode = 'fb_adaptive'\n")
    b = loads_config("[tuner]\nkappa = 2.0\nmode = 'fb_adaptive'\n")
    assert a == b
    assert a.tuner.kappa == 2.0 and a.tuner.mode is Mode.FB_ADAPTIVE


@pytest.mark.parametrize(
    "text,key",
    [
        ("tuner.kappa = -1", "tuner.kappa"),
        ("tuner.bogus = 1", "tuner.bogus"),
        ("nosuch.x = 1", "nosuch"),
        ("run.dt = 0", "run.dt"),
        ("run.dt = 0.0007", "reference.duration"),
        ("controller.inner_kp = -0.1", "controller.inner_kp"),
        ("reference.offset = 50", "reference.terms"),
        ("reference.preset = 'rapid30'\nreference.offset = 3", "reference.offset"),
        ("identify.peak = 600", "identify.peak"),
        ("plant.r_load = [0, 60, 55, 80, 105]", "plant"),
        ("this is not toml", "<file>"),
    ],
)
def test_validation_errors_name_key(text, key):
    with pytest.raises(ConfigError) as info:
        loads_config(text)
    assert info.value.key.startswith(key)


def test_kappa_error_names_constraint():
    with pytest.raises(ConfigError, match=">= 0"):
        loads_config("tuner.kappa = -1")


def test_preset_selection():
    cfg = loads_config("reference.preset = 'gradual120'")
    assert cfg.reference.duration == 120.0
    assert cfg.n_ticks == 60001


@settings(max_examples=25, deadline=None)
@given(
    kappa=st.floats(0, 5),
    mu=st.floats(0, 2),
    seed=st.integers(0, 2**31),
    kp=st.floats(1e-3, 1.0),
)
def test_round_trip_property(kappa, mu, seed, kp):
    doc = {"tuner": {"kappa": kappa, "mu": mu}, "run": {"seed": seed}, "controller": {"outer_kp": kp}}
    cfg = config_from_dict(doc)
    assert loads_config(dumps_config(cfg)) == cfg


def short_trace():
    return run_episode(RunConfig(reference=rapid_reference(1.0)))


def test_trace_csv_header_and_round_trip(tmp_path):
    tr = short_trace()
    path = csvio.write_trace(tr, tmp_path / "t.csv")
    first = path.read_text().splitlines()[0]
    assert first == "t_s,theta_ref_deg,theta_meas_deg,error_deg,p_ref_kpa,p_meas_kpa,u_v,kp_gain,kff_gain"
    back = csvio.read_trace(path)
    assert len(back) == len(tr)
    assert np.allclose(back.as_array(), tr.as_array(), rtol=1e-8, atol=1e-12)


def test_metrics_csv_header_and_round_trip(tmp_path):
    rep = compute_metrics(short_trace())
    path = csvio.write_metrics({"two_dof": rep}, tmp_path / "m.csv")
    assert path.read_text().splitlines()[0] == "method,e_max_deg,e_min_deg,abs_e_ave_pct,rmse_deg,var_deg2"
    back = csvio.read_metrics(path)["two_dof"]
    assert np.allclose(back.as_tuple(), rep.as_tuple(), rtol=1e-8)


def test_nine_significant_digits():
    assert csvio.fmt(math.pi) == "3.14159265"
    assert csvio.fmt(1.0) == "1"
    assert csvio.fmt(-1.23456789012e-7) == "-1.23456789e-07"


def test_loop_and_sweep_round_trip(tmp_path):
    lt = LoopTable(np.array([0.0, 1.0]), np.array([0.0, 2.5]), np.array([0.0, 0.1]), np.array([0.0, 3.0]))
    back = csvio.read_loop(csvio.write_loop(lt, tmp_path / "l.csv"))
    assert np.array_equal(back.pressure, lt.pressure)
    rep = compute_metrics(short_trace())
    rows = csvio.read_sweep(csvio.write_sweep("tuner.mu", "two_dof", [(0.5, rep)], tmp_path / "s.csv"))
    assert rows[0][:3] == ("tuner.mu", 0.5, "two_dof")


def test_bad_header_rejected(tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        csvio.read_metrics(f)
