"""Run configuration: defaults, validation, TOML load and dump.

The file is sectioned key-value text (TOML). Every key is optional; missing
keys take the defaults below and unknown keys are rejected. Dotted keys such
as ``tuner.kappa = 0.5`` and ``[tuner]`` sections are interchangeable.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .cascade import OUTER_FORMS, ControllerParams, PidGains
from .plant import PlantParams
from .signals import PRESETS, ReferenceKind, ReferenceSpec, gen_reference, rapid_reference, triangle_pressure
from .tuner import ChannelParams, Mode, TunerParams


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class IdentifySpec:
    peak: float = 400.0  # kPa above base
    duration: float = 40.0  # s
    base: float = 0.0  # kPa

    def reference(self) -> ReferenceSpec:
        return triangle_pressure(self.peak, self.duration, self.base)


@dataclass(frozen=True)
class OutputPaths:
    trace: str = "trace.csv"
    metrics: str = "metrics.csv"
    loop: str = "loop.csv"


@dataclass(frozen=True)
class RunConfig:
    plant: PlantParams = field(default_factory=PlantParams)
    controller: ControllerParams = field(default_factory=ControllerParams)
    tuner: TunerParams = field(default_factory=TunerParams)
    reference: ReferenceSpec = field(default_factory=rapid_reference)
    identify: IdentifySpec = field(default_factory=IdentifySpec)
    output: OutputPaths = field(default_factory=OutputPaths)
    dt: float = 0.002
    seed: int = 0
    smoothing: float = 0.15

    @property
    def n_ticks(self) -> int:
        return int(round(self.reference.duration / self.dt)) + 1

    def with_mode(self, mode) -> "RunConfig":
        return replace(self, tuner=replace(self.tuner, mode=Mode(mode)))

    def with_reference(self, reference: ReferenceSpec) -> "RunConfig":
        return replace(self, reference=reference)


def _finite(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _num(pred, text):
    return (lambda v: _finite(v) and pred(v), text)


_ANY = _num(lambda v: True, "finite number")
_POS = _num(lambda v: v > 0, "> 0")
_NONNEG = _num(lambda v: v >= 0, ">= 0")
_UNIT = _num(lambda v: 0 < v <= 1, "in (0, 1]")
_INT = (lambda v: isinstance(v, int) and not isinstance(v, bool) and v >= 0, "unsigned integer")
_BOOL = (lambda v: isinstance(v, bool), "true or false")


def _choice(options):
    return (lambda v: v in options, "one of " + ", ".join(options))


def _num_list(pred, text):
    return (lambda v: isinstance(v, list) and all(_finite(x) and pred(x) for x in v), f"list of numbers {text}")


_TERMS = (
    lambda v: isinstance(v, list) and all(isinstance(t, list) and len(t) == 3 and all(_finite(x) for x in t) for t in v),
    "list of [amplitude, frequency, phase] triples",
)

# key -> (check, constraint text)
SCHEMA = {
    "run": {"dt": _POS, "seed": _INT},
    "signal": {"smoothing": _UNIT},
    "plant": {
        "p_min": _NONNEG,
        "p_max": _POS,
        "valve_gain": _POS,
        "u_neutral": _num(lambda v: 0 <= v <= 10, "in [0, 10] V"),
        "weights": _num_list(lambda v: v >= 0, ">= 0"),
        "r_load": _num_list(lambda v: v >= 0, ">= 0"),
        "r_unload": _num_list(lambda v: v >= 0, ">= 0"),
        "linear_gain": _NONNEG,
        "tau": _POS,
        "noise_std": _NONNEG,
        "quantization": _NONNEG,
    },
    "controller": {
        "outer_kp": _POS,
        "outer_ki": _NONNEG,
        "outer_kd": _NONNEG,
        "inner_kp": _NONNEG,
        "inner_ki": _NONNEG,
        "inner_kd": _NONNEG,
        "kff0": _NONNEG,
        "outer_form": _choice(OUTER_FORMS),
    },
    "tuner": {
        "mode": _choice([m.value for m in Mode]),
        "m_fb": _POS,
        "b_fb": _POS,
        "c_fb": _POS,
        "m_ff": _POS,
        "b_ff": _POS,
        "c_ff": _POS,
        "m2_fb": _POS,
        "b2_fb": _POS,
        "c2_fb": _POS,
        "m2_ff": _POS,
        "b2_ff": _POS,
        "c2_ff": _POS,
        "theta_max": _POS,
        "kappa": _NONNEG,
        "lambda": _NONNEG,
        "mu": _NONNEG,
        "literal_h": _BOOL,
    },
    "reference": {
        "preset": _choice(sorted(PRESETS)),
        "kind": _choice([k.value for k in ReferenceKind]),
        "duration": _POS,
        "offset": _ANY,
        "terms": _TERMS,
        "seed": _INT,
    },
    "identify": {"peak": _NONNEG, "duration": _POS, "base": _NONNEG},
    "output": {
        "trace": (lambda v: isinstance(v, str) and v != "", "non-empty string"),
        "metrics": (lambda v: isinstance(v, str) and v != "", "non-empty string"),
        "loop": (lambda v: isinstance(v, str) and v != "", "non-empty string"),
    },
}


def _flatten(doc: dict) -> dict[str, object]:
    flat = {}
    for section, body in doc.items():
        if section not in SCHEMA:
            raise ConfigError(section, "unknown section")
        if not isinstance(body, dict):
            raise ConfigError(section, "expected a table of keys")
        for key, value in body.items():
            full = f"{section}.{key}"
            if key not in SCHEMA[section]:
                raise ConfigError(full, "unknown key")
            check, text = SCHEMA[section][key]
            if not check(value):
                raise ConfigError(full, f"{value!r} violates constraint: {text}")
            flat[full] = value
    return flat


def config_from_dict(doc: dict) -> RunConfig:
    """Build and validate a :class:`RunConfig` from parsed TOML tables."""
    flat = _flatten(doc)
    base = RunConfig()
    get = lambda key, default: flat.get(key, default)  # noqa: E731

    p = base.plant
    plant_kw = dict(
        p_min=float(get("plant.p_min", p.p_min)),
        p_max=float(get("plant.p_max", p.p_max)),
        valve_gain=float(get("plant.valve_gain", p.valve_gain)),
        u_neutral=float(get("plant.u_neutral", p.u_neutral)),
        weights=tuple(get("plant.weights", p.weights)),
        r_load=tuple(get("plant.r_load", p.r_load)),
        r_unload=tuple(get("plant.r_unload", p.r_unload)),
        linear_gain=float(get("plant.linear_gain", p.linear_gain)),
        tau=float(get("plant.tau", p.tau)),
        noise_std=float(get("plant.noise_std", p.noise_std)),
        quantization=float(get("plant.quantization", p.quantization)),
    )
    if not plant_kw["p_max"] > plant_kw["p_min"]:
        raise ConfigError("plant.p_max", "must exceed plant.p_min")
    if not len(plant_kw["weights"]) == len(plant_kw["r_load"]) == len(plant_kw["r_unload"]):
        raise ConfigError("plant.weights", "plant.weights, plant.r_load and plant.r_unload must have equal length")
    for rl, ru in zip(plant_kw["r_load"], plant_kw["r_unload"]):
        if ru < rl:
            raise ConfigError("plant.r_unload", f"each unloading radius must be >= its loading radius ({ru} < {rl})")
    plant = PlantParams(**plant_kw)

    c = base.controller
    controller = ControllerParams(
        outer=PidGains(
            float(get("controller.outer_kp", c.outer.kp)),
            float(get("controller.outer_ki", c.outer.ki)),
            float(get("controller.outer_kd", c.outer.kd)),
        ),
        inner=PidGains(
            float(get("controller.inner_kp", c.inner.kp)),
            float(get("controller.inner_ki", c.inner.ki)),
            float(get("controller.inner_kd", c.inner.kd)),
        ),
        kff0=float(get("controller.kff0", c.kff0)),
        outer_form=get("controller.outer_form", c.outer_form),
    )

    t = base.tuner

    def channel(tag, default: ChannelParams) -> ChannelParams:
        m = float(get(f"tuner.m_{tag}", default.m1))
        b = float(get(f"tuner.b_{tag}", default.b1))
        cc = float(get(f"tuner.c_{tag}", default.c1))
        return ChannelParams(
            m, b, cc,
            float(get(f"tuner.m2_{tag}", m)),
            float(get(f"tuner.b2_{tag}", b)),
            float(get(f"tuner.c2_{tag}", cc)),
        )

    tuner = TunerParams(
        fb=channel("fb", t.fb),
        ff=channel("ff", t.ff),
        theta_max=float(get("tuner.theta_max", t.theta_max)),
        kappa=float(get("tuner.kappa", t.kappa)),
        lam=float(get("tuner.lambda", t.lam)),
        mu=float(get("tuner.mu", t.mu)),
        mode=Mode(get("tuner.mode", t.mode.value)),
        literal_h=get("tuner.literal_h", t.literal_h),
    )

    reference = _reference_from_flat(flat, base.reference)

    i = base.identify
    identify = IdentifySpec(
        peak=float(get("identify.peak", i.peak)),
        duration=float(get("identify.duration", i.duration)),
        base=float(get("identify.base", i.base)),
    )
    o = base.output
    output = OutputPaths(
        trace=get("output.trace", o.trace),
        metrics=get("output.metrics", o.metrics),
        loop=get("output.loop", o.loop),
    )
    cfg = RunConfig(
        plant=plant,
        controller=controller,
        tuner=tuner,
        reference=reference,
        identify=identify,
        output=output,
        dt=float(get("run.dt", base.dt)),
        seed=int(get("run.seed", base.seed)),
        smoothing=float(get("signal.smoothing", base.smoothing)),
    )
    validate(cfg)
    return cfg


def _reference_from_flat(flat: dict, default: ReferenceSpec) -> ReferenceSpec:
    if "reference.preset" in flat:
        explicit = [k for k in flat if k.startswith("reference.") and k not in ("reference.preset", "reference.duration")]
        if explicit:
            raise ConfigError(explicit[0], "cannot be combined with reference.preset")
        factory = PRESETS[flat["reference.preset"]]
        return factory(float(flat["reference.duration"])) if "reference.duration" in flat else factory()
    try:
        return ReferenceSpec(
            kind=flat.get("reference.kind", default.kind.value),
            duration=float(flat.get("reference.duration", default.duration)),
            terms=tuple(tuple(t) for t in flat.get("reference.terms", default.terms)),
            offset=float(flat.get("reference.offset", default.offset)),
            seed=int(flat.get("reference.seed", default.seed)),
        )
    except ValueError as exc:
        raise ConfigError("reference.terms", str(exc)) from None


def validate(cfg: RunConfig) -> None:
    """Cross-field checks that single-key constraints cannot express."""
    if not cfg.dt > 0:
        raise ConfigError("run.dt", "must be > 0")
    ticks = cfg.reference.duration / cfg.dt
    if abs(ticks - round(ticks)) > 1e-6:
        raise ConfigError("reference.duration", f"duration/dt = {ticks} is not an integer tick count")
    if cfg.reference.is_pressure:
        raise ConfigError("reference.kind", "tracking needs a bending reference; triangular_pressure is for identify")
    lo, hi = _reference_range(cfg.reference, cfg.dt)
    if lo < 0 or hi > cfg.tuner.theta_max:
        raise ConfigError(
            "reference.terms",
            f"reference spans [{lo:.4g}, {hi:.4g}] deg, outside [0, tuner.theta_max={cfg.tuner.theta_max}]",
        )
    idt = cfg.identify.duration / cfg.dt
    if abs(idt - round(idt)) > 1e-6:
        raise ConfigError("identify.duration", f"duration/dt = {idt} is not an integer tick count")
    if cfg.identify.base + cfg.identify.peak > cfg.plant.p_max or cfg.identify.base < cfg.plant.p_min:
        raise ConfigError("identify.peak", "triangle must stay within [plant.p_min, plant.p_max]")


def _reference_range(ref: ReferenceSpec, dt: float) -> tuple[float, float]:
    n = int(round(ref.duration / dt))
    lo = math.inf
    hi = -math.inf
    for k in range(n + 1):
        v = gen_reference(ref, min(k * dt, ref.duration))
        lo = min(lo, v)
        hi = max(hi, v)
    return lo, hi


def load_config(path) -> RunConfig:
    """Read a TOML config file; raises :class:`ConfigError` on any problem."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror or exc}") from None
    return loads_config(text)


def loads_config(text: str) -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"parse error: {exc}") from None
    return config_from_dict(doc)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("nan" if math.isnan(value) else ("inf" if value > 0 else "-inf"))
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot format {value!r}")


def config_to_dict(cfg: RunConfig) -> dict[str, dict]:
    p, c, t, r = cfg.plant, cfg.controller, cfg.tuner, cfg.reference
    return {
        "run": {"dt": cfg.dt, "seed": cfg.seed},
        "signal": {"smoothing": cfg.smoothing},
        "plant": {
            "p_min": p.p_min,
            "p_max": p.p_max,
            "valve_gain": p.valve_gain,
            "u_neutral": p.u_neutral,
            "weights": list(p.weights),
            "r_load": list(p.r_load),
            "r_unload": list(p.r_unload),
            "linear_gain": p.linear_gain,
            "tau": p.tau,
            "noise_std": p.noise_std,
            "quantization": p.quantization,
        },
        "controller": {
            "outer_kp": c.outer.kp,
            "outer_ki": c.outer.ki,
            "outer_kd": c.outer.kd,
            "inner_kp": c.inner.kp,
            "inner_ki": c.inner.ki,
            "inner_kd": c.inner.kd,
            "kff0": c.kff0,
            "outer_form": c.outer_form,
        },
        "tuner": {
            "mode": t.mode.value,
            "m_fb": t.fb.m1, "b_fb": t.fb.b1, "c_fb": t.fb.c1,
            "m2_fb": t.fb.m2, "b2_fb": t.fb.b2, "c2_fb": t.fb.c2,
            "m_ff": t.ff.m1, "b_ff": t.ff.b1, "c_ff": t.ff.c1,
            "m2_ff": t.ff.m2, "b2_ff": t.ff.b2, "c2_ff": t.ff.c2,
            "theta_max": t.theta_max,
            "kappa": t.kappa,
            "lambda": t.lam,
            "mu": t.mu,
            "literal_h": t.literal_h,
        },
        "reference": {
            "kind": r.kind.value,
            "duration": r.duration,
            "offset": r.offset,
            "terms": [list(term) for term in r.terms],
            "seed": r.seed,
        },
        "identify": {"peak": cfg.identify.peak, "duration": cfg.identify.duration, "base": cfg.identify.base},
        "output": {"trace": cfg.output.trace, "metrics": cfg.output.metrics, "loop": cfg.output.loop},
    }


def dumps_config(cfg: RunConfig) -> str:
    """Serialise every effective setting; ``loads_config`` inverts it exactly."""
    lines = []
    for section, body in config_to_dict(cfg).items():
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {_fmt(value)}" for key, value in body.items())
        lines.append("")
    return "\n".join(lines)
