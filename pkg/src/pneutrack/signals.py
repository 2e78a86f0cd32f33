"""Reference trajectories, pressure waveforms and pseudo-differentials.

Three waveform families are supported:

``multi_sine``
    ``offset + sum(a * sin(2*pi*f*t + phi))``.
``piecewise_sine``
    Randomised bending profile: a chain of raised-cosine transitions between
    plateau levels drawn (from ``seed``) inside ``offset +/- amplitude``. One
    term ``(amplitude, 1/segment_length, 0)`` describes it.
``triangular_pressure``
    Periodic triangle ``offset + a * tri(f*t + phi/2pi)`` where ``tri`` rises
    0 -> 1 on the first half period and falls back on the second.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi


class ReferenceKind(str, Enum):
    MULTI_SINE = "multi_sine"
    PIECEWISE_SINE = "piecewise_sine"
    TRIANGULAR_PRESSURE = "triangular_pressure"


@dataclass(frozen=True)
class ReferenceSpec:
    """Parametric reference; amplitudes in deg (bending) or kPa (pressure)."""

    kind: ReferenceKind = ReferenceKind.MULTI_SINE
    duration: float = 30.0
    terms: tuple[tuple[float, float, float], ...] = ()
    offset: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", ReferenceKind(self.kind))
        object.__setattr__(
            self, "terms", tuple(tuple(float(x) for x in term) for term in self.terms)
        )
        if self.duration <= 0 or not math.isfinite(self.duration):
            raise ValueError(f"duration must be positive, got {self.duration}")
        for term in self.terms:
            if len(term) != 3:
                raise ValueError(f"terms must be (amplitude, frequency, phase), got {term}")
        if self.kind is not ReferenceKind.MULTI_SINE and len(self.terms) != 1:
            raise ValueError(f"{self.kind.value} takes exactly one term")
        if self.kind is not ReferenceKind.MULTI_SINE and self.terms[0][1] <= 0:
            raise ValueError(f"{self.kind.value} needs a positive frequency")

    @property
    def is_pressure(self) -> bool:
        return self.kind is ReferenceKind.TRIANGULAR_PRESSURE


def _tri(x: float) -> float:
    frac = x - math.floor(x)
    return 2.0 * frac if frac <= 0.5 else 2.0 * (1.0 - frac)


@lru_cache(maxsize=64)
def _plateaus(seed: int, count: int, low: float, high: float) -> tuple[float, ...]:
    rng = np.random.default_rng(seed)
    levels = rng.uniform(low, high, size=count)
    levels[0] = low
    return tuple(float(v) for v in levels)


def gen_reference(spec: ReferenceSpec, t: float) -> float:
    """Evaluate the reference at time ``t`` (seconds).

    The value is a pure function of ``(spec, t)``, so sampling rate never
    changes what is returned at a given timestamp.
    """
    if not 0.0 <= t <= spec.duration:
        raise ValueError(f"t={t} outside [0, {spec.duration}]")
    if spec.kind is ReferenceKind.MULTI_SINE:
        value = spec.offset
        for amp, freq, phase in spec.terms:
            value += amp * math.sin(TWO_PI * freq * t + phase)
        return value
    amp, freq, phase = spec.terms[0]
    if spec.kind is ReferenceKind.TRIANGULAR_PRESSURE:
        return spec.offset + amp * _tri(freq * t + phase / TWO_PI)
    # piecewise_sine: segment k blends plateau k into plateau k+1
    seg = 1.0 / freq
    count = int(math.ceil(spec.duration / seg)) + 2
    levels = _plateaus(spec.seed, count, spec.offset - amp, spec.offset + amp)
    k = int(t // seg)
    s = t / seg - k
    blend = 0.5 - 0.5 * math.cos(math.pi * s)
    return levels[k] + (levels[k + 1] - levels[k]) * blend


def sample_reference(spec: ReferenceSpec, dt: float) -> np.ndarray:
    """Reference sampled on the tick grid ``k*dt``, ``k = 0..round(duration/dt)``."""
    n = int(round(spec.duration / dt)) + 1
    return np.array([gen_reference(spec, min(k * dt, spec.duration)) for k in range(n)])


def rapid_reference(duration: float = 30.0) -> ReferenceSpec:
    """Default short reference: three sines (10 s, 6 s, 3.3 s) over 5-55 deg.

    Every term starts at its trough so the profile begins at rest at 5 deg.
    """
    half = -math.pi / 2
    return ReferenceSpec(
        kind=ReferenceKind.MULTI_SINE,
        duration=duration,
        terms=((12.0, 1 / 10.0, half), (8.0, 1 / 6.0, half), (5.0, 1 / 3.3, half)),
        offset=30.0,
    )


def gradual_reference(duration: float = 120.0) -> ReferenceSpec:
    """Default long reference: two sines (60 s, 35 s) over 5-55 deg."""
    half = -math.pi / 2
    return ReferenceSpec(
        kind=ReferenceKind.MULTI_SINE,
        duration=duration,
        terms=((15.0, 1 / 60.0, half), (10.0, 1 / 35.0, half)),
        offset=30.0,
    )


def triangle_pressure(peak: float = 400.0, duration: float = 40.0, base: float = 0.0) -> ReferenceSpec:
    """Single triangle ``base -> base+peak -> base`` spanning ``duration``."""
    return ReferenceSpec(
        kind=ReferenceKind.TRIANGULAR_PRESSURE,
        duration=duration,
        terms=((peak, 1.0 / duration, 0.0),),
        offset=base,
    )


PRESETS = {
    "rapid30": rapid_reference,
    "gradual120": gradual_reference,
}


@dataclass
class DiffState:
    """Running estimator for the first and second reference derivatives.

    Each order is a backward difference over ``dt`` followed by first-order
    exponential smoothing with coefficient ``smoothing``; order 2 differences
    the smoothed order-1 stream. Orders 1 and 2 read zero for the first two
    ticks.
    """

    smoothing: float = 0.15
    prev: float = 0.0
    d1: float = 0.0
    d2: float = 0.0
    ticks: int = 0
    warmup: int = field(default=2, repr=False)

    def __post_init__(self):
        if not 0.0 < self.smoothing <= 1.0:
            raise ValueError(f"smoothing must lie in (0, 1], got {self.smoothing}")


def pseudo_diff_step(state: DiffState, sample: float, dt: float) -> tuple[float, float, float]:
    """Feed one sample; returns ``(value, first, second)`` pseudo-differentials."""
    if not math.isfinite(sample):
        raise ValueError(f"non-finite reference sample {sample!r}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if state.ticks == 0:
        state.prev = sample
    alpha = state.smoothing
    d1 = state.d1 + alpha * ((sample - state.prev) / dt - state.d1)
    state.d2 += alpha * ((d1 - state.d1) / dt - state.d2)
    state.d1 = d1
    state.prev = sample
    state.ticks += 1
    if state.ticks <= state.warmup:
        return sample, 0.0, 0.0
    return sample, state.d1, state.d2
