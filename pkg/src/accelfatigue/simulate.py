"""Seeded synthetic accelerometer recordings with known ground truth.

Three regimes are generated:

- ``rest``: gravity plus independent Gaussian noise on each axis, so the
  standardized squared magnitude is exactly chi-square(3) distributed.
- ``fatigue``: the rest noise plus sparse one-sample jerks with exponential
  amplitude along random directions, plus a low-frequency oscillation whose
  amplitude ramps linearly from zero to its end value over the recording.
- ``activity``: tier-dependent Gaussian noise; the active tier adds a gait
  sinusoid.

Default parameters live in ``data/sim_defaults_v1.json`` and are frozen so
that downstream checks stay stable.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from . import rng as rngmod
from .errors import ConfigInvalid
from .ingest import Series

STATES = ("rest", "fatigue", "activity")
TIERS = ("active", "moderate", "passive")
MAX_RATE_HZ = 1000.0

# Sub-stream indices under the simulation purpose tag.
_NOISE, _JERKS = 0, 1


@lru_cache(maxsize=None)
def _load_defaults() -> dict:
    text = resources.files("accelfatigue").joinpath("data/sim_defaults_v1.json").read_text()
    return json.loads(text)


def default_params() -> dict:
    return copy.deepcopy(_load_defaults())


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


@dataclass(frozen=True)
class SimSpec:
    state: str
    duration_ms: int
    rate_hz: float
    seed: int = 0
    tier: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.state not in STATES:
            raise ConfigInvalid(f"state must be one of {STATES}, got {self.state!r}")
        if self.state == "activity" and self.tier not in TIERS:
            raise ConfigInvalid(f"activity state needs tier in {TIERS}, got {self.tier!r}")
        if not self.duration_ms > 0:
            raise ConfigInvalid("duration_ms must be positive")
        if not (self.rate_hz > 0 and self.rate_hz <= MAX_RATE_HZ):
            raise ConfigInvalid(f"rate_hz must be in (0, {MAX_RATE_HZ:g}] for millisecond timestamps")
        rngmod.check_seed(self.seed)
        if self.n_samples < 1:
            raise ConfigInvalid("duration shorter than one sample period")

    @property
    def n_samples(self) -> int:
        return int(math.floor(self.duration_ms * self.rate_hz / 1000.0 + 1e-9))

    @property
    def label(self) -> str:
        return self.tier if self.state == "activity" else self.state

    def resolved_params(self) -> dict:
        """Parameter block for this state, defaults overlaid with ``params``."""
        defaults = _load_defaults()
        block = _merge(defaults[self.state], self.params)
        block.setdefault("gravity", defaults["gravity"])
        return block


def _timestamps(spec: SimSpec) -> np.ndarray:
    i = np.arange(spec.n_samples, dtype=np.float64)
    return np.round(i * (1000.0 / spec.rate_hz)).astype(np.int64)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if v.shape != (3,) or norm == 0.0:
        raise ConfigInvalid(f"direction must be a non-zero 3-vector, got {v.tolist()}")
    return v / norm


def _base_noise(spec, sigma: float, gravity) -> np.ndarray:
    if sigma < 0:
        raise ConfigInvalid("sigma must be non-negative")
    g = rngmod.stream(spec.seed, _NOISE, rngmod.SIMULATE)
    acc = g.normal(0.0, sigma, size=(spec.n_samples, 3))
    acc += np.asarray(gravity, dtype=np.float64)
    return acc


def _series(spec: SimSpec, acc: np.ndarray) -> Series:
    return Series(_timestamps(spec), acc, (spec.label,) * spec.n_samples)


def _check_state(spec: SimSpec, *states: str) -> None:
    if spec.state not in states:
        raise ConfigInvalid(f"spec state {spec.state!r} does not match generator")


def gen_rest(spec: SimSpec) -> Series:
    _check_state(spec, "rest")
    p = spec.resolved_params()
    return _series(spec, _base_noise(spec, float(p["sigma"]), p["gravity"]))


def gen_fatigue(spec: SimSpec) -> Series:
    _check_state(spec, "fatigue")
    p = spec.resolved_params()
    acc = _base_noise(spec, float(p["sigma"]), p["gravity"])
    n = spec.n_samples
    t_s = _timestamps(spec) / 1000.0

    rate = float(p["jerk_rate_hz"])
    mean_amp = float(p["jerk_mean_amplitude"])
    if rate < 0 or mean_amp < 0:
        raise ConfigInvalid("jerk rate and amplitude must be non-negative")
    if rate > 0 and mean_amp > 0:
        g = rngmod.stream(spec.seed, _JERKS, rngmod.SIMULATE)
        count = int(g.poisson(rate * n / spec.rate_hz))
        where = g.integers(0, n, size=count)
        amp = g.exponential(mean_amp, size=count)
        dirs = g.normal(size=(count, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        np.add.at(acc, where, amp[:, None] * dirs)

    end_amp = float(p["tremor_amplitude_end"])
    if end_amp < 0:
        raise ConfigInvalid("tremor amplitude must be non-negative")
    if end_amp > 0 and n > 1:
        ramp = end_amp * (t_s - t_s[0]) / (t_s[-1] - t_s[0])
        wave = ramp * np.sin(2.0 * np.pi * float(p["tremor_freq_hz"]) * t_s)
        acc += wave[:, None] * _unit(p["tremor_direction"])
    return _series(spec, acc)


def gen_activity(spec: SimSpec) -> Series:
    _check_state(spec, "activity")
    p = spec.resolved_params()
    sigma = p["sigma"]
    sigma = float(sigma[spec.tier] if isinstance(sigma, dict) else sigma)
    acc = _base_noise(spec, sigma, p["gravity"])
    if spec.tier == "active":
        t_s = _timestamps(spec) / 1000.0
        gait = float(p["gait_amplitude"]) * np.sin(2.0 * np.pi * float(p["gait_freq_hz"]) * t_s)
        acc += gait[:, None] * _unit(p["gait_direction"])
    return _series(spec, acc)


def generate(spec: SimSpec) -> Series:
    return {"rest": gen_rest, "fatigue": gen_fatigue, "activity": gen_activity}[spec.state](spec)
