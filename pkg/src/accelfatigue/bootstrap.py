"""Partial-sampling (bootstrap) moment clouds and the skewness-kurtosis fatigue distance.

A cloud is built by drawing many subsamples of one recording, computing the
moment vector of each, and summarising the resulting points. Its shape in
the (skewness, excess kurtosis) plane is described by the eigenvalues of the
2x2 sample covariance: ``elongation = sqrt(lmax / lmin)`` and
``size = (lmax * lmin) ** 0.25``.

The rest reference is the analytic chi-square(k) position
``(sqrt(8 / k), 12 / k)``; for k = 3 that is where the standardized squared
magnitude of three independent Gaussian axes sits.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import rng as rngmod
from .errors import ConfigInvalid, DegenerateDistribution, TooFewSamples
from .moments import channel_values, moment_rows

MODES = ("without_replacement", "with_replacement")
MIN_VALUES = 8
# Resamples are evaluated in fixed-size blocks; block boundaries never depend
# on the worker count, so serial and threaded runs do identical arithmetic.
BLOCK = 32


class CloudPoint(NamedTuple):
    std: float
    skewness: float
    exkurtosis: float


@dataclass(frozen=True)
class BootstrapConfig:
    resamples: int = 1000
    fraction: float = 0.5
    mode: str = "without_replacement"
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.resamples, bool) or not isinstance(self.resamples, (int, np.integer)):
            raise ConfigInvalid("resamples must be an integer")
        if self.resamples < 2:
            raise ConfigInvalid(f"resamples must be >= 2, got {self.resamples}")
        if not (isinstance(self.fraction, (int, float)) and 0.0 < self.fraction <= 1.0):
            raise ConfigInvalid(f"fraction must be in (0, 1], got {self.fraction!r}")
        if self.mode not in MODES:
            raise ConfigInvalid(f"mode must be one of {MODES}, got {self.mode!r}")
        rngmod.check_seed(self.seed)

    def subsample_size(self, n: int) -> int:
        # Rounding guard so that e.g. 0.3 * 10 gives 3, not 4.
        return math.ceil(round(self.fraction * n, 9))

    def as_dict(self) -> dict:
        return {
            "resamples": int(self.resamples),
            "fraction": float(self.fraction),
            "mode": self.mode,
            "seed": int(self.seed),
        }


@dataclass(frozen=True)
class RestReference:
    skewness: float
    exkurtosis: float
    k: int = 3
    source: str = "chi-square"

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "k": self.k,
            "skewness": self.skewness,
            "exkurtosis": self.exkurtosis,
        }


@dataclass(frozen=True, eq=False)
class BootstrapCloud:
    """Moment cloud of a bootstrap run.

    ``points`` is an ``(resamples, 3)`` array whose columns follow
    :class:`CloudPoint` (std, skewness, exkurtosis), in resample-index order.
    """

    points: np.ndarray
    centroid: CloudPoint
    cov2: np.ndarray
    eigvals: tuple[float, float]
    elongation: float
    size: float
    subsample_size: int
    config: BootstrapConfig = field(default_factory=BootstrapConfig)

    def cloud_points(self) -> list[CloudPoint]:
        return [CloudPoint(*map(float, p)) for p in self.points]

    def summary(self) -> dict:
        return {
            "resamples": int(self.points.shape[0]),
            "subsample_size": self.subsample_size,
            "centroid": {
                "std": self.centroid.std,
                "skewness": self.centroid.skewness,
                "exkurtosis": self.centroid.exkurtosis,
            },
            "cov2": [[float(v) for v in row] for row in self.cov2],
            "eigvals": [self.eigvals[0], self.eigvals[1]],
            "elongation": self.elongation,
            "size": self.size,
        }


@dataclass(frozen=True, eq=False)
class FatigueReport:
    reference: RestReference
    cloud: BootstrapCloud
    distance: float
    channel: str = "mag2"
    standardize_axes: bool = True

    def as_dict(self, include_points: bool = False) -> dict:
        out = {
            "channel": self.channel,
            "standardize_axes": self.standardize_axes,
            "bootstrap": self.cloud.config.as_dict(),
            "reference": self.reference.as_dict(),
            "cloud": self.cloud.summary(),
            "distance": self.distance,
        }
        if include_points:
            out["points"] = [[float(v) for v in p] for p in self.cloud.points]
        return out


def _draw(n: int, m: int, mode: str, seed: int, index: int) -> np.ndarray:
    g = rngmod.stream(seed, index, rngmod.BOOTSTRAP)
    if mode == "without_replacement":
        # Draw order within a subsample cannot affect its moments.
        return g.choice(n, size=m, replace=False, shuffle=False)
    return g.integers(0, n, size=m)


def _block(xs: np.ndarray, m: int, cfg: BootstrapConfig, start: int, stop: int) -> np.ndarray:
    n = xs.size
    values = np.empty((stop - start, m))
    for j, i in enumerate(range(start, stop)):
        np.take(xs, _draw(n, m, cfg.mode, cfg.seed, i), out=values[j])
    rows = moment_rows(values)
    zero = rows[:, 1] == 0.0
    if zero.any():
        raise DegenerateDistribution("subsample has zero variance", resample=start + int(np.argmax(zero)))
    return rows[:, 1:]


def eig2(cov: np.ndarray) -> tuple[float, float]:
    """Eigenvalues ``(lmax, lmin)`` of a symmetric 2x2 matrix, clamped at 0."""
    a, b, d = float(cov[0, 0]), float(cov[0, 1]), float(cov[1, 1])
    half_tr = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), b)
    return max(half_tr + rad, 0.0), max(half_tr - rad, 0.0)


def shape_descriptors(skew_kurt: np.ndarray):
    """Covariance, eigenvalues, elongation and size of a 2-D point set."""
    cov = np.cov(skew_kurt, rowvar=False)
    lmax, lmin = eig2(cov)
    if lmax == 0.0:
        elongation = 1.0
    elif lmin == 0.0:
        elongation = math.inf
    else:
        elongation = math.sqrt(lmax / lmin)
    # Guard the ratio against rounding pushing it a hair below 1.
    elongation = max(elongation, 1.0)
    size = (lmax * lmin) ** 0.25
    return cov, (lmax, lmin), elongation, size


def bootstrap_cloud(xs, config: BootstrapConfig | None = None, workers: int | None = None) -> BootstrapCloud:
    """Draw ``config.resamples`` subsamples of ``xs`` and summarise their moments.

    Resample ``i`` uses the random stream ``(config.seed, i)`` only, so the
    output is bit-identical for any ``workers`` value.
    """
    config = config or BootstrapConfig()
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if xs.ndim != 1:
        raise ValueError("expected a 1-D sequence of scalars")
    n = xs.size
    if n < MIN_VALUES:
        raise TooFewSamples(f"bootstrap needs at least {MIN_VALUES} values, got {n}")
    m = config.subsample_size(n)
    if m < 4:
        raise ConfigInvalid(f"subsample size {m} is below 4; raise fraction or supply more data")

    bounds = [(s, min(s + BLOCK, config.resamples)) for s in range(0, config.resamples, BLOCK)]
    if workers is None:
        workers = min(4, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _block(xs, m, config, *b), bounds))
    else:
        parts = [_block(xs, m, config, *b) for b in bounds]
    points = np.concatenate(parts)
    points.flags.writeable = False

    centroid = CloudPoint(*(float(v) for v in points.mean(axis=0)))
    cov, eig, elongation, size = shape_descriptors(points[:, 1:])
    return BootstrapCloud(points, centroid, cov, eig, elongation, size, m, config)


def rest_reference(k: int = 3) -> RestReference:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ConfigInvalid(f"degrees of freedom must be an integer >= 1, got {k!r}")
    return RestReference(math.sqrt(8.0 / k), 12.0 / k, int(k))


def _skew_kurt(obj) -> tuple[float, float]:
    if isinstance(obj, BootstrapCloud):
        obj = obj.centroid
    if hasattr(obj, "skewness"):
        return float(obj.skewness), float(obj.exkurtosis)
    s, k = obj
    return float(s), float(k)


def fatigue_distance(cloud, reference) -> float:
    """Euclidean distance between two points in the (skewness, exkurtosis) plane.

    Either argument may be a cloud (its centroid is used), a reference, any
    object with ``skewness``/``exkurtosis`` attributes, or a plain pair.
    """
    s1, k1 = _skew_kurt(cloud)
    s2, k2 = _skew_kurt(reference)
    return math.hypot(s1 - s2, k1 - k2)


def fatigue_report(
    series,
    config: BootstrapConfig | None = None,
    k: int = 3,
    channel: str = "mag2",
    standardize_axes: bool = True,
    reference=None,
    workers: int | None = None,
) -> FatigueReport:
    """Full pipeline: channel values -> bootstrap cloud -> distance to the rest point.

    ``reference`` substitutes a measured baseline (anything accepted by
    :func:`fatigue_distance`) for the analytic chi-square(k) point.
    """
    config = config or BootstrapConfig()
    if reference is None:
        reference = rest_reference(k)
    elif not isinstance(reference, RestReference):
        s, kk = _skew_kurt(reference)
        reference = RestReference(s, kk, k, source="baseline")
    values = channel_values(series, channel, standardize_axes)
    cloud = bootstrap_cloud(values, config, workers=workers)
    return FatigueReport(reference, cloud, fatigue_distance(cloud, reference), channel, standardize_axes)
