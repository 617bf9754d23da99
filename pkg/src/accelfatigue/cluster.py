"""Activity-tier classification by k-means over window moment features."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as rngmod
from .errors import ConfigInvalid, DegenerateDistribution, TieOnStd, TooFewDistinctPoints
from .moments import CHANNELS, channel_values, moment_vector

STATS = ("mean", "std", "skewness", "exkurtosis")
# Std profile across the squared magnitude and the three axes. The mag2
# std comes first because tier ordering reads the first std feature.
DEFAULT_FEATURES = ("std:mag2", "std:x", "std:y", "std:z")
MOMENTS3_FEATURES = ("std:mag2", "skewness:mag2", "exkurtosis:mag2")
FEATURE_PRESETS = {"std-profile": DEFAULT_FEATURES, "moments3": MOMENTS3_FEATURES}
TIERS = ("active", "moderate", "passive")
DEFAULT_MAX_ITER = 200
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class FeatureVector:
    window_id: int
    features: tuple[float, ...]
    source_label: str | None = None


def parse_features(spec: str | Sequence[str]) -> tuple[str, ...]:
    """Resolve a preset name, a comma-separated list or a sequence of ``stat:channel``."""
    if isinstance(spec, str):
        if spec in FEATURE_PRESETS:
            return FEATURE_PRESETS[spec]
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    names = tuple(spec)
    if not names:
        raise ConfigInvalid("at least one feature is required")
    for name in names:
        stat, _, channel = name.partition(":")
        if stat not in STATS or channel not in CHANNELS:
            raise ConfigInvalid(
                f"feature {name!r} must be stat:channel with stat in {STATS} and channel in {CHANNELS}"
            )
    return names


def window_features(
    windows,
    features: Sequence[str] = DEFAULT_FEATURES,
    start_id: int = 0,
) -> list[FeatureVector]:
    """Moment features of each window.

    ``mag2`` here is the raw (unstandardized) squared magnitude: a
    standardized magnitude would have the same std in every window and carry
    no activity-level information.
    """
    names = parse_features(features)
    out = []
    for i, w in enumerate(windows):
        series = w.series if hasattr(w, "series") else w
        cache = {}
        row = []
        for name in names:
            stat, _, channel = name.partition(":")
            if channel not in cache:
                cache[channel] = moment_vector(channel_values(series, channel, standardize_axes=False))
            row.append(getattr(cache[channel], stat))
        labels = series.labels
        label = None
        if labels:
            values, counts = np.unique(np.array(labels, dtype=object).astype(str), return_counts=True)
            label = str(values[np.argmax(counts)])
        out.append(FeatureVector(start_id + i, tuple(float(v) for v in row), label))
    return out


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Result of :func:`kmeans`.

    ``centroids`` are reported in raw feature units; ``inertia`` and the
    ``inertia_history`` are measured in the standardized space where the
    distances were computed.
    """

    k: int
    centroids: np.ndarray
    assignments: dict[int, int]
    labels: np.ndarray
    inertia: float
    iterations: int
    inertia_history: tuple[float, ...]
    feature_names: tuple[str, ...] | None = None
    tier_map: dict[int, str] | None = None

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "features": list(self.feature_names) if self.feature_names else None,
            "centroids": [[float(v) for v in c] for c in self.centroids],
            "inertia": self.inertia,
            "iterations": self.iterations,
            "inertia_history": list(self.inertia_history),
            "tier_map": {str(c): t for c, t in sorted(self.tier_map.items())} if self.tier_map else None,
            "assignments": {str(w): int(c) for w, c in self.assignments.items()},
        }


def _sqdist(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _pick(candidates: np.ndarray, g: np.random.Generator) -> int:
    if candidates.size == 1:
        return int(candidates[0])
    return int(candidates[g.integers(candidates.size)])


def _init_centers(z: np.ndarray, k: int, g: np.random.Generator) -> list[int]:
    d_mean = np.einsum("ij,ij->i", z - z.mean(axis=0), z - z.mean(axis=0))
    chosen = [_pick(np.flatnonzero(d_mean == d_mean.min()), g)]
    nearest = _sqdist(z, z[chosen]).min(axis=1)
    while len(chosen) < k:
        nxt = _pick(np.flatnonzero(nearest == nearest.max()), g)
        chosen.append(nxt)
        nearest = np.minimum(nearest, _sqdist(z, z[[nxt]])[:, 0])
    return chosen


def kmeans(
    features,
    k: int = 3,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    feature_names: Sequence[str] | None = None,
) -> ClusterModel:
    """Lloyd's k-means on per-dimension standardized features.

    Initialization is greedy farthest-point: the first center is the point
    nearest the feature mean, each next one the point farthest from all
    chosen centers. The seed only breaks exact distance ties. An empty
    cluster takes over the point farthest from its current centroid.
    Iteration stops once no centroid moves by ``tol`` or more.
    """
    if isinstance(features, np.ndarray):
        ids = list(range(features.shape[0]))
        x = np.asarray(features, dtype=np.float64)
    else:
        features = list(features)
        ids = [f.window_id for f in features]
        x = np.array([f.features for f in features], dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise TooFewDistinctPoints("no feature vectors")
    if not np.isfinite(x).all():
        raise DegenerateDistribution("feature vectors contain non-finite values")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ConfigInvalid(f"k must be an integer >= 1, got {k!r}")
    if max_iter < 1:
        raise ConfigInvalid("max_iter must be >= 1")
    distinct = np.unique(x, axis=0).shape[0]
    if distinct < k:
        raise TooFewDistinctPoints(f"{distinct} distinct feature vectors for k={k}")

    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    sd[sd == 0.0] = 1.0
    z = (x - mu) / sd

    g = rngmod.stream(seed, 0, rngmod.CLUSTER)
    centers = z[_init_centers(z, k, g)].copy()
    history: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d = _sqdist(z, centers)
        labels = np.argmin(d, axis=1)
        for c in np.flatnonzero(np.bincount(labels, minlength=k) == 0):
            own = d[np.arange(len(z)), labels]
            # Only steal from clusters that keep at least one point.
            own[np.bincount(labels, minlength=k)[labels] <= 1] = -1.0
            far = int(np.argmax(own))
            labels[far] = c
            centers[c] = z[far]
        history.append(float(np.sum((z - centers[labels]) ** 2)))
        new = np.array([z[labels == c].mean(axis=0) for c in range(k)])
        shift = float(np.max(np.abs(new - centers)))
        centers = new
        if shift < tol:
            break

    d = _sqdist(z, centers)
    labels = np.argmin(d, axis=1)
    inertia = float(d[np.arange(len(z)), labels].sum())
    history.append(inertia)
    raw_centroids = centers * sd + mu
    model = ClusterModel(
        k=int(k),
        centroids=raw_centroids,
        assignments={wid: int(c) for wid, c in zip(ids, labels)},
        labels=labels,
        inertia=inertia,
        iterations=iterations,
        inertia_history=tuple(history),
        feature_names=tuple(feature_names) if feature_names is not None else None,
    )
    if k == 3:
        try:
            model = _with_tiers(model, tier_labels(model))
        except TieOnStd:
            pass
    return model


def _with_tiers(model: ClusterModel, tiers: dict[int, str]) -> ClusterModel:
    return ClusterModel(
        model.k,
        model.centroids,
        model.assignments,
        model.labels,
        model.inertia,
        model.iterations,
        model.inertia_history,
        model.feature_names,
        tiers,
    )


def _std_column(model: ClusterModel) -> int:
    names = model.feature_names
    if names is None:
        return 0
    for i, name in enumerate(names):
        if name.startswith("std:"):
            return i
    raise ConfigInvalid("tier labelling needs at least one std feature")


def tier_labels(model: ClusterModel) -> dict[int, str]:
    """Map clusters to tiers by descending centroid std: active, moderate, passive."""
    if model.k != 3:
        raise ConfigInvalid(f"tier labelling needs k = 3, got k = {model.k}")
    stds = model.centroids[:, _std_column(model)]
    if np.unique(stds).size < 3:
        raise TieOnStd(f"centroid std components tie: {stds.tolist()}")
    order = np.argsort(-stds)
    return {int(c): tier for c, tier in zip(order, TIERS)}


def purity(labels: Sequence[int], truth: Sequence) -> float:
    """Fraction of points whose cluster's majority ground-truth label matches their own."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    total = 0
    for c in np.unique(labels):
        _, counts = np.unique(truth[labels == c], return_counts=True)
        total += int(counts.max())
    return total / labels.size
