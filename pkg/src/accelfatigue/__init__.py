"""Moment, bootstrap, clustering and spectral analysis of accelerometer series
for estimating accumulated fatigue."""

__version__ = "0.1.0"

from .bootstrap import (  # noqa: E402
    BootstrapCloud,
    BootstrapConfig,
    CloudPoint,
    FatigueReport,
    RestReference,
    bootstrap_cloud,
    fatigue_distance,
    fatigue_report,
    rest_reference,
)
from .cluster import ClusterModel, FeatureVector, kmeans, purity, tier_labels, window_features  # noqa: E402
from .ingest import Sample, Series, Window, parse_series, read_series, segment_windows, series_to_csv  # noqa: E402
from .moments import (  # noqa: E402
    MomentVector,
    central_moments,
    moment_vector,
    squared_magnitude_series,
    standardize,
)
from .simulate import SimSpec, gen_activity, gen_fatigue, gen_rest  # noqa: E402
from .spectral import Periodogram, Spectrogram, TremorIndex, periodogram, spectrogram, tremor_index  # noqa: E402

__all__ = [
    "BootstrapCloud",
    "BootstrapConfig",
    "CloudPoint",
    "ClusterModel",
    "FatigueReport",
    "FeatureVector",
    "MomentVector",
    "Periodogram",
    "RestReference",
    "Sample",
    "Series",
    "SimSpec",
    "Spectrogram",
    "TremorIndex",
    "Window",
    "bootstrap_cloud",
    "central_moments",
    "fatigue_distance",
    "fatigue_report",
    "gen_activity",
    "gen_fatigue",
    "gen_rest",
    "kmeans",
    "moment_vector",
    "parse_series",
    "periodogram",
    "purity",
    "read_series",
    "rest_reference",
    "segment_windows",
    "series_to_csv",
    "spectrogram",
    "squared_magnitude_series",
    "standardize",
    "tier_labels",
    "tremor_index",
    "window_features",
]
