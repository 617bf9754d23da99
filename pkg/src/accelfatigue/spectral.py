"""Periodograms, spectrograms and low-frequency band power.

PSD convention: one-sided, ``psd[k] = c * |X[k]|**2 / (fs * sum(w**2))`` where
``X`` is the DFT of the de-meaned, windowed segment and ``c`` is 2 for every
bin except DC and (for even lengths) Nyquist. With a rectangular window
``sum(psd) * fs / n`` equals the mean square of the de-meaned segment.

The DFT is numpy's pocketfft, which handles any length exactly; segments are
never zero-padded, so the bin width is always ``fs / n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import BandOutOfRange, ConfigInvalid, NonUniformSampling, SeriesTooShort, TooFewSamples

WINDOW_FNS = ("rectangular", "hann")
SPECTRAL_CHANNELS = ("mag", "x", "y", "z")
DEFAULT_SEGMENT_MS = 13000
DEFAULT_OVERLAP = 0.5
DEFAULT_BAND = (0.5, 4.0)
MIN_SEGMENT = 8


def window(name: str, n: int) -> np.ndarray:
    if name == "rectangular":
        return np.ones(n)
    if name == "hann":
        # Periodic Hann, the usual choice for spectral estimation.
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
    raise ConfigInvalid(f"window_fn must be one of {WINDOW_FNS}, got {name!r}")


def check_uniform(t_ms, fs: float) -> None:
    """Reject sampling whose intervals stray more than 10% from ``1 / fs``."""
    t = np.asarray(t_ms, dtype=np.float64)
    if t.size < 2:
        return
    period = 1000.0 / fs
    worst = float(np.max(np.abs(np.diff(t) - period)))
    if worst > 0.1 * period:
        raise NonUniformSampling(
            f"sample interval deviates by {worst:g} ms from the nominal {period:g} ms"
        )


def _psd_rows(frames: np.ndarray, fs: float, window_fn: str) -> tuple[np.ndarray, np.ndarray]:
    n = frames.shape[-1]
    w = window(window_fn, n)
    x = frames - frames.mean(axis=-1, keepdims=True)
    spec = np.fft.rfft(x * w, axis=-1)
    psd = (spec.real**2 + spec.imag**2) / (fs * float(np.dot(w, w)))
    top = n // 2 if n % 2 == 0 else n // 2 + 1
    psd[..., 1:top] *= 2.0
    return np.fft.rfftfreq(n, d=1.0 / fs), psd


@dataclass(frozen=True, eq=False)
class Periodogram:
    freqs_hz: np.ndarray
    psd: np.ndarray
    n: int
    fs: float
    window_fn: str

    @property
    def df(self) -> float:
        return self.fs / self.n

    def total_power(self) -> float:
        return float(self.psd.sum() * self.df)

    def band_power(self, f_lo: float, f_hi: float) -> float:
        return float(self.psd[_band_mask(self.freqs_hz, self.fs, f_lo, f_hi)].sum() * self.df)


def periodogram(xs, fs: float, window_fn: str = "rectangular", t_ms=None) -> Periodogram:
    """Single-segment one-sided PSD of ``xs`` sampled at ``fs`` Hz.

    If ``t_ms`` is given the timestamps are checked for uniform spacing first.
    """
    x = np.asarray(xs, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a 1-D sequence of scalars")
    if not fs > 0:
        raise ConfigInvalid("sampling rate must be positive")
    if x.size < MIN_SEGMENT:
        raise TooFewSamples(f"periodogram needs at least {MIN_SEGMENT} samples, got {x.size}")
    if t_ms is not None:
        check_uniform(t_ms, fs)
    freqs, psd = _psd_rows(x, fs, window_fn)
    return Periodogram(freqs, psd, x.size, float(fs), window_fn)


@dataclass(frozen=True, eq=False)
class Spectrogram:
    frame_times_ms: np.ndarray
    freqs_hz: np.ndarray
    power: np.ndarray
    segment_ms: int
    overlap: float
    fs: float
    window_fn: str
    segment_samples: int
    hop_samples: int
    channel: str = "mag"

    @property
    def df(self) -> float:
        return self.fs / self.segment_samples

    def frame_power(self) -> np.ndarray:
        return self.power.sum(axis=1) * self.df


@dataclass(frozen=True, eq=False)
class TremorIndex:
    frame_times_ms: np.ndarray
    values: np.ndarray
    band_hz: tuple[float, float]


def frame_geometry(segment_ms: float, overlap: float, fs: float) -> tuple[int, int]:
    """Segment and hop lengths in samples."""
    if not 0.0 <= overlap < 1.0:
        raise ConfigInvalid(f"overlap must be in [0, 1), got {overlap!r}")
    if not segment_ms > 0:
        raise ConfigInvalid("segment_ms must be positive")
    seg = int(round(segment_ms * fs / 1000.0))
    hop = int(round(seg * (1.0 - overlap)))
    if seg < MIN_SEGMENT:
        raise ConfigInvalid(f"segment of {segment_ms} ms holds fewer than {MIN_SEGMENT} samples")
    if hop < 1:
        raise ConfigInvalid("overlap leaves a hop shorter than one sample")
    return seg, hop


def frame_count(n_samples: int, segment: int, hop: int) -> int:
    """``floor((n - segment) / hop) + 1`` frames, or 0 if the series is too short."""
    if n_samples < segment:
        return 0
    return (n_samples - segment) // hop + 1


def spectral_channel(series, channel: str = "mag") -> np.ndarray:
    if channel == "mag":
        return np.sqrt(np.einsum("ij,ij->i", series.acc, series.acc))
    if channel in ("x", "y", "z"):
        return np.array(series.axis(channel))
    raise ConfigInvalid(f"channel must be one of {SPECTRAL_CHANNELS}, got {channel!r}")


def spectrogram(
    series,
    channel: str = "mag",
    segment_ms: int = DEFAULT_SEGMENT_MS,
    overlap: float = DEFAULT_OVERLAP,
    window_fn: str = "hann",
) -> Spectrogram:
    """Hop-advanced periodograms over a uniformly sampled series.

    Frames start at sample ``i * hop`` and span ``segment`` samples; each frame
    is de-meaned independently.
    """
    fs = series.nominal_rate_hz
    if not fs > 0:
        raise SeriesTooShort("need at least two samples to establish a sampling rate")
    check_uniform(series.t_ms, fs)
    seg, hop = frame_geometry(segment_ms, overlap, fs)
    values = spectral_channel(series, channel)
    count = frame_count(values.size, seg, hop)
    if count == 0:
        raise SeriesTooShort(
            f"series of {values.size} samples is shorter than one {segment_ms} ms segment ({seg} samples)"
        )
    frames = sliding_window_view(values, seg)[::hop][:count]
    freqs, power = _psd_rows(frames, fs, window_fn)
    starts = np.asarray(series.t_ms)[np.arange(count) * hop]
    return Spectrogram(
        starts.copy(), freqs, power, int(segment_ms), float(overlap), fs, window_fn, seg, hop, channel
    )


def _band_mask(freqs: np.ndarray, fs: float, f_lo: float, f_hi: float) -> np.ndarray:
    nyquist = fs / 2.0
    if not (0.0 <= f_lo < f_hi <= nyquist):
        raise BandOutOfRange(f"band [{f_lo}, {f_hi}) Hz must satisfy 0 <= lo < hi <= {nyquist:g}")
    mask = (freqs >= f_lo) & (freqs < f_hi)
    if f_hi >= nyquist:
        # A band reaching Nyquist includes the Nyquist bin itself.
        mask |= freqs >= nyquist
    if not mask.any():
        raise BandOutOfRange(f"band [{f_lo}, {f_hi}) Hz contains no frequency bins")
    return mask


def tremor_index(spec: Spectrogram, f_lo: float = DEFAULT_BAND[0], f_hi: float = DEFAULT_BAND[1]) -> TremorIndex:
    """Per-frame band power over ``f_lo <= f < f_hi`` (rectangle rule)."""
    mask = _band_mask(spec.freqs_hz, spec.fs, f_lo, f_hi)
    values = spec.power[:, mask].sum(axis=1) * spec.df
    return TremorIndex(spec.frame_times_ms, values, (float(f_lo), float(f_hi)))
