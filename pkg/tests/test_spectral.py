from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from accelfatigue import Series, SimSpec, gen_fatigue, gen_rest, periodogram, spectrogram, tremor_index
from accelfatigue.errors import BandOutOfRange, ConfigInvalid, NonUniformSampling, SeriesTooShort, TooFewSamples
from accelfatigue.spectral import frame_count, frame_geometry

from oracles import direct_dft_power, enumerate_frames, spearman

FS = 100.0


def uniform(values, fs=FS):
    n = len(values)
    t = np.round(np.arange(n) * 1000.0 / fs).astype(np.int64)
    acc = np.zeros((n, 3))
    acc[:, 0] = values
    return Series(t, acc)


@settings(max_examples=60, deadline=None)
@given(st.integers(8, 3000), st.integers(0, 2**32 - 1))
def test_parseval_rectangular(n, seed):
    x = np.random.default_rng(seed).normal(3.0, 2.0, n)
    p = periodogram(x, FS)
    d = x - x.mean()
    assert p.total_power() == pytest.approx(np.mean(d * d), rel=1e-9)


def test_exact_bin_sinusoid():
    n, k0 = 1000, 37
    x = np.sin(2 * np.pi * k0 * np.arange(n) / n)
    p = periodogram(x, FS)
    f0 = k0 * FS / n
    peak = int(np.argmax(p.psd))
    assert p.freqs_hz[peak] == pytest.approx(f0)
    others = np.delete(p.psd, peak)
    assert np.max(others) < 1e-20 * p.psd[peak]
    assert p.band_power(f0 - 0.05, f0 + 0.05) == pytest.approx(0.5, rel=1e-12)


def test_zero_signal():
    assert np.all(periodogram(np.zeros(64), FS).psd == 0.0)


def test_two_tones_ratio_against_direct_dft():
    n = 400
    j = np.arange(n)
    x = np.sin(2 * np.pi * 10 * j / n) + 2 * np.sin(2 * np.pi * 50 * j / n)
    p = periodogram(x, FS)
    df = FS / n
    r = p.band_power(50 * df - df / 2, 50 * df + df / 2) / p.band_power(10 * df - df / 2, 10 * df + df / 2)
    assert r == pytest.approx(4.0, rel=1e-12)
    power = direct_dft_power(x - x.mean())
    scale = np.full(power.size, 2.0)
    scale[0] = scale[-1] = 1.0
    assert p.psd == pytest.approx(scale * power / (FS * n), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(8, 256), st.floats(0.1, 100.0), st.sampled_from(["rectangular", "hann"]))
def test_against_direct_dft_and_amplitude_scaling(n, a, wfn):
    x = np.random.default_rng(n).standard_normal(n)
    p = periodogram(x, FS, window_fn=wfn)
    w = np.ones(n) if wfn == "rectangular" else 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)
    power = direct_dft_power((x - x.mean()) * w)
    scale = np.full(power.size, 2.0)
    scale[0] = 1.0
    if n % 2 == 0:
        scale[-1] = 1.0
    assert p.psd == pytest.approx(scale * power / (FS * np.dot(w, w)), rel=1e-9, abs=1e-12)
    scaled = periodogram(a * x, FS, window_fn=wfn).psd
    assert scaled == pytest.approx(a * a * p.psd, rel=1e-9, abs=1e-12 * a * a * p.psd.max())


def test_periodogram_preconditions():
    with pytest.raises(TooFewSamples):
        periodogram(np.zeros(7), FS)
    with pytest.raises(NonUniformSampling):
        periodogram(np.zeros(10), FS, t_ms=[0, 10, 20, 30, 45, 50, 60, 70, 80, 90])
    with pytest.raises(ConfigInvalid):
        periodogram(np.zeros(10), FS, window_fn="kaiser")


def test_sixty_seconds_eight_frames():
    spec = spectrogram(uniform(np.random.default_rng(0).standard_normal(6000)), channel="x", segment_ms=13000, overlap=0.5)
    assert spec.hop_samples == 650
    assert spec.power.shape[0] == 8
    assert spec.frame_times_ms.tolist() == [6500 * i for i in range(8)]


def test_one_segment_one_frame():
    spec = spectrogram(uniform(np.random.default_rng(0).standard_normal(1300)), channel="x", segment_ms=13000)
    assert spec.power.shape[0] == 1


def test_shorter_than_segment():
    with pytest.raises(SeriesTooShort):
        spectrogram(uniform(np.zeros(1299)), channel="x", segment_ms=13000)


def test_overlap_zero_tiles():
    x = np.random.default_rng(1).standard_normal(4000)
    spec = spectrogram(uniform(x), channel="x", segment_ms=10000, overlap=0.0, window_fn="rectangular")
    assert spec.power.shape[0] == 4
    for i in range(4):
        seg = x[1000 * i:1000 * (i + 1)]
        assert spec.power[i] == pytest.approx(periodogram(seg, FS).psd, rel=1e-12, abs=1e-15)


def test_frame_edges_from_sample_positions():
    x = np.random.default_rng(2).standard_normal(3000)
    spec = spectrogram(uniform(x), channel="x", segment_ms=12000, overlap=0.25, window_fn="hann")
    starts = enumerate_frames(3000, 1200, 900)
    assert spec.power.shape[0] == len(starts)
    for row, s in zip(spec.power, starts):
        assert row == pytest.approx(periodogram(x[s:s + 1200], FS, window_fn="hann").psd)


def test_full_band_is_total_power():
    spec = spectrogram(gen_rest(SimSpec("rest", 60000, 100, seed=0)))
    ti = tremor_index(spec, 0.0, FS / 2)
    assert ti.values == pytest.approx(spec.frame_power(), rel=1e-12)


def test_empty_band():
    spec = spectrogram(gen_rest(SimSpec("rest", 30000, 100, seed=0)))
    df = spec.df
    with pytest.raises(BandOutOfRange):
        tremor_index(spec, 1.1 * df, 1.9 * df)
    with pytest.raises(BandOutOfRange):
        tremor_index(spec, 4.0, 2.0)
    with pytest.raises(BandOutOfRange):
        tremor_index(spec, 1.0, 60.0)


def test_band_is_half_open():
    x = np.sin(2 * np.pi * 10 * np.arange(100) / 100)
    p = periodogram(x, FS)
    assert p.band_power(10.0, 11.0) == pytest.approx(0.5)
    assert p.band_power(9.0, 10.0) == pytest.approx(0.0, abs=1e-25)


def test_tremor_ramp_increases():
    s = gen_fatigue(SimSpec("fatigue", 600000, 100, seed=3))
    ti = tremor_index(spectrogram(s), 0.5, 4.0)
    assert spearman(np.arange(ti.values.size), ti.values) >= 0.9


def test_non_uniform_series_rejected():
    t = np.array([0, 10, 20, 35, 40, 50, 60, 70, 80, 90, 100, 110])
    with pytest.raises(NonUniformSampling):
        spectrogram(Series(t, np.zeros((12, 3))), segment_ms=80)


@pytest.mark.parametrize("overlap", [-0.1, 1.0])
def test_bad_overlap(overlap):
    with pytest.raises(ConfigInvalid):
        frame_geometry(13000, overlap, FS)


def test_frame_count_formula_small():
    for n in range(0, 60):
        for seg in range(1, 12):
            for hop in range(1, 12):
                assert frame_count(n, seg, hop) == len(enumerate_frames(n, seg, hop))
