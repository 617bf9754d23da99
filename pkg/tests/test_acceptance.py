"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

from __future__ import annotations

import hashlib
import math
import statistics
from pathlib import Path

import numpy as np
import pytest

from accelfatigue import (
    BootstrapConfig,
    SimSpec,
    fatigue_report,
    gen_activity,
    gen_fatigue,
    gen_rest,
    kmeans,
    moment_vector,
    periodogram,
    segment_windows,
    spectrogram,
    tremor_index,
    window_features,
)
from accelfatigue.cli import run
from accelfatigue.cluster import DEFAULT_FEATURES
from accelfatigue.errors import SeriesTooShort
from accelfatigue.ingest import Series
from accelfatigue.moments import squared_magnitude_series
from accelfatigue.spectral import frame_geometry

from oracles import (
    chi2_central_moments,
    enumerate_frames,
    enumerate_windows,
    extended_moments,
    skew_kurt_asymptotic_cov,
    spearman,
)

REST_SKEW = math.sqrt(8.0 / 3.0)
REST_EXKURT = 4.0
TEN_MIN = 600_000
TIERS = ("active", "moderate", "passive")


def _random_array(g: np.random.Generator) -> np.ndarray:
    n = int(round(10 ** g.uniform(math.log10(4), 5)))
    kind = g.integers(5)
    scale = 10 ** g.uniform(-3, 3)
    if kind == 0:
        # Gravity-sized offset under small noise: the hard case for one-pass formulas.
        return 9.8 + g.normal(0.0, 10 ** g.uniform(-3, 0), n)
    if kind == 1:
        return scale * g.uniform(-1, 1, n)
    if kind == 2:
        return scale * g.gamma(g.uniform(0.3, 5), size=n) + g.uniform(-10, 10)
    if kind == 3:
        return scale * g.chisquare(3, n)
    return scale * g.standard_t(5, n) + 9.8


def test_1_moment_oracle(acceptance):
    g = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(1000):
        x = _random_array(g)
        got = moment_vector(x)
        want = extended_moments(x)
        for a, b in zip(got, want):
            worst = max(worst, abs(a - b) / abs(b))
    ok = worst <= 1e-9
    acceptance(1, ok, f"moment oracle: worst relative error {worst:.2e} over 1000 arrays (limit 1e-9)")
    assert ok


def test_2_rest_baseline(acceptance):
    n = TEN_MIN * 100 // 1000
    se = np.sqrt(np.diag(skew_kurt_asymptotic_cov(chi2_central_moments(3))) / n)
    fails = {"4se": [], "skew0.1": [], "exkurt0.3": [], "distance0.5": []}
    worst_z, worst_d, worst_k = 0.0, 0.0, 0.0
    for seed in range(20):
        s = gen_rest(SimSpec("rest", TEN_MIN, 100, seed=seed))
        mv = moment_vector(squared_magnitude_series(s, True))
        z = max(abs(mv.skewness - REST_SKEW) / se[0], abs(mv.exkurtosis - REST_EXKURT) / se[1])
        report = fatigue_report(s, BootstrapConfig(seed=seed))
        c = report.cloud.centroid
        worst_z = max(worst_z, z)
        worst_d = max(worst_d, report.distance)
        worst_k = max(worst_k, abs(c.exkurtosis - REST_EXKURT))
        for key, bad in (
            ("4se", z > 4),
            ("skew0.1", abs(c.skewness - REST_SKEW) > 0.1),
            ("exkurt0.3", abs(c.exkurtosis - REST_EXKURT) > 0.3),
            ("distance0.5", report.distance >= 0.5),
        ):
            if bad:
                fails[key].append(seed)
    ok = not any(fails.values())
    acceptance(
        2,
        ok,
        f"rest baseline: max |z| {worst_z:.2f} SE, max centroid exkurtosis offset {worst_k:.3f}, "
        f"max distance {worst_d:.3f}; failing seeds by check {fails}",
    )
    assert ok


def test_3_fatigue_discrimination(acceptance):
    wins = 0
    rest_elong, tired_elong = [], []
    for seed in range(100):
        cfg = BootstrapConfig(seed=seed)
        rest = fatigue_report(gen_rest(SimSpec("rest", TEN_MIN, 100, seed=seed)), cfg)
        tired = fatigue_report(gen_fatigue(SimSpec("fatigue", TEN_MIN, 100, seed=seed)), cfg)
        wins += tired.distance > rest.distance
        rest_elong.append(rest.cloud.elongation)
        tired_elong.append(tired.cloud.elongation)
    med_rest, med_tired = statistics.median(rest_elong), statistics.median(tired_elong)
    ok = wins >= 95 and med_tired > med_rest
    acceptance(
        3,
        ok,
        f"fatigue discrimination: {wins}/100 pairs farther from rest, "
        f"median elongation fatigue {med_tired:.1f} vs rest {med_rest:.1f}",
    )
    assert ok


def _tier_corpus(seed: int, window_ms: int = 60_000, per_tier: int = 20):
    feats, truth = [], []
    for i, tier in enumerate(TIERS):
        s = gen_activity(SimSpec("activity", window_ms * per_tier, 100, seed=1000 * seed + i, tier=tier))
        windows = segment_windows(s, window_ms)
        assert len(windows) == per_tier
        feats += window_features(windows, DEFAULT_FEATURES, start_id=len(feats))
        truth += [tier] * per_tier
    return feats, truth


def test_4_activity_clustering(acceptance):
    purities = []
    for seed in range(20):
        feats, truth = _tier_corpus(seed)
        model = kmeans(feats, k=3, seed=seed, feature_names=DEFAULT_FEATURES)
        tiers = [model.tier_map[model.assignments[f.window_id]] for f in feats]
        purities.append(float(np.mean([a == b for a, b in zip(tiers, truth)])))
    ok = min(purities) >= 0.95
    acceptance(4, ok, f"activity clustering: min tier purity {min(purities):.3f} over 20 seeds")
    assert ok


def test_5_spectral(acceptance):
    g = np.random.default_rng(5)
    fs = 100.0
    parseval = 0.0
    for n in g.integers(8, 20000, size=50):
        x = g.normal(g.uniform(-10, 10), 10 ** g.uniform(-2, 2), int(n))
        d = x - x.mean()
        total = periodogram(x, fs).total_power()
        parseval = max(parseval, abs(total - np.mean(d * d)) / np.mean(d * d))

    concentration = 1.0
    for n, k0 in ((1000, 37), (1024, 100), (999, 12), (6000, 150)):
        p = periodogram(np.sin(2 * np.pi * k0 * np.arange(n) / n), fs)
        concentration = min(concentration, p.psd[k0] / p.psd.sum())

    rhos = []
    for seed in range(10):
        spec = spectrogram(gen_fatigue(SimSpec("fatigue", TEN_MIN, 100, seed=seed)))
        ti = tremor_index(spec, 0.5, 4.0)
        rhos.append(spearman(np.arange(ti.values.size), ti.values))

    ok = parseval <= 1e-9 and concentration >= 0.999 and min(rhos) >= 0.9
    acceptance(
        5,
        ok,
        f"spectral: Parseval error {parseval:.1e}, bin concentration {concentration:.6f}, "
        f"min tremor Spearman {min(rhos):.3f} over 10 seeds",
    )
    assert ok


SESSION = [
    ["simulate", "--state", "rest", "--duration", "10min", "--seed", "7", "-o", "rest.csv"],
    ["simulate", "--state", "fatigue", "--duration", "10min", "--seed", "7", "-o", "fatigue.csv"],
    ["simulate", "--state", "activity", "--tier", "active", "--duration", "5min", "--seed", "1", "-o", "active.csv"],
    ["simulate", "--state", "activity", "--tier", "moderate", "--duration", "5min", "--seed", "2", "-o", "moderate.csv"],
    ["simulate", "--state", "activity", "--tier", "passive", "--duration", "5min", "--seed", "3", "-o", "passive.csv"],
    ["moments", "rest.csv", "--window", "1min", "-o", "rest_moments.csv"],
    ["bootstrap", "rest.csv", "--seed", "7", "-o", "rest_cloud.json", "--svg", "rest_cloud.svg"],
    ["fatigue", "fatigue.csv", "--seed", "7", "-o", "fatigue_report.json", "--svg", "fatigue_cloud.svg"],
    ["cluster", "active.csv", "moderate.csv", "passive.csv", "--window", "30s", "--seed", "4",
     "-o", "tiers.csv", "--model", "model.json", "--svg", "tiers.svg"],
    ["spectrogram", "fatigue.csv", "-o", "spectrogram.csv", "--tremor", "tremor.json",
     "--svg", "spectrogram.svg", "--svg-fmax", "10"],
]


def _run_session(root: Path, workers: int, monkeypatch) -> dict[str, str]:
    root.mkdir()
    monkeypatch.chdir(root)
    for argv in SESSION:
        if argv[0] in ("bootstrap", "fatigue"):
            argv = argv + ["--workers", str(workers)]
        assert run(argv) == 0, argv
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_6_cli_determinism(acceptance, tmp_path, monkeypatch, capsys):
    first = _run_session(tmp_path / "a", 1, monkeypatch)
    second = _run_session(tmp_path / "b", 4, monkeypatch)
    capsys.readouterr()
    differing = sorted(k for k in first.keys() | second.keys() if first.get(k) != second.get(k))
    commands = {argv[0] for argv in SESSION}
    svgs = [k for k in first if k.endswith(".svg")]
    ok = not differing and len(commands) == 6 and len(svgs) == 4
    acceptance(
        6,
        ok,
        f"CLI determinism: {len(first)} files over {len(commands)} subcommands, serial vs 4 workers, "
        f"differing {differing}",
    )
    assert ok


def test_7_frame_and_window_formulas(acceptance):
    fs = 100.0
    t = np.round(np.arange(12000) * 10.0).astype(np.int64)
    full = Series(t, np.random.default_rng(7).standard_normal((t.size, 3)))
    checked = mismatches = 0
    segments_ms = range(12000, 15001, 500)
    for seconds in range(1, 121):
        series = full.slice(0, seconds * 100)
        for seg_ms in segments_ms:
            for overlap in (0.0, 0.25, 0.5):
                seg, hop = frame_geometry(seg_ms, overlap, fs)
                want = [int(series.t_ms[i]) for i in enumerate_frames(series.count, seg, hop)]
                try:
                    got = spectrogram(series, segment_ms=seg_ms, overlap=overlap).frame_times_ms.tolist()
                except SeriesTooShort:
                    got = []
                checked += 1
                mismatches += got != want
            # Tumbling windows of the same lengths partition the series.
            windows = segment_windows(series, seg_ms, min_samples=1)
            want_w = [e[0] for e in enumerate_windows(series.t_ms, seg_ms, 1000.0 / fs)]
            checked += 1
            mismatches += [w.start_ms for w in windows] != want_w or any(
                w.series.count != seg_ms // 10 for w in windows
            )
    ok = mismatches == 0
    acceptance(7, ok, f"frame/window formulas: {checked} configurations, {mismatches} mismatches")
    assert ok
