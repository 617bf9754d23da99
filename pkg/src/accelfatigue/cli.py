"""Command-line interface.

Subcommands: simulate, moments, bootstrap, fatigue, cluster, spectrogram.
Options resolve as built-in defaults < ``--config`` JSON file < flags, and the
resolved set is echoed into the metadata of every output. Exit status is 0 on
success, 1 for input/validation errors and 2 for configuration errors; every
diagnostic is a single ``ERROR <code>: <detail>`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import MODES, BootstrapConfig, fatigue_report
from .cluster import DEFAULT_MAX_ITER, DEFAULT_TOL, kmeans, parse_features, tier_labels, window_features
from .errors import AccelFatigueError, ConfigInvalid
from .ingest import read_series, segment_windows, series_to_csv
from .moments import CHANNELS, channel_values, moment_vector
from .report import dumps, format_real, metadata
from .simulate import STATES, TIERS, SimSpec, generate
from .spectral import SPECTRAL_CHANNELS, WINDOW_FNS, spectrogram, tremor_index
from .svg import emit_svg

COMMANDS = ("simulate", "moments", "bootstrap", "fatigue", "cluster", "spectrogram")

DEFAULTS = {
    "simulate": {
        "state": "rest",
        "tier": None,
        "duration_ms": 600000,
        "rate_hz": 100.0,
        "seed": 0,
        "params": {},
        "output": None,
    },
    "moments": {
        "input": None,
        "window_ms": 60000,
        "min_samples": 256,
        "standardize_axes": True,
        "plain_kurtosis": False,
        "output": None,
    },
    "bootstrap": {
        "input": None,
        "resamples": 1000,
        "fraction": 0.5,
        "mode": "without_replacement",
        "seed": 0,
        "k": 3,
        "channel": "mag2",
        "standardize_axes": True,
        "baseline": None,
        "plain_kurtosis": False,
        "workers": None,
        "output": None,
        "svg": None,
    },
    "cluster": {
        "inputs": None,
        "window_ms": 60000,
        "min_samples": 256,
        "k": 3,
        "seed": 0,
        "features": "std-profile",
        "max_iter": DEFAULT_MAX_ITER,
        "tol": DEFAULT_TOL,
        "output": None,
        "model": None,
        "svg": None,
    },
    "spectrogram": {
        "input": None,
        "channel": "mag",
        "segment_ms": 13000,
        "overlap": 0.5,
        "window_fn": "hann",
        "band_hz": [0.5, 4.0],
        "output": None,
        "tremor": None,
        "svg": None,
        "svg_fmax": None,
    },
}
DEFAULTS["fatigue"] = dict(DEFAULTS["bootstrap"])

_UNITS_MS = {"ms": 1, "s": 1000, "min": 60000, "h": 3600000}


def parse_duration_ms(text) -> int:
    """``'600s'`` -> 600000. Bare numbers are milliseconds."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        value, unit = float(text), "ms"
    else:
        m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*(ms|s|min|h)?\s*", str(text))
        if not m:
            raise ConfigInvalid(f"cannot parse duration {text!r} (use e.g. 600s, 10min, 500ms)")
        value, unit = float(m.group(1)), m.group(2) or "ms"
    ms = value * _UNITS_MS[unit]
    if ms != int(ms) or ms <= 0:
        raise ConfigInvalid(f"duration {text!r} must be a positive whole number of milliseconds")
    return int(ms)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if self.prog == "accelfatigue":
            message = f"{message}; valid subcommands: {', '.join(COMMANDS)}"
        raise ConfigInvalid(message)

    def exit(self, status=0, message=None):
        if status:
            raise ConfigInvalid(message.strip() if message else "argument error")
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


def _bootstrap_args(p):
    p.add_argument("input", help="series file (CSV or JSONL)")
    p.add_argument("--resamples", type=int)
    p.add_argument("--fraction", type=float)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int, help="chi-square degrees of freedom of the rest reference")
    p.add_argument("--channel", choices=CHANNELS)
    p.add_argument("--raw-mag2", dest="standardize_axes", action="store_const", const=False)
    p.add_argument("--baseline", help="JSON report or {skewness, exkurtosis} replacing the analytic rest point")
    p.add_argument("--plain-kurtosis", action="store_const", const=True)
    p.add_argument("--workers", type=int)
    p.add_argument("-o", "--output", help="JSON report path (default stdout)")
    p.add_argument("--svg", help="write a cloud scatter SVG here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="accelfatigue", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"accelfatigue {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="write a synthetic recording")
    p.add_argument("--state", choices=STATES)
    p.add_argument("--tier", choices=TIERS)
    p.add_argument("--duration", dest="duration_ms", type=parse_duration_ms, help="e.g. 600s, 10min")
    p.add_argument("--rate", dest="rate_hz", type=float, help="sampling rate in Hz")
    p.add_argument("--seed", type=int)
    p.add_argument("--params", type=json.loads, help="JSON object overriding generator parameters")
    p.add_argument("-o", "--output")

    p = sub.add_parser("moments", help="per-window moment vectors")
    p.add_argument("input")
    p.add_argument("--window", dest="window_ms", type=parse_duration_ms)
    p.add_argument("--min-samples", type=int)
    p.add_argument("--raw-mag2", dest="standardize_axes", action="store_const", const=False)
    p.add_argument("--plain-kurtosis", action="store_const", const=True)
    p.add_argument("-o", "--output")

    _bootstrap_args(sub.add_parser("bootstrap", help="bootstrap moment cloud with points"))
    _bootstrap_args(sub.add_parser("fatigue", help="fatigue report against the rest reference"))

    p = sub.add_parser("cluster", help="k-means activity tiers over windows")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--window", dest="window_ms", type=parse_duration_ms)
    p.add_argument("--min-samples", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--features", help="preset (std-profile, moments3) or comma list of stat:channel")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("-o", "--output", help="assignments CSV (default stdout)")
    p.add_argument("--model", help="JSON model dump path")
    p.add_argument("--svg")

    p = sub.add_parser("spectrogram", help="spectrogram and low-frequency tremor index")
    p.add_argument("input")
    p.add_argument("--channel", choices=SPECTRAL_CHANNELS)
    p.add_argument("--segment", dest="segment_ms", type=parse_duration_ms)
    p.add_argument("--overlap", type=float)
    p.add_argument("--window-fn", choices=WINDOW_FNS)
    p.add_argument("--band", dest="band_hz", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("-o", "--output", help="power matrix CSV (default stdout)")
    p.add_argument("--tremor", help="tremor index JSON path")
    p.add_argument("--svg")
    p.add_argument("--svg-fmax", type=float, help="crop the heatmap at this frequency")

    for action in sub.choices.values():
        action.add_argument("--config", help="JSON file with option defaults")
    return parser


_DURATION_KEYS = ("duration_ms", "window_ms", "segment_ms")


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    resolved = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            raise
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigInvalid("config file must hold a JSON object")
        section = raw.get(command, raw) if any(k in COMMANDS for k in raw) else raw
        unknown = sorted(set(section) - set(resolved))
        if unknown:
            raise ConfigInvalid(f"unknown {command} config keys: {unknown}")
        for key, value in section.items():
            resolved[key] = parse_duration_ms(value) if key in _DURATION_KEYS else value
    for key in resolved:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


# -- output helpers --------------------------------------------------------


def _write(path: str | None, data: str | bytes) -> None:
    if path is None or path == "-":
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(data)
            sys.stdout.flush()
        return
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
        fh.write(data)


def _sidecar(path: str | None, meta: dict) -> None:
    """CSV outputs keep their fixed schema; metadata goes next to them."""
    if path not in (None, "-"):
        _write(path + ".meta.json", dumps(meta))


def _shown_kurtosis(value: float, plain: bool) -> float:
    return value + 3.0 if plain else value


# -- subcommands -----------------------------------------------------------


def cmd_simulate(cfg: dict) -> None:
    spec = SimSpec(
        state=cfg["state"],
        duration_ms=int(cfg["duration_ms"]),
        rate_hz=float(cfg["rate_hz"]),
        seed=int(cfg["seed"]),
        tier=cfg["tier"],
        params=cfg["params"] or {},
    )
    series = generate(spec)
    _write(cfg["output"], series_to_csv(series))
    _sidecar(cfg["output"], metadata("simulate", cfg))


def cmd_moments(cfg: dict) -> None:
    series = read_series(cfg["input"])
    windows = segment_windows(series, int(cfg["window_ms"]), int(cfg["min_samples"]))
    kurt_col = "kurtosis" if cfg["plain_kurtosis"] else "exkurtosis"
    lines = [f"window_start_ms,window_end_ms,channel,mean,std,skewness,{kurt_col}"]
    for w in windows:
        for channel in CHANNELS:
            mv = moment_vector(channel_values(w.series, channel, cfg["standardize_axes"]))
            values = (mv.mean, mv.std, mv.skewness, _shown_kurtosis(mv.exkurtosis, cfg["plain_kurtosis"]))
            lines.append(f"{w.start_ms},{w.end_ms},{channel}," + ",".join(format_real(v) for v in values))
    meta = metadata("moments", cfg, [cfg["input"]])
    meta["windows"] = {"emitted": len(windows), "skipped": windows.skipped}
    _write(cfg["output"], "\n".join(lines) + "\n")
    _sidecar(cfg["output"], meta)


def _load_baseline(path: str) -> tuple[float, float]:
    """Rest point from ``{skewness, exkurtosis}`` or from a previous report's centroid."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"baseline {path} is not JSON: {exc}") from None
    point = raw if isinstance(raw, dict) and "skewness" in raw else None
    if point is None and isinstance(raw, dict):
        point = raw.get("cloud", {}).get("centroid")
    if isinstance(point, dict) and "skewness" in point:
        if "exkurtosis" in point:
            return float(point["skewness"]), float(point["exkurtosis"])
        if "kurtosis" in point:
            return float(point["skewness"]), float(point["kurtosis"]) - 3.0
    raise ConfigInvalid(f"baseline {path} has no skewness/exkurtosis point")


def _report_dict(report, cfg: dict, include_points: bool) -> dict:
    body = report.as_dict(include_points=include_points)
    if cfg["plain_kurtosis"]:
        # Display convention only: the distance is always computed in excess units.
        body["kurtosis_convention"] = "plain"
        body["reference"]["exkurtosis"] = None
        body["reference"]["kurtosis"] = report.reference.exkurtosis + 3.0
        c = body["cloud"]["centroid"]
        c["kurtosis"] = c.pop("exkurtosis") + 3.0
        if include_points:
            body["points"] = [[s, sk, k + 3.0] for s, sk, k in body["points"]]
    else:
        body["kurtosis_convention"] = "excess"
    return body


def cmd_bootstrap(cfg: dict, command: str) -> None:
    series = read_series(cfg["input"])
    config = BootstrapConfig(
        resamples=int(cfg["resamples"]),
        fraction=float(cfg["fraction"]),
        mode=cfg["mode"],
        seed=int(cfg["seed"]),
    )
    inputs = [cfg["input"]]
    reference = None
    if cfg["baseline"]:
        reference = _load_baseline(cfg["baseline"])
        inputs.append(cfg["baseline"])
    report = fatigue_report(
        series,
        config,
        k=int(cfg["k"]),
        channel=cfg["channel"],
        standardize_axes=cfg["standardize_axes"],
        reference=reference,
        workers=cfg["workers"],
    )
    # The worker count cannot change any result, so it stays out of the echo
    # and serial and parallel runs produce identical files.
    meta = metadata(command, {k: v for k, v in cfg.items() if k != "workers"}, inputs)
    out = {"meta": meta}
    out.update(_report_dict(report, cfg, include_points=(command == "bootstrap")))
    _write(cfg["output"], dumps(out))
    if cfg["svg"]:
        ref = report.reference
        data = {
            "points": report.cloud.points,
            "reference": (ref.skewness, ref.exkurtosis),
            "centroid": (report.cloud.centroid.skewness, report.cloud.centroid.exkurtosis),
        }
        _write(cfg["svg"], emit_svg("cloud", data, {"title": f"{command}: {cfg['input']}", "metadata": meta}))


def cmd_cluster(cfg: dict) -> None:
    names = parse_features(cfg["features"])
    feats, rows, plot_rows = [], [], []
    for path in cfg["inputs"]:
        series = read_series(path)
        windows = segment_windows(series, int(cfg["window_ms"]), int(cfg["min_samples"]))
        fv = window_features(windows, names, start_id=len(feats))
        feats.extend(fv)
        for w in windows:
            rows.append((w.start_ms, path))
            mv = moment_vector(channel_values(w.series, "mag2", standardize_axes=False))
            plot_rows.append([mv.mean, mv.std, mv.skewness, mv.exkurtosis])
    if not feats:
        raise ConfigInvalid("no complete windows in the inputs; lower --window or --min-samples")
    model = kmeans(feats, int(cfg["k"]), int(cfg["seed"]), int(cfg["max_iter"]), float(cfg["tol"]), names)
    tiers = tier_labels(model) if model.k == 3 else {}
    lines = ["window_start_ms,source_file,cluster,tier"]
    for fv, (start, path) in zip(feats, rows):
        c = model.assignments[fv.window_id]
        lines.append(f"{start},{path},{c},{tiers.get(c, '')}")
    meta = metadata("cluster", cfg, list(cfg["inputs"]))
    _write(cfg["output"], "\n".join(lines) + "\n")
    _sidecar(cfg["output"], meta)
    if cfg["model"]:
        dump = {"meta": meta}
        dump.update(model.as_dict())
        dump["windows"] = [
            {"window_id": fv.window_id, "window_start_ms": s, "source_file": p, "source_label": fv.source_label}
            for fv, (s, p) in zip(feats, rows)
        ]
        _write(cfg["model"], dumps(dump))
    if cfg["svg"]:
        data = {
            "features": np.array(plot_rows),
            "names": ["mean:mag2", "std:mag2", "skewness:mag2", "exkurtosis:mag2"],
            "clusters": model.labels,
            "panels": [("mean:mag2", "std:mag2"), ("skewness:mag2", "exkurtosis:mag2")],
        }
        _write(cfg["svg"], emit_svg("moments", data, {"metadata": meta}))


def cmd_spectrogram(cfg: dict) -> None:
    series = read_series(cfg["input"])
    spec = spectrogram(
        series,
        channel=cfg["channel"],
        segment_ms=int(cfg["segment_ms"]),
        overlap=float(cfg["overlap"]),
        window_fn=cfg["window_fn"],
    )
    lo, hi = (float(v) for v in cfg["band_hz"])
    tremor = tremor_index(spec, lo, hi)
    meta = metadata("spectrogram", cfg, [cfg["input"]])
    lines = ["frame_start_ms\\freq_hz," + ",".join(format_real(f) for f in spec.freqs_hz)]
    for t, row in zip(spec.frame_times_ms, spec.power):
        lines.append(f"{int(t)}," + ",".join(format_real(v) for v in row))
    _write(cfg["output"], "\n".join(lines) + "\n")
    _sidecar(cfg["output"], meta)
    if cfg["tremor"]:
        doc = {
            "meta": meta,
            "channel": spec.channel,
            "fs_hz": spec.fs,
            "segment_ms": spec.segment_ms,
            "overlap": spec.overlap,
            "window_fn": spec.window_fn,
            "band_hz": list(tremor.band_hz),
            "frame_times_ms": [int(t) for t in tremor.frame_times_ms],
            "tremor_index": [float(v) for v in tremor.values],
        }
        _write(cfg["tremor"], dumps(doc))
    if cfg["svg"]:
        data = {
            "times_ms": spec.frame_times_ms,
            "freqs_hz": spec.freqs_hz,
            "power": spec.power,
            "frame_ms": spec.hop_samples * 1000.0 / spec.fs,
            "df": spec.df,
        }
        style = {"metadata": meta, "title": f"spectrogram: {cfg['input']}"}
        if cfg["svg_fmax"] is not None:
            style["fmax"] = float(cfg["svg_fmax"])
        _write(cfg["svg"], emit_svg("heatmap", data, style))


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args.command, args)
        if args.command == "simulate":
            cmd_simulate(cfg)
        elif args.command == "moments":
            cmd_moments(cfg)
        elif args.command in ("bootstrap", "fatigue"):
            cmd_bootstrap(cfg, args.command)
        elif args.command == "cluster":
            cmd_cluster(cfg)
        else:
            cmd_spectrogram(cfg)
    except AccelFatigueError as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"ERROR FileNotFound: {exc.filename or exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ERROR IOError: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    return run(argv)

