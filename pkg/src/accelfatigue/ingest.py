"""Parsing, validation and windowing of 3-axis accelerometer series."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ConfigInvalid,
    EmptyInput,
    MalformedRow,
    NonFiniteValue,
    NonMonotonicTimestamp,
)

CSV_HEADER = ("t_ms", "ax", "ay", "az")
DEFAULT_MIN_SAMPLES = 256


class Sample(NamedTuple):
    t_ms: int
    ax: float
    ay: float
    az: float
    label: str | None = None


@dataclass(frozen=True, eq=False)
class Series:
    """An immutable, validated accelerometer recording.

    Stored column-wise: ``t_ms`` is an int64 vector, ``acc`` an ``(n, 3)``
    float64 array with columns X, Y, Z. ``labels`` holds the optional
    pass-through activity tags (``None`` when the input had no label column).
    """

    t_ms: np.ndarray
    acc: np.ndarray
    labels: tuple[str, ...] | None = None
    _meta: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        t = np.ascontiguousarray(self.t_ms, dtype=np.int64)
        a = np.ascontiguousarray(self.acc, dtype=np.float64)
        if a.ndim != 2 or a.shape[1] != 3 or a.shape[0] != t.shape[0]:
            raise ValueError("acc must have shape (len(t_ms), 3)")
        if t.size == 0:
            raise EmptyInput("series has no samples")
        t.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "t_ms", t)
        object.__setattr__(self, "acc", a)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != t.size:
                raise ValueError("labels must match sample count")
            object.__setattr__(self, "labels", labels)
        _validate(t, a)
        object.__setattr__(self, "_meta", _series_meta(t))

    def __len__(self) -> int:
        return int(self.t_ms.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (
            np.array_equal(self.t_ms, other.t_ms)
            and np.array_equal(self.acc, other.acc)
            and self.labels == other.labels
        )

    @property
    def meta(self) -> dict:
        return dict(self._meta)

    @property
    def count(self) -> int:
        return self._meta["count"]

    @property
    def duration_ms(self) -> int:
        return self._meta["duration_ms"]

    @property
    def nominal_rate_hz(self) -> float:
        return self._meta["nominal_rate_hz"]

    @property
    def samples(self) -> list[Sample]:
        labels = self.labels or (None,) * len(self)
        return [
            Sample(int(t), float(x), float(y), float(z), lab)
            for t, (x, y, z), lab in zip(self.t_ms, self.acc, labels)
        ]

    def axis(self, name: str) -> np.ndarray:
        return self.acc[:, "xyz".index(name)]

    def slice(self, start: int, stop: int) -> Series:
        labels = self.labels[start:stop] if self.labels is not None else None
        return Series(self.t_ms[start:stop], self.acc[start:stop], labels)

    @classmethod
    def from_samples(cls, samples: Iterable[Sample | Sequence]) -> Series:
        rows = [Sample(*s) for s in samples]
        if not rows:
            raise EmptyInput("no samples")
        labels = [r.label for r in rows]
        return cls(
            np.array([r.t_ms for r in rows], dtype=np.int64),
            np.array([[r.ax, r.ay, r.az] for r in rows], dtype=np.float64),
            None if all(lab is None for lab in labels) else tuple(lab or "" for lab in labels),
        )


def _validate(t: np.ndarray, a: np.ndarray) -> None:
    bad = ~np.isfinite(a).all(axis=1)
    if bad.any():
        raise NonFiniteValue(int(np.argmax(bad)))
    if t[0] < 0:
        raise MalformedRow(0, "t_ms must be non-negative")
    dt = np.diff(t)
    if (dt <= 0).any():
        raise NonMonotonicTimestamp(int(np.argmax(dt <= 0)) + 1)


def _series_meta(t: np.ndarray) -> dict:
    dt = np.diff(t)
    rate = float(np.median(1000.0 / dt)) if dt.size else 0.0
    return {
        "count": int(t.size),
        "duration_ms": int(t[-1] - t[0]),
        "nominal_rate_hz": rate,
    }


@dataclass(frozen=True)
class Window:
    """A half-open time window ``[start_ms, end_ms)`` over a parent series."""

    start_ms: int
    end_ms: int
    series: Series
    index: int = 0

    @property
    def samples(self) -> list[Sample]:
        return self.series.samples

    def __len__(self) -> int:
        return len(self.series)


class WindowList(list):
    """List of windows that also remembers how many windows were dropped."""

    def __init__(self, windows=(), skipped: int = 0):
        super().__init__(windows)
        self.skipped = skipped


# -- parsing ---------------------------------------------------------------


def _parse_int(text, index: int) -> int:
    if isinstance(text, bool):
        raise MalformedRow(index, "t_ms must be an integer")
    if isinstance(text, int):
        return text
    if isinstance(text, str):
        try:
            return int(text.strip())
        except ValueError:
            pass
    raise MalformedRow(index, f"t_ms must be an integer, got {text!r}")


def _parse_float(text, name: str, index: int) -> float:
    if isinstance(text, bool):
        raise MalformedRow(index, f"{name} must be a number")
    if isinstance(text, (int, float)):
        return float(text)
    if isinstance(text, str):
        try:
            return float(text)
        except ValueError:
            pass
    raise MalformedRow(index, f"{name} must be a number, got {text!r}")


def _rows_csv(text: str):
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise EmptyInput("input is empty")
    header = lines[0].split(",")
    has_label = tuple(header) == CSV_HEADER + ("label",)
    if tuple(header) != CSV_HEADER and not has_label:
        raise MalformedRow(None, f"header must be 't_ms,ax,ay,az[,label]', got {lines[0]!r}")
    width = len(header)
    for i, row in enumerate(csv.reader(lines[1:])):
        if len(row) != width:
            raise MalformedRow(i, f"expected {width} fields, got {len(row)}")
        label = row[4] if has_label else None
        yield i, row[0], row[1], row[2], row[3], label


def _rows_jsonl(text: str):
    i = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRow(i, f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise MalformedRow(i, "expected a JSON object")
        missing = [k for k in CSV_HEADER if k not in obj]
        if missing:
            raise MalformedRow(i, f"missing keys {missing}")
        label = obj.get("label")
        if label is not None and not isinstance(label, str):
            label = str(label)
        yield i, obj["t_ms"], obj["ax"], obj["ay"], obj["az"], label
        i += 1


def parse_series(data: bytes | str, format: str = "csv") -> Series:
    """Parse a CSV or JSONL accelerometer recording into a :class:`Series`.

    Raises ``EmptyInput``, ``MalformedRow``, ``NonMonotonicTimestamp`` or
    ``NonFiniteValue``; row indices count data rows from 0.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRow(None, f"input is not UTF-8: {exc}") from None
    if format == "csv":
        rows = _rows_csv(data)
    elif format == "jsonl":
        rows = _rows_jsonl(data)
    else:
        raise ConfigInvalid(f"unknown input format {format!r} (expected csv or jsonl)")

    ts: list[int] = []
    acc: list[tuple[float, float, float]] = []
    labels: list[str | None] = []
    prev = None
    for i, t, x, y, z, label in rows:
        t = _parse_int(t, i)
        v = (_parse_float(x, "ax", i), _parse_float(y, "ay", i), _parse_float(z, "az", i))
        if not all(math.isfinite(c) for c in v):
            raise NonFiniteValue(i)
        if t < 0:
            raise MalformedRow(i, "t_ms must be non-negative")
        if prev is not None and t <= prev:
            raise NonMonotonicTimestamp(i)
        prev = t
        ts.append(t)
        acc.append(v)
        labels.append(label)
    if not ts:
        raise EmptyInput("no data rows")
    has_labels = any(lab is not None for lab in labels)
    return Series(
        np.array(ts, dtype=np.int64),
        np.array(acc, dtype=np.float64),
        tuple(lab or "" for lab in labels) if has_labels else None,
    )


def read_series(path: str | Path, format: str | None = None) -> Series:
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    return parse_series(path.read_bytes(), format)


def series_to_csv(series: Series) -> str:
    """Serialize to the canonical CSV schema; ``repr`` floats round-trip exactly."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(CSV_HEADER) + (["label"] if series.labels is not None else [])
    writer.writerow(header)
    labels = series.labels
    for i, (t, (x, y, z)) in enumerate(zip(series.t_ms.tolist(), series.acc.tolist())):
        row = [t, repr(x), repr(y), repr(z)]
        if labels is not None:
            row.append(labels[i])
        writer.writerow(row)
    return buf.getvalue()


# -- windowing -------------------------------------------------------------


def segment_windows(
    series: Series, window_ms: int, min_samples: int = DEFAULT_MIN_SAMPLES
) -> WindowList:
    """Split a series into tumbling windows of ``window_ms`` from the first sample.

    A window is complete when the recording covers it, i.e. its end does not
    pass ``last t_ms + nominal sample period``. The trailing partial window and
    windows holding fewer than ``min_samples`` samples are dropped; the number
    dropped is available as ``result.skipped``.
    """
    if window_ms <= 0:
        raise ConfigInvalid("window_ms must be positive")
    t = series.t_ms
    t0 = int(t[0])
    rate = series.nominal_rate_hz
    covered_end = float(t[-1]) + (1000.0 / rate if rate > 0 else 0.0)
    n_full = int((covered_end - t0) // window_ms)
    # Windows starting inside the recording but not fully covered form the tail.
    n_started = int((int(t[-1]) - t0) // window_ms) + 1
    windows = WindowList()
    skipped = 0
    for j in range(n_started):
        start = t0 + j * window_ms
        end = start + window_ms
        if j >= n_full:
            skipped += 1
            continue
        lo, hi = np.searchsorted(t, [start, end], side="left")
        if hi - lo < min_samples:
            skipped += 1
            continue
        windows.append(Window(start, end, series.slice(int(lo), int(hi)), index=j))
    windows.skipped = skipped
    return windows
