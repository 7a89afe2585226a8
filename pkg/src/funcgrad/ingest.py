"""Loading, preprocessing and serialization of curve datasets.

CSV is the single interchange format: a curves file has a header
``t,<id1>,<id2>,...`` with the grid in the first column and one curve
per remaining column. Observed time ranges are rescaled affinely onto
[0, 1] at load time and remembered as metadata. All floats are written
with 17 significant digits so exports re-import bit-identically.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .derivative import DerivativeEstimate, derivative_generating_function
from .errors import FormatError, InsufficientTimepoints
from .fpca import EigenSystem, Sample
from .grid import Grid

__all__ = [
    "LongitudinalTable",
    "ReportBundle",
    "load_curves_csv",
    "save_curves_csv",
    "load_responses_csv",
    "save_responses_csv",
    "load_longitudinal",
    "growth_rates",
    "export_report",
]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _rescale01(points: np.ndarray) -> np.ndarray:
    lo, hi = points[0], points[-1]
    return (points - lo) / (hi - lo)


def _read_rows(path: str) -> list[list[str]]:
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh) if row]


def _parse_float(token: str, where: str) -> float:
    try:
        return float(token)
    except ValueError as exc:
        raise FormatError(f"non-numeric value {token!r} in {where}") from exc


@dataclass(frozen=True)
class LongitudinalTable:
    """Repeated measurements: ages (strictly increasing) by subjects."""

    ages: np.ndarray
    heights: np.ndarray
    ids: list[str]

    def __post_init__(self):
        ages = np.asarray(self.ages, dtype=float)
        heights = np.atleast_2d(np.asarray(self.heights, dtype=float))
        if ages.ndim != 1 or np.any(np.diff(ages) <= 0):
            raise FormatError("ages must be strictly increasing")
        if heights.shape[1] != len(ages):
            raise FormatError("each row needs one measurement per age")
        if not np.all(np.isfinite(heights)):
            raise FormatError("measurements must be finite")
        if len(self.ids) != heights.shape[0]:
            raise FormatError("need one id per subject row")
        object.__setattr__(self, "ages", ages)
        object.__setattr__(self, "heights", heights)


def load_curves_csv(path: str) -> Sample:
    """Read a curves file: header ``t,<id1>,...``, grid in column one.

    The grid is rescaled affinely onto [0, 1]; the original time range is
    kept on the returned sample as metadata.
    """
    rows = _read_rows(path)
    if not rows:
        raise FormatError(f"{path}: empty file")
    header = rows[0]
    if len(header) < 2:
        raise FormatError(f"{path}: header must name at least one curve column")
    ids = [h.strip() for h in header[1:]]
    width = len(header)
    body = rows[1:]
    if len(body) < 2:
        raise FormatError(f"{path}: need at least two grid points")
    points = np.empty(len(body))
    values = np.empty((len(ids), len(body)))
    for r, row in enumerate(body):
        if len(row) != width:
            raise FormatError(f"{path}: row {r + 2} has {len(row)} fields, expected {width}")
        points[r] = _parse_float(row[0], f"{path} row {r + 2}")
        for c, tok in enumerate(row[1:]):
            values[c, r] = _parse_float(tok, f"{path} row {r + 2}")
    if np.any(np.diff(points) <= 0):
        raise FormatError(f"{path}: grid column must be strictly increasing")
    try:
        grid = Grid(_rescale01(points))
        return Sample(grid, values, ids=ids, time_range=(points[0], points[-1]))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def save_curves_csv(path: str, sample: Sample, names=None) -> None:
    """Write a sample in the curves-file layout (grid on [0, 1])."""
    names = list(names) if names is not None else (
        sample.ids if sample.ids is not None else [f"c{i + 1}" for i in range(sample.n)]
    )
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", *names])
        for k, t in enumerate(sample.grid.points):
            out.writerow([_fmt(t), *(_fmt(v) for v in sample.values[:, k])])


def load_responses_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Read a response file: header ``id,y`` then one row per subject."""
    rows = _read_rows(path)
    if not rows or len(rows[0]) != 2:
        raise FormatError(f"{path}: expected a two-column id,y file")
    ids, vals = [], []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise FormatError(f"{path}: row {r} has {len(row)} fields, expected 2")
        ids.append(row[0].strip())
        vals.append(_parse_float(row[1], f"{path} row {r}"))
    return ids, np.asarray(vals)


def save_responses_csv(path: str, ids, y) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["id", "y"])
        for i, v in zip(ids, y):
            out.writerow([i, _fmt(v)])


def load_longitudinal(heights_path: str, ages_path: str) -> LongitudinalTable:
    """Read the ages file (header ``age``) and heights file (header ``id,...``)."""
    age_rows = _read_rows(ages_path)
    if not age_rows:
        raise FormatError(f"{ages_path}: empty file")
    ages = np.array(
        [_parse_float(r[0], f"{ages_path} row {i + 2}") for i, r in enumerate(age_rows[1:])]
    )
    h_rows = _read_rows(heights_path)
    if len(h_rows) < 2:
        raise FormatError(f"{heights_path}: no subject rows")
    width = len(ages) + 1
    ids, heights = [], []
    for r, row in enumerate(h_rows[1:], start=2):
        if len(row) != width:
            raise FormatError(
                f"{heights_path}: row {r} has {len(row)} fields, expected {width}"
            )
        ids.append(row[0].strip())
        heights.append([_parse_float(t, f"{heights_path} row {r}") for t in row[1:]])
    return LongitudinalTable(ages=ages, heights=np.array(heights), ids=ids)


def growth_rates(table: LongitudinalTable) -> Sample:
    """First-order difference quotients of measurements over ages.

    Each subject's J measurements become J-1 rates located at the age
    midpoints, which are then rescaled onto [0, 1]. The rates carry the
    original measurement units per unit of the age variable.
    """
    ages = table.ages
    if len(ages) < 3:
        raise InsufficientTimepoints("need at least three ages for a usable rate grid")
    steps = np.diff(ages)
    rates = np.diff(table.heights, axis=1) / steps
    mid = (ages[:-1] + ages[1:]) / 2.0
    grid = Grid(_rescale01(mid))
    return Sample(grid, rates, ids=list(table.ids), time_range=(mid[0], mid[-1]))


@dataclass
class ReportBundle:
    """Everything one run wants written to disk; all fields optional."""

    eigen: EigenSystem | None = None
    sample_ids: list[str] | None = None
    gradients: list[tuple[str, DerivativeEstimate]] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def export_report(results: ReportBundle, path: str) -> None:
    """Write eigen.csv, scores.csv, gamma.csv, dgf.csv and summary.json.

    Sections without data still get their files, headers only. Floats go
    out with 17 significant digits.
    """
    os.makedirs(path, exist_ok=True)
    eig = results.eigen
    k = eig.n_components if eig is not None else 0

    with open(os.path.join(path, "eigen.csv"), "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "mean", *(f"ef{j + 1}" for j in range(k))])
        if eig is not None and eig.mean is not None:
            for r, t in enumerate(eig.grid.points):
                out.writerow(
                    [_fmt(t), _fmt(eig.mean.values[r])]
                    + [_fmt(eig.eigenfunctions[j, r]) for j in range(k)]
                )

    with open(os.path.join(path, "scores.csv"), "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["id", *(f"score{j + 1}" for j in range(k))])
        if eig is not None and eig.scores is not None:
            n = eig.scores.shape[0]
            ids = results.sample_ids or [f"c{i + 1}" for i in range(n)]
            for i in range(n):
                out.writerow([ids[i], *(_fmt(v) for v in eig.scores[i])])

    kg = max((est.n_components for _, est in results.gradients), default=0)
    with open(os.path.join(path, "gamma.csv"), "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(
            ["id"]
            + [f"grad{j + 1}" for j in range(kg)]
            + [f"pairs{j + 1}" for j in range(kg)]
            + [f"absent{j + 1}" for j in range(kg)]
        )
        for name, est in results.gradients:
            out.writerow(
                [name]
                + ["" if a else _fmt(v) for v, a in zip(est.coeffs, est.absent)]
                + [str(int(c)) for c in est.pair_counts]
                + [str(int(a)) for a in est.absent]
            )

    complete = [(name, est) for name, est in results.gradients if not est.absent.any()]
    with open(os.path.join(path, "dgf.csv"), "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", *(name for name, _ in complete)])
        if complete and eig is not None:
            curves = [
                derivative_generating_function(est, est.n_components).values
                for _, est in complete
            ]
            for r, t in enumerate(eig.grid.points):
                out.writerow([_fmt(t), *(_fmt(c[r]) for c in curves)])

    summary = dict(results.summary)
    if eig is not None:
        summary.setdefault("eigenvalues", [float(v) for v in eig.eigenvalues])
        summary.setdefault("fve", [float(v) for v in eig.fve])
    with open(os.path.join(path, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
