"""Betti-number bound reports built from geodesic censuses.

Each critical geodesic of index d contributes one d-cell to a CW model of
the path space, so per-index record counts bound the Betti numbers from
above.  The reports compare cumulative counts with the linear (sphere) and
quadratic (plane) bounds and fit a log-log growth degree.
"""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import UndefinedFitError
from .geodesics import GeodesicRecord, IndexParams

LINEAR_DEGREE_THRESHOLD = 1.2
QUADRATIC_DEGREE_THRESHOLD = 2.2
ELLIPTIC = "elliptic-consistent"
VIOLATION = "violation"


def index_histogram(records: Iterable[GeodesicRecord]) -> dict[int, int]:
    return dict(sorted(Counter(r.index for r in records).items()))


def cumulative_counts(hist: dict[int, int], n_max: int) -> list[int]:
    out, total = [], 0
    for n in range(n_max + 1):
        total += hist.get(n, 0)
        out.append(total)
    return out


def worst_case_histogram(hists: Iterable[dict[int, int]]) -> dict[int, int]:
    """Pointwise maximum over configurations."""
    out: dict[int, int] = {}
    for h in hists:
        for k, v in h.items():
            out[k] = max(out.get(k, 0), v)
    return dict(sorted(out.items()))


def linear_bound(c: int, params: IndexParams, n: int) -> int:
    return 2 * c * params.lam * (n + 1)


def quadratic_bound(params: IndexParams, n: int) -> int:
    return 4 * (2 * (n - params.m) + 1) ** 2


def fit_growth_degree(series: Sequence[float]) -> float:
    """Least-squares slope of log(series[n]) against log(n + 1) over the upper half."""
    y = np.asarray(series, dtype=float)
    if len(y) < 5:
        raise UndefinedFitError(f"need at least 5 terms, got {len(y)}")
    if not np.any(y):
        raise UndefinedFitError("series is identically zero")
    lo = len(y) // 2
    window = y[lo:]
    if np.any(window <= 0):
        raise UndefinedFitError("series must be positive over the fit window")
    x = np.log(np.arange(lo, len(y)) + 1.0)
    slope, _ = np.polyfit(x, np.log(window), 1)
    return float(slope)


@dataclass
class BettiBoundReport:
    case_id: int | None
    params: IndexParams
    kind: str  # "linear" or "quadratic"
    histogram: dict[int, int]
    cumulative: list[int]
    bound_values: list[int]
    satisfied: list[bool]
    fitted_degree: float | None
    degree_threshold: float
    c: int | None = None
    seeds: list[int] = field(default_factory=list)

    @property
    def n_max(self) -> int:
        return len(self.cumulative) - 1

    @property
    def verdict(self) -> str:
        # a fit that could not be made (short series) does not block the verdict
        finite = self.fitted_degree is None or math.isfinite(self.fitted_degree)
        return ELLIPTIC if all(self.satisfied) and finite else VIOLATION

    @property
    def first_violation(self) -> int | None:
        for n, ok in enumerate(self.satisfied):
            if not ok:
                return n
        return None

    @property
    def degree_within_threshold(self) -> bool:
        return self.fitted_degree is not None and self.fitted_degree <= self.degree_threshold

    def to_json(self) -> dict:
        return {
            "case_id": self.case_id,
            "bound": self.kind,
            "m": self.params.m,
            "lambda": self.params.lam,
            "index_A_contribution": self.params.a_contribution,
            "c": self.c,
            "seeds": self.seeds,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "cumulative": self.cumulative,
            "bound_values": self.bound_values,
            "satisfied": self.satisfied,
            "first_violation": self.first_violation,
            "fitted_degree": self.fitted_degree,
            "degree_threshold": self.degree_threshold,
            "degree_within_threshold": self.degree_within_threshold,
            "verdict": self.verdict,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "cumulative", "bound", "satisfied"])
        for n, (cum, b, ok) in enumerate(zip(self.cumulative, self.bound_values, self.satisfied)):
            w.writerow([n, cum, b, str(ok).lower()])
        return buf.getvalue()

    def plot_data(self) -> str:
        """Whitespace-separated ``n cumulative bound`` columns for external plotting."""
        lines = ["# n cumulative bound"]
        lines += [f"{n} {c} {b}" for n, (c, b) in enumerate(zip(self.cumulative, self.bound_values))]
        return "\n".join(lines) + "\n"


def _report(kind, hist, bounds, params, n_max, threshold, case_id, c, seeds) -> BettiBoundReport:
    cum = cumulative_counts(hist, n_max)
    try:
        degree = fit_growth_degree(cum)
    except UndefinedFitError:
        degree = None
    return BettiBoundReport(
        case_id=case_id,
        params=params,
        kind=kind,
        histogram=dict(hist),
        cumulative=cum,
        bound_values=bounds,
        satisfied=[x <= b for x, b in zip(cum, bounds)],
        fitted_degree=degree,
        degree_threshold=threshold,
        c=c,
        seeds=list(seeds),
    )


def check_linear_bound(hist: dict[int, int], c: int, params: IndexParams, n_max: int, case_id: int | None = None, seeds: Sequence[int] = ()) -> BettiBoundReport:
    """Compare cumulative cell counts with 2*c*lambda*(n + 1) for n = 0..n_max."""
    bounds = [linear_bound(c, params, n) for n in range(n_max + 1)]
    return _report("linear", hist, bounds, params, n_max, LINEAR_DEGREE_THRESHOLD, case_id, c, seeds)


def check_quadratic_bound(hist: dict[int, int], params: IndexParams, n_max: int, case_id: int | None = None, seeds: Sequence[int] = ()) -> BettiBoundReport:
    """Compare cumulative cell counts with 4*(2*(n - m) + 1)**2 for n = 0..n_max."""
    bounds = [quadratic_bound(params, n) for n in range(n_max + 1)]
    return _report("quadratic", hist, bounds, params, n_max, QUADRATIC_DEGREE_THRESHOLD, case_id, None, seeds)
