"""Tile -> geodesic census -> Betti bound report, for one case and several seeds."""
from __future__ import annotations

from dataclasses import dataclass

from .classification import get_case
from .errors import NoTilingError
from .geodesics import Census, IndexParams, plane_horizon, run_census, tiling_for
from .morse_bounds import BettiBoundReport, check_linear_bound, check_quadratic_bound, index_histogram, worst_case_histogram


@dataclass
class PipelineResult:
    report: BettiBoundReport
    censuses: list[Census]


def run_pipeline(
    case_id: int,
    n_max: int,
    params: IndexParams = IndexParams(),
    seeds=range(10),
    order: int | None = None,
    quotient: str = "reflection",
    tol: float | None = None,
) -> PipelineResult:
    """Worst case over ``seeds`` of the cumulative index counts, checked against the case's bound."""
    case = get_case(case_id)
    if case.tiling is None:
        raise NoTilingError(f"case {case_id} has no tiling (Tiling? = No); its ellipticity is not a census computation")
    flat = case.tiling.target == "plane"
    tiling = tiling_for(case_id, order, rings=plane_horizon(params, n_max) if flat else 0)
    seeds = list(seeds)
    censuses = [run_census(tiling, s, params, n_max, quotient, case_id, tol) for s in seeds]
    hist = worst_case_histogram(index_histogram(c.records) for c in censuses)
    if flat:
        report = check_quadratic_bound(hist, params, n_max, case_id, seeds)
    else:
        report = check_linear_bound(hist, tiling.tile_count, params, n_max, case_id, seeds)
    return PipelineResult(report, censuses)
