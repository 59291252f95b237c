"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 unsupported case, 4 numerical
non-closure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__
from ._tolerance import predicate_tolerance
from .classification import cases_to_csv, cases_to_json, enumerate_flat_cases, enumerate_positive_cases, get_case
from .errors import DomainError, NoTilingError, NonClosingError, NonGenericError
from .geodesics import IndexParams, run_census, tiling_for
from .pipeline import run_pipeline
from .planar_tiling import PlanarRingTiling, point_orbit_in_rings
from .spherical_tiling import generate_tiling, triangle_from_angles

EXIT_OK, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_NONCLOSURE = 0, 2, 3, 4

CURVATURES = {"pos": "positive", "positive": "positive", "flat": "flat", "zero": "flat", "all": "all"}


@dataclass
class RunConfig:
    command: str
    case_id: int | None = None
    angles: list[str] | None = None
    curvature: str = "all"
    order: int | None = None
    seed: int = 0
    n_seeds: int = 10
    m: int = 0
    a_contribution: int | None = None
    n_max: int = 20
    quotient: str = "reflection"
    format: str = "json"
    out: str | None = None
    plot_data: str | None = None
    tolerance: float | None = field(default=None)

    def __post_init__(self):
        if self.seed < 0 or self.n_max < 0 or self.n_seeds < 1:
            raise DomainError("seed and n_max must be >= 0, n_seeds >= 1")
        if self.format not in ("json", "csv"):
            raise DomainError(f"unknown format {self.format!r}")
        if self.curvature not in CURVATURES:
            raise DomainError(f"unknown curvature {self.curvature!r}")
        if self.quotient not in ("reflection", "rotation"):
            raise DomainError(f"unknown quotient {self.quotient!r}")

    @property
    def params(self) -> IndexParams:
        a = 0 if self.a_contribution is None else self.a_contribution
        return IndexParams(m=self.m, a_contribution=max(a, self.m))

    def header(self) -> dict:
        cfg = asdict(self)
        cfg["tolerance"] = predicate_tolerance(self.tolerance)
        cfg.pop("out")
        cfg.pop("plot_data")
        return {"tool": "orbitiles", "version": __version__, "config": cfg}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of defaults; flags override it")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", help="output path (stdout if omitted)")

    case_args = argparse.ArgumentParser(add_help=False)
    case_args.add_argument("--case", dest="case_id", type=int)
    case_args.add_argument("--order", type=int, help="p for case 4, pi/alpha for case 11")
    case_args.add_argument("--seed", type=int)
    case_args.add_argument("--m", type=int, help="minimum index of the endpoint form")
    case_args.add_argument("--a-contribution", type=int, help="index(A) assigned to each geodesic (default 0)")
    case_args.add_argument("--n-max", type=int)
    case_args.add_argument("--quotient", choices=["reflection", "rotation"])

    p = argparse.ArgumentParser(prog="orbitiles", description="Orbit-space classification, tilings, geodesic censuses and Betti bounds.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="reproduce the classification tables")
    c.add_argument("--curvature", choices=sorted(CURVATURES))

    t = sub.add_parser("tile", parents=[common, case_args], help="generate a spherical or planar tiling")
    t.add_argument("--angles", nargs=3, metavar="Q", help='triangle angles as multiples of pi, e.g. "1/2 1/3 1/4"')

    sub.add_parser("census", parents=[common, case_args], help="enumerate critical geodesics for one configuration")

    pl = sub.add_parser("pipeline", parents=[common, case_args], help="tile, enumerate and check Betti bounds")
    pl.add_argument("--n-seeds", type=int)
    pl.add_argument("--plot-data", help="also write 'n cumulative bound' columns here")
    return p


def build_config(argv=None) -> RunConfig:
    args = _parser().parse_args(argv)
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            values.update(json.load(fh))
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            values[k] = v
    tol = os.environ.get("ORBIFOLD_TOLERANCE")
    if tol and "tolerance" not in values:
        values["tolerance"] = float(tol)
    return RunConfig(**values)


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".orbitiles-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def cmd_classify(cfg: RunConfig) -> int:
    which = CURVATURES[cfg.curvature]
    cases = []
    if which in ("positive", "all"):
        cases += enumerate_positive_cases()
    if which in ("flat", "all"):
        cases += enumerate_flat_cases()
    if cfg.format == "csv":
        _write(cases_to_csv(cases), cfg.out)
    else:
        _write(_dump({"header": cfg.header(), "cases": cases_to_json(cases)}), cfg.out)
    return EXIT_OK


def _require_case(cfg: RunConfig):
    if cfg.case_id is None:
        raise DomainError("--case is required")
    return get_case(cfg.case_id)


def cmd_tile(cfg: RunConfig) -> int:
    if cfg.angles:
        qs = [Fraction(a) for a in cfg.angles]
        payload = generate_tiling(triangle_from_angles(*qs)).to_json()
    else:
        _require_case(cfg)
        tiling = tiling_for(cfg.case_id, cfg.order, rings=cfg.n_max)
        if isinstance(tiling, PlanarRingTiling):
            fund = tiling.fundamental.domain
            import numpy as np

            q = fund.sample_interior(np.random.default_rng(cfg.seed))
            payload = tiling.to_json(point_orbit_in_rings(q, tiling, tol=cfg.tolerance))
        else:
            payload = tiling.to_json()
    _write(_dump({"header": cfg.header(), "tiling": payload}), cfg.out)
    return EXIT_OK


def cmd_census(cfg: RunConfig) -> int:
    _require_case(cfg)
    tiling = tiling_for(cfg.case_id, cfg.order, rings=max(0, cfg.n_max - cfg.m))
    census = run_census(tiling, cfg.seed, cfg.params, cfg.n_max, cfg.quotient, cfg.case_id, cfg.tolerance)
    _write(_dump({"header": cfg.header(), "census": census.to_json()}), cfg.out)
    return EXIT_OK


def cmd_pipeline(cfg: RunConfig) -> int:
    _require_case(cfg)
    seeds = range(cfg.seed, cfg.seed + cfg.n_seeds)
    result = run_pipeline(cfg.case_id, cfg.n_max, cfg.params, seeds, cfg.order, cfg.quotient, cfg.tolerance)
    report = result.report
    if cfg.format == "csv":
        _write(report.to_csv(), cfg.out)
    else:
        summaries = [c.to_json(include_records=False) for c in result.censuses]
        _write(_dump({"header": cfg.header(), "report": report.to_json(), "censuses": summaries}), cfg.out)
    if cfg.plot_data:
        _write(report.plot_data(), cfg.plot_data)
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "tile": cmd_tile, "census": cmd_census, "pipeline": cmd_pipeline}


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (DomainError, TypeError, ValueError, OSError) as exc:
        print(f"orbitiles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg)
    except NoTilingError as exc:
        print(f"orbitiles: unsupported case: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except NonClosingError as exc:
        print(f"orbitiles: numerical non-closure: {exc}", file=sys.stderr)
        return EXIT_NONCLOSURE
    except NonGenericError as exc:
        print(f"orbitiles: could not find a generic configuration: {exc}", file=sys.stderr)
        return EXIT_NONCLOSURE
    except DomainError as exc:
        print(f"orbitiles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
