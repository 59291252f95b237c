"""Critical geodesics from a generic basepoint to the orbit of a principal point.

Geodesics are unfolded into the tiled model space: great-circle arcs on
S^2, straight segments in the plane.  Each one gets a Morse index from its
focal crossings (antipode passages on the sphere, mirror-line crossings in
the plane, multiplicity 1 each) plus a fixed contribution from the
endpoint form, clamped at zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._tolerance import predicate_tolerance
from .classification import concrete_case, get_case
from .errors import DomainError, NoTilingError, NonGenericError
from .planar_tiling import PlanarRingTiling, build_rings, fundamental_rhombus, mirror_lines, point_orbit_in_rings
from .spherical_tiling import SphericalTiling, arc_length, normalize, quantize, tiling_for_case

TWO_PI = 2.0 * math.pi
MAX_REDRAWS = 100


@dataclass(frozen=True)
class IndexParams:
    """Lower bound ``m`` on index(A) and the value actually assigned to each record.

    ``lam`` is the circuit factor max(1, 1 - m) used by the linear bound.
    """

    m: int = 0
    a_contribution: int = 0

    def __post_init__(self):
        if self.a_contribution < self.m:
            raise DomainError("index(A) contribution cannot be below its minimum m")

    @property
    def lam(self) -> int:
        return max(1, 1 - self.m)

    @classmethod
    def worst_case(cls, m: int) -> IndexParams:
        return cls(m=m, a_contribution=m)


class CrossingEvent(NamedTuple):
    t: float  # arc length / distance from the basepoint
    kind: str  # "antipode", "rhombus-edge" or "interior-mirror"
    multiplicity: int = 1


@dataclass(frozen=True)
class GeodesicRecord:
    target_copy_id: int
    target: tuple[float, ...]
    direction: tuple[float, ...]
    direction_sign: int
    winding: int
    length: float
    antipodal_crossings: int
    stratum_crossings: tuple[CrossingEvent, ...]
    visits_to_Q: int
    index_A_contribution: int
    index: int

    @property
    def focal_count(self) -> int:
        return self.antipodal_crossings + sum(e.multiplicity for e in self.stratum_crossings)

    def to_json(self) -> dict:
        return {
            "target_copy_id": self.target_copy_id,
            "target": list(self.target),
            "direction": list(self.direction),
            "direction_sign": self.direction_sign,
            "winding": self.winding,
            "length": self.length,
            "antipodal_crossings": self.antipodal_crossings,
            "stratum_crossings": [[e.t, e.kind] for e in self.stratum_crossings],
            "visits_to_Q": self.visits_to_Q,
            "index_A_contribution": self.index_A_contribution,
            "index": self.index,
        }


@dataclass(frozen=True, eq=False)
class MarkedConfiguration:
    """Basepoint ``p`` and principal point ``q`` in a tiled model space.

    ``quotient="rotation"`` models a doubled triangle (cases 4-7 read as
    closed orbifolds): only orientation-preserving elements move ``q``.
    """

    p: np.ndarray
    q: np.ndarray
    tiling: SphericalTiling | PlanarRingTiling
    seed: int = 0
    case_id: int | None = None
    quotient: str = "reflection"
    redraws: int = 0

    @property
    def geometry(self) -> str:
        return "sphere" if isinstance(self.tiling, SphericalTiling) else "plane"

    def sphere_group(self) -> list[np.ndarray]:
        if self.quotient == "rotation":
            return self.tiling.rotation_subgroup()
        return self.tiling.group_elements

    def to_json(self) -> dict:
        return {
            "case_id": self.case_id,
            "geometry": self.geometry,
            "p": [float(x) for x in self.p],
            "q": [float(x) for x in self.q],
            "seed": self.seed,
            "redraws": self.redraws,
            "quotient": self.quotient,
        }


@dataclass
class GenericityResult:
    passed: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.passed


# ------------------------------------------------------------------ sphere


def sphere_copies(q, group) -> np.ndarray:
    """Distinct images of ``q``, in canonical (quantized-key) order."""
    found = {}
    for g in group:
        x = normalize(g @ q)
        found.setdefault(quantize(x), x)
    return np.array([found[k] for k in sorted(found)])


def _sphere_genericity(p, q, tiling: SphericalTiling, group, tol) -> GenericityResult:
    bad = []
    mirrors = tiling.mirror_normals()
    for name, x in (("p", p), ("q", q)):
        if len(mirrors) and np.min(np.abs(mirrors @ x)) <= tol:
            bad.append(f"{name} lies on a mirror great circle")
    copies = sphere_copies(q, group)
    for i, c in enumerate(copies):
        if np.linalg.norm(p - c) <= tol:
            bad.append(f"p coincides with copy {i} of q")
        elif np.linalg.norm(p + c) <= tol:
            bad.append(f"p is antipodal to copy {i} of q")
    if len(copies) > 1:
        iu, ju = np.triu_indices(len(copies), k=1)
        cross = np.cross(copies[iu], copies[ju])
        norms = np.linalg.norm(cross, axis=1)
        determined = norms > tol  # antipodal pairs lie on every circle through them
        normals = cross[determined] / norms[determined, None]
        hits = np.nonzero(np.abs(normals @ p) <= tol)[0]
        pairs = np.stack([iu[determined], ju[determined]], axis=1)
        for h in hits[:10]:
            i, j = pairs[h]
            bad.append(f"p lies on the great circle through copies {i} and {j} of q")
    return GenericityResult(not bad, bad)


# ------------------------------------------------------------------- plane


def _plane_genericity(p, q, tiling: PlanarRingTiling, tol) -> GenericityResult:
    bad = []
    domain = tiling.fundamental.domain
    for name, x in (("p", p), ("q", q)):
        d = domain.signed_distances(x)
        if np.any(d < -tol):
            bad.append(f"{name} lies outside the fundamental domain")
        elif np.any(np.abs(d) <= tol):
            bad.append(f"{name} lies on a mirror line")
    if bad:
        return GenericityResult(False, bad)
    pts = np.array([c.point for c in point_orbit_in_rings(q, tiling, tol=tol)])
    rel = pts - p
    r = np.linalg.norm(rel, axis=1)
    for i in np.nonzero(r <= tol)[0]:
        bad.append(f"p coincides with copy {i} of q")
    ang = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), math.pi)
    order = np.argsort(ang)
    u, v = rel[order], rel[np.roll(order, -1)]
    cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    dist = cross / np.maximum(np.linalg.norm(u, axis=1), np.linalg.norm(v, axis=1))
    for k in np.nonzero(dist <= tol)[0][:10]:
        i, j = order[k], order[(k + 1) % len(order)]
        if i != j:
            bad.append(f"p lies on the line through copies {i} and {j} of q")
    return GenericityResult(not bad, bad)


def genericity_check(p, q, tiling, group=None, tol: float | None = None) -> GenericityResult:
    """Check that ``p`` avoids every degenerate locus determined by the orbit of ``q``.

    Fails if p or q lies on a mirror, p equals (or, on the sphere, is
    antipodal to) a copy of q, or p lies on a great circle / line through
    two copies of q.  On the sphere, antipodal pairs of copies are skipped:
    they lie on every great circle through either point.
    """
    tol = predicate_tolerance(tol)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if isinstance(tiling, SphericalTiling):
        return _sphere_genericity(p, q, tiling, tiling.group_elements if group is None else group, tol)
    return _plane_genericity(p, q, tiling, tol)


@dataclass(frozen=True)
class Arc:
    start: np.ndarray
    tangent: np.ndarray
    length: float


@dataclass(frozen=True)
class Segment:
    start: np.ndarray
    end: np.ndarray


def _antipode_events(length: float) -> list[CrossingEvent]:
    out = []
    t = math.pi
    while t < length:
        out.append(CrossingEvent(t, "antipode"))
        t += TWO_PI
    return out


def _segment_events(p, q, lines, tol) -> list[CrossingEvent]:
    return _segment_events_many(p, np.asarray(q, dtype=float)[None, :], lines, tol)[0]


def _segment_events_many(p, targets, lines, tol) -> list[list[CrossingEvent]]:
    """Mirror crossings of the segments from ``p`` to each row of ``targets``."""
    sp = lines.normals @ p - lines.offsets  # (L,)
    sq = targets @ lines.normals.T - lines.offsets  # (C, L)
    near_p = np.abs(sp) <= tol
    if np.any(near_p):
        raise NonGenericError("segment starts on a mirror line")
    if np.any(np.abs(sq) <= tol):
        raise NonGenericError("segment endpoint lies on a mirror line")
    hit = sp * sq < 0
    lengths = np.linalg.norm(targets - p, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = np.where(hit, sp / (sp - sq) * lengths[:, None], np.inf)
    order = np.argsort(ts, axis=1, kind="stable")
    ts = np.take_along_axis(ts, order, axis=1)
    counts = hit.sum(axis=1)
    with np.errstate(invalid="ignore"):
        gaps = np.diff(ts, axis=1)
    if np.any(np.isfinite(gaps) & (gaps <= tol)):
        raise NonGenericError("segment passes through a vertex of the mirror arrangement")
    kind_names = np.where(lines.on_lattice, "rhombus-edge", "interior-mirror")
    out = []
    for row, k in enumerate(counts.tolist()):
        kinds = kind_names[order[row, :k]].tolist()
        out.append([CrossingEvent(t, kd) for t, kd in zip(ts[row, :k].tolist(), kinds)])
    return out


def crossing_events(path: Arc | Segment, tiling, tol: float | None = None) -> list[CrossingEvent]:
    """Focal crossings along a geodesic, ordered by distance from its start.

    Arcs on S^2 report antipode passages; plane segments report transversal
    crossings of mirror lines, tagged by whether the line carries rhombus
    edges.
    """
    tol = predicate_tolerance(tol)
    if isinstance(path, Arc):
        return _antipode_events(path.length)
    return _segment_events(np.asarray(path.start, float), np.asarray(path.end, float), mirror_lines(tiling), tol)


def _index(crossings: int, params: IndexParams) -> int:
    return max(0, crossings + params.a_contribution)


def sphere_geodesics(config: MarkedConfiguration, params: IndexParams = IndexParams(), max_index: int = 0, tol: float | None = None) -> list[GeodesicRecord]:
    """All great-circle geodesics from p to copies of q with index <= ``max_index``.

    Both first arrivals (one per copy and direction) are always emitted;
    further circuits are added while their index stays within bound.  One
    antipode passage occurs per full circuit, so extensions stop once the
    crossing count exceeds ``max_index - a_contribution``.
    """
    if not isinstance(config.tiling, SphericalTiling):
        raise DomainError("sphere_geodesics needs a spherical tiling")
    tol = predicate_tolerance(tol)
    group = config.sphere_group()
    p, q = np.asarray(config.p, float), np.asarray(config.q, float)
    gen = genericity_check(p, q, config.tiling, group=group, tol=tol)
    if not gen:
        raise NonGenericError("; ".join(gen.violations))
    records = []
    for cid, target in enumerate(sphere_copies(q, group)):
        theta = arc_length(p, target)
        tangent = normalize(target - np.dot(p, target) * p)
        for sign, first in ((1, theta), (-1, TWO_PI - theta)):
            w = 0
            while True:
                length = first + TWO_PI * w
                events = _antipode_events(length)
                idx = _index(len(events), params)
                if w > 0 and idx > max_index:
                    break
                records.append(
                    GeodesicRecord(
                        target_copy_id=cid,
                        target=tuple(float(x) for x in target),
                        direction=tuple(float(x) for x in sign * tangent),
                        direction_sign=sign,
                        winding=w,
                        length=length,
                        antipodal_crossings=len(events),
                        stratum_crossings=tuple(events),
                        visits_to_Q=w + 1,
                        index_A_contribution=params.a_contribution,
                        index=idx,
                    )
                )
                if idx > max_index:
                    break
                w += 1
    return canonical_order(records)


def plane_horizon(params: IndexParams, max_index: int) -> int:
    """Rings that must be searched for every geodesic of index <= max_index."""
    return max(0, max_index - params.m)


def plane_geodesics(config: MarkedConfiguration, params: IndexParams = IndexParams(), max_index: int = 0, tol: float | None = None) -> list[GeodesicRecord]:
    """One straight segment from p to each copy of q in rings 0..max_index - m."""
    tiling = config.tiling
    if not isinstance(tiling, PlanarRingTiling):
        raise DomainError("plane_geodesics needs a planar ring tiling")
    tol = predicate_tolerance(tol)
    horizon = plane_horizon(params, max_index)
    if tiling.n_max < horizon:
        raise DomainError(f"tiling reaches ring {tiling.n_max}; need ring {horizon}")
    p, q = np.asarray(config.p, float), np.asarray(config.q, float)
    gen = genericity_check(p, q, tiling, tol=tol)
    if not gen:
        raise NonGenericError("; ".join(gen.violations))
    copies = point_orbit_in_rings(q, tiling, horizon, tol=tol)
    all_events = _segment_events_many(p, np.array([c.point for c in copies]), mirror_lines(tiling), tol)
    records = []
    for cid, (copy, events) in enumerate(zip(copies, all_events)):
        d = copy.point - p
        length = float(np.linalg.norm(d))
        records.append(
            GeodesicRecord(
                target_copy_id=cid,
                target=tuple(float(x) for x in copy.point),
                direction=tuple(float(x) for x in d / length),
                direction_sign=1,
                winding=0,
                length=length,
                antipodal_crossings=0,
                stratum_crossings=tuple(events),
                visits_to_Q=1,
                index_A_contribution=params.a_contribution,
                index=_index(len(events), params),
            )
        )
    return canonical_order(records)


def canonical_order(records: list[GeodesicRecord]) -> list[GeodesicRecord]:
    return sorted(records, key=lambda r: (r.target_copy_id, r.winding, -r.direction_sign))


# ------------------------------------------------------------ configurations


def tiling_for(case_id: int, order: int | None = None, rings: int = 0):
    """Model-space tiling for a tileable case (spherical or planar)."""
    case = get_case(case_id)
    if case.tiling is None:
        raise NoTilingError(f"case {case_id} has no constant-curvature tiling (Tiling? = No)")
    if case.tiling.target == "plane":
        return build_rings(fundamental_rhombus(case), rings)
    return tiling_for_case(concrete_case(case_id, order))


def draw_configuration(tiling, seed: int = 0, case_id: int | None = None, quotient: str = "reflection", tol: float | None = None, first_redraw: int = 0) -> MarkedConfiguration:
    """Random principal points q, p in the fundamental tile, both drawn from ``seed``.

    If the pair is not generic, p alone is redrawn from ``seed + k`` for
    k = 1, 2, ... and k is stored as ``redraws``.
    """
    spherical = isinstance(tiling, SphericalTiling)
    fund = tiling.fundamental if spherical else tiling.fundamental.domain
    rng = np.random.default_rng(seed)
    q = fund.sample_interior(rng)
    p = fund.sample_interior(rng)
    group = None
    if spherical:
        group = tiling.rotation_subgroup() if quotient == "rotation" else tiling.group_elements
    if case_id is None:
        case_id = tiling.case_id
    for k in range(first_redraw, first_redraw + MAX_REDRAWS):
        if k > 0:
            p = fund.sample_interior(np.random.default_rng(seed + k))
        if genericity_check(p, q, tiling, group=group, tol=tol):
            return MarkedConfiguration(p, q, tiling, seed, case_id, quotient, redraws=k)
    raise NonGenericError(f"no generic basepoint found after {MAX_REDRAWS} draws")


@dataclass
class Census:
    config: MarkedConfiguration
    params: IndexParams
    max_index: int
    records: list[GeodesicRecord]

    @property
    def copies(self) -> int:
        return len({r.target_copy_id for r in self.records})

    @property
    def single_visit(self) -> list[GeodesicRecord]:
        return [r for r in self.records if r.visits_to_Q == 1]

    def index_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for r in self.records:
            counts[r.index] = counts.get(r.index, 0) + 1
        return dict(sorted(counts.items()))

    def summary(self) -> dict:
        return {
            "copies_of_q": self.copies,
            "single_visit_count": len(self.single_visit),
            "record_count": len(self.records),
            "max_index": max((r.index for r in self.records), default=None),
            "per_index_counts": {str(k): v for k, v in self.index_counts().items()},
        }

    def to_json(self, include_records: bool = True) -> dict:
        out = {
            "configuration": {**self.config.to_json(), "m": self.params.m, "index_A_contribution": self.params.a_contribution, "max_index": self.max_index},
            "summary": self.summary(),
        }
        if include_records:
            out["records"] = [r.to_json() for r in self.records]
        return out


def run_census(tiling, seed: int = 0, params: IndexParams = IndexParams(), max_index: int = 0, quotient: str = "reflection", case_id: int | None = None, tol: float | None = None) -> Census:
    """Draw a generic configuration and enumerate its geodesics through ``max_index``.

    A non-generic incidence met during enumeration triggers a basepoint
    redraw with the next seed.
    """
    if isinstance(tiling, PlanarRingTiling) and tiling.n_max < plane_horizon(params, max_index):
        tiling = build_rings(tiling.fundamental, plane_horizon(params, max_index))
    enumerate_ = sphere_geodesics if isinstance(tiling, SphericalTiling) else plane_geodesics
    redraw = 0
    for _ in range(MAX_REDRAWS):
        config = draw_configuration(tiling, seed, case_id, quotient, tol, first_redraw=redraw)
        try:
            return Census(config, params, max_index, enumerate_(config, params, max_index, tol))
        except NonGenericError:
            redraw = config.redraws + 1
    raise NonGenericError(f"no generic configuration found from seed {seed}")
