"""Classification of 2-dimensional orbit spaces of nonnegative curvature.

The positive and flat tables are regenerated from the admissible angle
lattice and the triangle-averaging arguments; nothing here stores the rows
verbatim.  Angles are exact rationals measured in units of pi.
"""
from __future__ import annotations

import csv
import enum
import functools
import io
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError

# Corner angles between boundary arcs are pi/n for these n.
ADMISSIBLE_DENOMINATORS = (2, 3, 4, 6)
# Window for the exhaustive 3-cone search; the (2, 2, r) family is unbounded.
CONE_SEARCH_BOUND = 30
# Concrete members emitted for the p-parametrised families.
DEFAULT_FAMILY_ORDERS = range(2, 7)

HEMISPHERE_MARKER = Fraction(1)


class CurvatureClass(str, enum.Enum):
    CONSTANT_POSITIVE = "constant-positive"
    POSITIVE_NON_CONSTANT = "positive-non-constant"
    FLAT = "flat"

    @property
    def is_positive(self):
        return self is not CurvatureClass.FLAT


def _as_fraction(x) -> Fraction:
    if isinstance(x, BoundaryAngle):
        if x.q is None:
            raise DomainError(f"symbolic angle {x.symbol!r} has no value")
        return x.q
    if isinstance(x, float):
        raise DomainError("angles must be exact rationals (multiples of pi), not floats")
    return Fraction(x)


def pi_label(q: Fraction) -> str:
    """Render ``q*pi`` the way the tables print it: ``π``, ``π/2``, ``2π/3``."""
    q = Fraction(q)
    head = "π" if q.numerator == 1 else f"{q.numerator}π"
    return head if q.denominator == 1 else f"{head}/{q.denominator}"


def fraction_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class BoundaryAngle:
    """Corner angle ``q*pi`` between two boundary arcs, or a named free angle."""

    q: Fraction | None = None
    symbol: str | None = None

    def __post_init__(self):
        if (self.q is None) == (self.symbol is None):
            raise DomainError("BoundaryAngle needs exactly one of q or symbol")
        if self.q is not None:
            q = Fraction(self.q)
            object.__setattr__(self, "q", q)
            if q != HEMISPHERE_MARKER and q not in admissible_boundary_angles():
                raise DomainError(f"boundary angle {pi_label(q)} is not admissible")

    @property
    def is_symbolic(self):
        return self.q is None

    @property
    def value(self) -> float:
        return float(_as_fraction(self)) * math.pi

    @property
    def label(self) -> str:
        return self.symbol if self.q is None else pi_label(self.q)

    def to_json(self):
        return self.symbol if self.q is None else fraction_str(self.q)


@dataclass(frozen=True)
class ConeAngle:
    """Interior cone point of total angle ``2*pi/p``."""

    p: int | None = None
    symbol: str | None = None

    def __post_init__(self):
        if (self.p is None) == (self.symbol is None):
            raise DomainError("ConeAngle needs exactly one of p or symbol")
        if self.p is not None and (int(self.p) != self.p or self.p < 2):
            raise DomainError(f"cone order must be an integer >= 2, got {self.p}")

    @property
    def is_symbolic(self):
        return self.p is None

    @property
    def angle(self) -> Fraction:
        if self.p is None:
            raise DomainError(f"symbolic cone order {self.symbol!r} has no value")
        return Fraction(2, self.p)

    @property
    def value(self) -> float:
        return float(self.angle) * math.pi

    @property
    def label(self) -> str:
        return f"2π/{self.symbol}" if self.p is None else pi_label(self.angle)

    def to_json(self):
        return self.symbol if self.p is None else self.p


@dataclass(frozen=True)
class TilingDescriptor:
    target: str
    tile: str
    tile_count: int | str
    tile_angles: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.target not in ("sphere", "plane"):
            raise DomainError(f"unknown tiling target {self.target!r}")
        if isinstance(self.tile_count, int):
            if self.target != "sphere":
                raise DomainError("finite tile counts only occur on the sphere")
            if self.tile_count not in (1, 2, 24, 48, 120) and self.tile_count % 4:
                raise DomainError(f"tile count {self.tile_count} is not of the form 1, 2, 4p, 24, 48, 120")
        elif self.target == "plane" and self.tile_count != "infinite":
            raise DomainError("planar tilings have infinitely many tiles")

    @property
    def count_label(self) -> str:
        return "∞" if self.tile_count == "infinite" else str(self.tile_count)

    def to_json(self):
        return {
            "target": self.target,
            "tile": self.tile,
            "tile_angles": None if self.tile_angles is None else [fraction_str(a) for a in self.tile_angles],
            "tile_count": self.tile_count,
        }


@dataclass(frozen=True)
class OrbitSpaceCase:
    """One row of the classification; symbolic rows stand for a whole family."""

    case_id: int
    boundary_angles: tuple[BoundaryAngle, ...]
    cone_angles: tuple[ConeAngle, ...]
    curvature_class: CurvatureClass
    tiling: TilingDescriptor | None = None
    parameters: tuple[tuple[str, int | Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "boundary_angles", tuple(self.boundary_angles))
        object.__setattr__(self, "cone_angles", tuple(self.cone_angles))
        object.__setattr__(self, "curvature_class", CurvatureClass(self.curvature_class))
        check_case_invariants(self)

    @property
    def is_family(self):
        return any(a.is_symbolic for a in self.boundary_angles) or any(c.is_symbolic for c in self.cone_angles)

    @property
    def has_tiling(self):
        return self.tiling is not None

    @property
    def tile_count(self):
        return None if self.tiling is None else self.tiling.tile_count

    @property
    def order(self) -> int | None:
        """Integer that selects this member of its family: p, or pi/alpha."""
        if len(self.parameters) != 1:
            return None
        value = self.parameters[0][1]
        return value.denominator if isinstance(value, Fraction) else int(value)

    def members(self, orders: Iterable[int] = DEFAULT_FAMILY_ORDERS) -> list[OrbitSpaceCase]:
        """Concrete instances of a family row (the row itself if already concrete).

        Free cone orders range over ``orders``; free boundary angles range
        over the admissible angles.  Unordered pairs are emitted once.
        """
        if not self.is_family:
            return [self]
        orders = sorted(set(orders))
        cone_syms = [c.symbol for c in self.cone_angles if c.is_symbolic]
        arc_syms = [a.symbol for a in self.boundary_angles if a.is_symbolic]
        fixed_cones = [c.p for c in self.cone_angles if not c.is_symbolic]
        fixed_arcs = [a.q for a in self.boundary_angles if not a.is_symbolic]
        arc_values = sorted(admissible_boundary_angles(), reverse=True)
        out = []
        for ps in itertools.combinations_with_replacement(orders, len(cone_syms)):
            for qs in itertools.combinations_with_replacement(arc_values, len(arc_syms)):
                cones = tuple(sorted(fixed_cones + list(ps)))
                arcs = tuple(sorted(fixed_arcs + list(qs), reverse=True))
                params = tuple(zip(cone_syms, ps)) + tuple(zip(arc_syms, qs))
                curvature, tiling = _describe(arcs, cones, self.curvature_class is CurvatureClass.FLAT)
                out.append(
                    OrbitSpaceCase(
                        case_id=self.case_id,
                        boundary_angles=tuple(BoundaryAngle(q) for q in arcs),
                        cone_angles=tuple(ConeAngle(p) for p in cones),
                        curvature_class=self.curvature_class,
                        tiling=tiling,
                        parameters=params,
                    )
                )
        return out

    def table_row(self) -> list[str]:
        t = self.tiling
        return [
            str(self.case_id),
            ", ".join(a.label for a in self.boundary_angles),
            ", ".join(c.label for c in self.cone_angles),
            "Yes" if t is not None else "No",
            "" if t is None else t.tile,
            "" if t is None else t.count_label,
        ]

    def to_json(self):
        return {
            "case_id": self.case_id,
            "boundary_angles": [a.to_json() for a in self.boundary_angles],
            "cone_orders": [c.to_json() for c in self.cone_angles],
            "curvature_class": self.curvature_class.value,
            "tiling": None if self.tiling is None else self.tiling.to_json(),
            "parameters": {k: (fraction_str(v) if isinstance(v, Fraction) else v) for k, v in self.parameters},
        }


def check_case_invariants(case: OrbitSpaceCase) -> None:
    """Raise DomainError if ``case`` breaks a structural constraint."""
    nb, nc = len(case.boundary_angles), len(case.cone_angles)
    if nb and nc:
        raise DomainError("an orbit space with boundary has no exceptional orbits")
    if case.curvature_class.is_positive:
        if nb > 3:
            raise DomainError("positive curvature allows at most 3 boundary arcs")
        if nc > 3:
            raise DomainError("positive curvature allows at most 3 exceptional orbits")
    else:
        if nb > 4:
            raise DomainError("flat orbit spaces have at most 4 boundary arcs")
        if nc:
            raise DomainError("flat orbit spaces considered here have boundary")
    if any(a.q == HEMISPHERE_MARKER for a in case.boundary_angles) and nb != 1:
        raise DomainError("the angle-pi marker only denotes a single vertex-free arc")


# ---------------------------------------------------------------- primitives


def admissible_boundary_angles() -> frozenset[Fraction]:
    """Corner angles allowed between boundary arcs, as multiples of pi."""
    return frozenset(Fraction(1, n) for n in ADMISSIBLE_DENOMINATORS)


def angle_sum_test(angles: Sequence, curvature) -> bool:
    """Gauss-Bonnet test for a geodesic polygon with the given corner angles.

    For a triangle this is: sum > pi when positively curved, sum == pi
    exactly when flat.  A k-gon is compared against (k - 2)*pi.
    """
    qs = [_as_fraction(a) for a in angles]
    if len(qs) < 3:
        raise DomainError("need at least three angles")
    if any(q < 0 for q in qs):
        raise DomainError("angles must be nonnegative")
    total = sum(qs, Fraction(0))
    flat_sum = len(qs) - 2
    if _is_flat(curvature):
        return total == flat_sum
    return total > flat_sum


def _is_flat(curvature) -> bool:
    if isinstance(curvature, CurvatureClass):
        return curvature is CurvatureClass.FLAT
    key = str(curvature).lower()
    if key in ("flat", "zero"):
        return True
    if key in ("pos", "positive", "constant-positive", "positive-non-constant"):
        return False
    raise DomainError(f"unknown curvature class {curvature!r}")


def average_angle_argument(k: int) -> Fraction:
    """Largest average triangle angle sum (in units of pi) for k boundary arcs.

    Fanning from one corner splits a k-gon into k - 2 triangles whose
    corners total at most k*pi/2.
    """
    if k < 3:
        raise DomainError(f"averaging needs at least 3 boundary arcs, got {k}")
    return Fraction(k, 2 * (k - 2))


def cone_average_angle_sum(k: int) -> Fraction:
    """Largest average triangle angle sum (units of pi) for k cone points on S^2.

    A triangulation with the k cone points as vertices has 2k - 4 triangles;
    each cone angle is at most pi, so the corners total at most k*pi.
    """
    if k < 3:
        raise DomainError(f"need at least 3 cone points, got {k}")
    return Fraction(k, 2 * k - 4)


# ---------------------------------------------------------------- enumeration


def _triangle_tile_count(angles: Sequence[Fraction]) -> int:
    excess = sum(angles, Fraction(0)) - 1
    count = Fraction(4) / excess
    if count.denominator != 1:
        raise DomainError(f"triangle {angles} does not tile the sphere")
    return int(count)


def _triangle_label(angles: Sequence[Fraction]) -> str:
    return "(" + ",".join(pi_label(a) for a in angles) + ")"


def _describe(arcs: Sequence[Fraction], cones: Sequence[int], flat: bool):
    """Curvature class and tiling descriptor of a concrete configuration."""
    if flat:
        return CurvatureClass.FLAT, TilingDescriptor("plane", _triangle_label(arcs), "infinite", tuple(arcs))
    if not arcs and not cones:
        return CurvatureClass.CONSTANT_POSITIVE, TilingDescriptor("sphere", "S^2", 1)
    if len(arcs) == 1 and arcs[0] == HEMISPHERE_MARKER:
        return CurvatureClass.CONSTANT_POSITIVE, TilingDescriptor("sphere", "Hemisphere", 2)
    if len(cones) == 3:
        tile = tuple(sorted((Fraction(1, p) for p in cones), reverse=True))
    elif len(arcs) == 3:
        tile = tuple(sorted(arcs, reverse=True))
    else:
        return CurvatureClass.POSITIVE_NON_CONSTANT, None
    return CurvatureClass.CONSTANT_POSITIVE, TilingDescriptor("sphere", _triangle_label(tile), _triangle_tile_count(tile), tile)


def _is_dihedral(tile_angles: Sequence[Fraction]) -> bool:
    return sorted(tile_angles, reverse=True)[:2] == [Fraction(1, 2)] * 2


def _sort_key(arcs, cones):
    cone_key = tuple(math.inf if c.is_symbolic else c.p for c in cones)
    arc_key = tuple(0 if a.is_symbolic else -a.q for a in arcs)
    return (bool(arcs), len(arcs), len(cones), cone_key, arc_key)


def _positive_rows(cone_bound: int = CONE_SEARCH_BOUND):
    rows = []
    # Empty boundary: the orbit space is S^2 with up to three cone points.
    rows.append(((), ()))
    rows.append(((), (ConeAngle(symbol="p"),)))
    rows.append(((), (ConeAngle(symbol="p"), ConeAngle(symbol="q"))))
    dihedral_seen = False
    for triple in itertools.combinations_with_replacement(range(2, cone_bound + 1), 3):
        tile = [Fraction(1, p) for p in triple]
        if not angle_sum_test(tile, "positive"):
            continue
        if _is_dihedral(tile):
            if not dihedral_seen:
                rows.append(((), (ConeAngle(2), ConeAngle(2), ConeAngle(symbol="p"))))
                dihedral_seen = True
            continue
        rows.append(((), tuple(ConeAngle(p) for p in triple)))
    assert cone_average_angle_sum(4) <= 1  # four or more cone points cannot be positively curved

    # Nonempty boundary with k arcs; k >= 4 fails the averaging bound.
    assert average_angle_argument(4) <= 1
    rows.append(((BoundaryAngle(HEMISPHERE_MARKER),), ()))
    rows.append(((BoundaryAngle(symbol="α"),), ()))
    rows.append(((BoundaryAngle(symbol="α"), BoundaryAngle(symbol="β")), ()))
    dihedral_seen = False
    angles = sorted(admissible_boundary_angles(), reverse=True)
    for triple in itertools.combinations_with_replacement(angles, 3):
        if not angle_sum_test(triple, "positive"):
            continue
        if _is_dihedral(triple):
            if not dihedral_seen:
                rows.append(((BoundaryAngle(Fraction(1, 2)), BoundaryAngle(Fraction(1, 2)), BoundaryAngle(symbol="α")), ()))
                dihedral_seen = True
            continue
        rows.append((tuple(BoundaryAngle(q) for q in triple), ()))
    return rows


def _family_descriptor(arcs, cones):
    syms = [x for x in (*arcs, *cones) if x.is_symbolic]
    if not syms:
        curvature, tiling = _describe(tuple(a.q for a in arcs), tuple(c.p for c in cones), flat=False)
        return curvature, tiling
    if len(cones) == 3:
        return CurvatureClass.CONSTANT_POSITIVE, TilingDescriptor("sphere", "(π/2,π/2,π/p)", "4p")
    if len(arcs) == 3:
        return CurvatureClass.CONSTANT_POSITIVE, TilingDescriptor("sphere", "(π/2,π/2,α)", "4π/α")
    return CurvatureClass.POSITIVE_NON_CONSTANT, None


def enumerate_positive_cases(cone_bound: int = CONE_SEARCH_BOUND) -> list[OrbitSpaceCase]:
    """Orbit spaces admitting positive curvature, numbered 1-13."""
    rows = sorted(_positive_rows(cone_bound), key=lambda r: _sort_key(*r))
    out = []
    for case_id, (arcs, cones) in enumerate(rows, start=1):
        curvature, tiling = _family_descriptor(arcs, cones)
        out.append(OrbitSpaceCase(case_id, arcs, cones, curvature, tiling))
    return out


def enumerate_flat_cases(first_id: int | None = None) -> list[OrbitSpaceCase]:
    """Flat orbit spaces (planar triangles and the square), numbered after the positive ones."""
    if first_id is None:
        first_id = len(enumerate_positive_cases()) + 1
    angles = sorted(admissible_boundary_angles(), reverse=True)
    polygons = []
    k = 3
    # k-gons survive only while the average triangle can still reach pi.
    while average_angle_argument(k) >= 1:
        for combo in itertools.combinations_with_replacement(angles, k):
            if angle_sum_test(combo, "flat"):
                polygons.append(tuple(combo))
        k += 1
    polygons.sort(key=lambda arcs: (len(arcs), tuple(-q for q in arcs)))
    out = []
    for case_id, arcs in enumerate(polygons, start=first_id):
        curvature, tiling = _describe(arcs, (), flat=True)
        out.append(OrbitSpaceCase(case_id, tuple(BoundaryAngle(q) for q in arcs), (), curvature, tiling))
    return out


@functools.lru_cache(maxsize=1)
def _tables() -> tuple[tuple[OrbitSpaceCase, ...], tuple[OrbitSpaceCase, ...]]:
    return tuple(enumerate_positive_cases()), tuple(enumerate_flat_cases())


def all_cases() -> list[OrbitSpaceCase]:
    positive, flat = _tables()
    return [*positive, *flat]


def get_case(case_id: int) -> OrbitSpaceCase:
    for case in all_cases():
        if case.case_id == case_id:
            return case
    raise DomainError(f"no orbit space with case id {case_id}")


def concrete_case(case_id: int, order: int | None = None) -> OrbitSpaceCase:
    """A concrete member of ``case_id``; ``order`` fixes p (case 4) or pi/alpha (case 11).

    Families with several free parameters fall back to their first member.
    """
    case = get_case(case_id)
    if not case.is_family:
        return case
    if order is None:
        return case.members()[0]
    members = case.members(orders=[order])
    for m in members:
        values = dict(m.parameters).values()
        if any(v == order or v == Fraction(1, order) for v in values):
            return m
    raise DomainError(f"case {case_id} has no member with order {order}")


def _unify(pattern, values, value_of) -> bool:
    if len(pattern) != len(values):
        return False
    for perm in set(itertools.permutations(values)):
        if all(pat.is_symbolic or value_of(pat) == v for pat, v in zip(pattern, perm)):
            return True
    return False


def find_case(boundary: Sequence = (), cones: Sequence[int] = (), curvature="positive") -> OrbitSpaceCase | None:
    """Return the table row that covers a concrete configuration, if any."""
    qs = tuple(_as_fraction(a) for a in boundary)
    ps = tuple(int(p) for p in cones)
    flat = _is_flat(curvature)
    cases = _tables()[1 if flat else 0]
    for case in cases:
        if _unify(case.boundary_angles, qs, lambda a: a.q) and _unify(case.cone_angles, ps, lambda c: c.p):
            if case.is_family and not all(q in admissible_boundary_angles() for q in qs if q != HEMISPHERE_MARKER):
                continue
            return case
    return None


# ---------------------------------------------------------------- output

TABLE_HEADER = ["#", "Ext ∠'s", "Int ∠'s", "Tiling?", "Tile", "No. Tiles"]


def cases_to_json(cases: Iterable[OrbitSpaceCase]) -> list[dict]:
    return [c.to_json() for c in cases]


def cases_to_csv(cases: Iterable[OrbitSpaceCase]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_HEADER)
    for case in cases:
        writer.writerow(case.table_row())
    return buf.getvalue()
