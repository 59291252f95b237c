"""Flat orbit spaces as ring-indexed rhombus lattices in the plane.

Every flat case reduces to a square or a 60/120 rhombus made of at most
four copies of the orbit space.  Ring ``n`` is the square annulus of
rhombi at lattice distance ``n`` from the central one.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._tolerance import predicate_tolerance
from .classification import OrbitSpaceCase, get_case
from .errors import DomainError, NonGenericError

KEY_GRID = 1e-6
SQRT3 = math.sqrt(3.0)


def _key(v) -> tuple[int, ...]:
    return tuple(int(x) for x in np.rint(np.asarray(v, dtype=float).ravel() / KEY_GRID))


@dataclass(frozen=True, eq=False)
class Affine:
    """Plane isometry ``x -> linear @ x + shift``."""

    linear: np.ndarray
    shift: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.shift

    def __matmul__(self, other: Affine) -> Affine:
        return Affine(self.linear @ other.linear, self.linear @ other.shift + self.shift)

    def inverse(self) -> Affine:
        inv = self.linear.T
        return Affine(inv, -inv @ self.shift)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    @classmethod
    def identity(cls) -> Affine:
        return cls(np.eye(2), np.zeros(2))

    @classmethod
    def reflection(cls, a, b) -> Affine:
        """Reflection in the line through points ``a`` and ``b``."""
        a = np.asarray(a, dtype=float)
        d = np.asarray(b, dtype=float) - a
        d = d / np.linalg.norm(d)
        n = np.array([-d[1], d[0]])
        lin = np.eye(2) - 2.0 * np.outer(n, n)
        return cls(lin, a - lin @ a)


@dataclass(frozen=True, eq=False)
class Polygon:
    """Convex polygon, vertices counter-clockwise."""

    vertices: np.ndarray

    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def signed_distances(self, x) -> np.ndarray:
        """Distance of ``x`` to each edge line, positive inside."""
        x = np.asarray(x, dtype=float)
        out = []
        for a, b in self.edges():
            d = b - a
            n = np.array([-d[1], d[0]]) / np.linalg.norm(d)
            out.append(float(np.dot(x - a, n)))
        return np.array(out)

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(np.all(self.signed_distances(x) >= -tol))

    @property
    def area(self) -> float:
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def side_lengths(self) -> np.ndarray:
        return np.array([np.linalg.norm(b - a) for a, b in self.edges()])

    def angles(self) -> np.ndarray:
        v, k = self.vertices, len(self.vertices)
        out = []
        for i in range(k):
            u, w = v[i - 1] - v[i], v[(i + 1) % k] - v[i]
            out.append(math.atan2(abs(u[0] * w[1] - u[1] * w[0]), float(np.dot(u, w))))
        return np.array(out)

    def transformed(self, g: Affine) -> Polygon:
        v = g(self.vertices)
        if g.det < 0:
            v = v[::-1]
        return Polygon(v)

    def sample_interior(self, rng) -> np.ndarray:
        w = rng.dirichlet(np.ones(len(self.vertices)))
        return w @ self.vertices


# Fundamental domains with side 1; reflecting/doubling them gives the rhombus
# spanned by the lattice basis below.
_FUNDAMENTAL = {
    17: [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
    15: [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
    16: [(0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2)],
    14: [(0.0, 0.0), (0.5, 0.0), (0.5, SQRT3 / 2)],
}
_SQUARE_BASIS = ((1.0, 0.0), (0.0, 1.0))
_RHOMBUS_BASIS = ((1.0, 0.0), (0.5, SQRT3 / 2))
_BASIS = {17: _SQUARE_BASIS, 15: _SQUARE_BASIS, 16: _RHOMBUS_BASIS, 14: _RHOMBUS_BASIS}
_CONSTRUCTION = {
    17: "square is the orbit space",
    15: "right isosceles triangle reflected across its hypotenuse",
    16: "equilateral triangle doubled across an edge",
    14: "half-equilateral triangle reflected to an equilateral one, then doubled",
}


@dataclass(frozen=True, eq=False)
class RhombusTile:
    vertices: np.ndarray
    ring_index: int
    lattice_coords: tuple[int, int]

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)


@dataclass(eq=False)
class FundamentalRhombus:
    case_id: int
    tile: RhombusTile
    domain: Polygon  # one copy of the orbit space inside the tile
    basis: np.ndarray  # rows e1, e2
    copies_per_tile: int
    construction: str

    def generators(self) -> list[Affine]:
        return [Affine.reflection(a, b) for a, b in self.domain.edges()]


def fundamental_rhombus(case: OrbitSpaceCase | int) -> FundamentalRhombus:
    if isinstance(case, int):
        case = get_case(case)
    if case.curvature_class.value != "flat" or case.case_id not in _FUNDAMENTAL:
        raise DomainError(f"case {case.case_id} is not a flat orbit space")
    domain = Polygon(np.array(_FUNDAMENTAL[case.case_id]))
    basis = np.array(_BASIS[case.case_id])
    e1, e2 = basis
    tile = RhombusTile(np.array([np.zeros(2), e1, e1 + e2, e2]), 0, (0, 0))
    copies = int(round(tile.polygon.area / domain.area))
    # measured angles of the stored domain must reproduce the table row
    want = sorted(float(a.q) * math.pi for a in case.boundary_angles)
    if not np.allclose(sorted(domain.angles()), want, atol=1e-12):
        raise AssertionError(f"fundamental domain for case {case.case_id} has wrong angles")
    return FundamentalRhombus(case.case_id, tile, domain, basis, copies, _CONSTRUCTION[case.case_id])


@dataclass(eq=False)
class PlanarRingTiling:
    fundamental: FundamentalRhombus
    n_max: int
    tiles: dict[tuple[int, int], RhombusTile]
    _elements: list[Affine] | None = field(default=None, repr=False)
    _mirrors: MirrorLines | None = field(default=None, repr=False)

    @property
    def case_id(self) -> int:
        return self.fundamental.case_id

    def ring(self, n: int) -> list[RhombusTile]:
        return [t for t in self.tiles.values() if t.ring_index == n]

    def ring_sizes(self) -> list[int]:
        sizes = [0] * (self.n_max + 1)
        for t in self.tiles.values():
            sizes[t.ring_index] += 1
        return sizes

    def lattice_coords_of(self, x) -> tuple[int, int]:
        """Lattice coordinates of the rhombus containing ``x``."""
        i, j = self.lattice_coords_many(np.asarray(x, dtype=float)[None, :])[0]
        return int(i), int(j)

    def lattice_coords_many(self, xs) -> np.ndarray:
        inv = np.linalg.inv(self.fundamental.basis.T)
        return np.floor(np.asarray(xs, dtype=float) @ inv.T).astype(np.int64)

    def ring_of(self, x) -> int:
        i, j = self.lattice_coords_of(x)
        return max(abs(i), abs(j))

    def group_elements(self) -> list[Affine]:
        """Wallpaper-group elements whose image of the orbit space lies in rings 0..n_max."""
        if self._elements is None:
            self._elements = _close_group(self.fundamental, self.n_max, self)
        return self._elements

    def domains(self) -> list[Polygon]:
        return [self.fundamental.domain.transformed(g) for g in self.group_elements()]

    def to_json(self, orbit=None) -> dict:
        rings: list[list[list[int]]] = [[] for _ in range(self.n_max + 1)]
        for (i, j), t in sorted(self.tiles.items()):
            rings[t.ring_index].append([i, j])
        out = {
            "case_id": self.case_id,
            "fundamental_polygon": self.fundamental.domain.vertices.tolist(),
            "rhombus": self.fundamental.tile.vertices.tolist(),
            "lattice_basis": self.fundamental.basis.tolist(),
            "copies_per_tile": self.fundamental.copies_per_tile,
            "n_max": self.n_max,
            "rings": rings,
        }
        if orbit is not None:
            out["point_orbit"] = [c.point.tolist() for c in orbit]
            out["point_orbit_tiles"] = [list(c.lattice_coords) for c in orbit]
        return out


def build_rings(fundamental: FundamentalRhombus, n_max: int) -> PlanarRingTiling:
    """All rhombi with lattice coordinates ``max(|i|, |j|) <= n_max``."""
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    e1, e2 = fundamental.basis
    base = fundamental.tile.vertices
    tiles = {}
    for i in range(-n_max, n_max + 1):
        for j in range(-n_max, n_max + 1):
            tiles[(i, j)] = RhombusTile(base + i * e1 + j * e2, max(abs(i), abs(j)), (i, j))
    return PlanarRingTiling(fundamental, n_max, tiles)


def tiling_for_case(case: OrbitSpaceCase | int, n_max: int) -> PlanarRingTiling:
    return build_rings(fundamental_rhombus(case), n_max)


def _close_group(fundamental: FundamentalRhombus, n_max: int, tiling: PlanarRingTiling) -> list[Affine]:
    """Breadth-first closure under edge reflections, kept inside rings 0..n_max.

    The rings form a convex parallelogram tiled by copies of the orbit space,
    so the copies inside it are edge-connected and the search is complete.
    """
    gens = fundamental.generators()
    c0 = fundamental.domain.centroid()
    start = Affine.identity()
    seen = {_key(c0): start}
    out = [start]
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = g @ s
            c = h(c0)
            if tiling.ring_of(c) > n_max:
                continue
            k = _key(c)
            if k in seen:
                continue
            seen[k] = h
            out.append(h)
            queue.append(h)
    return out


@dataclass(frozen=True, eq=False)
class OrbitCopy:
    point: np.ndarray
    element: Affine
    lattice_coords: tuple[int, int]

    @property
    def ring_index(self) -> int:
        return max(abs(self.lattice_coords[0]), abs(self.lattice_coords[1]))


def on_mirror(q, fundamental: FundamentalRhombus, tol: float | None = None) -> bool:
    tol = predicate_tolerance(tol)
    return bool(np.any(np.abs(fundamental.domain.signed_distances(q)) <= tol))


def point_orbit_in_rings(q, tiling: PlanarRingTiling, n_max: int | None = None, tol: float | None = None) -> list[OrbitCopy]:
    """Images of a principal point ``q`` under the wallpaper group, in rings 0..n_max."""
    tol = predicate_tolerance(tol)
    if n_max is None:
        n_max = tiling.n_max
    if n_max > tiling.n_max:
        raise DomainError(f"tiling only built through ring {tiling.n_max}")
    q = np.asarray(q, dtype=float)
    fund = tiling.fundamental
    if not fund.domain.contains(q):
        raise DomainError("q must lie in the fundamental domain")
    if on_mirror(q, fund, tol):
        raise NonGenericError("q lies on a mirror line")
    elements = tiling.group_elements()
    linear = np.array([g.linear for g in elements])
    shift = np.array([g.shift for g in elements])
    images = np.einsum("gij,j->gi", linear, q) + shift
    coords = tiling.lattice_coords_many(images)
    keep = np.max(np.abs(coords), axis=1) <= n_max
    copies = {}
    for idx in np.nonzero(keep)[0]:
        x = images[idx]
        copies.setdefault(_key(x), OrbitCopy(x, elements[idx], (int(coords[idx, 0]), int(coords[idx, 1]))))
    return [copies[k] for k in sorted(copies)]


# ------------------------------------------------------------- mirror lines


@dataclass(frozen=True, eq=False)
class MirrorLines:
    """Distinct mirror lines ``<normal, x> = offset`` meeting rings 0..n_max."""

    normals: np.ndarray  # (L, 2)
    offsets: np.ndarray  # (L,)
    on_lattice: np.ndarray  # (L,) bool: line carries rhombus edges

    def __len__(self):
        return len(self.offsets)


def mirror_lines(tiling: PlanarRingTiling) -> MirrorLines:
    if tiling._mirrors is None:
        tiling._mirrors = _collect_mirror_lines(tiling)
    return tiling._mirrors


def _collect_mirror_lines(tiling: PlanarRingTiling) -> MirrorLines:
    lines = {}
    for poly in tiling.domains():
        for a, b in poly.edges():
            d = (b - a) / np.linalg.norm(b - a)
            n = np.array([-d[1], d[0]])
            if n[0] < -1e-9 or (abs(n[0]) <= 1e-9 and n[1] < 0):
                n = -n
            off = float(np.dot(n, a))
            lines.setdefault(_key(np.append(n, off)), (n, off))
    keys = sorted(lines)
    normals = np.array([lines[k][0] for k in keys])
    offsets = np.array([lines[k][1] for k in keys])
    e1, e2 = tiling.fundamental.basis
    on_lattice = np.array([_is_lattice_line(n, o, e1, e2) for n, o in zip(normals, offsets)], dtype=bool)
    return MirrorLines(normals, offsets, on_lattice)


def _is_lattice_line(n, off, e1, e2) -> bool:
    for along, across in ((e1, e2), (e2, e1)):
        if abs(np.dot(n, along)) < 1e-9:
            step = np.dot(n, across)
            r = off / step
            return abs(r - round(r)) < 1e-9
    return False


def copies_per_tile(orbit: list[OrbitCopy]) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for c in orbit:
        counts[c.lattice_coords] = counts.get(c.lattice_coords, 0) + 1
    return counts


def ring_count(n: int) -> int:
    return 1 if n == 0 else (2 * n + 1) ** 2 - (2 * n - 1) ** 2


def cumulative_ring_count(n: int) -> int:
    return (2 * n + 1) ** 2

