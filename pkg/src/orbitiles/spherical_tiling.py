"""Spherical triangles and the reflection tilings of S^2 they generate."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classification import OrbitSpaceCase, get_case
from .errors import DomainError, NoTilingError, NonClosingError, NotSphericalError

KEY_GRID = 1e-6
NORM_TOL = 1e-12


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DomainError("cannot normalize the zero vector")
    return v / n


def quantize(v, grid: float = KEY_GRID) -> tuple[int, ...]:
    a = np.rint(np.asarray(v, dtype=float).ravel() / grid).astype(np.int64)
    # rint(-0.4) gives -0; int() folds it to 0
    return tuple(int(x) for x in a)


def arc_length(a, b) -> float:
    """Great-circle distance between two unit vectors (stable near 0 and pi)."""
    return math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b)))


def reflect(point, mirror_normal) -> np.ndarray:
    """Householder reflection of ``point`` across the plane orthogonal to ``mirror_normal``."""
    x = np.asarray(point, dtype=float)
    n = np.asarray(mirror_normal, dtype=float)
    return x - 2.0 * np.dot(x, n) * n


def reflection_matrix(mirror_normal) -> np.ndarray:
    n = np.asarray(mirror_normal, dtype=float).reshape(3, 1)
    return np.eye(3) - 2.0 * (n @ n.T)


def vertex_angle(at, b, c) -> float:
    """Angle at vertex ``at`` between great-circle arcs to ``b`` and ``c``.

    The two arcs are projected to the tangent plane at ``at``.
    """
    at = np.asarray(at, dtype=float)
    tb = b - np.dot(b, at) * at
    tc = c - np.dot(c, at) * at
    return math.atan2(np.linalg.norm(np.cross(tb, tc)), float(np.dot(tb, tc)))


def _angle_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise DomainError("triangle angles are rational multiples of pi")
    return Fraction(x)


@dataclass(frozen=True, eq=False)
class SphericalTriangle:
    vertices: np.ndarray  # rows A, B, C
    angles: tuple[Fraction, Fraction, Fraction]

    @property
    def A(self):
        return self.vertices[0]

    @property
    def B(self):
        return self.vertices[1]

    @property
    def C(self):
        return self.vertices[2]

    @property
    def excess(self) -> float:
        return float(sum(self.angles) - 1) * math.pi

    @property
    def area(self) -> float:
        return self.excess

    def measured_angles(self) -> tuple[float, float, float]:
        A, B, C = self.vertices
        return (vertex_angle(A, B, C), vertex_angle(B, C, A), vertex_angle(C, A, B))

    def side_lengths(self) -> tuple[float, float, float]:
        """Arc lengths (a, b, c) opposite A, B, C."""
        A, B, C = self.vertices
        return (arc_length(B, C), arc_length(C, A), arc_length(A, B))

    def edge_normals(self) -> np.ndarray:
        """Inward unit normals of the three edge planes, opposite A, B, C."""
        A, B, C = self.vertices
        out = []
        for opp, u, v in ((A, B, C), (B, C, A), (C, A, B)):
            n = normalize(np.cross(u, v))
            if np.dot(n, opp) < 0:
                n = -n
            out.append(n)
        return np.array(out)

    def contains(self, x, tol: float = 0.0) -> bool:
        """True if ``x`` lies in the closed triangle (open when ``tol`` < 0)."""
        return bool(np.all(self.edge_normals() @ np.asarray(x, dtype=float) >= -tol))

    def centroid(self) -> np.ndarray:
        return normalize(self.vertices.sum(axis=0))

    def key(self) -> tuple:
        return tuple(sorted(quantize(v) for v in self.vertices))

    def transformed(self, g) -> SphericalTriangle:
        return SphericalTriangle((np.asarray(g) @ self.vertices.T).T, self.angles)

    def sample_interior(self, rng) -> np.ndarray:
        w = rng.dirichlet(np.ones(3))
        return normalize(w @ self.vertices)


@dataclass(frozen=True, eq=False)
class Hemisphere:
    """Closed hemisphere ``{x : <x, pole> >= 0}`` bounded by a geodesic circle."""

    pole: np.ndarray

    angles = (Fraction(1),)
    vertices = np.zeros((0, 3))
    area = 2 * math.pi

    def edge_normals(self) -> np.ndarray:
        return np.array([self.pole])

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(np.dot(self.pole, x) >= -tol)

    def centroid(self) -> np.ndarray:
        return np.asarray(self.pole, dtype=float)

    def key(self) -> tuple:
        return (quantize(self.pole),)

    def transformed(self, g) -> Hemisphere:
        return Hemisphere(np.asarray(g) @ self.pole)

    def sample_interior(self, rng) -> np.ndarray:
        x = normalize(rng.normal(size=3))
        return x if np.dot(x, self.pole) > 0 else reflect(x, self.pole)


@dataclass(frozen=True, eq=False)
class WholeSphere:
    angles = ()
    vertices = np.zeros((0, 3))
    area = 4 * math.pi

    def edge_normals(self) -> np.ndarray:
        return np.zeros((0, 3))

    def contains(self, x, tol: float = 0.0) -> bool:
        return True

    def centroid(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0])

    def key(self) -> tuple:
        return ("S2",)

    def transformed(self, g) -> WholeSphere:
        return self

    def sample_interior(self, rng) -> np.ndarray:
        return normalize(rng.normal(size=3))


@dataclass(eq=False)
class SphericalTiling:
    """Finite reflection tiling of S^2 with its group of isometries.

    ``group[i]`` maps the fundamental tile onto ``tiles[order[i]]``.
    """

    tiles: dict[tuple, object]
    adjacency: dict[tuple, list[tuple]]
    fundamental_tile: tuple
    group_elements: list[np.ndarray]
    order: list[tuple] = field(default_factory=list)
    case_id: int | None = None

    @property
    def fundamental(self):
        return self.tiles[self.fundamental_tile]

    @property
    def tile_count(self) -> int:
        return len(self.tiles)

    @property
    def group_order(self) -> int:
        return len(self.group_elements)

    def mirror_normals(self) -> np.ndarray:
        """One unit normal per distinct mirror great circle (sign-normalised)."""
        seen = {}
        for tile in self.tiles.values():
            for n in tile.edge_normals():
                n = _canonical_sign(n)
                seen.setdefault(quantize(n), n)
        if not seen:
            return np.zeros((0, 3))
        return np.array([seen[k] for k in sorted(seen)])

    def rotation_subgroup(self) -> list[np.ndarray]:
        return [g for g in self.group_elements if np.linalg.det(g) > 0]

    def to_json(self) -> dict:
        index = {}
        vertices = []
        faces = []
        keys = list(self.tiles)
        for k in keys:
            face = []
            for v in self.tiles[k].vertices:
                vk = quantize(v)
                if vk not in index:
                    index[vk] = len(vertices)
                    vertices.append([float(x) for x in v])
                face.append(index[vk])
            faces.append(face)
        pos = {k: i for i, k in enumerate(keys)}
        return {
            "case_id": self.case_id,
            "tile_angles": [f"{a.numerator}/{a.denominator}" for a in self.fundamental.angles],
            "vertices": vertices,
            "tiles": faces,
            "adjacency": [[pos[n] for n in self.adjacency[k]] for k in keys],
            "fundamental_tile": pos[self.fundamental_tile],
            "group_order": self.group_order,
        }


def _canonical_sign(n) -> np.ndarray:
    for x in n:
        if abs(x) > 1e-9:
            return n if x > 0 else -n
    return n


def triangle_from_angles(alpha, beta, gamma) -> SphericalTriangle:
    """Spherical triangle with corner angles ``alpha*pi, beta*pi, gamma*pi``.

    A sits at the north pole, B on the prime meridian, C at longitude
    ``alpha*pi``.  Sides come from the law of cosines for angles.
    """
    qs = tuple(_angle_fraction(x) for x in (alpha, beta, gamma))
    if any(not (0 < q < 1) for q in qs):
        raise DomainError("each angle must lie strictly between 0 and pi")
    if sum(qs) <= 1:
        raise NotSphericalError(f"angle sum {sum(qs)}π does not exceed π")
    a_, b_, c_ = (float(q) * math.pi for q in qs)

    def side(opp, x, y):
        cos_side = (math.cos(opp) + math.cos(x) * math.cos(y)) / (math.sin(x) * math.sin(y))
        return math.acos(max(-1.0, min(1.0, cos_side)))

    b = side(b_, a_, c_)
    c = side(c_, a_, b_)
    A = np.array([0.0, 0.0, 1.0])
    B = np.array([math.sin(c), 0.0, math.cos(c)])
    C = np.array([math.sin(b) * math.cos(a_), math.sin(b) * math.sin(a_), math.cos(b)])
    return SphericalTriangle(np.array([A, B, C]), qs)


def expected_tile_count(fundamental) -> int:
    return int(round(4 * math.pi / fundamental.area))


def _check_closes(fundamental) -> None:
    for q in fundamental.angles:
        if q.numerator != 1 or q.denominator < 2:
            raise DomainError(f"angle {q}π is not of the form π/n; reflections would not close")


def generate_tiling(fundamental, budget: int | None = None, case_id: int | None = None) -> SphericalTiling:
    """Close the fundamental tile under reflections in its edges (breadth first).

    Stops when no new tile appears; raises NonClosingError when more than
    ``budget`` tiles (default ten times the Gauss-Bonnet count) are produced.
    """
    if isinstance(fundamental, SphericalTriangle):
        _check_closes(fundamental)
    expected = expected_tile_count(fundamental)
    if budget is None:
        budget = 10 * expected
    root = fundamental.key()
    tiles = {root: fundamental}
    elements = {root: np.eye(3)}
    order = [root]
    adjacency: dict[tuple, list[tuple]] = {}
    queue = deque([root])
    while queue:
        key = queue.popleft()
        tile, g = tiles[key], elements[key]
        nbrs = []
        for n in tile.edge_normals():
            s = reflection_matrix(n)
            image = tile.transformed(s)
            k = image.key()
            if k not in tiles:
                if len(tiles) >= budget:
                    raise NonClosingError(f"reflection closure exceeded {budget} tiles")
                tiles[k] = image
                elements[k] = s @ g
                order.append(k)
                queue.append(k)
            nbrs.append(k)
        adjacency[key] = nbrs
    return SphericalTiling(
        tiles=tiles,
        adjacency=adjacency,
        fundamental_tile=root,
        group_elements=[elements[k] for k in order],
        order=order,
        case_id=case_id,
    )


@dataclass(frozen=True, eq=False)
class DoubledTriangle:
    """A triangle glued to its mirror image along the whole boundary.

    ``tiles`` holds the triangle and its reflection across the edge opposite
    its first vertex; the remaining edges are identified pairwise.
    """

    tiles: tuple[SphericalTriangle, SphericalTriangle]
    glued_edges: tuple[tuple[int, int], ...]

    @property
    def cone_angles(self) -> tuple[Fraction, ...]:
        return tuple(2 * q for q in self.tiles[0].angles)

    @property
    def area(self) -> float:
        return 2 * self.tiles[0].area


def double(fundamental):
    """Closed orbit space obtained by doubling a triangle or a hemisphere.

    Doubling the hemisphere gives the round sphere tiled by 2 hemispheres.
    """
    if isinstance(fundamental, Hemisphere):
        return generate_tiling(fundamental)
    _check_closes(fundamental)
    mirror = fundamental.transformed(reflection_matrix(fundamental.edge_normals()[0]))
    return DoubledTriangle((fundamental, mirror), ((0, 1), (1, 2), (2, 0)))


def total_area(tiling) -> float:
    return float(sum(t.area for t in tiling.tiles.values()))


def fundamental_for_case(case: OrbitSpaceCase | int):
    """Fundamental tile of a concrete constant-positive case."""
    if isinstance(case, int):
        case = get_case(case)
    if case.curvature_class.value != "constant-positive" or case.tiling is None:
        raise NoTilingError(f"case {case.case_id} does not admit a spherical tiling")
    if case.is_family:
        raise DomainError(f"case {case.case_id} is a family; pick a member first")
    if case.tiling.tile == "S^2":
        return WholeSphere()
    if case.tiling.tile == "Hemisphere":
        return Hemisphere(np.array([0.0, 0.0, 1.0]))
    return triangle_from_angles(*case.tiling.tile_angles)


def tiling_for_case(case: OrbitSpaceCase | int) -> SphericalTiling:
    if isinstance(case, int):
        case = get_case(case)
    tiling = generate_tiling(fundamental_for_case(case))
    tiling.case_id = case.case_id
    return tiling
