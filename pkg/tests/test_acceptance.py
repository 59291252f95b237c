"""End-to-end acceptance criteria.

Each ``criterion_*`` function raises AssertionError on failure and returns a
short detail string on success.  Under pytest every criterion is one test and
a PASS/FAIL line per criterion is printed in the terminal summary; running
this file directly prints the same lines.
"""
from __future__ import annotations

import math
import sys
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from orbitiles.classification import enumerate_flat_cases, enumerate_positive_cases  # noqa: E402
from orbitiles.cli import main as cli_main  # noqa: E402
from orbitiles.geodesics import IndexParams, MarkedConfiguration, draw_configuration, run_census, sphere_geodesics, tiling_for  # noqa: E402
from orbitiles.morse_bounds import check_linear_bound, check_quadratic_bound, index_histogram, worst_case_histogram  # noqa: E402
from orbitiles.planar_tiling import build_rings, fundamental_rhombus  # noqa: E402
from orbitiles.spherical_tiling import Hemisphere, SphericalTriangle, double, generate_tiling, normalize, quantize, reflect, total_area, triangle_from_angles  # noqa: E402

from oracles import brute_force_sphere_arrivals, sphere_orbit_by_vertices  # noqa: E402

F = Fraction
GOLDEN = Path(__file__).parent / "golden"
SEEDS = range(10)
TRIALS = 100
RESULTS: dict[str, tuple[bool, str]] = {}


def _timed(limit, fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    dt = time.perf_counter() - t0
    assert dt < limit, f"took {dt:.2f}s, limit {limit}s"
    return out, dt


def _positive_members():
    """(case id, concrete members) for every tiled positive case; families are expanded."""
    out = []
    for case in enumerate_positive_cases():
        if case.tiling is None:
            continue
        members = case.members() if case.is_family else [case]
        out.append((case.case_id, members))
    return out


# ------------------------------------------------------------------ criteria


def criterion_1():
    """Classification tables reproduce the golden encodings exactly, in under 1 s."""
    import contextlib
    import io

    def emit(curv):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            assert cli_main(["classify", "--curvature", curv, "--format", "csv"]) == 0
        return buf.getvalue()

    (pos, flat), dt = _timed(1.0, lambda: (emit("pos"), emit("flat")))
    assert pos == (GOLDEN / "table1.csv").read_text(encoding="utf-8")
    assert flat == (GOLDEN / "table2.csv").read_text(encoding="utf-8")
    assert len(pos.splitlines()) - 1 == 13 and len(flat.splitlines()) - 1 == 4
    return f"13 + 4 rows match golden in {dt:.2f}s"


def criterion_2():
    """Exact tile counts, each generation under 5 s."""
    want = {(F(1, 2), F(1, 2), F(1, p)): 4 * p for p in range(2, 7)}
    want[(F(1, 2), F(1, 3), F(1, 3))] = 24
    want[(F(1, 2), F(1, 3), F(1, 4))] = 48
    want[(F(1, 2), F(1, 3), F(1, 5))] = 120
    worst = 0.0
    for angles, count in want.items():
        t, dt = _timed(5.0, lambda a=angles: generate_tiling(triangle_from_angles(*a)))
        assert t.tile_count == count, (angles, t.tile_count)
        worst = max(worst, dt)
    hemi, dt = _timed(5.0, double, Hemisphere(np.array([0.0, 0.0, 1.0])))
    assert hemi.tile_count == 2
    return f"8/12/16/20/24/24/48/120 and hemisphere double 2; slowest {max(worst, dt):.2f}s"


def criterion_3():
    """Spherical excess sums to 4 pi within 1e-6 for every tiling."""
    worst = 0.0
    tilings = [tiling_for(cid, m.order) for cid, ms in _positive_members() for m in ms]
    tilings += [generate_tiling(triangle_from_angles(*a)) for a in [(F(1, 2), F(1, 2), F(1, 5))]]
    for t in tilings:
        err = abs(total_area(t) - 4 * math.pi)
        assert err < 1e-6, err
        worst = max(worst, err)
    return f"{len(tilings)} tilings, max |area - 4pi| = {worst:.1e}"


def _oracle_copies(q, tiling):
    fund = tiling.fundamental
    if isinstance(fund, SphericalTriangle):
        return sphere_orbit_by_vertices(q, tiling)
    if isinstance(fund, Hemisphere):
        return np.array([q, reflect(q, fund.pole)])
    return np.array([q])


def criterion_4():
    """Single-visit geodesic count = 2c for 10 seeds, matched by brute force; < 10 s per case."""
    details = []
    for case_id, members in _positive_members():
        def run_case():
            for member in members:
                tiling = tiling_for(case_id, member.order)
                c = tiling.tile_count
                for seed in SEEDS:
                    census = run_census(tiling, seed=seed, max_index=0, case_id=case_id)
                    single = census.single_visit
                    copies = _oracle_copies(census.config.q, tiling)
                    arrivals = brute_force_sphere_arrivals(census.config.p, copies)
                    assert len(single) == 2 * c == len(arrivals), (case_id, seed, len(single), c)
                    got = sorted((r.length for r in single))
                    want = sorted(a[2] for a in arrivals)
                    assert np.allclose(got, want, atol=1e-9)

        _, dt = _timed(10.0, run_case)
        details.append(f"{case_id}:{dt:.1f}s")
    return "2c matched for cases " + ", ".join(details)


def _sphere_report(tiling, params, n_max, case_id):
    hists = [index_histogram(run_census(tiling, seed=s, params=params, max_index=n_max, case_id=case_id).records) for s in SEEDS]
    return check_linear_bound(worst_case_histogram(hists), tiling.tile_count, params, n_max, case_id, list(SEEDS))


def criterion_5():
    """Linear bound 2 c lambda (n+1) for m in {0, -1}, n <= 20; degree <= 1.2; < 30 s per case."""
    worst_deg = 0.0
    details = []
    for case_id, members in _positive_members():
        def run_case():
            nonlocal worst_deg
            for member in members:
                tiling = tiling_for(case_id, member.order)
                for m in (0, -1):
                    for params in dict.fromkeys((IndexParams(m=m), IndexParams.worst_case(m))):
                        rep = _sphere_report(tiling, params, 20, case_id)
                        assert all(rep.satisfied), (case_id, params, rep.first_violation)
                        assert rep.fitted_degree <= 1.2, (case_id, params, rep.fitted_degree)
                        worst_deg = max(worst_deg, rep.fitted_degree)

        _, dt = _timed(30.0, run_case)
        details.append(f"{case_id}:{dt:.1f}s")
    return f"all bounds hold, max fitted degree {worst_deg:.3f}; " + ", ".join(details)


def criterion_6():
    """Quadratic bound for flat cases at m = 0, n <= 20; degree <= 2.2; ring counts to n = 50."""
    details = []
    params = IndexParams()
    for case in enumerate_flat_cases():
        def run_case():
            tiling = tiling_for(case.case_id, rings=20)
            hists = [index_histogram(run_census(tiling, seed=s, params=params, max_index=20).records) for s in SEEDS]
            rep = check_quadratic_bound(worst_case_histogram(hists), params, 20, case.case_id, list(SEEDS))
            assert all(rep.satisfied), (case.case_id, rep.first_violation)
            assert rep.fitted_degree <= 2.2, rep.fitted_degree
            return rep

        rep, dt = _timed(30.0, run_case)
        sizes = build_rings(fundamental_rhombus(case.case_id), 50).ring_sizes()
        assert all(sum(sizes[: n + 1]) == (2 * n + 1) ** 2 for n in range(51))
        details.append(f"{case.case_id}: deg {rep.fitted_degree:.2f} in {dt:.1f}s")
    return "; ".join(details)


def criterion_7():
    """Property suites over 100 randomized trials each."""
    rng = np.random.default_rng(20240607)
    shapes = [(F(1, 2), F(1, 2), F(1, p)) for p in range(2, 7)] + [(F(1, 2), F(1, 3), F(1, r)) for r in (3, 4, 5)]
    tilings = {a: generate_tiling(triangle_from_angles(*a)) for a in shapes}
    pick = lambda: shapes[rng.integers(len(shapes))]

    # tile congruence
    for _ in range(TRIALS):
        t = tilings[pick()]
        sides = sorted(t.fundamental.side_lengths())
        angles = sorted(t.fundamental.measured_angles())
        tile = list(t.tiles.values())[rng.integers(t.tile_count)]
        assert np.allclose(sorted(tile.side_lengths()), sides, atol=1e-9)
        assert np.allclose(sorted(tile.measured_angles()), angles, atol=1e-9)
    # edges shared by exactly two tiles (closure regenerated from a rotated start each trial)
    for _ in range(TRIALS):
        a = pick()
        t = tilings[a]
        g = t.group_elements[rng.integers(t.tile_count)]
        t2 = generate_tiling(t.fundamental.transformed(g))
        edges = Counter()
        for tile in t2.tiles.values():
            k = [quantize(v) for v in tile.vertices]
            for i in range(3):
                edges[frozenset((k[i], k[(i + 1) % 3]))] += 1
        assert set(edges.values()) == {2}
        assert set(t2.tiles) == set(t.tiles)
    # no overlap: centroids and random points
    for _ in range(TRIALS):
        t = tilings[pick()]
        normals = np.array([tile.edge_normals() for tile in t.tiles.values()])
        cents = np.array([tile.centroid() for tile in t.tiles.values()])
        inside = np.all(np.einsum("tkd,cd->ctk", normals, cents) >= 0, axis=2)
        assert np.array_equal(inside, np.eye(len(cents), dtype=bool))
        x = normalize(rng.normal(size=3))
        assert np.count_nonzero(np.all(normals @ x > 1e-9, axis=1)) <= 1
    # reflection involution
    for _ in range(TRIALS):
        x, n = normalize(rng.normal(size=3)), normalize(rng.normal(size=3))
        assert np.allclose(reflect(reflect(x, n), n), x, atol=1e-12)
    # enumeration determinism
    cases = [(cid, m.order) for cid, ms in _positive_members() for m in ms]
    sph = {co: tiling_for(*co) for co in cases}
    flat = {cid: tiling_for(cid, rings=4) for cid in (14, 15, 16, 17)}
    for _ in range(TRIALS):
        seed = int(rng.integers(2**31))
        if rng.random() < 0.7:
            tiling = sph[cases[rng.integers(len(cases))]]
        else:
            tiling = flat[14 + int(rng.integers(4))]
        a = run_census(tiling, seed=seed, max_index=4)
        b = run_census(tiling, seed=seed, max_index=4)
        assert [r.to_json() for r in a.records] == [r.to_json() for r in b.records]
    # group-symmetry bijection
    for _ in range(TRIALS):
        tiling = sph[cases[rng.integers(len(cases))]]
        cfg = draw_configuration(tiling, int(rng.integers(2**31)))
        g = tiling.group_elements[rng.integers(tiling.tile_count)]
        a = sphere_geodesics(cfg, max_index=3)
        b = sphere_geodesics(MarkedConfiguration(g @ cfg.p, g @ cfg.q, tiling), max_index=3)
        ka = sorted((r.index, r.winding, r.length) for r in a)
        kb = sorted((r.index, r.winding, r.length) for r in b)
        assert [k[:2] for k in ka] == [k[:2] for k in kb]
        assert np.allclose([k[2] for k in ka], [k[2] for k in kb], atol=1e-9)
    return f"6 suites x {TRIALS} trials"


CRITERIA = {
    "AC1 table reproduction": criterion_1,
    "AC2 tile counts": criterion_2,
    "AC3 area conservation": criterion_3,
    "AC4 geodesic census 2c": criterion_4,
    "AC5 linear bound": criterion_5,
    "AC6 quadratic bound": criterion_6,
    "AC7 property suites": criterion_7,
}


def _run(name):
    try:
        detail = CRITERIA[name]()
    except AssertionError as exc:
        RESULTS[name] = (False, f"{exc}")
        raise
    RESULTS[name] = (True, detail)


@pytest.mark.acceptance
@pytest.mark.parametrize("name", list(CRITERIA))
def test_acceptance(name):
    _run(name)


def summary_lines() -> list[str]:
    return [f"{'PASS' if ok else 'FAIL'}  {name}: {detail}" for name, (ok, detail) in RESULTS.items()]


if __name__ == "__main__":
    failed = False
    for name in CRITERIA:
        try:
            _run(name)
        except AssertionError:
            failed = True
        print(summary_lines()[-1], flush=True)
    sys.exit(1 if failed else 0)
