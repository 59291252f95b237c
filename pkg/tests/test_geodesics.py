import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orbitiles.errors import DomainError, NoTilingError
from orbitiles.geodesics import (
    Arc,
    IndexParams,
    MarkedConfiguration,
    Segment,
    crossing_events,
    draw_configuration,
    _segment_events_many,
    genericity_check,
    plane_geodesics,
    plane_horizon,
    run_census,
    sphere_copies,
    sphere_geodesics,
    tiling_for,
)
from orbitiles.morse_bounds import index_histogram
from orbitiles.planar_tiling import mirror_lines, point_orbit_in_rings
from orbitiles.spherical_tiling import Hemisphere, SphericalTriangle, normalize, reflect

from conftest import planar, spherical
from oracles import brute_force_sphere_arrivals, sphere_orbit_by_vertices

# (case, order) pairs covering every tiled positive case
SPHERE_CASES = [(1, None), (4, 2), (4, 3), (4, 5), (5, None), (6, None), (7, None), (8, None), (11, 6), (12, None), (13, None)]


def oracle_copies(q, tiling):
    fund = tiling.fundamental
    if isinstance(fund, SphericalTriangle):
        return sphere_orbit_by_vertices(q, tiling)
    if isinstance(fund, Hemisphere):
        return np.array([q, reflect(q, fund.pole)])
    return np.array([q])


def _match(a, b):
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return len(a) == len(b) and np.all(d.min(axis=1) < 1e-9) and np.all(d.min(axis=0) < 1e-9)


def test_index_params():
    assert IndexParams().lam == 1
    assert IndexParams(m=-1).lam == 2
    assert IndexParams(m=-3, a_contribution=0).lam == 4
    with pytest.raises(DomainError):
        IndexParams(m=0, a_contribution=-1)
    assert IndexParams.worst_case(-2).a_contribution == -2


def test_octant_sixteen_single_visit():
    census = run_census(spherical(4, 2), seed=3, max_index=0)
    assert census.copies == 8
    assert len(census.single_visit) == 16
    # short arcs reach their copy before the antipode; long arcs pass it once
    assert index_histogram(census.single_visit) == {0: 8, 1: 8}
    shortest = min(census.records, key=lambda r: r.length)
    assert shortest.index == 0 and shortest.antipodal_crossings == 0


@pytest.mark.parametrize("case, order", SPHERE_CASES)
def test_single_visit_against_brute_force(case, order):
    tiling = spherical(case, order)
    for seed in range(3):
        census = run_census(tiling, seed=seed, max_index=2, case_id=case)
        q, p = census.config.q, census.config.p
        copies = oracle_copies(q, tiling)
        assert _match(sphere_copies(q, tiling.group_elements), copies)
        arrivals = brute_force_sphere_arrivals(p, copies)
        single = census.single_visit
        assert len(single) == len(arrivals) == 2 * tiling.tile_count
        assert np.allclose(sorted(r.length for r in single), sorted(a[2] for a in arrivals), atol=1e-9)


def test_rotation_quotient_halves_copies():
    tiling = spherical(6)
    census = run_census(tiling, seed=0, quotient="rotation")
    assert census.copies == 24
    assert len(census.single_visit) == 48


@given(st.sampled_from(SPHERE_CASES), st.integers(0, 10**6), st.integers(-2, 0))
def test_index_monotone_along_circle(case_order, seed, m):
    case, order = case_order
    params = IndexParams.worst_case(m)
    census = run_census(spherical(case, order), seed=seed, params=params, max_index=4)
    chains = {}
    for r in census.records:
        chains.setdefault((r.target_copy_id, r.direction_sign), []).append(r)
    for chain in chains.values():
        chain.sort(key=lambda r: r.length)
        assert [r.winding for r in chain] == list(range(len(chain)))
        for a, b in zip(chain, chain[1:]):
            assert b.antipodal_crossings == a.antipodal_crossings + 1
            assert b.length == pytest.approx(a.length + 2 * math.pi)
            assert b.index >= a.index
            if a.antipodal_crossings + m >= 0:
                assert b.index == a.index + 1
        assert all(r.index >= 0 for r in chain)


def test_arc_event_count():
    p = np.array([0.0, 0.0, 1.0])
    t = np.array([1.0, 0.0, 0.0])
    ev = crossing_events(Arc(p, t, 1.5 * math.pi), spherical(1))
    assert len(ev) == 1 and ev[0].t == pytest.approx(math.pi) and ev[0].kind == "antipode"
    assert crossing_events(Arc(p, t, 0.9 * math.pi), spherical(1)) == []


def test_sphere_genericity_failures():
    tiling = spherical(4, 2)  # octant
    q = normalize([0.2, 0.3, 0.9])
    copies = sphere_copies(q, tiling.group_elements)
    assert not genericity_check(copies[3], q, tiling)
    a, b = copies[0], copies[5]
    on_circle = normalize(normalize(a) + normalize(b)) if np.linalg.norm(a + b) > 1e-6 else None
    if on_circle is not None:
        res = genericity_check(on_circle, q, tiling)
        assert not res and any("great circle" in v for v in res.violations)
    p = normalize([0.31, 0.17, 0.93])
    assert genericity_check(p, q, tiling)


@given(st.sampled_from([(4, 2), (5, None), (6, None), (12, None)]), st.integers(0, 10**6), st.data())
def test_sphere_symmetry_bijection(case_order, seed, data):
    tiling = spherical(*case_order)
    cfg = draw_configuration(tiling, seed)
    g = data.draw(st.sampled_from(tiling.group_elements))
    moved = MarkedConfiguration(g @ cfg.p, g @ cfg.q, tiling, seed)
    a = sphere_geodesics(cfg, max_index=2)
    b = sphere_geodesics(moved, max_index=2)
    assert len(a) == len(b)
    key = lambda rs: sorted((r.index, r.winding, r.length) for r in rs)
    ka, kb = key(a), key(b)
    assert [k[:2] for k in ka] == [k[:2] for k in kb]
    assert np.allclose([k[2] for k in ka], [k[2] for k in kb], atol=1e-9)
    # the correspondence is realized by g on endpoints
    ends_a = np.array([g @ np.array(r.target) for r in a])
    ends_b = np.array([r.target for r in b])
    assert _match(np.unique(ends_a.round(9), axis=0), np.unique(ends_b.round(9), axis=0))


@given(st.sampled_from(SPHERE_CASES + [(14, None), (17, None)]), st.integers(0, 10**6))
def test_enumeration_determinism(case_order, seed):
    case, order = case_order
    tiling = spherical(case, order) if case < 14 else planar(case, 3)
    a = run_census(tiling, seed=seed, max_index=3)
    b = run_census(tiling, seed=seed, max_index=3)
    assert [r.to_json() for r in a.records] == [r.to_json() for r in b.records]


def test_no_tiling_case():
    with pytest.raises(NoTilingError):
        tiling_for(3)


# ------------------------------------------------------------------ plane


def _square_crossings(p, x, diagonals):
    """Closed-form count of mirrors between p and x: the integer grid lines and,
    for the right isosceles triangle, the diagonals x +- y = odd integer."""
    n = abs(math.floor(x[0]) - math.floor(p[0])) + abs(math.floor(x[1]) - math.floor(p[1]))
    if diagonals:
        for f in (lambda v: v[0] - v[1], lambda v: v[0] + v[1]):
            n += abs(math.floor((f(x) + 1) / 2) - math.floor((f(p) + 1) / 2))
    return n


@pytest.mark.parametrize("case", [15, 17])
def test_plane_crossings_closed_form(case):
    tiling = planar(case, 4)
    census = run_census(tiling, seed=11, max_index=4)
    p = census.config.p
    for r in census.records:
        assert len(r.stratum_crossings) == _square_crossings(p, r.target, case == 15)
        assert r.index == len(r.stratum_crossings)


def test_plane_same_tile_and_neighbour():
    tiling = planar(17, 1)
    p, q = np.array([0.3, 0.6]), np.array([0.7, 0.2])
    assert crossing_events(Segment(p, q), tiling) == []
    ev = crossing_events(Segment(p, np.array([1.2, 0.4])), tiling)
    assert len(ev) == 1 and ev[0].kind == "rhombus-edge"


@given(st.sampled_from([14, 15, 16, 17]), st.integers(0, 10**6), st.integers(-2, 0))
def test_plane_horizon_soundness(case, seed, m):
    n = 2
    params = IndexParams(m=m, a_contribution=m)
    wide = planar(case, plane_horizon(params, n) + 2)
    census = run_census(wide, seed=seed, params=params, max_index=n + 2)
    tiling = census.config.tiling
    for r in census.records:
        if r.index <= n:
            assert tiling.ring_of(np.array(r.target)) <= n - m
    within = [r for r in census.records if tiling.ring_of(np.array(r.target)) <= n - m]
    assert len(within) <= 4 * (2 * (n - m) + 1) ** 2


def test_plane_count_cap_example():
    census = run_census(planar(14, 2), seed=5, max_index=2)
    assert len(census.records) <= 100
    assert len(census.records) == 4 * 25  # case 14 holds exactly four copies per rhombus


@given(st.sampled_from([14, 15, 16, 17]), st.integers(0, 10**6), st.data())
def test_plane_symmetry_bijection(case, seed, data):
    tiling = planar(case, 6)
    cfg = draw_configuration(tiling, seed)
    near = [g for g in tiling.group_elements() if np.linalg.norm(g.shift) < 1.5]
    g = data.draw(st.sampled_from(near))
    moved_p, moved_q = g(cfg.p), g(cfg.q)
    radius = 2.5  # keeps the disc around g p inside ring 6
    a = plane_geodesics(cfg, max_index=6)
    # g p sees the same orbit of q, so segments from g p shorter than ``radius``
    # must match those from p in length and crossing count
    orbit = np.array([c.point for c in point_orbit_in_rings(cfg.q, tiling)])
    close = orbit[np.linalg.norm(orbit - moved_p, axis=1) < radius]
    ev = _segment_events_many(moved_p, close, mirror_lines(tiling), 1e-9)
    b = sorted((float(np.linalg.norm(x - moved_p)), len(e)) for x, e in zip(close, ev))
    a_close = sorted((r.length, r.index) for r in a if r.length < radius)
    assert [k for _, k in a_close] == [k for _, k in b]
    assert np.allclose([x for x, _ in a_close], [x for x, _ in b], atol=1e-9)
    assert np.allclose(g.inverse()(moved_q), cfg.q)
