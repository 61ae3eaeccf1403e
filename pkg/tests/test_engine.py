from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from collision_grid import (
    ActiveMask,
    CollisionSkeleton,
    EngineInvariantError,
    GridSpec,
    ParseError,
    SimulationConfig,
    VertexTag,
    format_trace,
    make_family_schedule,
    occupancy,
    parse_trace,
    position,
    run,
    step,
)
from collision_grid.grid import SCHEDULE_FAMILIES, Axis, Directive

from conftest import basic_config

F, B = Directive.FORWARD, Directive.BACKWARD


def H(lane, g, d=F):
    return VertexTag(Axis.H, lane, g, d)


def V(lane, g, d=F):
    return VertexTag(Axis.V, lane, g, d)


def brute_force_events(config):
    """Independent oracle: test every vertex pair at every timestep."""
    L, T = config.side_length, config.timesteps
    verts = []
    for axis, lanes in ((Axis.H, config.schedule.horizontal), (Axis.V, config.schedule.vertical)):
        for lane, seq in enumerate(lanes, 1):
            for g, d in enumerate(seq[:T], 1):
                if d is not Directive.SKIP:
                    verts.append(VertexTag(axis, lane, g, d))

    def where(v, t):
        k = t - v.generation + 1
        if not 1 <= k <= L:
            return None
        cell = k if v.direction is F else L + 1 - k
        return (v.lane, cell) if v.axis is Axis.H else (cell, v.lane)

    out = []
    for t in range(1, T + 1):
        for u, v in combinations(sorted(verts), 2):
            s = where(u, t)
            if s is not None and s == where(v, t) and config.mask.is_active(*s):
                out.append((t, s, u, v))
    return sorted(out)


@pytest.mark.parametrize(
    "v,t,L,expected",
    [
        (H(2, 3), 5, 4, (2, 3)),
        (V(1, 1), 1, 4, (1, 1)),
        (H(1, 1), 5, 4, None),
        (H(1, 3), 2, 4, None),
        (H(1, 1, B), 1, 4, (1, 4)),
        (V(2, 1, B), 4, 4, (1, 2)),
    ],
)
def test_position(v, t, L, expected):
    assert position(v, t, L) == expected


def _pairs(events):
    return [(e.site, e.u, e.v) for e in events]


def test_step_examples_L2():
    config = basic_config(2, 3)
    linked = set()
    ev1 = step(occupancy(config.schedule, 1), config.mask, 1, None, 1.0, linked)
    assert _pairs(ev1) == [((1, 1), H(1, 1), V(1, 1))]
    ev2 = step(occupancy(config.schedule, 2), config.mask, 2, None, 1.0, linked)
    assert sorted(_pairs(ev2)) == sorted(
        [
            ((1, 1), H(1, 2), V(1, 2)),
            ((1, 2), H(1, 1), V(2, 2)),
            ((2, 1), H(2, 2), V(1, 1)),
            ((2, 2), H(2, 1), V(2, 1)),
        ]
    )


def test_step_zero_probability():
    trace = run(basic_config(3, 6, p=0.0, seed=4))
    assert trace.events and not any(e.formed for e in trace.events)


def test_step_rejects_overfull_site():
    occ = {(1, 1): [H(1, 1), H(1, 2, B), V(1, 1), V(1, 2, B), H(1, 3)]}
    with pytest.raises(EngineInvariantError):
        step(occ, ActiveMask.full(1), 1, None, 1.0, set())


def test_step_duplicate_pair_not_formed():
    occ = {(1, 1): [H(1, 1), V(1, 1)]}
    linked = set()
    first = step(occ, ActiveMask.full(1), 1, None, 1.0, linked)
    again = step(occ, ActiveMask.full(1), 2, None, 1.0, linked)
    assert first[0].formed and not again[0].formed


def test_run_L2_T3():
    trace = run(basic_config(2, 3))
    assert len(trace.formed_events()) == 9
    assert len(trace.roster) == 12
    assert len(trace.complete) == 4
    assert trace.complete <= trace.roster


def test_run_L1_T2():
    trace = run(basic_config(1, 2))
    assert [(e.u, e.v, e.t) for e in trace.formed_events()] == [(H(1, 1), V(1, 1), 1), (H(1, 2), V(1, 2), 2)]


def test_run_empty_mask():
    trace = run(basic_config(3, 4, ActiveMask.empty(3)))
    assert trace.events == () and len(trace.roster) == 24


@given(st.integers(1, 4), st.integers(1, 12), st.integers(0, 2**16 - 1))
def test_run_matches_brute_force_oracle(L, T, bits):
    mask = ActiveMask.from_bits(L, bits % (1 << (L * L)))
    config = basic_config(L, T, mask)
    got = sorted((e.t, e.site, e.u, e.v) for e in run(config).events)
    assert got == brute_force_events(config)


@given(st.sampled_from(SCHEDULE_FAMILIES), st.integers(1, 4), st.integers(1, 10))
def test_extended_run_matches_brute_force_oracle(family, L, T):
    grid = GridSpec(L)
    config = SimulationConfig(grid, ActiveMask.full(L), make_family_schedule(grid, T, family), T)
    got = sorted((e.t, e.site, e.u, e.v) for e in run(config).events)
    assert got == brute_force_events(config)


@given(st.integers(1, 4), st.integers(1, 20), st.integers(0, 2**16 - 1), st.integers(0, 100))
def test_events_sorted_and_on_active_sites(L, T, bits, seed):
    mask = ActiveMask.from_bits(L, bits % (1 << (L * L)))
    trace = run(basic_config(L, T, mask, p=0.5, seed=seed))
    keys = [(e.t, e.site) for e in trace.events]
    assert keys == sorted(keys)
    assert all(mask.is_active(*e.site) and e.u != e.v for e in trace.events)


@given(st.integers(1, 4), st.integers(1, 20), st.integers(0, 2**16 - 1))
def test_basic_collision_law_and_key(L, T, bits):
    mask = ActiveMask.from_bits(L, bits % (1 << (L * L)))
    trace = run(basic_config(L, T, mask))
    seen = set()
    for e in trace.events:
        h, v = (e.u, e.v) if e.u.axis is Axis.H else (e.v, e.u)
        r, c = e.site
        assert h.axis is Axis.H and v.axis is Axis.V
        assert h.generation + c == v.generation + r == e.t + 1
        assert h.key == v.key
        assert frozenset((h, v)) not in seen
        seen.add(frozenset((h, v)))


@given(st.integers(1, 4), st.integers(1, 15), st.integers(0, 2**32), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_coupled_monotonicity(L, T, seed, p1, p2):
    lo, hi = sorted((p1, p2))
    edges = [
        {frozenset(e.endpoints) for e in run(basic_config(L, T, p=p, seed=seed)).formed_events()}
        for p in (lo, hi)
    ]
    assert edges[0] <= edges[1]


@given(st.integers(1, 4), st.integers(1, 15), st.integers(0, 2**32), st.floats(0.0, 1.0))
def test_determinism(L, T, seed, p):
    a = format_trace(run(basic_config(L, T, p=p, seed=seed)))
    b = format_trace(run(basic_config(L, T, p=p, seed=seed)))
    assert a == b


def test_p_one_ignores_seed():
    a, b = run(basic_config(3, 8, seed=1)), run(basic_config(3, 8, seed=2))
    assert a.events == b.events


@given(st.sampled_from(SCHEDULE_FAMILIES), st.integers(1, 4), st.integers(1, 12), st.integers(0, 2**16 - 1),
       st.floats(0.0, 1.0), st.integers(0, 1000))
def test_skeleton_replays_run(family, L, T, bits, p, seed):
    grid = GridSpec(L)
    mask = ActiveMask.from_bits(L, bits % (1 << (L * L)))
    config = SimulationConfig(grid, mask, make_family_schedule(grid, T, family), T, p, seed)
    trace = run(config)
    sk = CollisionSkeleton.build(config.schedule, T)
    got = {frozenset((sk.roster[a], sk.roster[b])) for a, b in sk.edges(mask, p, seed)}
    assert got == {frozenset(e.endpoints) for e in trace.formed_events()}


@given(st.sampled_from(SCHEDULE_FAMILIES), st.integers(1, 4), st.integers(1, 10), st.floats(0.0, 1.0))
def test_trace_round_trip(family, L, T, p):
    grid = GridSpec(L)
    config = SimulationConfig(grid, ActiveMask.full(L), make_family_schedule(grid, T, family), T, p, 3)
    text = format_trace(run(config))
    back = parse_trace(text)
    assert format_trace(back) == text
    assert [(e.u, e.v, e.formed) for e in back.events] == [(e.u, e.v, e.formed) for e in run(config).events]


def test_parse_trace_reports_line():
    text = format_trace(run(basic_config(2, 2)))
    bad = text + "1 1 1 H 9 9 V 1 1 1\n"
    with pytest.raises(ParseError) as exc:
        parse_trace(bad)
    assert exc.value.line == len(text.splitlines()) + 1


def test_degree_bound_on_library(library):
    for name, config in library.items():
        for seed in range(3):
            trace = run(config.with_(seed=seed))
            deg = {}
            for e in trace.formed_events():
                for v in e.endpoints:
                    deg[v] = deg.get(v, 0) + 1
            assert max(deg.values(), default=0) <= config.side_length, name


def test_occupancy_never_exceeds_four():
    for family in SCHEDULE_FAMILIES:
        s = make_family_schedule(GridSpec(4), 12, family)
        for t in range(1, 13):
            assert all(len(v) <= 4 for v in occupancy(s, t).values())
