"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

from __future__ import annotations

import hashlib
import subprocess
import sys

import numpy as np

from collision_grid import (
    ActiveMask,
    CubeGraph,
    Cycle,
    Lattice2D,
    Path,
    apply_cphase,
    build_graph_state,
    certify,
    classify,
    count_structures,
    extract_graph,
    find_isomorphism,
    measure_z,
    parse_pattern,
    parse_topology,
    percolation_sweep,
    plus_state,
    project_z,
    reference_graph,
    run,
    search_pattern,
    serialize_pattern,
    steady_components,
    steady_state_overhead,
    to_dot,
    check_bounds,
)
from collision_grid.grid import Axis
from collision_grid.stabilizer import graph_rule_state, stabilizer_report
from collision_grid.topology import count_copies

from conftest import LIB, basic_config, library_configs, library_manifest, record_criterion

LIBRARY = library_configs()
MANIFEST = {r["name"]: r for r in library_manifest()}
EXTENDED = [n for n, c in LIBRARY.items() if c.scheme == "extended"]


def seeded_corpus():
    """100 basic-scheme runs with random L in {2,3,4}, T <= 30, masks and p."""
    rng = np.random.default_rng(20240611)
    out = []
    for _ in range(100):
        L = int(rng.integers(2, 5))
        T = int(rng.integers(1, 31))
        mask = ActiveMask.from_array(rng.random((L, L)) < 0.6)
        p = float(rng.choice([1.0, rng.random()]))
        out.append(basic_config(L, T, mask, p=p, seed=int(rng.integers(0, 2**32))))
    return out


def distinct(graphs):
    reps = []
    for g in graphs:
        if not any(g.order == r.order and g.size == r.size and find_isomorphism(g, r) for r in reps):
            reps.append(g)
    return reps


def library_components(max_order):
    comps = []
    for config in LIBRARY.values():
        comps += [c for c in steady_components(run(config)) if c.order <= max_order]
    return comps


def test_criterion_01_cphase_state():
    amps = apply_cphase(plus_state(2), 1, 2).amplitudes
    err = float(np.max(np.abs(amps - np.array([0.5, 0.5, 0.5, -0.5]))))
    ok = err < 1e-12
    record_criterion(1, ok, f"C-Phase on |+>|+> max error {err:.1e} (< 1e-12)")
    assert ok


def test_criterion_02_graph_state_verification():
    corpus = distinct(library_components(12) + [reference_graph(CubeGraph)])
    classes = {str(classify(c)) for c in corpus}
    failures = [c for c in corpus if not all(stabilizer_report(build_graph_state(c), c))]
    has_path = any(cls.startswith("Path") for cls in classes)
    ok = not failures and len(corpus) >= 10 and "Cycle(4)" in classes and "CubeGraph" in classes and has_path
    record_criterion(
        2, ok, f"{len(corpus)} distinct components <= 12 qubits, {len(failures)} stabilizer failures; "
        f"classes {sorted(classes)}"
    )
    assert ok


def test_criterion_03_z_measurement_oracle():
    corpus = distinct(library_components(8) + [reference_graph(CubeGraph)])
    checks, worst_state, worst_prob = 0, 0.0, 0.0
    for g in corpus:
        reg = build_graph_state(g)
        for q, a in enumerate(g.vertices, 1):
            for outcome in (0, 1):
                reduced, byp = measure_z(g, a, outcome)
                dense, prob = project_z(reg, q, outcome)
                rule = graph_rule_state(reduced, byp)
                worst_state = max(worst_state, float(np.max(np.abs(dense.amplitudes - rule.amplitudes))))
                worst_prob = max(worst_prob, abs(prob - 0.5))
                checks += 1
    ok = worst_state < 1e-10 and worst_prob < 1e-10
    record_criterion(
        3, ok, f"{len(corpus)} graphs, {checks} measurements, max state error {worst_state:.1e}, "
        f"max |prob - 1/2| {worst_prob:.1e} (< 1e-10)"
    )
    assert ok


def test_criterion_04_kinematic_invariant():
    violations, events = 0, 0
    for config in seeded_corpus():
        for e in run(config).formed_events():
            h, v = (e.u, e.v) if e.u.axis is Axis.H else (e.v, e.u)
            r, c = e.site
            events += 1
            if not (h.generation + c == v.generation + r == e.t + 1 and h.key == v.key):
                violations += 1
    ok = violations == 0
    record_criterion(4, ok, f"100 seeded basic runs, {events} formed edges, {violations} violations")
    assert ok


def test_criterion_05_scaling_slope():
    bad, offsets = [], {}
    for L in (2, 3, 4):
        totals = {T: count_structures(run(basic_config(L, T))).components_total for T in range(L + 1, 31)}
        bad += [(L, T) for T in range(L + 1, 30) if totals[T + 1] - totals[T] != 1]
        offsets[L] = totals[L + 1] - ((L + 1) - (L - 1))
    ok = not bad
    detail = ", ".join(f"L={L} offset {o:+d}" for L, o in offsets.items())
    record_criterion(5, ok, f"slope 1 for T in [L+1, 30], {len(bad)} exceptions; offset vs t-(L-1): {detail}")
    assert ok


def test_criterion_06_size_degree_bounds():
    reports = [count_structures(run(c)) for c in seeded_corpus()]
    for config in LIBRARY.values():
        for seed in range(5):
            for p in (1.0, 0.7):
                reports.append(count_structures(run(config.with_(seed=seed, edge_probability=p))))
    violations = [v for r in reports for v in check_bounds(r)]
    basic = [r for r in reports if r.scheme == "basic"]
    max_ratio = max(r.max_component_order / (2 * r.L) for r in basic)
    max_deg_ratio = max(r.max_degree / r.L for r in reports)
    ok = not violations
    record_criterion(
        6, ok, f"{len(reports)} runs, {len(violations)} violations; max order/2L {max_ratio:.2f} (basic), "
        f"max degree/L {max_deg_ratio:.2f}"
    )
    assert ok


def test_criterion_07_four_copies():
    found = []
    for name in EXTENDED:
        config = LIBRARY[name]
        trace = run(config)
        digest = hashlib.sha256(to_dot(extract_graph(trace)).encode()).hexdigest()
        comps = steady_components(trace)
        if digest == MANIFEST[name]["sha256"] and len(comps) == 4 and count_copies(comps) == 4:
            found.append(f"{name} ({classify(comps[0])})")
    ok = bool(found)
    record_criterion(7, ok, f"checksummed extended patterns with 4 isomorphic copies: {', '.join(found)}")
    assert ok


def test_criterion_08_overhead_bound():
    results = {}
    for name in EXTENDED:
        config = LIBRARY[name]
        target = parse_topology(config.metadata["topology"])
        results[name] = (steady_state_overhead(config, target), 2 * config.side_length)
    ok = all(o <= b for o, b in results.values())
    detail = ", ".join(f"{n} {o}<={b}" for n, (o, b) in results.items())
    record_criterion(8, ok, f"overhead vs 2L: {detail}")
    assert ok


def test_criterion_09_depth_linearity():
    c = 2
    present = {}
    for d in (1, 2):
        target = Lattice2D(d, None)
        present[d] = search_pattern(target, c * d, 12, "basic") is not None
    absent = all(
        search_pattern(Lattice2D(2, None), L, 12, scheme) is None for L in (1,) for scheme in ("basic", "extended")
    )
    minimal = {}
    for d in (1, 2):
        for L in range(1, 2 * d + 1):
            if search_pattern(Lattice2D(d, None), L, 12, "basic") is not None:
                minimal[d] = L
                break
    ok = all(present.values()) and absent
    record_criterion(
        9, ok, f"Lattice2D(d,*) found at L={c}d for d=1,2: {present}; absent for L<d: {absent}; "
        f"smallest basic L per depth {minimal}"
    )
    assert ok


def test_criterion_10_search_oracle():
    first = search_pattern(Cycle(4), 2, 6, "basic", mode="exhaustive")
    second = search_pattern(Cycle(4), 2, 6, "basic", mode="exhaustive")
    certify(first, Cycle(4))
    stable = serialize_pattern(first.config()) == serialize_pattern(second.config())
    ok = first.mask == ActiveMask.full(2) and stable
    record_criterion(10, ok, f"Cycle(4) at L=2, T=6 -> mask {first.mask.to_rows()}, certified, byte-stable {stable}")
    assert ok


def test_criterion_11_percolation_sanity():
    config = LIBRARY["ladder_ext3"]
    grid = [0.0, 0.6, 0.75, 0.9, 1.0]
    report = percolation_sweep(config, grid, 1000)
    endpoints = report.success_fraction[0] == 0.0 and report.success_fraction[-1] == 1.0
    monotone = all(
        a <= b
        for i in range(len(grid) - 1)
        for a, b in zip(report.outcomes[i], report.outcomes[i + 1])
    )
    z = []
    for i in range(len(grid)):
        obs, pred, se = report.survival_check(i)
        if 0.0 < pred < 1.0:
            z.append(abs(obs - pred) / se)
    within = all(x <= 3 for x in z)
    ok = endpoints and monotone and within
    record_criterion(
        11, ok, f"endpoints {report.success_fraction[0]}/{report.success_fraction[-1]}, trial-wise monotone "
        f"{monotone}, survival |z| max {max(z):.2f} over {len(z)} interior points (<= 3)"
    )
    assert ok


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "collision_grid.cli", *map(str, args)], capture_output=True, text=True)
    return proc.returncode, proc.stdout


def test_criterion_12_determinism_round_trips():
    texts = {p.name: p.read_text() for p in sorted(LIB.glob("*.pattern"))}
    round_trip = all(serialize_pattern(parse_pattern(t)) == t for t in texts.values())
    invocations = [
        ("simulate", LIB / "ring4.pattern"),
        ("simulate", LIB / "cube.pattern", "--format", "json"),
        ("count", LIB / "ladder.pattern"),
        ("classify", LIB / "hexcell.pattern"),
        ("verify", LIB / "cube.pattern", "--dump"),
        ("percolate", LIB / "chain_ext3.pattern", "--p-grid", "0.5,0.9", "--trials", "50"),
        ("render", LIB / "maximal4.pattern"),
        ("search", "HexCell", "-L", "3", "--timesteps", "9"),
    ]
    cli_same = all(_cli(*a) == _cli(*a) for a in invocations)
    config = LIBRARY["chain_ext3"]
    seq = percolation_sweep(config, [0.6, 0.8, 0.95], 200, coupled=False, workers=1)
    par = percolation_sweep(config, [0.6, 0.8, 0.95], 200, coupled=False, workers=2)
    parallel_same = seq == par and seq.to_csv() == par.to_csv()
    ok = round_trip and cli_same and parallel_same
    record_criterion(
        12, ok, f"{len(texts)} pattern files round-trip {round_trip}; {len(invocations)} CLI invocations "
        f"repeatable {cli_same}; parallel == sequential {parallel_same}"
    )
    assert ok
