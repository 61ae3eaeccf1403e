"""Structure counts, scaling bounds, steady-state overhead and percolation sweeps."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .engine import CollisionSkeleton, RunTrace, run
from .errors import InvalidArgument, NoSteadyState, UnsupportedSize
from .graph import extract_graph, steady_components
from .grid import SimulationConfig
from .topology import (
    Other,
    TopologyClass,
    _components,
    classify,
    count_copies,
    steady_vertex_mask,
)

PROPERTIES = ("component-complete", "spans-target-order")


@dataclass(frozen=True)
class CountReport:
    T: int
    L: int
    components_total: int
    components_complete: int
    components_incomplete: int
    components_nontrivial: int
    max_component_order: int
    max_degree: int
    modal_topology: str
    copies_of_modal_topology: int
    scheme: str = "basic"

    @property
    def linear_count(self) -> int:
        """The linear form ``t - (sqrt(N) - 1)``."""
        return self.T - (self.L - 1)

    @property
    def offset(self) -> int:
        return self.components_total - self.linear_count

    def to_text(self) -> str:
        items = asdict(self)
        items["linear_count"] = self.linear_count
        items["offset"] = self.offset
        return "".join(f"{k} {v}\n" for k, v in items.items())


def _safe_classify(g, L):
    try:
        return classify(g, L)
    except UnsupportedSize:
        return Other


def count_structures(trace: RunTrace) -> CountReport:
    g = extract_graph(trace)
    L, T = trace.config.side_length, trace.config.timesteps
    comps = g.components()
    complete = g.components(complete_only=True)
    steady = steady_components(trace, g)
    classes = [_safe_classify(c, L) for c in steady]
    modal, copies = "none", 0
    if classes:
        top, _ = Counter(str(c) for c in classes).most_common(1)[0]
        group = [c for c, k in zip(steady, classes) if str(k) == top]
        modal, copies = top, count_copies(group)
    degrees = g.degree()
    return CountReport(
        T=T,
        L=L,
        components_total=len(comps),
        components_complete=len(complete),
        components_incomplete=len(comps) - len(complete),
        components_nontrivial=sum(1 for c in comps if c.order > 1),
        max_component_order=max((c.order for c in complete), default=0),
        max_degree=max(degrees.values(), default=0),
        modal_topology=modal,
        copies_of_modal_topology=copies,
        scheme=trace.config.scheme,
    )


def check_bounds(report: CountReport) -> list[str]:
    """Violations of the order <= 2L (complete components) and degree <= L caps.

    The order cap holds for basic-scheme runs only: extended schedules link
    generations into structures of unbounded length, so a complete fragment
    left by probabilistic edges can be longer than 2L.
    """
    out = []
    if report.scheme == "basic" and report.max_component_order > 2 * report.L:
        out.append(f"complete component of order {report.max_component_order} exceeds 2L = {2 * report.L}")
    if report.max_degree > report.L:
        out.append(f"vertex degree {report.max_degree} exceeds L = {report.L}")
    return out


def steady_state_overhead(config: SimulationConfig | RunTrace, target: TopologyClass) -> int:
    """Timesteps lost to fill-up and drain before every window matches ``target``.

    For a start generation ``s`` the window keeps complete vertices with
    ``generation >= s``; it must span at least ``2L`` generations so the
    periodic structure is visible.  ``t0`` is the smallest start such that
    every admissible start ``>= t0`` yields only components classified as
    ``target``.  The overhead is ``(t0 - 1)`` lead-in plus ``L`` drain timesteps.
    """
    trace = config if isinstance(config, RunTrace) else run(config)
    L, T = trace.config.side_length, trace.config.timesteps
    # complete vertices have generation in [L, T - L + 1]
    last_start = T - 3 * L + 2
    if T < 2 * L or last_start < 1:
        raise NoSteadyState(f"T = {T} leaves no window of {2 * L} generations")
    g = extract_graph(trace)

    def ok(s):
        comps = steady_components(trace, g, start=s)
        return bool(comps) and all(target.matches(_safe_classify(c, None)) for c in comps)

    t0 = None
    for s in range(last_start, 0, -1):
        if not ok(s):
            break
        t0 = s
    if t0 is None:
        raise NoSteadyState(f"no window start in [1, {last_start}] yields only {target}")
    return (t0 - 1) + L


def redundancy_stats(M: int, q: float) -> float:
    """Probability that at least one of ``M`` independent copies is intact."""
    if M < 1:
        raise InvalidArgument("M must be >= 1")
    if not 0.0 <= q <= 1.0:
        raise InvalidArgument("q must lie in [0, 1]")
    return 1.0 - (1.0 - q) ** M


@dataclass(frozen=True)
class PercolationReport:
    property: str
    p_grid: tuple[float, ...]
    trials: int
    success_count: tuple[int, ...]
    copies: int
    intact_copies: tuple[int, ...]
    outcomes: tuple[tuple[bool, ...], ...] = field(repr=False)

    @property
    def success_fraction(self) -> tuple[float, ...]:
        return tuple(s / self.trials for s in self.success_count)

    @property
    def p_critical_estimate(self) -> float | None:
        """Smallest p with success fraction >= 1/2, linearly interpolated."""
        f = self.success_fraction
        for i, fi in enumerate(f):
            if fi >= 0.5:
                if i == 0 or f[i] == f[i - 1]:
                    return self.p_grid[i]
                p0, p1 = self.p_grid[i - 1], self.p_grid[i]
                return p0 + (0.5 - f[i - 1]) * (p1 - p0) / (f[i] - f[i - 1])
        return None

    def per_copy_rate(self, i: int) -> float:
        return self.intact_copies[i] / (self.trials * self.copies) if self.copies else 0.0

    def survival_check(self, i: int) -> tuple[float, float, float]:
        """(observed survival, predicted ``1-(1-q)^M``, standard error) at grid point ``i``."""
        obs = self.success_fraction[i]
        pred = redundancy_stats(self.copies, self.per_copy_rate(i))
        se = math.sqrt(max(pred * (1 - pred), 1e-300) / self.trials)
        return obs, pred, se

    def to_csv(self) -> str:
        lines = ["p,trials,successes,fraction"]
        for p, s, f in zip(self.p_grid, self.success_count, self.success_fraction):
            lines.append(f"{p!r},{self.trials},{s},{f!r}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        pc = self.p_critical_estimate
        lines = [
            f"property {self.property}",
            f"trials {self.trials}",
            f"copies {self.copies}",
            "p_grid " + " ".join(repr(p) for p in self.p_grid),
            "success_count " + " ".join(str(s) for s in self.success_count),
            "intact_copies " + " ".join(str(s) for s in self.intact_copies),
            f"p_critical_estimate {'none' if pc is None else repr(pc)}",
        ]
        return "\n".join(lines) + "\n"


def trial_seed(base_seed: int, p_index: int, trial: int, coupled: bool) -> int:
    """64-bit seed derived from (base, p index, trial); coupled mode ignores the p index."""
    key = [base_seed, trial] if coupled else [base_seed, p_index, trial]
    state = np.random.SeedSequence(key).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def _reference_copies(skeleton, scheme, mask):
    edges = skeleton.edges(mask, 1.0)
    keep = steady_vertex_mask(skeleton, scheme, edges)
    n = len(skeleton.roster)
    inside = keep[edges[:, 0]] & keep[edges[:, 1]] if len(edges) else np.zeros(0, dtype=bool)
    k, lab = _components(n, edges[inside])
    groups = {}
    for i in np.flatnonzero(keep):
        groups.setdefault(lab[i], []).append(i)
    return [np.array(g) for _, g in sorted(groups.items(), key=lambda kv: kv[1][0]) if len(g) >= 2]


def _sweep_point(args):
    config, copies, p, p_index, trials, prop, coupled, target_order = args
    skeleton = CollisionSkeleton.build(config.schedule, config.timesteps)
    sel = skeleton.select(config.mask)
    n = len(skeleton.roster)
    universe = np.zeros(n, dtype=bool)
    owner = -np.ones(n, dtype=np.int64)
    for j, c in enumerate(copies):
        universe[c] = True
        owner[c] = j
    outcomes, intact_total = [], 0
    idx = np.flatnonzero(sel)
    for trial in range(trials):
        seed = trial_seed(config.seed, p_index, trial, coupled)
        formed = skeleton.formed(sel, p, seed)
        e = skeleton.pairs[idx[formed]]
        if len(e):
            e = e[universe[e[:, 0]] & universe[e[:, 1]]]
        _, lab = _components(n, e)
        intact = 0
        for c in copies:
            if np.all(lab[c] == lab[c[0]]):
                intact += 1
        intact_total += intact
        if prop == "component-complete":
            ok = intact > 0
        else:
            sizes = np.bincount(lab[universe]) if universe.any() else np.zeros(1, dtype=int)
            ok = bool(universe.any()) and int(sizes.max()) >= target_order
        outcomes.append(ok)
    return sum(outcomes), intact_total, tuple(outcomes)


def percolation_sweep(
    config: SimulationConfig,
    p_grid,
    trials: int,
    prop: str = "component-complete",
    coupled: bool = True,
    workers: int = 1,
    target_order: int | None = None,
) -> PercolationReport:
    """Monte Carlo probability of ``prop`` at each edge probability in ``p_grid``.

    Copies are the steady components of the p = 1 run.  ``component-complete``
    holds when at least one copy is still connected; ``spans-target-order``
    holds when some component inside the copies' vertex set reaches
    ``target_order`` vertices (default: the largest copy).  Trial seeds come
    from :func:`trial_seed`, so results do not depend on ``workers``.
    """
    if trials < 1:
        raise InvalidArgument("trials must be >= 1")
    if prop not in PROPERTIES:
        raise InvalidArgument(f"unknown property {prop!r}")
    p_grid = tuple(float(p) for p in p_grid)
    if any(not 0.0 <= p <= 1.0 for p in p_grid) or list(p_grid) != sorted(p_grid):
        raise InvalidArgument("p_grid must be ascending values in [0, 1]")
    skeleton = CollisionSkeleton.build(config.schedule, config.timesteps)
    copies = _reference_copies(skeleton, config.scheme, config.mask)
    if target_order is None:
        target_order = max((len(c) for c in copies), default=1)
    jobs = [(config, copies, p, i, trials, prop, coupled, target_order) for i, p in enumerate(p_grid)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(j) for j in jobs]
    return PercolationReport(
        property=prop,
        p_grid=p_grid,
        trials=trials,
        success_count=tuple(r[0] for r in results),
        copies=len(copies),
        intact_copies=tuple(r[1] for r in results),
        outcomes=tuple(r[2] for r in results),
    )
