"""Stream kinematics and collision detection.

Every vertex advances one site per timestep along its lane.  When two or
more vertices sit on the same active site at the same integer timestep,
each co-located pair is offered a C-Phase edge.  Vertices that swap cells
between timesteps never meet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

from .errors import EngineInvariantError, ParseError
from .grid import ActiveMask, Axis, Directive, EntrySchedule, SimulationConfig


@dataclass(frozen=True, order=True)
class VertexTag:
    """A streamed qubit. ``(axis, lane, generation)`` is unique within a run."""

    axis: Axis
    lane: int
    generation: int
    direction: Directive = field(default=Directive.FORWARD, compare=False)

    @property
    def label(self) -> str:
        return f"{self.axis.value}.{self.lane}.{self.generation}"

    @property
    def key(self) -> int:
        """Component key ``generation - lane``; conserved along basic-scheme edges."""
        return self.generation - self.lane

    def __repr__(self):
        return f"{self.label}{self.direction.value}"


@dataclass(frozen=True)
class EdgeEvent:
    u: VertexTag
    v: VertexTag
    site: tuple[int, int]
    t: int
    formed: bool

    @property
    def endpoints(self) -> tuple[VertexTag, VertexTag]:
        return (self.u, self.v)

    def sort_key(self):
        return (self.t, self.site, self.u, self.v)


@dataclass(frozen=True)
class RunTrace:
    config: SimulationConfig
    events: tuple[EdgeEvent, ...]
    roster: frozenset[VertexTag]
    complete: frozenset[VertexTag]

    def formed_events(self) -> list[EdgeEvent]:
        return [e for e in self.events if e.formed]


def position(v: VertexTag, t: int, L: int) -> tuple[int, int] | None:
    """Site occupied by ``v`` at timestep ``t``, or None outside the grid."""
    s = t - v.generation
    if s < 0 or s >= L:
        return None
    cell = s + 1 if v.direction is Directive.FORWARD else L - s
    return (v.lane, cell) if v.axis is Axis.H else (cell, v.lane)


def _lane_occupants(schedule: EntrySchedule, axis: Axis, lane: int, cell: int, t: int, L: int):
    # at most one Forward and one Backward vertex can be at a given cell
    g = t - cell + 1
    if schedule.directive(axis, lane, g) is Directive.FORWARD:
        yield VertexTag(axis, lane, g, Directive.FORWARD)
    g = t - L + cell
    if schedule.directive(axis, lane, g) is Directive.BACKWARD:
        yield VertexTag(axis, lane, g, Directive.BACKWARD)


def occupancy(
    schedule: EntrySchedule,
    t: int,
    sites: Iterable[tuple[int, int]] | None = None,
) -> dict[tuple[int, int], list[VertexTag]]:
    """Vertices on each site at timestep ``t`` (all sites unless ``sites`` is given)."""
    L = schedule.side_length
    if sites is None:
        sites = [(r, c) for r in range(1, L + 1) for c in range(1, L + 1)]
    occ = {}
    for r, c in sites:
        here = list(_lane_occupants(schedule, Axis.H, r, c, t, L))
        here.extend(_lane_occupants(schedule, Axis.V, c, r, t, L))
        if here:
            occ[(r, c)] = sorted(here)
    return occ


def step(
    occ: Mapping[tuple[int, int], list[VertexTag]],
    mask: ActiveMask,
    t: int,
    rng: np.random.Generator | None,
    p: float,
    linked: set[frozenset[VertexTag]],
) -> list[EdgeEvent]:
    """Collision events for one timestep; updates ``linked`` in place.

    One uniform draw per event (row-major site order, then pair order) is
    consumed when ``0 < p < 1``; the endpoints p=0 and p=1 skip the coin.
    """
    events = []
    for site in sorted(occ):
        verts = occ[site]
        if len(verts) > 4:
            raise EngineInvariantError(f"{len(verts)} vertices at site {site}, t={t}")
        if len(verts) < 2 or not mask.is_active(*site):
            continue
        for u, v in combinations(sorted(verts), 2):
            events.append([u, v, site])
    if not events:
        return []
    if p >= 1.0:
        coins = np.ones(len(events), dtype=bool)
    elif p <= 0.0:
        coins = np.zeros(len(events), dtype=bool)
    else:
        coins = rng.random(len(events)) < p
    out = []
    for (u, v, site), coin in zip(events, coins):
        pair = frozenset((u, v))
        formed = bool(coin) and pair not in linked
        if formed:
            linked.add(pair)
        out.append(EdgeEvent(u, v, site, t, formed))
    return out


def roster_of(schedule: EntrySchedule, T: int) -> list[VertexTag]:
    L = schedule.side_length
    out = []
    for axis in (Axis.H, Axis.V):
        for lane in range(1, L + 1):
            for g in range(1, T + 1):
                d = schedule.directive(axis, lane, g)
                if d is not Directive.SKIP:
                    out.append(VertexTag(axis, lane, g, d))
    return out


def is_complete(v: VertexTag, L: int, T: int) -> bool:
    """Vertex crossed the whole grid while every lane was already populated.

    Entry at ``g >= L`` excludes the fill-up phase; ``g + L - 1 <= T``
    means the last site was reached within the run.
    """
    return L <= v.generation and v.generation + L - 1 <= T


def run(config: SimulationConfig) -> RunTrace:
    """Advance all streams for t = 1..T and log every collision at an active site."""
    L = config.side_length
    T = config.timesteps
    p = config.edge_probability
    rng = np.random.default_rng(config.seed)
    sites = config.mask.active_sites()
    linked: set[frozenset[VertexTag]] = set()
    events: list[EdgeEvent] = []
    for t in range(1, T + 1):
        occ = occupancy(config.schedule, t, sites)
        events.extend(step(occ, config.mask, t, rng, p, linked))
    roster = roster_of(config.schedule, T)
    complete = [v for v in roster if is_complete(v, L, T)]
    return RunTrace(config, tuple(events), frozenset(roster), frozenset(complete))


def format_trace(trace: RunTrace) -> str:
    """Line-oriented log: config header (``#``-prefixed), then one event per line.

    Event lines read ``t r c axis1 lane1 g1 axis2 lane2 g2 formed``.
    """
    from .patterns import serialize_pattern

    lines = ["# " + line for line in serialize_pattern(trace.config).splitlines()]
    lines.append(f"# roster {len(trace.roster)} complete {len(trace.complete)}")
    for e in trace.events:
        r, c = e.site
        lines.append(
            f"{e.t} {r} {c} {e.u.axis.value} {e.u.lane} {e.u.generation} "
            f"{e.v.axis.value} {e.v.lane} {e.v.generation} {int(e.formed)}"
        )
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> RunTrace:
    """Inverse of :func:`format_trace`."""
    from .patterns import parse_pattern

    header = []
    body = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("# "):
            header.append(line[2:])
        elif line.strip():
            body.append((lineno, line))
    config = parse_pattern("\n".join(h for h in header if not h.startswith("roster ")) + "\n")
    L, T = config.side_length, config.timesteps
    roster = roster_of(config.schedule, T)
    by_id = {(v.axis, v.lane, v.generation): v for v in roster}
    events = []
    for lineno, line in body:
        try:
            t, r, c, a1, l1, g1, a2, l2, g2, f = line.split()
            u = by_id[(Axis(a1), int(l1), int(g1))]
            v = by_id[(Axis(a2), int(l2), int(g2))]
        except (ValueError, KeyError):
            raise ParseError(f"malformed event {line!r}", lineno) from None
        if f not in ("0", "1"):
            raise ParseError(f"formed flag must be 0 or 1, got {f!r}", lineno)
        events.append(EdgeEvent(u, v, (int(r), int(c)), int(t), f == "1"))
    complete = [v for v in roster if is_complete(v, L, T)]
    return RunTrace(config, tuple(events), frozenset(roster), frozenset(complete))


@dataclass(frozen=True)
class CollisionSkeleton:
    """All co-locations of a schedule over t = 1..T, independent of mask and p.

    ``sites`` holds row-major site indices (0-based), ``pairs`` holds roster
    indices ``(i, j)`` with ``i < j``; both are in the engine's event order.
    Filtering by a mask and replaying coins reproduces :func:`run` exactly,
    which makes exhaustive mask search and Monte Carlo sweeps cheap.
    """

    side_length: int
    timesteps: int
    roster: tuple[VertexTag, ...]
    complete: np.ndarray
    times: np.ndarray
    sites: np.ndarray
    pairs: np.ndarray

    @classmethod
    def build(cls, schedule: EntrySchedule, T: int) -> CollisionSkeleton:
        L = schedule.side_length
        roster = tuple(sorted(roster_of(schedule, T)))
        index = {v: i for i, v in enumerate(roster)}
        times, sites, pairs = [], [], []
        for t in range(1, T + 1):
            occ = occupancy(schedule, t)
            for (r, c), verts in sorted(occ.items()):
                if len(verts) > 4:
                    raise EngineInvariantError(f"{len(verts)} vertices at site {(r, c)}, t={t}")
                for u, v in combinations(verts, 2):
                    times.append(t)
                    sites.append((r - 1) * L + (c - 1))
                    pairs.append((index[u], index[v]))
        complete = np.array([is_complete(v, L, T) for v in roster], dtype=bool)
        return cls(
            L,
            T,
            roster,
            complete,
            np.array(times, dtype=np.int64),
            np.array(sites, dtype=np.int64),
            np.array(pairs, dtype=np.int64).reshape(-1, 2),
        )

    def select(self, mask: ActiveMask) -> np.ndarray:
        """Boolean selector of the events that happen on active sites."""
        bits = np.array([x for row in mask.cells for x in row], dtype=bool)
        return bits[self.sites]

    def formed(self, selected: np.ndarray, p: float = 1.0, seed: int = 0) -> np.ndarray:
        """Formed flags for the selected events, replaying the engine's coin order."""
        idx = np.flatnonzero(selected)
        pairs = self.pairs[idx]
        if p >= 1.0:
            coins = np.ones(len(idx), dtype=bool)
        elif p <= 0.0:
            coins = np.zeros(len(idx), dtype=bool)
        else:
            coins = np.random.default_rng(seed).random(len(idx)) < p
        # keep only the first successful coin per pair
        out = np.zeros(len(idx), dtype=bool)
        n = len(self.roster)
        key = pairs[:, 0] * n + pairs[:, 1]
        hit = np.flatnonzero(coins)
        _, first = np.unique(key[hit], return_index=True)
        out[hit[first]] = True
        return out

    def edges(self, mask: ActiveMask, p: float = 1.0, seed: int = 0) -> np.ndarray:
        """Formed edges as an (m, 2) array of roster indices."""
        sel = self.select(mask)
        f = self.formed(sel, p, seed)
        return self.pairs[np.flatnonzero(sel)[f]]
