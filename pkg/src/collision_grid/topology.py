"""Recognising the catalogue of produced structures and searching for masks.

A :class:`TopologyClass` is a tag plus integer parameters.  Parameters may
be ``None`` in search targets, meaning "any value" (e.g. a depth-2 lattice
of unrestricted length is ``Lattice2D(2, None)``).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .engine import CollisionSkeleton, run
from .errors import InvalidArgument, UnsupportedSize
from .graph import LabeledGraph, extract_graph, find_isomorphism
from .grid import (
    SCHEDULE_FAMILIES,
    ActiveMask,
    EntrySchedule,
    GridSpec,
    SimulationConfig,
    make_basic_schedule,
    make_family_schedule,
)

CLASSIFY_CAP = 64

# tags and their parameter names
TAGS = {
    "Path": ("n",),
    "Cycle": ("n",),
    "Lattice2D": ("depth", "length"),
    "Prism": ("cycle", "length"),
    "CubeGraph": (),
    "HexCell": (),
    "Decorated": ("base", "pendants"),
    "Maximal": ("side",),
    "Other": (),
}


@dataclass(frozen=True)
class TopologyClass:
    tag: str
    params: tuple = ()

    def __post_init__(self):
        if self.tag not in TAGS:
            raise InvalidArgument(f"unknown topology tag {self.tag!r}")
        if len(self.params) != len(TAGS[self.tag]):
            raise InvalidArgument(f"{self.tag} takes parameters {TAGS[self.tag]}")

    def __str__(self):
        if not self.params and self.tag in ("CubeGraph", "HexCell", "Other"):
            return self.tag
        return f"{self.tag}({','.join('*' if p is None else str(p) for p in self.params)})"

    def matches(self, other: TopologyClass) -> bool:
        """True if ``other`` is an instance of this (possibly wildcard) class."""
        if self.tag != other.tag:
            return False
        for mine, theirs in zip(self.params, other.params):
            if mine is None:
                continue
            if isinstance(mine, TopologyClass):
                if not isinstance(theirs, TopologyClass) or not mine.matches(theirs):
                    return False
            elif mine != theirs:
                return False
        return True


def Path(n=None):
    return canonical(TopologyClass("Path", (n,)))


def Cycle(n=None):
    return canonical(TopologyClass("Cycle", (n,)))


def Lattice2D(depth=None, length=None):
    return canonical(TopologyClass("Lattice2D", (depth, length)))


def Prism(cycle=None, length=None):
    return canonical(TopologyClass("Prism", (cycle, length)))


def Decorated(base=None, pendants=None):
    return canonical(TopologyClass("Decorated", (base, pendants)))


def Maximal(side=None):
    return canonical(TopologyClass("Maximal", (side,)))


CubeGraph = TopologyClass("CubeGraph")
HexCell = TopologyClass("HexCell")
Other = TopologyClass("Other")


def canonical(cls: TopologyClass) -> TopologyClass:
    """Collapse aliases: a depth-1 lattice is a path, C6 is the hex cell, etc."""
    tag, ps = cls.tag, cls.params
    if tag == "Lattice2D":
        d, l = ps
        if d is not None and l is not None and d > l:
            d, l = l, d
        if d == 1:
            return canonical(TopologyClass("Path", (l,)))
        if d == 2 and l == 2:
            return TopologyClass("Cycle", (4,))
        return TopologyClass(tag, (d, l))
    if tag == "Cycle" and ps[0] == 6:
        return HexCell
    if tag == "Prism":
        n, l = ps
        if l == 1:
            return canonical(TopologyClass("Cycle", (n,)))
        if n == 4 and l == 2:
            return CubeGraph
    if tag == "Maximal":
        k = ps[0]
        if k == 1:
            return TopologyClass("Path", (2,))
        if k == 2:
            return TopologyClass("Cycle", (4,))
    return cls


_TOKEN = re.compile(r"\s*([A-Za-z0-9]+|\*|[(),])")


def parse_topology(text: str) -> TopologyClass:
    """Inverse of ``str(TopologyClass)``, e.g. ``Lattice2D(2,*)`` or ``Decorated(Cycle(4),4)``."""
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != re.sub(r"\s+", "", text):
        raise InvalidArgument(f"cannot parse topology {text!r}")
    pos = 0

    def parse():
        nonlocal pos
        name = tokens[pos]
        pos += 1
        if name not in TAGS:
            raise InvalidArgument(f"unknown topology tag {name!r}")
        params = []
        if pos < len(tokens) and tokens[pos] == "(":
            pos += 1
            while tokens[pos] != ")":
                tok = tokens[pos]
                if tok == "*":
                    params.append(None)
                    pos += 1
                elif tok.isdigit():
                    params.append(int(tok))
                    pos += 1
                else:
                    params.append(parse())
                if tokens[pos] == ",":
                    pos += 1
            pos += 1
        if not params and TAGS[name]:
            params = [None] * len(TAGS[name])
        return canonical(TopologyClass(name, tuple(params)))

    try:
        out = parse()
    except IndexError:
        raise InvalidArgument(f"cannot parse topology {text!r}") from None
    if pos != len(tokens):
        raise InvalidArgument(f"trailing tokens in {text!r}")
    return out


# ---------------------------------------------------------------- references


def _grid_edges(d, l, wrap=False):
    def vid(i, j):
        return i * l + j

    edges = []
    for i in range(d):
        for j in range(l):
            if j + 1 < l:
                edges.append((vid(i, j), vid(i, j + 1)))
            if i + 1 < d:
                edges.append((vid(i, j), vid(i + 1, j)))
            elif wrap and d > 2:
                edges.append((vid(i, j), vid(0, j)))
    return edges


def reference_graph(cls: TopologyClass, side_length: int | None = None) -> LabeledGraph:
    """Canonical instance of a fully parameterised class (vertices are ints)."""
    cls = canonical(cls)
    tag, ps = cls.tag, cls.params
    if any(p is None for p in ps):
        raise InvalidArgument(f"{cls} has unresolved parameters")
    if tag == "Path":
        (n,) = ps
        if n < 1:
            raise InvalidArgument("Path needs n >= 1")
        return LabeledGraph.from_edges([(i, i + 1) for i in range(n - 1)], range(n))
    if tag == "Cycle":
        (n,) = ps
        if n < 3:
            raise InvalidArgument("Cycle needs n >= 3")
        return LabeledGraph.from_edges([(i, (i + 1) % n) for i in range(n)])
    if tag == "HexCell":
        return LabeledGraph.from_edges([(i, (i + 1) % 6) for i in range(6)])
    if tag == "CubeGraph":
        return LabeledGraph.from_edges(
            [(a, a ^ (1 << k)) for a in range(8) for k in range(3) if a < a ^ (1 << k)]
        )
    if tag == "Lattice2D":
        d, l = ps
        return LabeledGraph.from_edges(_grid_edges(d, l), range(d * l))
    if tag == "Prism":
        n, l = ps
        if n < 3 or l < 1:
            raise InvalidArgument("Prism needs cycle >= 3 and length >= 1")
        return LabeledGraph.from_edges(_grid_edges(n, l, wrap=True), range(n * l))
    if tag == "Decorated":
        base, k = ps
        core = reference_graph(base)
        if k != core.order:
            raise InvalidArgument("Decorated references carry one pendant per core vertex")
        n = core.order
        edges = list(core.edges) + [(v, n + i) for i, v in enumerate(core.vertices)]
        return LabeledGraph.from_edges(edges)
    if tag == "Maximal":
        (L,) = ps
        return maximal_reference(L)
    raise InvalidArgument(f"no reference graph for {cls}")


def maximal_reference(side_length: int) -> LabeledGraph:
    """Complete structure of the fully active grid, taken from a basic-scheme run."""
    grid = GridSpec(side_length)
    T = 3 * side_length
    trace = run(SimulationConfig(grid, ActiveMask.full(side_length), make_basic_schedule(grid, T), T))
    comps = extract_graph(trace).components(complete_only=True, include_isolated=False)
    return comps[0].canonical_int()


# ------------------------------------------------------------ classification


def _is_tree(g: LabeledGraph) -> bool:
    return g.size == g.order - 1


def _complete_bipartite_side(g: LabeledGraph, deg: dict) -> int | None:
    n = g.order
    if n % 2 or n < 6:
        return None
    k = n // 2
    if g.size != k * k or set(deg.values()) != {k}:
        return None
    # k-regular with k^2 edges on 2k vertices: K_{k,k} iff bipartite
    adj = g.adjacency()
    color = {g.vertices[0]: 0}
    stack = [g.vertices[0]]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in color:
                color[y] = 1 - color[x]
                stack.append(y)
            elif color[y] == color[x]:
                return None
    return k


def _match(g: LabeledGraph, cls: TopologyClass) -> bool:
    return find_isomorphism(g, reference_graph(cls)) is not None


def classify(component: LabeledGraph, side_length: int | None = None) -> TopologyClass:
    """Topology of a connected component (at most 64 vertices).

    ``side_length``, when given, restricts ``Maximal`` to the fully active
    structure of that grid size.
    """
    n = component.order
    if n > CLASSIFY_CAP:
        raise UnsupportedSize(f"classify is capped at {CLASSIFY_CAP} vertices, got {n}")
    if n == 0 or not component.is_connected():
        raise InvalidArgument("classify expects a single connected component")
    m = component.size
    deg = component.degree()
    degs = sorted(deg.values())
    if _is_tree(component) and (n == 1 or degs[-1] <= 2):
        return Path(n)
    if degs[0] == degs[-1] == 2:
        return Cycle(n)
    if n == 8 and m == 12 and _match(component, CubeGraph):
        return CubeGraph
    for d in range(2, int(n**0.5) + 1):
        if n % d:
            continue
        l = n // d
        if m == 2 * n - d - l and _match(component, Lattice2D(d, l)):
            return Lattice2D(d, l)
    for c in range(3, n // 2 + 1):
        if n % c:
            continue
        l = n // c
        if m == 2 * n - c and _match(component, Prism(c, l)):
            return Prism(c, l)
    decorated = _classify_decorated(component, deg, side_length)
    if decorated is not None:
        return decorated
    k = _complete_bipartite_side(component, deg)
    if k is not None and (side_length is None or k == side_length):
        return Maximal(k)
    return Other


_DECORATABLE = ("Path", "Cycle", "HexCell", "Lattice2D", "CubeGraph", "Prism")


def _classify_decorated(g, deg, side_length):
    pendants = [v for v in g.vertices if deg[v] == 1]
    core = [v for v in g.vertices if deg[v] != 1]
    if not pendants or len(core) < 2 or len(pendants) != len(core):
        return None
    adj = g.adjacency()
    hosts = Counter(next(iter(adj[v])) for v in pendants)
    if any(hosts[v] != 1 for v in core):
        return None
    base = classify(g.subgraph(core), side_length)
    if base.tag not in _DECORATABLE:
        return None
    return Decorated(base, len(pendants))


# -------------------------------------------------------------------- search


@dataclass(frozen=True)
class SearchResult:
    mask: ActiveMask
    schedule: EntrySchedule
    T: int
    matched_component_count: int
    complete_copies: int
    family: str = "forward"

    def config(self, **kw) -> SimulationConfig:
        grid = GridSpec(self.mask.side_length)
        return SimulationConfig(grid, self.mask, self.schedule, self.T, **kw)


def _prefilter(target: TopologyClass, n: int, m: int, degs: Counter) -> bool:
    """Cheap necessary conditions so the exact matcher only sees plausible graphs."""
    tag = target.tag
    if tag == "Path":
        return m == n - 1 and max(degs) <= 2
    if tag == "Cycle":
        return set(degs) == {2}
    if tag == "HexCell":
        return n == 6 and set(degs) == {2}
    if tag == "CubeGraph":
        return n == 8 and m == 12 and set(degs) == {3}
    if tag == "Lattice2D":
        return max(degs) <= 4 and m < 2 * n
    if tag == "Prism":
        return max(degs) <= 4 and min(degs) >= 3
    if tag == "Decorated":
        return 2 * degs.get(1, 0) == n
    if tag == "Maximal":
        return n % 2 == 0 and m == (n // 2) ** 2
    return True


def _schedules_for(L, T, scheme):
    grid = GridSpec(L)
    if scheme == "basic":
        return [("forward", make_basic_schedule(grid, T))]
    if scheme == "extended":
        return [(f, make_family_schedule(grid, T, f)) for f in SCHEDULE_FAMILIES]
    raise InvalidArgument(f"unknown scheme {scheme!r}")


def _mask_order(L: int, mode: str, budget: int, seed: int):
    n = L * L
    if mode == "exhaustive":
        if L > 4:
            raise InvalidArgument("exhaustive search is limited to L <= 4")
        limit = min(budget, 2**n)
        for code in range(limit):
            yield mask_from_code(L, code)
    elif mode == "random":
        rng = np.random.default_rng(seed)
        for _ in range(budget):
            bits = rng.integers(0, 2, size=n).astype(bool)
            yield ActiveMask.from_array(bits.reshape(L, L))
    else:
        raise InvalidArgument(f"unknown search mode {mode!r}")


def mask_from_code(L: int, code: int) -> ActiveMask:
    """Mask number ``code`` in lexicographic order of its row-major glyph string."""
    n = L * L
    flat = [(code >> (n - 1 - k)) & 1 == 1 for k in range(n)]
    return ActiveMask(tuple(tuple(flat[r * L:(r + 1) * L]) for r in range(L)))


def steady_vertex_mask(skeleton: CollisionSkeleton, scheme: str, edges: np.ndarray, start: int | None = None):
    """Roster indices belonging to the steady set used for topology statistics.

    Basic scheme: members of components made only of complete vertices.
    Extended scheme: complete vertices (the induced window), optionally also
    requiring ``generation >= start``.
    """
    n = len(skeleton.roster)
    win = skeleton.complete.copy()
    if start is not None:
        gens = np.array([v.generation for v in skeleton.roster])
        win &= gens >= start
    if scheme != "basic":
        return win
    k, lab = _components(n, edges)
    bad = np.zeros(k, dtype=bool)
    bad[lab[~win]] = True
    return ~bad[lab]


def _components(n, edges):
    if len(edges) == 0:
        return n, np.arange(n)
    A = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    return connected_components(A, directed=False)


def component_graphs(skeleton: CollisionSkeleton, edges: np.ndarray, keep: np.ndarray) -> list[LabeledGraph]:
    """Non-isolated components of the subgraph induced on ``keep``, as LabeledGraphs."""
    n = len(skeleton.roster)
    inside = keep[edges[:, 0]] & keep[edges[:, 1]] if len(edges) else np.zeros(0, dtype=bool)
    e = edges[inside]
    k, lab = _components(n, e)
    groups = {}
    for i in np.flatnonzero(keep):
        groups.setdefault(lab[i], []).append(i)
    by_comp = {}
    for a, b in e:
        by_comp.setdefault(lab[a], []).append((a, b))
    out = []
    for c in sorted(groups, key=lambda c: groups[c][0]):
        if len(groups[c]) < 2:
            continue
        R = skeleton.roster
        out.append(
            LabeledGraph(
                tuple(R[i] for i in groups[c]),
                frozenset((R[a], R[b]) for a, b in by_comp[c]),
            )
        )
    return out


def _evaluate(target, skeleton, scheme, mask, side_length, min_order=2):
    edges = skeleton.edges(mask)
    keep = steady_vertex_mask(skeleton, scheme, edges)
    comps = _summaries(skeleton, edges, keep)
    if not comps:
        return None
    for n, m, degs in comps:
        if n < min_order or n > CLASSIFY_CAP or not _prefilter(target, n, m, degs):
            return None
    graphs = component_graphs(skeleton, edges, keep)
    classes = [classify(g, side_length) for g in graphs]
    if not all(target.matches(c) for c in classes):
        return None
    return graphs, classes


def _summaries(skeleton, edges, keep):
    n = len(skeleton.roster)
    inside = keep[edges[:, 0]] & keep[edges[:, 1]] if len(edges) else np.zeros(0, dtype=bool)
    e = edges[inside]
    k, lab = _components(n, e)
    sizes = np.bincount(lab[keep], minlength=k)
    ecount = np.bincount(lab[e[:, 0]], minlength=k) if len(e) else np.zeros(k, dtype=int)
    deg = np.bincount(e.ravel(), minlength=n) if len(e) else np.zeros(n, dtype=int)
    out = []
    for c in np.flatnonzero(sizes >= 2):
        members = np.flatnonzero((lab == c) & keep)
        out.append((int(sizes[c]), int(ecount[c]), Counter(deg[members].tolist())))
    return out


def count_copies(graphs: list[LabeledGraph]) -> int:
    """Size of the largest group of pairwise-isomorphic graphs."""
    reps: list[tuple[LabeledGraph, int]] = []
    for g in graphs:
        for i, (r, k) in enumerate(reps):
            if find_isomorphism(g, r) is not None:
                reps[i] = (r, k + 1)
                break
        else:
            reps.append((g, 1))
    return max((k for _, k in reps), default=0)


def search_pattern(
    target: TopologyClass,
    L: int,
    T: int,
    scheme: str = "basic",
    budget: int = 2**16,
    mode: str = "exhaustive",
    seed: int = 0,
    families: tuple[str, ...] | None = None,
    min_order: int = 2,
) -> SearchResult | None:
    """First mask (and schedule, for the extended scheme) whose steady components all match ``target``.

    Exhaustive mode walks masks in lexicographic order of their glyph
    strings; random mode draws ``budget`` masks from ``seed``.  Schedules
    are tried in family order for each mask budget.  ``min_order`` rejects
    masks whose steady components include one with fewer vertices, which
    separates long extended-scheme structures from short fragments of the
    same class.  Every hit is re-simulated with :func:`run` before it is
    returned.
    """
    if budget <= 0:
        raise InvalidArgument("budget must be positive")
    if L < 1 or T < 1:
        raise InvalidArgument("L and T must be positive")
    schedules = _schedules_for(L, T, scheme)
    if families is not None:
        schedules = [(f, s) for f, s in schedules if f in families]
    for family, schedule in schedules:
        skeleton = CollisionSkeleton.build(schedule, T)
        sched_scheme = "basic" if schedule.is_basic() else "extended"
        for mask in _mask_order(L, mode, budget, seed):
            side = L if target.tag == "Maximal" else None
            hit = _evaluate(target, skeleton, sched_scheme, mask, side, min_order)
            if hit is None:
                continue
            graphs, _ = hit
            result = SearchResult(mask, schedule, T, len(graphs), count_copies(graphs), family)
            certify(result, target)
            return result
    return None


def certify(result: SearchResult, target: TopologyClass) -> None:
    """Re-simulate from scratch and check the claimed match; raises on mismatch."""
    from .graph import steady_components

    trace = run(result.config())
    comps = steady_components(trace)
    side = result.mask.side_length if target.tag == "Maximal" else None
    if len(comps) != result.matched_component_count or not all(
        target.matches(classify(c, side)) for c in comps
    ):
        raise AssertionError(f"search result for {target} does not reproduce under re-simulation")
