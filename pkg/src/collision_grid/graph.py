"""Simple undirected graphs extracted from run traces.

Vertices may be any hashable, mutually orderable objects (``VertexTag`` for
streamed graphs, ``int`` for reference graphs).  Edges are stored as sorted
2-tuples so the graph is simple by construction.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from .errors import InvalidArgument, UnsupportedSize

ISOMORPHISM_CAP = 24


class UnionFind:
    """Disjoint sets over arbitrary hashable items, with path compression."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent = {}
        self.rank = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1

    def groups(self) -> list[list]:
        out = defaultdict(list)
        for x in self.parent:
            out[self.find(x)].append(x)
        return [sorted(g) for g in out.values()]


def _norm_edge(u, v):
    if u == v:
        raise InvalidArgument(f"self-loop on {u!r}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LabeledGraph:
    """Simple graph with component ids and per-component completeness.

    ``component_id`` numbers components 0, 1, ... in order of their
    smallest vertex.  ``complete`` maps component id to a flag; graphs not
    derived from a trace mark every component complete.
    """

    vertices: tuple
    edges: frozenset
    component_id: dict = field(default=None, compare=False, hash=False)
    complete: dict = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        verts = tuple(sorted(set(self.vertices)))
        edges = frozenset(_norm_edge(u, v) for u, v in self.edges)
        vset = set(verts)
        for u, v in edges:
            if u not in vset or v not in vset:
                raise InvalidArgument(f"edge {(u, v)} has an endpoint outside the vertex set")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        if self.component_id is None:
            uf = UnionFind(verts)
            for u, v in edges:
                uf.union(u, v)
            groups = sorted(uf.groups(), key=lambda g: g[0])
            object.__setattr__(self, "component_id", {x: i for i, g in enumerate(groups) for x in g})
        if self.complete is None:
            ids = set(self.component_id.values())
            object.__setattr__(self, "complete", {i: True for i in ids})

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], vertices: Iterable = ()) -> LabeledGraph:
        edges = list(edges)
        verts = set(vertices)
        for u, v in edges:
            verts.update((u, v))
        return cls(tuple(verts), frozenset(edges))

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degree(self) -> dict:
        return {v: len(n) for v, n in self.adjacency().items()}

    def neighbors(self, v) -> set:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    def is_connected(self) -> bool:
        return len(set(self.component_id.values())) <= 1

    def subgraph(self, keep: Iterable) -> LabeledGraph:
        """Induced subgraph; component ids are recomputed."""
        keep = set(keep)
        return LabeledGraph(
            tuple(v for v in self.vertices if v in keep),
            frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
        )

    def components(self, complete_only: bool = False, include_isolated: bool = True) -> list[LabeledGraph]:
        """Connected components as standalone graphs, ordered by component id."""
        members = defaultdict(list)
        for v in self.vertices:
            members[self.component_id[v]].append(v)
        edges_of = defaultdict(list)
        for e in self.edges:
            edges_of[self.component_id[e[0]]].append(e)
        out = []
        for cid in sorted(members):
            if complete_only and not self.complete[cid]:
                continue
            if not include_isolated and len(members[cid]) == 1:
                continue
            out.append(LabeledGraph(tuple(members[cid]), frozenset(edges_of[cid]), None, None))
        return out

    def relabel(self, mapping: dict) -> LabeledGraph:
        return LabeledGraph(
            tuple(mapping[v] for v in self.vertices),
            frozenset((mapping[u], mapping[v]) for u, v in self.edges),
        )

    def canonical_int(self) -> LabeledGraph:
        """Same graph with vertices renamed 0..n-1 in sorted order."""
        return self.relabel({v: i for i, v in enumerate(self.vertices)})


def extract_graph(trace) -> LabeledGraph:
    """Graph of formed edges over the full roster, with completeness per component."""
    edges = frozenset((e.u, e.v) for e in trace.events if e.formed)
    g = LabeledGraph(tuple(trace.roster), edges)
    complete = {cid: True for cid in set(g.component_id.values())}
    for v in g.vertices:
        if v not in trace.complete:
            complete[g.component_id[v]] = False
    return LabeledGraph(g.vertices, g.edges, g.component_id, complete)


def degree_histogram(g: LabeledGraph) -> dict[int, int]:
    """Number of vertices of each degree, isolated vertices included."""
    return dict(sorted(Counter(g.degree().values()).items()))


def _joint_colors(g1: LabeledGraph, g2: LabeledGraph, rounds: int | None = None):
    # colour refinement on the disjoint union so colour ids are comparable
    adj = {}
    for tag, g in ((0, g1), (1, g2)):
        for v, ns in g.adjacency().items():
            adj[(tag, v)] = [(tag, w) for w in ns]
    color = {x: len(ns) for x, ns in adj.items()}
    n_classes = len(set(color.values()))
    for _ in range(rounds if rounds is not None else len(adj)):
        sig = {x: (color[x], tuple(sorted(color[y] for y in adj[x]))) for x in adj}
        ids = {s: i for i, s in enumerate(sorted(set(sig.values())))}
        color = {x: ids[sig[x]] for x in adj}
        k = len(ids)
        if k == n_classes:
            break
        n_classes = k
    c1 = {v: color[(0, v)] for v in g1.vertices}
    c2 = {v: color[(1, v)] for v in g2.vertices}
    return c1, c2


def find_isomorphism(g1: LabeledGraph, g2: LabeledGraph) -> dict | None:
    """Edge-preserving bijection g1 -> g2, or None.  No size cap.

    Degree sequences are compared first, then colour refinement prunes the
    candidate sets, then vertices are matched in BFS order by backtracking.
    """
    if g1.order != g2.order or g1.size != g2.size:
        return None
    if sorted(g1.degree().values()) != sorted(g2.degree().values()):
        return None
    if g1.order == 0:
        return {}
    c1, c2 = _joint_colors(g1, g2)
    if Counter(c1.values()) != Counter(c2.values()):
        return None
    adj1, adj2 = g1.adjacency(), g2.adjacency()
    by_color2 = defaultdict(list)
    for v in g2.vertices:
        by_color2[c2[v]].append(v)
    class_size = Counter(c1.values())

    # BFS order, each component rooted at its rarest-colour vertex
    order, parent, seen = [], {}, set()
    for root in sorted(g1.vertices, key=lambda v: (class_size[c1[v]], v)):
        if root in seen:
            continue
        seen.add(root)
        parent[root] = None
        queue = deque([root])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in sorted(adj1[x]):
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    queue.append(y)

    mapping, used = {}, set()

    def feasible(v, w):
        for x in adj1[v]:
            if x in mapping and mapping[x] not in adj2[w]:
                return False
        mapped_nbrs = sum(1 for x in adj1[v] if x in mapping)
        image_nbrs = sum(1 for y in adj2[w] if y in used)
        return mapped_nbrs == image_nbrs

    def backtrack(i):
        if i == len(order):
            return True
        v = order[i]
        p = parent[v]
        pool = adj2[mapping[p]] if p is not None else by_color2[c1[v]]
        for w in sorted(pool):
            if w in used or c2[w] != c1[v] or not feasible(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if backtrack(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return dict(mapping) if backtrack(0) else None


def are_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    """Exact isomorphism test for graphs of at most 24 vertices."""
    if g1.order > ISOMORPHISM_CAP or g2.order > ISOMORPHISM_CAP:
        raise UnsupportedSize(f"isomorphism is capped at {ISOMORPHISM_CAP} vertices")
    return find_isomorphism(g1, g2) is not None


def _label(v) -> str:
    return v.label if hasattr(v, "label") else str(v)


def to_dot(g: LabeledGraph, name: str = "G") -> str:
    """Undirected DOT, one ``cluster_<id>`` subgraph per component."""
    lines = [f"graph {name} {{"]
    members = defaultdict(list)
    for v in g.vertices:
        members[g.component_id[v]].append(v)
    for cid in sorted(members):
        status = "complete" if g.complete[cid] else "incomplete"
        lines.append(f"  subgraph cluster_{cid} {{")
        lines.append(f'    label="component {cid} ({status})";')
        for v in members[cid]:
            lines.append(f'    "{_label(v)}";')
        lines.append("  }")
    for u, v in sorted(g.edges):
        lines.append(f'  "{_label(u)}" -- "{_label(v)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: LabeledGraph) -> str:
    """Adjacency document with component and completeness annotations."""
    adj = g.adjacency()
    doc = {
        "vertices": [
            {
                "id": _label(v),
                "component": g.component_id[v],
                "neighbors": sorted(_label(w) for w in adj[v]),
            }
            for v in g.vertices
        ],
        "components": [
            {"id": cid, "complete": g.complete[cid]} for cid in sorted(g.complete)
        ],
        "edges": [[_label(u), _label(v)] for u, v in sorted(g.edges)],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def from_json(text: str) -> LabeledGraph:
    """Read a graph written by :func:`to_json`; vertices come back as label strings.

    Labels of the form ``H.r.g`` / ``V.c.g`` are turned back into ``VertexTag``
    (direction is not recorded and defaults to Forward).
    """
    from .engine import VertexTag
    from .grid import Axis

    doc = json.loads(text)

    def parse_label(s):
        parts = s.split(".")
        if len(parts) == 3 and parts[0] in ("H", "V"):
            return VertexTag(Axis(parts[0]), int(parts[1]), int(parts[2]))
        try:
            return int(s)
        except ValueError:
            return s

    verts = {d["id"]: parse_label(d["id"]) for d in doc["vertices"]}
    edges = frozenset((verts[a], verts[b]) for a, b in doc["edges"])
    g = LabeledGraph(tuple(verts.values()), edges)
    comp_flags = {c["id"]: c["complete"] for c in doc.get("components", [])}
    stored = {verts[d["id"]]: d["component"] for d in doc["vertices"]}
    complete = {g.component_id[v]: comp_flags.get(stored[v], True) for v in g.vertices}
    return LabeledGraph(g.vertices, g.edges, g.component_id, complete)


def steady_components(trace, graph: LabeledGraph | None = None, start: int | None = None) -> list[LabeledGraph]:
    """Non-isolated components used for topology statistics.

    Basic scheme: complete components (every member crossed a populated
    grid).  Extended scheme: components of the subgraph induced on complete
    vertices, since streams there form structures of unbounded length.
    ``start`` additionally drops vertices of generation below ``start``.
    """
    g = graph if graph is not None else extract_graph(trace)
    if trace.config.scheme == "basic" and start is None:
        return g.components(complete_only=True, include_isolated=False)
    keep = [v for v in trace.complete if start is None or v.generation >= start]
    if trace.config.scheme == "basic":
        sub = LabeledGraph(g.vertices, g.edges, g.component_id, g.complete)
        keep = [v for v in keep if sub.complete[sub.component_id[v]]]
    return g.subgraph(keep).components(include_isolated=False)
