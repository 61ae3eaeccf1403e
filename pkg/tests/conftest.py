from __future__ import annotations

from pathlib import Path

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings

from collision_grid import (
    ActiveMask,
    GridSpec,
    LabeledGraph,
    SimulationConfig,
    make_basic_schedule,
    parse_pattern,
)

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

ROOT = Path(__file__).resolve().parent.parent
LIB = ROOT / "lib"


def basic_config(L, T, mask=None, p=1.0, seed=0):
    grid = GridSpec(L)
    if mask is None:
        mask = ActiveMask.full(L)
    elif isinstance(mask, (list, tuple)) and mask and isinstance(mask[0], str):
        mask = ActiveMask.from_rows(mask)
    return SimulationConfig(grid, mask, make_basic_schedule(grid, T), T, p, seed)


def to_nx(g: LabeledGraph) -> nx.Graph:
    out = nx.Graph()
    out.add_nodes_from(g.vertices)
    out.add_edges_from(g.edges)
    return out


def from_nx(h: nx.Graph) -> LabeledGraph:
    return LabeledGraph.from_edges(list(h.edges()), list(h.nodes()))


def library_manifest():
    rows = []
    for line in (LIB / "MANIFEST").read_text().splitlines():
        if line and not line.startswith("#"):
            name, topo, L, T, scheme, family, copies, digest = line.split()
            rows.append(
                dict(name=name, topology=topo, L=int(L), T=int(T), scheme=scheme,
                     family=family, copies=int(copies), sha256=digest)
            )
    return rows


def library_configs():
    return {r["name"]: parse_pattern((LIB / f"{r['name']}.pattern").read_text()) for r in library_manifest()}


@pytest.fixture(scope="session")
def library():
    return library_configs()


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
