"""Collision-grid generation of graph states: simulation, extraction, classification and checks."""

from __future__ import annotations

from .analysis import (
    CountReport,
    PercolationReport,
    check_bounds,
    count_structures,
    percolation_sweep,
    redundancy_stats,
    steady_state_overhead,
)
from .engine import (
    CollisionSkeleton,
    EdgeEvent,
    RunTrace,
    VertexTag,
    format_trace,
    occupancy,
    parse_trace,
    position,
    run,
    step,
)
from .errors import EngineInvariantError, InvalidArgument, NoSteadyState, ParseError, UnsupportedSize
from .graph import (
    LabeledGraph,
    UnionFind,
    are_isomorphic,
    degree_histogram,
    extract_graph,
    find_isomorphism,
    from_json,
    steady_components,
    to_dot,
    to_json,
)
from .grid import (
    SCHEDULE_FAMILIES,
    ActiveMask,
    Axis,
    Directive,
    EntrySchedule,
    GridSpec,
    SimulationConfig,
    link_skew,
    make_basic_schedule,
    make_family_schedule,
    repeat_diagonal,
)
from .patterns import parse_pattern, serialize_pattern
from .stabilizer import (
    QuantumRegister,
    StabilizerGenerator,
    apply_cphase,
    apply_generator,
    apply_pauli,
    build_graph_state,
    carve_unit_cell,
    graph_generators,
    measure_z,
    plus_state,
    project_z,
    verify_graph_state,
)
from .topology import (
    CubeGraph,
    Cycle,
    Decorated,
    HexCell,
    Lattice2D,
    Maximal,
    Other,
    Path,
    Prism,
    SearchResult,
    TopologyClass,
    certify,
    classify,
    parse_topology,
    reference_graph,
    search_pattern,
)

__version__ = "0.1.0"
