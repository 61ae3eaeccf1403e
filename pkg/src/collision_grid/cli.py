"""Command-line interface.

Exit status: 0 on success, 1 on domain errors (failed verification, no
search hit, oversized component, ...), 2 on usage or parse errors.

Input files are recognised by their first characters: ``# `` starts a
trace log, ``{`` a JSON graph, anything else is a pattern document.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path as FsPath

from .analysis import PROPERTIES, check_bounds, count_structures, percolation_sweep
from .engine import VertexTag, format_trace, parse_trace, run
from .errors import InvalidArgument, NoSteadyState, ParseError, UnsupportedSize
from .graph import LabeledGraph, extract_graph, from_json, to_dot, to_json
from .grid import SCHEDULE_FAMILIES, Axis, SimulationConfig, make_basic_schedule
from .patterns import parse_pattern, serialize_pattern
from .stabilizer import build_graph_state, carve_unit_cell, stabilizer_report
from .topology import classify, parse_topology, search_pattern

RENDER_HEADER = "mask (# active, . inactive)"


class UsageError(Exception):
    """Bad flag values or unreadable input; maps to exit status 2."""


class DomainError(Exception):
    """Well-formed request whose answer is a failure; maps to exit status 1."""


# ------------------------------------------------------------------ inputs


def _read(path: str) -> str:
    try:
        return FsPath(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _kind(text: str) -> str:
    if text.startswith("# "):
        return "trace"
    if text.lstrip().startswith("{"):
        return "json"
    return "pattern"


def _load_config(path: str, args) -> SimulationConfig:
    text = _read(path)
    kind = _kind(text)
    if kind == "trace":
        config = parse_trace(text).config
    elif kind == "pattern":
        config = parse_pattern(text)
    else:
        raise UsageError(f"{path} is a graph, a pattern or trace is required")
    return _override(config, args)


def _override(config: SimulationConfig, args) -> SimulationConfig:
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "edge_prob", None) is not None:
        changes["edge_probability"] = args.edge_prob
    if getattr(args, "timesteps", None) is not None:
        T = args.timesteps
        changes["timesteps"] = T
        if config.schedule.is_basic():
            changes["schedule"] = make_basic_schedule(config.grid, T)
    try:
        return config.with_(**changes) if changes else config
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from None


def _load_graph(path: str, args) -> LabeledGraph:
    """Graph from a JSON document, or extracted from a trace or (re-run) pattern."""
    text = _read(path)
    kind = _kind(text)
    if kind == "json":
        try:
            return from_json(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{path}: malformed graph document ({exc})") from None
    if kind == "trace":
        return extract_graph(parse_trace(text))
    return extract_graph(run(_override(parse_pattern(text), args)))


def _select_component(g: LabeledGraph, cid) -> LabeledGraph:
    """Component ``cid``; by default the first complete component with an edge."""
    comps = g.components()
    if cid is not None:
        if not 0 <= cid < len(comps):
            raise UsageError(f"component {cid} does not exist (0..{len(comps) - 1})")
        return comps[cid]
    for i, c in enumerate(comps):
        if g.complete[i] and c.size > 0:
            return c
    raise DomainError("no complete component with an edge")


def _parse_vertex(token: str):
    parts = token.split(".")
    if len(parts) == 3 and parts[0] in ("H", "V"):
        try:
            return VertexTag(Axis(parts[0]), int(parts[1]), int(parts[2]))
        except ValueError:
            pass
    try:
        return int(token)
    except ValueError:
        raise UsageError(f"cannot parse vertex {token!r} (expected H.r.g, V.c.g or an integer)") from None


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _emit(text: str, args, filename: str) -> None:
    if args.out:
        out = FsPath(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text)
        print(out / filename)
    else:
        sys.stdout.write(text)


def _graph_text(g: LabeledGraph, fmt: str) -> str:
    if fmt == "json":
        return to_json(g)
    if fmt == "ascii":
        return _ascii_graph(g)
    return to_dot(g)


def _label(v) -> str:
    return v.label if hasattr(v, "label") else str(v)


def _ascii_graph(g: LabeledGraph) -> str:
    adj = g.adjacency()
    lines = []
    for v in g.vertices:
        nbrs = " ".join(_label(w) for w in sorted(adj[v]))
        lines.append(f"{_label(v)}: {nbrs}".rstrip())
    return "\n".join(lines) + "\n"


def _render_mask(config: SimulationConfig) -> str:
    return "\n".join([RENDER_HEADER, *config.mask.to_rows()]) + "\n"


# ---------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    config = _load_config(args.pattern, args)
    trace = run(config)
    stem = FsPath(args.pattern).stem
    if args.out:
        _emit(format_trace(trace), args, f"{stem}.trace")
        fmt = args.format or "dot"
        ext = {"dot": "dot", "json": "json", "ascii": "txt"}[fmt]
        _emit(_graph_text(extract_graph(trace), fmt), args, f"{stem}.{ext}")
    elif args.format:
        sys.stdout.write(_graph_text(extract_graph(trace), args.format))
    else:
        sys.stdout.write(format_trace(trace))
    return 0


def cmd_classify(args) -> int:
    g = _load_graph(args.input, args)
    comps = g.components()
    chosen = range(len(comps)) if args.component is None else [args.component]
    lines = []
    for cid in chosen:
        if not 0 <= cid < len(comps):
            raise UsageError(f"component {cid} does not exist")
        c = comps[cid]
        if c.order < 2 and args.component is None:
            continue
        try:
            cls = str(classify(c))
        except UnsupportedSize:
            cls = "unsupported-size"
        status = "complete" if g.complete[cid] else "incomplete"
        lines.append(f"component {cid} order {c.order} size {c.size} {status} class {cls}")
    sys.stdout.write("".join(line + "\n" for line in lines))
    return 0


def cmd_verify(args) -> int:
    comp = _select_component(_load_graph(args.input, args), args.component)
    reg = build_graph_state(comp)
    flags = stabilizer_report(reg, comp)
    print(f"qubits {comp.order}")
    print(f"stabilizers: {sum(flags)}/{len(flags)} pass")
    if args.dump:
        sys.stdout.write(reg.dump())
    return 0 if all(flags) else 1


def cmd_carve(args) -> int:
    g = _load_graph(args.input, args)
    if args.component is not None:
        g = _select_component(g, args.component)
    keep = [_parse_vertex(tok) for tok in args.keep.split(",") if tok.strip()]
    reduced = carve_unit_cell(g, keep)
    sys.stdout.write(_graph_text(reduced, args.format or "dot"))
    return 0


def cmd_percolate(args) -> int:
    config = _load_config(args.pattern, args)
    p_grid = _parse_floats(args.p_grid)
    if not p_grid:
        raise UsageError("--p-grid needs at least one value")
    report = percolation_sweep(
        config,
        p_grid,
        args.trials,
        prop=args.property,
        coupled=not args.uncoupled,
        workers=args.workers,
    )
    _emit(report.to_csv(), args, FsPath(args.pattern).stem + ".csv")
    return 0


def cmd_search(args, argv) -> int:
    target = parse_topology(args.topology)
    result = search_pattern(
        target,
        args.side_length,
        args.timesteps,
        scheme=args.scheme,
        budget=args.budget,
        mode=args.mode,
        seed=args.seed or 0,
        families=tuple(args.family) if args.family else None,
        min_order=args.min_order,
    )
    if result is None:
        raise DomainError(f"no pattern for {target} within budget {args.budget}")
    metadata = {"topology": str(target), "provenance": "collision-grid " + shlex.join(argv)}
    if args.name:
        metadata = {"name": args.name, **metadata}
    config = result.config(metadata=metadata)
    name = args.name or "pattern"
    _emit(serialize_pattern(config), args, f"{name}.pattern")
    return 0


def cmd_count(args) -> int:
    text = _read(args.input)
    kind = _kind(text)
    if kind == "trace":
        trace = parse_trace(text)
    elif kind == "pattern":
        trace = run(_override(parse_pattern(text), args))
    else:
        raise UsageError("count needs a trace or a pattern")
    report = count_structures(trace)
    out = report.to_text()
    out += "".join(f"violation {v}\n" for v in check_bounds(report))
    sys.stdout.write(out)
    return 0


def cmd_render(args) -> int:
    if args.format not in (None, "ascii"):
        raise UsageError("render only produces ascii output")
    config = _load_config(args.input, args)
    sys.stdout.write(_render_mask(config))
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collision-grid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def run_flags(p):
        p.add_argument("--seed", type=int, help="override the pattern's RNG seed")
        p.add_argument("--timesteps", type=int, help="override the pattern's timestep count")
        p.add_argument("--edge-prob", type=float, help="override the edge formation probability")

    p = sub.add_parser("simulate", help="run a pattern and write the trace log (and graph with --out)")
    p.add_argument("pattern")
    run_flags(p)
    p.add_argument("--out", help="directory for <name>.trace and the graph file")
    p.add_argument("--format", choices=("dot", "json", "ascii"), help="graph format")

    p = sub.add_parser("classify", help="topology of each non-trivial component")
    p.add_argument("input", help="trace, JSON graph or pattern")
    p.add_argument("--component", type=int)
    run_flags(p)

    p = sub.add_parser("verify", help="dense stabilizer check of one component")
    p.add_argument("input", help="trace, JSON graph or pattern")
    p.add_argument("--component", type=int)
    p.add_argument("--dump", action="store_true", help="print the amplitude table")
    run_flags(p)

    p = sub.add_parser("carve", help="Z-measure every vertex outside the keep list")
    p.add_argument("input", help="trace, JSON graph or pattern")
    p.add_argument("--keep", required=True, help="comma-separated vertex labels (H.r.g, V.c.g)")
    p.add_argument("--component", type=int)
    p.add_argument("--format", choices=("dot", "json", "ascii"))
    run_flags(p)

    p = sub.add_parser("percolate", help="Monte Carlo sweep over edge probabilities (CSV)")
    p.add_argument("pattern")
    p.add_argument("--p-grid", required=True, help="comma-separated ascending probabilities")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--property", choices=PROPERTIES, default="component-complete")
    p.add_argument("--uncoupled", action="store_true", help="independent coins per grid point")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="directory for <name>.csv")
    p.add_argument("--seed", type=int)
    p.add_argument("--timesteps", type=int)

    p = sub.add_parser("search", help="find a mask producing a topology, print its pattern")
    p.add_argument("topology", help="e.g. 'Cycle(4)', 'Lattice2D(2,*)', 'CubeGraph'")
    p.add_argument("--side-length", "-L", type=int, required=True)
    p.add_argument("--timesteps", type=int, required=True)
    p.add_argument("--scheme", choices=("basic", "extended"), default="basic")
    p.add_argument("--budget", type=int, default=2**16)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--seed", type=int)
    p.add_argument("--family", action="append", choices=SCHEDULE_FAMILIES, help="restrict extended schedules")
    p.add_argument("--min-order", type=int, default=2, help="smallest accepted component order")
    p.add_argument("--name")
    p.add_argument("--out", help="directory for <name>.pattern")

    p = sub.add_parser("count", help="structure counts and bound checks")
    p.add_argument("input", help="trace or pattern")
    run_flags(p)

    p = sub.add_parser("render", help="ASCII diagram of the active-site mask")
    p.add_argument("input", help="pattern or trace")
    p.add_argument("--format", choices=("dot", "json", "ascii"))
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "simulate": cmd_simulate,
        "classify": cmd_classify,
        "verify": cmd_verify,
        "carve": cmd_carve,
        "percolate": cmd_percolate,
        "search": lambda a: cmd_search(a, argv),
        "count": cmd_count,
        "render": cmd_render,
    }
    try:
        return handlers[args.command](args)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, InvalidArgument, UnsupportedSize, NoSteadyState) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
