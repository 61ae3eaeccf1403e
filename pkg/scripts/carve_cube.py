"""Carve a cube (Q3) out of the looped depth-4 structure by Z measurements.

The extended-scheme pattern ``lib/looped_cube.pattern`` streams copies of
the 4-cycle prism C4 x P_l.  Keeping two consecutive 4-rings and
Z-measuring every other vertex leaves Q3.  This is an illustration of the
carving machinery; which unit cell an error-correcting code needs is left
to the caller.

Usage::

    python3 scripts/carve_cube.py [--ring 1]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from collision_grid import (
    build_graph_state,
    carve_unit_cell,
    classify,
    find_isomorphism,
    parse_pattern,
    reference_graph,
    run,
    steady_components,
    verify_graph_state,
)

LIB = Path(__file__).resolve().parent.parent / "lib"


def two_rings(component, ring: int):
    """Vertices of rings ``ring`` and ``ring + 1`` of a C4 x P_l component."""
    cls = classify(component)
    if cls.tag != "Prism" or cls.params[0] != 4:
        raise SystemExit(f"expected a 4-cycle prism, got {cls}")
    length = cls.params[1]
    if not 0 <= ring < length - 1:
        raise SystemExit(f"ring must lie in 0..{length - 2}")
    ref = reference_graph(cls)
    iso = find_isomorphism(ref, component)
    # reference vertex i * length + j sits on ring j
    return [iso[i * length + j] for i in range(4) for j in (ring, ring + 1)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pattern", default=str(LIB / "looped_cube.pattern"))
    parser.add_argument("--ring", type=int, default=1)
    args = parser.parse_args()

    config = parse_pattern(Path(args.pattern).read_text())
    component = steady_components(run(config))[0]
    keep = two_rings(component, args.ring)
    cell = carve_unit_cell(component, keep)
    print(f"component {classify(component)} with {component.order} vertices")
    print("keep " + ",".join(v.label for v in sorted(keep)))
    print(f"carved {classify(cell)}: {cell.order} vertices, {cell.size} edges")
    print(f"graph state verified: {verify_graph_state(build_graph_state(cell), cell)}")


if __name__ == "__main__":
    main()
