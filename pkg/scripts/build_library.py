"""Regenerate lib/*.pattern and lib/MANIFEST by running the mask search.

Every entry records the equivalent ``collision-grid search`` command as its
provenance line.  The manifest lists topology, side length, timesteps,
scheme, copy count and the sha256 of the DOT export of the re-simulated
graph, so ``tests/test_library.py`` can check that patterns still reproduce.

Usage::

    python3 scripts/build_library.py [--lib lib] [--only NAME ...]
"""

from __future__ import annotations

import argparse
import hashlib
import shlex
import time
from dataclasses import dataclass
from pathlib import Path

from collision_grid import (
    extract_graph,
    parse_pattern,
    parse_topology,
    run,
    search_pattern,
    serialize_pattern,
    to_dot,
)
from collision_grid.analysis import count_structures

MANIFEST_HEADER = "# name topology L T scheme family copies sha256"


@dataclass(frozen=True)
class Entry:
    name: str
    topology: str
    L: int
    T: int
    scheme: str = "basic"
    family: str | None = None
    min_order: int = 2

    def argv(self) -> list[str]:
        out = ["search", self.topology, "-L", str(self.L), "--timesteps", str(self.T)]
        if self.scheme != "basic":
            out += ["--scheme", self.scheme]
        if self.family:
            out += ["--family", self.family]
        if self.min_order != 2:
            out += ["--min-order", str(self.min_order)]
        return out + ["--name", self.name]


ENTRIES = [
    Entry("ring4", "Cycle(4)", 2, 6),
    Entry("path2", "Path", 2, 8),
    Entry("path3", "Path(3)", 3, 9),
    Entry("path4", "Path(4)", 3, 9),
    Entry("hexcell", "HexCell", 3, 9),
    Entry("k33", "Maximal(3)", 3, 9),
    Entry("ladder3", "Lattice2D(2,3)", 3, 9),
    Entry("ladder", "Lattice2D(2,*)", 4, 12),
    Entry("ring8", "Cycle(8)", 4, 12),
    Entry("cube", "CubeGraph", 4, 12),
    Entry("decorated", "Decorated", 4, 12),
    Entry("maximal4", "Maximal(4)", 4, 12),
    Entry("chain_ext3", "Path", 3, 24, "extended", "lane-alternating", 12),
    Entry("ladder_ext3", "Lattice2D(2,*)", 3, 24, "extended", "lane-alternating", 12),
    Entry("chain_ext4", "Path", 4, 28, "extended", "lane-alternating", 12),
    Entry("ladder_ext4", "Lattice2D(2,*)", 4, 28, "extended", "lane-alternating", 12),
    Entry("looped_cube", "Prism(4,*)", 4, 28, "extended", "lane-alternating", 12),
]


def dot_checksum(config) -> str:
    return hashlib.sha256(to_dot(extract_graph(run(config))).encode()).hexdigest()


def build(entry: Entry):
    target = parse_topology(entry.topology)
    families = (entry.family,) if entry.family else None
    result = search_pattern(
        target, entry.L, entry.T, entry.scheme, families=families, min_order=entry.min_order
    )
    if result is None:
        raise SystemExit(f"{entry.name}: no pattern found for {target}")
    argv = entry.argv()
    metadata = {
        "name": entry.name,
        "topology": str(target),
        "provenance": "collision-grid " + shlex.join(argv),
    }
    config = result.config(metadata=metadata)
    text = serialize_pattern(config)
    assert serialize_pattern(parse_pattern(text)) == text
    copies = count_structures(run(config)).copies_of_modal_topology
    row = [entry.name, str(target), str(entry.L), str(entry.T), config.scheme, result.family, str(copies)]
    return text, row + [dot_checksum(config)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--lib", default=str(Path(__file__).resolve().parent.parent / "lib"))
    parser.add_argument("--only", nargs="*", help="rebuild only these entries")
    args = parser.parse_args()
    lib = Path(args.lib)
    lib.mkdir(parents=True, exist_ok=True)
    manifest = lib / "MANIFEST"
    rows = {}
    if manifest.exists():
        for line in manifest.read_text().splitlines():
            if line and not line.startswith("#"):
                rows[line.split()[0]] = line.split()
    for entry in ENTRIES:
        if args.only and entry.name not in args.only:
            continue
        t0 = time.perf_counter()
        text, row = build(entry)
        (lib / f"{entry.name}.pattern").write_text(text)
        rows[entry.name] = row
        print(f"{entry.name:12s} {row[1]:18s} copies {row[6]:>2s}  {time.perf_counter() - t0:6.1f}s", flush=True)
    order = [e.name for e in ENTRIES if e.name in rows]
    manifest.write_text(MANIFEST_HEADER + "\n" + "".join(" ".join(rows[n]) + "\n" for n in order))


if __name__ == "__main__":
    main()
