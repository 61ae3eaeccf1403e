"""Grid geometry, active-site masks, entry schedules and mask transforms.

Coordinates are 1-indexed: rows run top to bottom, columns left to right.
A horizontal lane is a row, a vertical lane is a column.  A ``Forward``
vertex enters at column 1 (rows) or row 1 (columns) and moves towards
increasing index; ``Backward`` enters at the far edge.  Generation ``g``
enters the grid at timestep ``g``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument


class Directive(str, enum.Enum):
    FORWARD = "F"
    BACKWARD = "B"
    SKIP = "."


class Axis(str, enum.Enum):
    H = "H"
    V = "V"


@dataclass(frozen=True)
class GridSpec:
    side_length: int

    def __post_init__(self):
        if not isinstance(self.side_length, (int, np.integer)) or self.side_length < 1:
            raise InvalidArgument(f"side_length must be a positive integer, got {self.side_length!r}")

    @property
    def n_sites(self) -> int:
        return self.side_length**2


@dataclass(frozen=True)
class ActiveMask:
    """L x L boolean matrix of sites that apply the C-Phase interaction.

    Stored as a tuple of row tuples so instances are hashable and immutable.
    """

    cells: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        L = len(self.cells)
        if L == 0:
            raise InvalidArgument("mask must have at least one row")
        for row in self.cells:
            if len(row) != L:
                raise InvalidArgument("mask must be square")

    @classmethod
    def from_array(cls, arr) -> ActiveMask:
        arr = np.asarray(arr, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidArgument(f"mask array must be square, got shape {arr.shape}")
        return cls(tuple(tuple(bool(x) for x in row) for row in arr))

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> ActiveMask:
        """Build from glyph rows, ``#`` active and ``.`` inactive."""
        return cls(tuple(tuple(ch == "#" for ch in row) for row in rows))

    @classmethod
    def from_sites(cls, side_length: int, sites: Iterable[tuple[int, int]]) -> ActiveMask:
        arr = np.zeros((side_length, side_length), dtype=bool)
        for r, c in sites:
            if not (1 <= r <= side_length and 1 <= c <= side_length):
                raise InvalidArgument(f"site {(r, c)} outside a {side_length}x{side_length} grid")
            arr[r - 1, c - 1] = True
        return cls.from_array(arr)

    @classmethod
    def full(cls, side_length: int) -> ActiveMask:
        return cls.from_array(np.ones((side_length, side_length), dtype=bool))

    @classmethod
    def empty(cls, side_length: int) -> ActiveMask:
        return cls.from_array(np.zeros((side_length, side_length), dtype=bool))

    @classmethod
    def from_bits(cls, side_length: int, bits: int) -> ActiveMask:
        """Decode an integer; bit ``k`` (LSB first) is site ``k`` in row-major order."""
        n = side_length * side_length
        flat = [(bits >> k) & 1 == 1 for k in range(n)]
        return cls(tuple(tuple(flat[r * side_length:(r + 1) * side_length]) for r in range(side_length)))

    @property
    def side_length(self) -> int:
        return len(self.cells)

    def to_array(self) -> np.ndarray:
        return np.array(self.cells, dtype=bool)

    def to_rows(self) -> list[str]:
        return ["".join("#" if x else "." for x in row) for row in self.cells]

    def to_bits(self) -> int:
        L = self.side_length
        return sum(1 << (r * L + c) for r in range(L) for c in range(L) if self.cells[r][c])

    def is_active(self, r: int, c: int) -> bool:
        return self.cells[r - 1][c - 1]

    def active_sites(self) -> list[tuple[int, int]]:
        """Active sites as 1-indexed (row, column) pairs in row-major order."""
        return [
            (r + 1, c + 1)
            for r, row in enumerate(self.cells)
            for c, x in enumerate(row)
            if x
        ]

    def count(self) -> int:
        return sum(sum(row) for row in self.cells)


@dataclass(frozen=True)
class EntrySchedule:
    """Per-lane directives indexed by generation.

    ``horizontal[r-1][g-1]`` is the directive for row ``r`` at generation
    ``g``; generations past the end of a lane's tuple are ``SKIP``.
    """

    side_length: int
    horizontal: tuple[tuple[Directive, ...], ...]
    vertical: tuple[tuple[Directive, ...], ...]

    def __post_init__(self):
        if len(self.horizontal) != self.side_length or len(self.vertical) != self.side_length:
            raise InvalidArgument("schedule must list exactly one directive sequence per lane")
        for lanes in (self.horizontal, self.vertical):
            for seq in lanes:
                for d in seq:
                    if not isinstance(d, Directive):
                        raise InvalidArgument(f"unknown directive {d!r}")

    @classmethod
    def from_strings(cls, side_length: int, horizontal: Sequence[str], vertical: Sequence[str]) -> EntrySchedule:
        def conv(s: str) -> tuple[Directive, ...]:
            try:
                return tuple(Directive(ch) for ch in s)
            except ValueError as exc:
                raise InvalidArgument(f"unknown directive in {s!r}") from exc

        return cls(side_length, tuple(conv(s) for s in horizontal), tuple(conv(s) for s in vertical))

    def lanes(self, axis: Axis) -> tuple[tuple[Directive, ...], ...]:
        return self.horizontal if axis is Axis.H else self.vertical

    def directive(self, axis: Axis, lane: int, generation: int) -> Directive:
        if generation < 1:
            return Directive.SKIP
        seq = self.lanes(axis)[lane - 1]
        return seq[generation - 1] if generation <= len(seq) else Directive.SKIP

    def max_generation(self) -> int:
        return max((len(s) for s in self.horizontal + self.vertical), default=0)

    def is_basic(self) -> bool:
        """True iff every lane streams Forward for generations 1..T, nothing else."""
        seqs = self.horizontal + self.vertical
        T = len(seqs[0])
        return T >= 1 and all(len(s) == T and all(d is Directive.FORWARD for d in s) for s in seqs)

    def to_strings(self) -> tuple[list[str], list[str]]:
        def enc(seq):
            return "".join(d.value for d in seq)

        return [enc(s) for s in self.horizontal], [enc(s) for s in self.vertical]


@dataclass(frozen=True)
class SimulationConfig:
    grid: GridSpec
    mask: ActiveMask
    schedule: EntrySchedule
    timesteps: int
    edge_probability: float = 1.0
    seed: int = 0
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        L = self.grid.side_length
        if self.mask.side_length != L:
            raise InvalidArgument(f"mask is {self.mask.side_length}x{self.mask.side_length}, grid side is {L}")
        if self.schedule.side_length != L:
            raise InvalidArgument("schedule lane count does not match the grid")
        if self.timesteps < 1:
            raise InvalidArgument("timesteps must be >= 1")
        if not 0.0 <= self.edge_probability <= 1.0:
            raise InvalidArgument(f"edge_probability must lie in [0, 1], got {self.edge_probability}")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must be a 64-bit unsigned integer")

    @property
    def side_length(self) -> int:
        return self.grid.side_length

    @property
    def scheme(self) -> str:
        return "basic" if self.schedule.is_basic() else "extended"

    def with_(self, **changes) -> SimulationConfig:
        from dataclasses import replace

        return replace(self, **changes)


def make_basic_schedule(grid: GridSpec, T: int) -> EntrySchedule:
    """One Forward vertex per lane per generation, generations 1..T."""
    if T < 1:
        raise InvalidArgument("T must be >= 1")
    lane = (Directive.FORWARD,) * T
    L = grid.side_length
    return EntrySchedule(L, (lane,) * L, (lane,) * L)


# Directive for lane index i (1-based) and generation g, per family.
_FAMILIES = {
    "forward": lambda axis, i, g: Directive.FORWARD,
    "lane-alternating": lambda axis, i, g: Directive.FORWARD if i % 2 else Directive.BACKWARD,
    "generation-alternating": lambda axis, i, g: Directive.FORWARD if g % 2 else Directive.BACKWARD,
    "axis-alternating": lambda axis, i, g: (
        Directive.FORWARD if (g % 2 if axis is Axis.H else (g + 1) % 2) else Directive.BACKWARD
    ),
}

SCHEDULE_FAMILIES = tuple(_FAMILIES)


def make_family_schedule(grid: GridSpec, T: int, family: str) -> EntrySchedule:
    """Schedules searched for the extended scheme.

    ``lane-alternating``: odd lanes Forward, even lanes Backward.
    ``generation-alternating``: every lane alternates F/B starting with F.
    ``axis-alternating``: rows alternate F/B, columns alternate B/F.
    """
    if T < 1:
        raise InvalidArgument("T must be >= 1")
    try:
        rule = _FAMILIES[family]
    except KeyError:
        raise InvalidArgument(f"unknown schedule family {family!r}") from None
    L = grid.side_length

    def lanes(axis):
        return tuple(tuple(rule(axis, i, g) for g in range(1, T + 1)) for i in range(1, L + 1))

    return EntrySchedule(L, lanes(Axis.H), lanes(Axis.V))


def repeat_diagonal(mask: ActiveMask, k: int) -> ActiveMask:
    """Place ``k`` copies of ``mask`` along the diagonal of a larger grid."""
    if k < 1:
        raise InvalidArgument("copy count k must be >= 1")
    B = mask.side_length
    out = np.zeros((k * B, k * B), dtype=bool)
    block = mask.to_array()
    for i in range(k):
        out[i * B:(i + 1) * B, i * B:(i + 1) * B] = block
    return ActiveMask.from_array(out)


def link_skew(mask: ActiveMask, block_size: int) -> ActiveMask:
    """Activate the two sites straddling each corner between consecutive diagonal blocks."""
    L = mask.side_length
    B = block_size
    if B < 1 or L % B != 0:
        raise InvalidArgument(f"side length {L} is not a multiple of block size {B}")
    k = L // B
    if k < 2:
        raise InvalidArgument("link_skew needs at least two blocks")
    out = mask.to_array()
    for i in range(1, k):
        # 0-indexed (iB-1, iB) and (iB, iB-1) are 1-indexed (iB, iB+1), (iB+1, iB)
        out[i * B - 1, i * B] = True
        out[i * B, i * B - 1] = True
    return ActiveMask.from_array(out)
