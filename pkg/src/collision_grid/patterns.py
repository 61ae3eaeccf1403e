"""Pattern documents: the text form of a :class:`SimulationConfig`.

Canonical layout::

    name ring4                  (optional metadata: name, topology, provenance)
    side_length 2
    mask
    ##
    ##
    schedule basic 6            (or "schedule explicit" followed by 2L lane lines)
    timesteps 6
    edge_probability 1.0
    seed 0

Explicit lane lines read ``H <row> <directives>`` / ``V <col> <directives>``
where directive ``k`` (1-based) applies to generation ``k`` and is one of
``F``, ``B`` or ``.`` (skip).
"""

from __future__ import annotations

from .errors import InvalidArgument, ParseError
from .grid import ActiveMask, EntrySchedule, GridSpec, SimulationConfig, make_basic_schedule

METADATA_KEYS = ("name", "topology", "provenance")


def serialize_pattern(config: SimulationConfig) -> str:
    lines = []
    for key in METADATA_KEYS:
        if key in config.metadata:
            lines.append(f"{key} {config.metadata[key]}")
    L = config.side_length
    lines.append(f"side_length {L}")
    lines.append("mask")
    lines.extend(config.mask.to_rows())
    sched = config.schedule
    if sched.is_basic():
        lines.append(f"schedule basic {len(sched.horizontal[0])}")
    else:
        lines.append("schedule explicit")
        hs, vs = sched.to_strings()
        lines.extend(f"H {i} {s}" for i, s in enumerate(hs, 1))
        lines.extend(f"V {i} {s}" for i, s in enumerate(vs, 1))
    lines.append(f"timesteps {config.timesteps}")
    lines.append(f"edge_probability {float(config.edge_probability)!r}")
    lines.append(f"seed {config.seed}")
    return "\n".join(lines) + "\n"


def parse_pattern(text: str) -> SimulationConfig:
    """Parse and validate a pattern document; errors carry 1-based line numbers."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pos = 0
    metadata = {}

    def take(expected: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of document, expected {expected!r}", pos + 1)
        lineno, line = pos + 1, lines[pos]
        key, _, rest = line.partition(" ")
        if key != expected:
            raise ParseError(f"expected {expected!r}, got {line!r}", lineno)
        pos += 1
        return lineno, rest

    def as_int(value: str, lineno: int, what: str) -> int:
        try:
            return int(value)
        except ValueError:
            raise ParseError(f"{what} must be an integer, got {value!r}", lineno) from None

    while pos < len(lines) and lines[pos].partition(" ")[0] in METADATA_KEYS:
        key, _, rest = lines[pos].partition(" ")
        metadata[key] = rest
        pos += 1

    lineno, rest = take("side_length")
    L = as_int(rest, lineno, "side_length")
    if L < 1:
        raise ParseError("side_length must be >= 1", lineno)

    take("mask")
    rows = []
    for _ in range(L):
        if pos >= len(lines):
            raise ParseError("mask is truncated", pos + 1)
        row = lines[pos]
        if len(row) != L or set(row) - {"#", "."}:
            raise ParseError(f"mask row must be {L} characters of '#'/'.', got {row!r}", pos + 1)
        rows.append(row)
        pos += 1
    mask = ActiveMask.from_rows(rows)

    lineno, rest = take("schedule")
    kind = rest.split()
    if len(kind) == 2 and kind[0] == "basic":
        T_sched = as_int(kind[1], lineno, "basic schedule length")
        if T_sched < 1:
            raise ParseError("basic schedule length must be >= 1", lineno)
        schedule = make_basic_schedule(GridSpec(L), T_sched)
    elif kind == ["explicit"]:
        lanes = {"H": {}, "V": {}}
        for _ in range(2 * L):
            if pos >= len(lines):
                raise ParseError("explicit schedule is truncated", pos + 1)
            parts = lines[pos].split(" ")
            if len(parts) != 3 or parts[0] not in lanes:
                raise ParseError(f"malformed lane line {lines[pos]!r}", pos + 1)
            lane = as_int(parts[1], pos + 1, "lane index")
            if not 1 <= lane <= L or lane in lanes[parts[0]]:
                raise ParseError(f"bad or repeated lane index {lane}", pos + 1)
            if set(parts[2]) - {"F", "B", "."}:
                raise ParseError(f"unknown directive in {parts[2]!r}", pos + 1)
            lanes[parts[0]][lane] = parts[2]
            pos += 1
        if any(len(lanes[a]) != L for a in lanes):
            raise ParseError("explicit schedule must list every lane once", pos)
        schedule = EntrySchedule.from_strings(
            L,
            [lanes["H"][i] for i in range(1, L + 1)],
            [lanes["V"][i] for i in range(1, L + 1)],
        )
    else:
        raise ParseError(f"unknown schedule kind {rest!r}", lineno)

    lineno, rest = take("timesteps")
    T = as_int(rest, lineno, "timesteps")
    if T < 1:
        raise ParseError("timesteps must be >= 1", lineno)
    lineno, rest = take("edge_probability")
    try:
        p = float(rest)
    except ValueError:
        raise ParseError(f"edge_probability must be a number, got {rest!r}", lineno) from None
    if not 0.0 <= p <= 1.0:
        raise ParseError(f"edge_probability {p} outside [0, 1]", lineno)
    lineno, rest = take("seed")
    seed = as_int(rest, lineno, "seed")
    if pos != len(lines):
        raise ParseError(f"trailing content {lines[pos]!r}", pos + 1)
    try:
        return SimulationConfig(GridSpec(L), mask, schedule, T, p, seed, metadata)
    except InvalidArgument as exc:
        raise ParseError(str(exc)) from exc
