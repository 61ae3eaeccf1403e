"""Dense state-vector check of the graph states built from extracted components.

Qubit 1 is the most significant bit of the basis index.  Component vertices
are mapped to qubits 1..n in sorted order, so ``H`` vertices precede ``V``
vertices and each axis is ordered by (lane, generation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, UnsupportedSize
from .graph import LabeledGraph

MAX_QUBITS = 20
STABILIZER_TOL = 1e-10


@dataclass(frozen=True)
class QuantumRegister:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n,):
            raise InvalidArgument(f"expected {2 ** self.n} amplitudes, got {amps.shape}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n) if self.n else self.amplitudes

    def dump(self) -> str:
        """One ``bitstring re im`` line per basis state, 17 significant digits."""
        lines = []
        for k, a in enumerate(self.amplitudes):
            bits = format(k, f"0{self.n}b") if self.n else ""
            re, im = a.real + 0.0, a.imag + 0.0  # folds -0.0 into 0.0
            lines.append(f"{bits} {re:.16e} {im:.16e}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class StabilizerGenerator:
    """Pauli string over qubits 1..n (missing qubits are identity) with a sign."""

    pauli_string: dict
    phase: int = 1


def _check_n(n):
    if not 1 <= n <= MAX_QUBITS:
        raise UnsupportedSize(f"dense simulation supports 1..{MAX_QUBITS} qubits, got {n}")


def plus_state(n: int) -> QuantumRegister:
    _check_n(n)
    return QuantumRegister(n, np.full(2**n, 2 ** (-n / 2), dtype=complex))


def _check_qubit(reg, a):
    if not 1 <= a <= reg.n:
        raise InvalidArgument(f"qubit {a} outside 1..{reg.n}")


def apply_cphase(reg: QuantumRegister, a: int, b: int) -> QuantumRegister:
    """diag(1, 1, 1, -1) on qubits ``a`` and ``b``."""
    _check_qubit(reg, a)
    _check_qubit(reg, b)
    if a == b:
        raise InvalidArgument("C-Phase needs two distinct qubits")
    psi = reg.tensor().copy()
    idx = [slice(None)] * reg.n
    idx[a - 1] = 1
    idx[b - 1] = 1
    psi[tuple(idx)] *= -1
    return QuantumRegister(reg.n, psi.reshape(-1))


def apply_pauli(reg: QuantumRegister, qubit: int, pauli: str) -> QuantumRegister:
    _check_qubit(reg, qubit)
    psi = reg.tensor()
    ax = qubit - 1
    if pauli == "I":
        out = psi.copy()
    elif pauli == "X":
        out = np.flip(psi, axis=ax).copy()
    elif pauli == "Z":
        out = psi.copy()
        idx = [slice(None)] * reg.n
        idx[ax] = 1
        out[tuple(idx)] *= -1
    elif pauli == "Y":
        # Y = i X Z
        z = apply_pauli(reg, qubit, "Z")
        return QuantumRegister(reg.n, 1j * apply_pauli(z, qubit, "X").amplitudes)
    else:
        raise InvalidArgument(f"unknown Pauli {pauli!r}")
    return QuantumRegister(reg.n, out.reshape(-1))


def apply_generator(reg: QuantumRegister, gen: StabilizerGenerator) -> QuantumRegister:
    # factors act on distinct qubits, so order does not matter
    for q, p in sorted(gen.pauli_string.items()):
        reg = apply_pauli(reg, q, p)
    return QuantumRegister(reg.n, gen.phase * reg.amplitudes)


def qubit_index(component: LabeledGraph) -> dict:
    """Vertex -> qubit number (1-based) in sorted vertex order."""
    return {v: i + 1 for i, v in enumerate(component.vertices)}


def graph_generators(component: LabeledGraph) -> list[StabilizerGenerator]:
    """K_a = X_a prod_{b in N(a)} Z_b for every vertex a."""
    q = qubit_index(component)
    adj = component.adjacency()
    out = []
    for a in component.vertices:
        ps = {q[a]: "X"}
        ps.update({q[b]: "Z" for b in adj[a]})
        out.append(StabilizerGenerator(ps, 1))
    return out


def build_graph_state(component: LabeledGraph, edge_order=None) -> QuantumRegister:
    """|+>^n followed by one C-Phase per edge (sorted order unless ``edge_order`` is given)."""
    n = component.order
    if n > MAX_QUBITS:
        raise UnsupportedSize(f"component of order {n} exceeds {MAX_QUBITS} qubits")
    q = qubit_index(component)
    reg = plus_state(n)
    edges = sorted(component.edges) if edge_order is None else list(edge_order)
    for u, v in edges:
        reg = apply_cphase(reg, q[u], q[v])
    return reg


def stabilizer_report(reg: QuantumRegister, component: LabeledGraph) -> list[bool]:
    """Per-vertex pass flags for K_a |psi> = |psi>, max-norm tolerance 1e-10."""
    if reg.n != component.order:
        raise InvalidArgument("register and component sizes differ")
    out = []
    for gen in graph_generators(component):
        diff = np.max(np.abs(apply_generator(reg, gen).amplitudes - reg.amplitudes))
        out.append(bool(diff <= STABILIZER_TOL))
    return out


def verify_graph_state(reg: QuantumRegister, component: LabeledGraph) -> bool:
    return all(stabilizer_report(reg, component))


def measure_z(component: LabeledGraph, a, outcome: int) -> tuple[LabeledGraph, frozenset]:
    """Graph rule for a Z measurement: delete ``a``; outcome 1 leaves Z byproducts on N(a)."""
    if a not in set(component.vertices):
        raise InvalidArgument(f"vertex {a!r} not in component")
    if outcome not in (0, 1):
        raise InvalidArgument("outcome must be 0 or 1")
    reduced = component.subgraph(v for v in component.vertices if v != a)
    byproduct = frozenset(component.neighbors(a)) if outcome == 1 else frozenset()
    return reduced, byproduct


def project_z(reg: QuantumRegister, qubit: int, outcome: int) -> tuple[QuantumRegister | None, float]:
    """Dense oracle: project ``qubit`` on |outcome>, drop it, renormalise.

    Returns the post-measurement register on n-1 qubits (None when n = 1 or
    the branch has zero weight) and the outcome probability.
    """
    _check_qubit(reg, qubit)
    branch = np.take(reg.tensor(), outcome, axis=qubit - 1).reshape(-1)
    prob = float(np.sum(np.abs(branch) ** 2))
    if reg.n == 1 or prob == 0.0:
        return None, prob
    return QuantumRegister(reg.n - 1, branch / np.sqrt(prob)), prob


def graph_rule_state(reduced: LabeledGraph, byproduct) -> QuantumRegister | None:
    """State predicted by the graph rule: reduced graph state with Z on each byproduct vertex."""
    if reduced.order == 0:
        return None
    reg = build_graph_state(reduced)
    q = qubit_index(reduced)
    for v in sorted(byproduct):
        reg = apply_pauli(reg, q[v], "Z")
    return reg


def carve_unit_cell(component: LabeledGraph, keep) -> LabeledGraph:
    """Z-measure (outcome 0) every vertex outside ``keep``; returns the induced graph on ``keep``."""
    keep = set(keep)
    missing = keep - set(component.vertices)
    if missing:
        raise InvalidArgument(f"keep-set vertices not in component: {sorted(missing)!r}")
    g = component
    for v in [v for v in component.vertices if v not in keep]:
        g, _ = measure_z(g, v, 0)
    return g
