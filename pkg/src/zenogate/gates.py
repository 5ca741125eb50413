"""Logical two-qubit gates in the occupation encoding.

Logical basis ordering is ``|00>, |01>, |10>, |11>`` where qubit i is 1 when
a photon is present in fiber i, so ``|q1 q2>`` is the Fock state
``|n1=q1, n2=q2>``.

Circuit order: ``compose([A, B])`` applies A first and returns ``B @ A``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import Statistics, build_basis, build_ladder_ops

LOGICAL_OCCUPATIONS = ((0, 0), (0, 1), (1, 0), (1, 1))


class PhaseConvention(enum.Enum):
    RAW = "raw"
    PORT_PHASE_PI_OVER_4 = "port_phase_pi_over_4"


class NonLogicalMapError(ValueError):
    def __init__(self, leakage: np.ndarray, tolerance: float):
        self.leakage = leakage
        super().__init__(
            f"map leaks out of the logical subspace: max leakage {leakage.max():.3e} "
            f"> tolerance {tolerance:.1e} (per input: {np.array2string(leakage, precision=3)})"
        )


@dataclass(frozen=True)
class LogicalGate:
    matrix: np.ndarray
    phase_convention: PhaseConvention = PhaseConvention.RAW
    leakage: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"logical gates are 4x4, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def unitarity_deviation(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(4))))

    def is_unitary(self, atol: float = 1e-10) -> bool:
        return self.unitarity_deviation() < atol

    def renormalized(self) -> "LogicalGate":
        """Rescaled to Frobenius norm 2, the norm of any 4x4 unitary."""
        fro = np.linalg.norm(self.matrix)
        return LogicalGate(self.matrix * (2.0 / fro), self.phase_convention, self.leakage)

    def __matmul__(self, other: "LogicalGate") -> "LogicalGate":
        return LogicalGate(self.matrix @ other.matrix, self.phase_convention)


def logical_indices(statistics: Statistics = Statistics.BOSON) -> list[int]:
    basis = build_basis(statistics)
    return [basis.index(*occ) for occ in LOGICAL_OCCUPATIONS]


def extract_logical_gate(
    physical_map: np.ndarray,
    phase_convention: PhaseConvention = PhaseConvention.RAW,
    statistics: Statistics = Statistics.BOSON,
    leakage_tolerance: float = 1e-8,
) -> LogicalGate:
    """Restrict a Fock-space map to the logical inputs and outputs.

    Leakage of each logical input is the norm-squared it loses, either to
    non-logical states or (for conditional maps) to heralded failure.
    """
    idx = logical_indices(statistics)
    physical_map = np.asarray(physical_map)
    block = physical_map[np.ix_(idx, idx)]
    leakage = 1.0 - np.sum(np.abs(block) ** 2, axis=0)
    leakage = np.clip(leakage, 0.0, None)
    if leakage.max() > leakage_tolerance:
        raise NonLogicalMapError(leakage, leakage_tolerance)
    if phase_convention is PhaseConvention.PORT_PHASE_PI_OVER_4:
        n_out = np.array([sum(occ) for occ in LOGICAL_OCCUPATIONS])
        block = np.exp(1j * np.pi / 4 * n_out)[:, None] * block
    return LogicalGate(block, phase_convention, tuple(float(x) for x in leakage))


def sqrt_swap_prime() -> LogicalGate:
    p, m = (1 + 1j) / 2, (1 - 1j) / 2
    return LogicalGate(
        [[1, 0, 0, 0], [0, p, m, 0], [0, m, p, 0], [0, 0, 0, 1j]],
        PhaseConvention.PORT_PHASE_PI_OVER_4,
    )


def swap_prime() -> LogicalGate:
    return LogicalGate([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, -1]])


def swap() -> LogicalGate:
    return LogicalGate([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def controlled_z() -> LogicalGate:
    return LogicalGate(np.diag([1, 1, 1, -1]))


def cnot() -> LogicalGate:
    """Control on qubit 1 (fiber 1), target on qubit 2."""
    return LogicalGate([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def hadamard_on_target() -> LogicalGate:
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    return LogicalGate(np.kron(np.eye(2), h))


def port_phase(phi1: float, phi2: float) -> LogicalGate:
    return LogicalGate(
        np.diag([np.exp(1j * (phi1 * q1 + phi2 * q2)) for q1, q2 in LOGICAL_OCCUPATIONS])
    )


def crossing_gate(statistics: Statistics, order: tuple[int, int] = (1, 2)) -> LogicalGate:
    """Gate from physically exchanging the two fibers.

    Every basis state is rebuilt from the vacuum with the mode labels of its
    creation operators exchanged. For bosons this is the plain SWAP; for
    fermions the reordered product picks up the exchange sign on ``|11>``.
    """
    ops = build_ladder_ops(statistics, order)
    basis = build_basis(statistics)
    vac = np.zeros(basis.dim, dtype=complex)
    vac[basis.index(0, 0)] = 1.0

    def apply(labels: list[int]) -> np.ndarray:
        v = vac
        for mode in reversed(labels):
            v = ops.create(mode) @ v
        return v

    idx = logical_indices(statistics)
    m = np.zeros((4, 4), dtype=complex)
    for col, (n1, n2) in enumerate(LOGICAL_OCCUPATIONS):
        counts = {1: n1, 2: n2}
        # operator string in reference order, e.g. [1, 2] for a1+ a2+ |0,0>
        labels = [mode for mode in order for _ in range(counts[mode])]
        before = apply(labels)
        # crossing relabels each creation operator in place: a1+ <-> a2+
        after = apply([3 - mode for mode in labels])
        i_before = int(np.argmax(np.abs(before)))
        m[:, col] = after[idx] / before[i_before]
    return LogicalGate(m)


def compose(steps: Sequence[LogicalGate]) -> LogicalGate:
    out = np.eye(4, dtype=complex)
    for g in steps:
        out = g.matrix @ out
    return LogicalGate(out)


def process_fidelity(g1: LogicalGate | np.ndarray, g2: LogicalGate | np.ndarray) -> float:
    """``|Tr(g1+ g2)|^2 / (Tr(g1+ g1) Tr(g2+ g2))``.

    For unitaries this is ``|Tr(g1+ g2)|^2 / 16``; the normalization makes it
    meaningful for leaky, non-unitary gates as well.
    """
    a = g1.matrix if isinstance(g1, LogicalGate) else np.asarray(g1)
    b = g2.matrix if isinstance(g2, LogicalGate) else np.asarray(g2)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError("process fidelity needs two square matrices of equal size")
    num = abs(np.vdot(a, b)) ** 2
    den = np.vdot(a, a).real * np.vdot(b, b).real
    return float(num / den)


def format_gate(gate: LogicalGate | np.ndarray) -> str:
    """Plain-text matrix: one row per line, ``re,im`` pairs separated by spaces."""
    m = gate.matrix if isinstance(gate, LogicalGate) else np.asarray(gate)
    lines = [
        " ".join(f"{z.real:.11e},{z.imag:.11e}" for z in row) for row in m.astype(complex)
    ]
    return "\n".join(lines) + "\n"


def parse_gate(text: str, phase_convention: PhaseConvention = PhaseConvention.RAW) -> LogicalGate:
    rows = []
    for line in text.strip().splitlines():
        row = []
        for pair in line.split():
            re, im = pair.split(",")
            row.append(complex(float(re), float(im)))
        rows.append(row)
    return LogicalGate(np.array(rows), phase_convention)
