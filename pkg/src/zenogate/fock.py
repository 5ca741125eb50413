"""Two-mode occupation-number basis, states and ladder operators.

Basis ordering (fixed, by total number then photons in mode 1 descending)::

    boson   : |0,0> |1,0> |0,1> |2,0> |1,1> |0,2>
    fermion : |0,0> |1,0> |0,1> |1,1>

The boson space is truncated at two photons in total. The coupler Hamiltonian
conserves photon number, so the two-photon sector is closed and the truncation
is exact for every protocol in this package.

Fermion signs follow a Jordan-Wigner ordering of the modes. With the default
``order=(1, 2)`` the doubly occupied state is defined as
``|1,1> := a1+ a2+ |0,0>``; ``order=(2, 1)`` uses ``a2+ a1+ |0,0>`` instead,
which flips the sign of that basis vector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

Occupation = tuple[int, int]


class Statistics(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"


class OutOfRangeError(ValueError):
    """Occupation pair outside the truncated basis."""


class UnsupportedStatisticsError(ValueError):
    pass


_BOSON_STATES: tuple[Occupation, ...] = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
_FERMION_STATES: tuple[Occupation, ...] = ((0, 0), (1, 0), (0, 1), (1, 1))


@dataclass(frozen=True)
class Basis:
    statistics: Statistics
    states: tuple[Occupation, ...]

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self, n1: int, n2: int) -> int:
        try:
            return self.states.index((n1, n2))
        except ValueError:
            raise OutOfRangeError(
                f"occupation ({n1}, {n2}) is outside the {self.statistics.value} basis"
            ) from None

    def total_number(self) -> np.ndarray:
        return np.array([n1 + n2 for n1, n2 in self.states])


def build_basis(statistics: Statistics) -> Basis:
    if statistics is Statistics.BOSON:
        return Basis(statistics, _BOSON_STATES)
    return Basis(statistics, _FERMION_STATES)


def _freeze(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class LadderOps:
    statistics: Statistics
    create_1: np.ndarray
    create_2: np.ndarray
    annihilate_1: np.ndarray
    annihilate_2: np.ndarray
    order: tuple[int, int] = (1, 2)

    def create(self, mode: int) -> np.ndarray:
        return self.create_1 if mode == 1 else self.create_2

    def annihilate(self, mode: int) -> np.ndarray:
        return self.annihilate_1 if mode == 1 else self.annihilate_2

    def number(self) -> np.ndarray:
        return self.create_1 @ self.annihilate_1 + self.create_2 @ self.annihilate_2


def _boson_create(basis: Basis, mode: int) -> np.ndarray:
    a = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j, (n1, n2) in enumerate(basis.states):
        occ = [n1, n2]
        n = occ[mode - 1]
        occ[mode - 1] += 1
        if sum(occ) > 2:
            continue
        a[basis.index(*occ), j] = np.sqrt(n + 1)
    return a


def _fermion_create(basis: Basis, mode: int, order: tuple[int, int]) -> np.ndarray:
    a = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j, (n1, n2) in enumerate(basis.states):
        occ = {1: n1, 2: n2}
        if occ[mode]:
            continue
        # sign from the modes that precede `mode` in the Jordan-Wigner order
        preceding = order[: order.index(mode)]
        sign = (-1) ** sum(occ[k] for k in preceding)
        occ[mode] = 1
        a[basis.index(occ[1], occ[2]), j] = sign
    return a


@lru_cache(maxsize=None)
def build_ladder_ops(statistics: Statistics, order: tuple[int, int] = (1, 2)) -> LadderOps:
    """Creation and annihilation matrices for both modes.

    Parameters
    ----------
    statistics : Statistics
        Boson (truncated at two photons) or fermion.
    order : tuple of int
        Jordan-Wigner mode ordering; only meaningful for fermions.
    """
    if tuple(sorted(order)) != (1, 2):
        raise ValueError(f"order must be a permutation of (1, 2), got {order}")
    basis = build_basis(statistics)
    if statistics is Statistics.BOSON:
        c1, c2 = _boson_create(basis, 1), _boson_create(basis, 2)
    else:
        c1, c2 = _fermion_create(basis, 1, order), _fermion_create(basis, 2, order)
    return LadderOps(
        statistics,
        _freeze(c1),
        _freeze(c2),
        _freeze(c1.conj().T.copy()),
        _freeze(c2.conj().T.copy()),
        tuple(order),
    )


def double_occupancy_projector(statistics: Statistics) -> np.ndarray:
    """Projector onto the complement of ``|2,0>`` and ``|0,2>``."""
    if statistics is not Statistics.BOSON:
        raise UnsupportedStatisticsError("fermion states cannot be doubly occupied")
    basis = build_basis(statistics)
    p = np.eye(basis.dim, dtype=complex)
    for occ in ((2, 0), (0, 2)):
        i = basis.index(*occ)
        p[i, i] = 0.0
    return p


def double_occupancy_population(vec: np.ndarray, statistics: Statistics) -> float:
    if statistics is not Statistics.BOSON:
        return 0.0
    basis = build_basis(statistics)
    return float(sum(abs(vec[basis.index(*o)]) ** 2 for o in ((2, 0), (0, 2))))


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes over the two-mode basis.

    ``conditional`` marks a sub-normalized branch (e.g. the un-renormalized
    output of a projection); every other vector is held at unit norm.
    """

    statistics: Statistics
    amplitudes: np.ndarray
    conditional: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        dim = build_basis(self.statistics).dim
        if amps.shape != (dim,):
            raise ValueError(f"expected {dim} amplitudes, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if norm > 1 + 1e-12:
            raise ValueError(f"state norm {norm!r} exceeds 1")
        if not self.conditional and abs(norm - 1) > 1e-10:
            raise ValueError(f"state norm {norm!r} is not 1; mark it conditional")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, statistics: Statistics, n1: int, n2: int) -> "FockVector":
        basis = build_basis(statistics)
        amps = np.zeros(basis.dim, dtype=complex)
        amps[basis.index(n1, n2)] = 1.0
        return cls(statistics, amps)

    @classmethod
    def from_amplitudes(cls, statistics: Statistics, amps) -> "FockVector":
        amps = np.asarray(amps, dtype=complex)
        return cls(statistics, amps / np.linalg.norm(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, n1: int, n2: int) -> complex:
        return complex(self.amplitudes[build_basis(self.statistics).index(n1, n2)])

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.statistics, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    statistics: Statistics
    matrix: np.ndarray
    sink_included: bool = False
    atol: float = field(default=1e-10, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dim = build_basis(self.statistics).dim + int(self.sink_included)
        if m.shape != (dim, dim):
            raise ValueError(f"expected a {dim}x{dim} density matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1) > self.atol:
            raise ValueError(f"density matrix trace {np.trace(m).real!r} is not 1")
        if np.min(np.linalg.eigvalsh(m)) < -self.atol:
            raise ValueError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def population(self, n1: int, n2: int) -> float:
        i = build_basis(self.statistics).index(n1, n2)
        return float(self.matrix[i, i].real)

    @property
    def sink_population(self) -> float:
        if not self.sink_included:
            return 0.0
        return float(self.matrix[-1, -1].real)

    def with_sink(self) -> "DensityMatrix":
        if self.sink_included:
            return self
        m = np.zeros((self.dim + 1, self.dim + 1), dtype=complex)
        m[:-1, :-1] = self.matrix
        return DensityMatrix(self.statistics, m, sink_included=True)
