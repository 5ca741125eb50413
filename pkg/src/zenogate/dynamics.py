"""Coupled-fiber Hamiltonian and its exact segment propagators.

Everything is expressed through the dimensionless coupling angle
``theta = eps * dt / hbar`` accumulated over one segment. With the
free-evolution term switched off (interaction picture, the default) the
generator is ``theta * (a1+ a2 + a2+ a1)`` and one segment applies
``exp(-i * generator)``. ``theta = pi/2`` transfers a single photon completely
from one core to the other; ``theta = pi/4`` is the 50/50 coupler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockVector, LadderOps, Statistics, build_ladder_ops


class StatisticsMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class CouplerSpec:
    theta: float
    statistics: Statistics = Statistics.BOSON
    include_omega_term: bool = False
    omega_phase: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.theta) or not np.isfinite(self.omega_phase):
            raise ValueError("coupler parameters must be finite")


@dataclass(frozen=True)
class EvolutionResult:
    output: FockVector
    segment_unitary: np.ndarray


def build_hamiltonian(spec: CouplerSpec, ops: LadderOps | None = None) -> np.ndarray:
    """Segment generator ``omega_phase * N + theta * (a1+ a2 + a2+ a1)``.

    The returned matrix is already multiplied by the segment duration, so
    ``expm(-1j * H)`` is the segment propagator.
    """
    if ops is None:
        ops = build_ladder_ops(spec.statistics)
    elif ops.statistics is not spec.statistics:
        raise StatisticsMismatchError(
            f"ladder operators are {ops.statistics.value}, coupler is {spec.statistics.value}"
        )
    hop = ops.create_1 @ ops.annihilate_2
    h = spec.theta * (hop + hop.conj().T)
    if spec.include_omega_term:
        h = h + spec.omega_phase * ops.number()
    return h


def expm_hermitian(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(-i t h)`` for Hermitian ``h`` via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def segment_unitary(spec: CouplerSpec, ops: LadderOps | None = None) -> np.ndarray:
    return expm_hermitian(build_hamiltonian(spec, ops))


def evolve(state: FockVector, spec: CouplerSpec, ops: LadderOps | None = None) -> EvolutionResult:
    if state.statistics is not spec.statistics:
        raise StatisticsMismatchError("state and coupler statistics differ")
    u = segment_unitary(spec, ops)
    out = FockVector(state.statistics, u @ state.amplitudes, conditional=state.conditional)
    return EvolutionResult(out, u)
