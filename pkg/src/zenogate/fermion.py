"""Non-interacting fermions in the same coupler, and the boson-to-fermion crossover.

The crossover metric is this package's choice: process fidelity of the
finite-N boson Zeno gate (restricted to the logical subspace and rescaled to
unitary norm) against the exact fermion coupler gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import CouplerSpec, segment_unitary
from .fock import FockVector, Statistics, build_ladder_ops, double_occupancy_population
from .gates import (
    LogicalGate,
    PhaseConvention,
    extract_logical_gate,
    process_fidelity,
)
from .zeno import DEFAULT_THETA, ZenoProtocol, conditional_map


def fermion_coupler_gate(
    theta: float = DEFAULT_THETA,
    convention: PhaseConvention = PhaseConvention.PORT_PHASE_PI_OVER_4,
    order: tuple[int, int] = (1, 2),
) -> LogicalGate:
    ops = build_ladder_ops(Statistics.FERMION, order)
    u = segment_unitary(CouplerSpec(theta, Statistics.FERMION), ops)
    return extract_logical_gate(u, convention, Statistics.FERMION, leakage_tolerance=1e-10)


def boson_coupler_gate(
    theta: float = DEFAULT_THETA,
    convention: PhaseConvention = PhaseConvention.PORT_PHASE_PI_OVER_4,
) -> LogicalGate:
    """Bare boson coupler restricted to logical states; ``|11>`` leaks to doubles."""
    u = segment_unitary(CouplerSpec(theta))
    return extract_logical_gate(u, convention, leakage_tolerance=1.0)


def boson_zeno_gate(
    n: int,
    theta: float = DEFAULT_THETA,
    convention: PhaseConvention = PhaseConvention.PORT_PHASE_PI_OVER_4,
) -> LogicalGate:
    m = conditional_map(ZenoProtocol(n, theta))
    return extract_logical_gate(m, convention, leakage_tolerance=1.0)


@dataclass(frozen=True)
class CrossoverRow:
    n: int
    fidelity: float
    leakage_11: float


def boson_fermion_crossover_report(n_values, theta: float = DEFAULT_THETA) -> list[CrossoverRow]:
    reference = fermion_coupler_gate(theta)
    rows = []
    for n in n_values:
        g = boson_zeno_gate(int(n), theta)
        rows.append(CrossoverRow(int(n), process_fidelity(g.renormalized(), reference), g.leakage[3]))
    return rows


@dataclass(frozen=True)
class ExclusionReport:
    statistics: Statistics
    n: int
    max_double_population: float
    per_step: tuple[float, ...]


def exclusion_check(
    protocol: ZenoProtocol | None = None,
    statistics: Statistics = Statistics.BOSON,
    substeps: int = 8,
) -> ExclusionReport:
    """Largest double-occupancy population seen along the conditional evolution.

    Input is ``|1,1>``. Populations are sampled at ``substeps`` points inside
    each segment, before that segment's projection. The fermion space has no
    doubly occupied mode, so the fermion report is identically zero.
    """
    if statistics is Statistics.FERMION:
        n = 1 if protocol is None else protocol.n_measurements
        theta = DEFAULT_THETA if protocol is None else protocol.total_theta
        psi = FockVector.basis_state(Statistics.FERMION, 1, 1).amplitudes
        pops = []
        for k in range(n * substeps + 1):
            u = segment_unitary(CouplerSpec(theta * k / (n * substeps), Statistics.FERMION))
            pops.append(double_occupancy_population(u @ psi, Statistics.FERMION))
        return ExclusionReport(statistics, n, max(pops), tuple(pops[substeps::substeps]))

    if protocol is None:
        raise ValueError("a boson exclusion check needs a Zeno protocol")
    psi = FockVector.basis_state(Statistics.BOSON, 1, 1).amplitudes
    step = protocol.step_map()
    subs = [
        segment_unitary(CouplerSpec(protocol.segment_theta * k / substeps))
        for k in range(1, substeps + 1)
    ]
    peak = 0.0
    per_step = []
    for _ in range(protocol.n_measurements):
        pops = [double_occupancy_population(u @ psi, Statistics.BOSON) for u in subs]
        peak = max(peak, max(pops))
        per_step.append(pops[-1])
        psi = step @ psi
        norm = np.linalg.norm(psi)
        if norm == 0.0:
            break
        psi = psi / norm
    return ExclusionReport(statistics, protocol.n_measurements, peak, tuple(per_step))


def hom_coincidence(statistics: Statistics, theta: float = DEFAULT_THETA) -> float:
    """Probability that ``|1,1>`` exits with one particle per port."""
    psi = FockVector.basis_state(statistics, 1, 1)
    u = segment_unitary(CouplerSpec(theta, statistics))
    out = FockVector(statistics, u @ psi.amplitudes)
    return abs(out.amplitude(1, 1)) ** 2
