"""Coupler evolution interrupted by N equally spaced double-occupancy checks.

Each of the N steps evolves by ``total_theta / N``, then projects out
``|2,0>`` and ``|0,2>``. A detection is a heralded failure; the surviving
branch is renormalized. The error probability is the chance that any
check fires, ``1 - prod(survivals)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import CouplerSpec, segment_unitary
from .fock import FockVector, Statistics, build_basis, double_occupancy_projector

DEFAULT_THETA = np.pi / 4


class InvalidProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class ZenoProtocol:
    n_measurements: int
    total_theta: float = DEFAULT_THETA
    statistics: Statistics = Statistics.BOSON

    def __post_init__(self):
        if int(self.n_measurements) != self.n_measurements or self.n_measurements < 1:
            raise InvalidProtocolError(
                f"n_measurements must be a positive integer, got {self.n_measurements!r}"
            )
        if self.statistics is not Statistics.BOSON:
            raise InvalidProtocolError("the measurement protocol is defined for bosons only")

    @property
    def segment_theta(self) -> float:
        return self.total_theta / self.n_measurements

    def step_map(self) -> np.ndarray:
        """Projector times one segment propagator."""
        u = segment_unitary(CouplerSpec(self.segment_theta, self.statistics))
        return double_occupancy_projector(self.statistics) @ u


@dataclass(frozen=True)
class ZenoOutcome:
    success_probability: float
    error_probability: float
    conditional_state: FockVector | None
    branch_record: tuple[float, ...]


def _step_powers(step: np.ndarray, count: int) -> np.ndarray:
    """Stack ``[step^1, ..., step^count]`` built by repeated doubling."""
    powers = step[None, :, :]
    while powers.shape[0] < count:
        powers = np.concatenate([powers, powers[-1] @ powers])
    return powers[:count]


def run_zeno(protocol: ZenoProtocol, state: FockVector) -> ZenoOutcome:
    """Run the measurement protocol on ``state``.

    ``conditional_state`` is None when a check fires with certainty.
    """
    if state.statistics is not protocol.statistics:
        raise InvalidProtocolError("input state statistics do not match the protocol")
    n = protocol.n_measurements
    # advance a block of steps per matrix product; renormalize between blocks
    block = max(1, int(np.sqrt(n)))
    powers = _step_powers(protocol.step_map(), block)
    psi = state.amplitudes / np.linalg.norm(state.amplitudes)
    survivals: list[float] = []
    log_success = 0.0
    done = 0
    while done < n:
        m = min(block, n - done)
        iterates = powers[:m] @ psi
        norms2 = np.einsum("ij,ij->i", iterates.conj(), iterates).real
        if norms2[-1] == 0.0:
            prev = np.concatenate([[1.0], norms2[:-1]])
            with np.errstate(invalid="ignore", divide="ignore"):
                ratios = np.where(prev > 0, norms2 / prev, 0.0)
            first_zero = int(np.argmax(norms2 == 0.0))
            survivals.extend(ratios[: first_zero + 1].tolist())
            return ZenoOutcome(0.0, 1.0, None, tuple(survivals))
        survivals.extend((norms2 / np.concatenate([[1.0], norms2[:-1]])).tolist())
        log_success += np.log(norms2[-1])
        psi = iterates[-1] / np.sqrt(norms2[-1])
        done += m
    success = float(np.exp(log_success))
    return ZenoOutcome(success, 1.0 - success, FockVector(state.statistics, psi), tuple(survivals))


def conditional_map(protocol: ZenoProtocol) -> np.ndarray:
    """Un-renormalized N-step map ``(P U_seg)^N`` on the full boson space.

    Column norms squared give each basis input's survival probability.
    """
    return np.linalg.matrix_power(protocol.step_map(), protocol.n_measurements)


def zeno_error_curve(
    n_values, total_theta: float = DEFAULT_THETA, state: FockVector | None = None
) -> list[tuple[int, float]]:
    n_values = list(n_values)
    if not n_values:
        raise InvalidProtocolError("N list is empty")
    if state is None:
        state = FockVector.basis_state(Statistics.BOSON, 1, 1)
    return [
        (int(n), run_zeno(ZenoProtocol(int(n), total_theta), state).error_probability)
        for n in n_values
    ]


def closed_form_error(n, total_theta: float = DEFAULT_THETA):
    """Error probability for ``|1,1>`` input.

    ``|1,1>`` couples only to ``(|2,0> + |0,2>)/sqrt 2`` with twice the
    single-photon strength, so every step survives with ``cos^2(2 theta / N)``.
    """
    n = np.asarray(n, dtype=float)
    return 1.0 - np.cos(2 * total_theta / n) ** (2 * n)


def zeno_limit_conditional_map(total_theta: float = DEFAULT_THETA) -> np.ndarray:
    """Analytic N -> infinity conditional map on the boson space.

    Vacuum and the one-photon sector evolve freely under the coupler,
    ``|1,1>`` is frozen with unit amplitude, and the doubles are removed.
    """
    basis = build_basis(Statistics.BOSON)
    u = segment_unitary(CouplerSpec(total_theta))
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    low = [basis.index(0, 0), basis.index(1, 0), basis.index(0, 1)]
    m[np.ix_(low, low)] = u[np.ix_(low, low)]
    i11 = basis.index(1, 1)
    m[i11, i11] = 1.0
    return m


def zeno_limit_numeric(total_theta: float = DEFAULT_THETA, n: int = 100_000) -> np.ndarray:
    return conditional_map(ZenoProtocol(n, total_theta))
