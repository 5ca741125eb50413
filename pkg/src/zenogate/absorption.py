"""Two-photon absorption in place of projective measurement.

Master equation on the boson space (plus an optional sink level)::

    drho/dt = -i[H, rho] + gamma * sum_k (J_k rho J_k+ - 1/2 {J_k+ J_k, rho})

with ``J_k = a_k^2`` and ``gamma = 1 / (2 tau_d)``. Since
``a^2+ a^2 |2> = 2|2>``, a doubly occupied core decays at exactly
``1 / tau_d``. With the sink enabled the jump lands in a dedicated level
``|s>`` rather than in the vacuum, which is itself the logical state 00.

The coupling rate is ``total_theta / delta_t`` and the effective Zeno
number is ``N = delta_t / (4 tau_d)``.

Density matrices are vectorized row-major (``rho.reshape(-1)``), so
``vec(A rho B) = kron(A, B.T) vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dynamics import CouplerSpec, build_hamiltonian
from .fock import DensityMatrix, FockVector, Statistics, build_basis, build_ladder_ops
from .zeno import DEFAULT_THETA, zeno_limit_conditional_map


class InvalidModelError(ValueError):
    pass


@dataclass(frozen=True)
class AbsorptionModel:
    tau_d: float
    delta_t: float = 1.0
    total_theta: float = DEFAULT_THETA
    sink_enabled: bool = True

    def __post_init__(self):
        if not self.tau_d > 0:
            raise InvalidModelError(f"tau_d must be positive, got {self.tau_d!r}")
        if not self.delta_t > 0:
            raise InvalidModelError(f"delta_t must be positive, got {self.delta_t!r}")

    @classmethod
    def from_zeno_n(cls, n: float, delta_t: float = 1.0, **kw) -> "AbsorptionModel":
        return cls(tau_d=delta_t / (4.0 * n), delta_t=delta_t, **kw)

    @property
    def zeno_n(self) -> float:
        return self.delta_t / (4.0 * self.tau_d)

    @property
    def gamma(self) -> float:
        return 1.0 / (2.0 * self.tau_d)

    @property
    def dim(self) -> int:
        return build_basis(Statistics.BOSON).dim + int(self.sink_enabled)


@dataclass(frozen=True)
class ChannelOutcome:
    rho_out: DensityMatrix
    p_success: float
    p_heralded: float
    p_error: float


def _operators(model: AbsorptionModel):
    """Hamiltonian rate and jump operators on the (possibly sink-extended) space."""
    ops = build_ladder_ops(Statistics.BOSON)
    d0 = ops.create_1.shape[0]
    d = model.dim
    h = np.zeros((d, d), dtype=complex)
    h[:d0, :d0] = build_hamiltonian(CouplerSpec(model.total_theta), ops) / model.delta_t
    jumps = []
    for a in (ops.annihilate_1, ops.annihilate_2):
        a2 = a @ a
        j = np.zeros((d, d), dtype=complex)
        if model.sink_enabled:
            # a^2 only ever lands on the vacuum (column of |0,0>); reroute it to the sink
            j[-1, :d0] = a2[0, :]
        else:
            j[:d0, :d0] = a2
        jumps.append(j)
    return h, jumps


def liouvillian_matrix(model: AbsorptionModel) -> np.ndarray:
    h, jumps = _operators(model)
    d = h.shape[0]
    eye = np.eye(d)
    lv = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for j in jumps:
        jdj = j.conj().T @ j
        lv += model.gamma * (
            np.kron(j, j.conj()) - 0.5 * np.kron(jdj, eye) - 0.5 * np.kron(eye, jdj.T)
        )
    return lv


def lindblad_rhs(model: AbsorptionModel):
    h, jumps = _operators(model)
    g = model.gamma
    jdjs = [j.conj().T @ j for j in jumps]

    def rhs(rho: np.ndarray) -> np.ndarray:
        out = -1j * (h @ rho - rho @ h)
        for j, jdj in zip(jumps, jdjs):
            out += g * (j @ rho @ j.conj().T - 0.5 * (jdj @ rho + rho @ jdj))
        return out

    return rhs


def evolve_exact(model: AbsorptionModel, rho0: np.ndarray, t: float | None = None) -> np.ndarray:
    t = model.delta_t if t is None else t
    d = rho0.shape[0]
    prop = scipy.linalg.expm(liouvillian_matrix(model) * t)
    return (prop @ rho0.reshape(-1)).reshape(d, d)


def evolve_rk4(
    model: AbsorptionModel, rho0: np.ndarray, t: float | None = None, steps: int | None = None
) -> np.ndarray:
    """Fixed-step RK4, by default with ``h <= min(tau_d, delta_t) / 200``."""
    t = model.delta_t if t is None else t
    if steps is None:
        steps = max(1, int(np.ceil(200 * t / min(model.tau_d, model.delta_t))))
    f = lindblad_rhs(model)
    dt = t / steps
    rho = np.array(rho0, dtype=complex)
    for _ in range(steps):
        k1 = f(rho)
        k2 = f(rho + 0.5 * dt * k1)
        k3 = f(rho + 0.5 * dt * k2)
        k4 = f(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def _target_state(model: AbsorptionModel, rho_in: np.ndarray) -> np.ndarray:
    # pure inputs only: the target is the strong-Zeno image of the input state
    w, v = np.linalg.eigh(rho_in)
    if abs(w[-1] - 1.0) > 1e-8:
        raise ValueError("a target state is needed for mixed inputs")
    psi = v[:, -1]
    out = zeno_limit_conditional_map(model.total_theta) @ psi
    norm = np.linalg.norm(out)
    if norm < 1e-12:
        raise ValueError("input has no logical image; pass an explicit target")
    return out / norm


def run_absorption(
    model: AbsorptionModel,
    state: FockVector | DensityMatrix,
    target: FockVector | None = None,
    backend: str = "expm",
) -> ChannelOutcome:
    """Evolve through the absorbing coupler and score against the target output.

    ``p_error = 1 - <target|rho_out|target>``. Without an explicit target the
    ideal strong-Zeno output of the (pure) input is used, which for ``|1,1>``
    is ``|1,1>`` itself.
    """
    if state.statistics is not Statistics.BOSON:
        raise InvalidModelError("two-photon absorption is defined for bosons only")
    rho_in = state.to_density() if isinstance(state, FockVector) else state
    if rho_in.sink_included:
        rho_in = DensityMatrix(rho_in.statistics, rho_in.matrix[:-1, :-1])
    base = rho_in.matrix
    tgt = _target_state(model, base) if target is None else target.amplitudes
    rho0 = rho_in.with_sink().matrix if model.sink_enabled else base

    if backend == "expm":
        rho = evolve_exact(model, rho0)
    elif backend == "rk4":
        rho = evolve_rk4(model, rho0)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    rho = 0.5 * (rho + rho.conj().T)

    out = DensityMatrix(Statistics.BOSON, rho, sink_included=model.sink_enabled)
    d0 = tgt.shape[0]
    p_success = float(np.vdot(tgt, rho[:d0, :d0] @ tgt).real)
    return ChannelOutcome(out, p_success, out.sink_population, 1.0 - p_success)


def absorption_error_curve(
    tau_d_values,
    delta_t: float = 1.0,
    total_theta: float = DEFAULT_THETA,
    state: FockVector | None = None,
    backend: str = "expm",
) -> list[tuple[float, float, float]]:
    """``(N, P_E, p_heralded)`` rows, one per ``tau_d``."""
    tau_d_values = list(tau_d_values)
    if not tau_d_values:
        raise InvalidModelError("tau_d list is empty")
    if state is None:
        state = FockVector.basis_state(Statistics.BOSON, 1, 1)
    rows = []
    for tau in tau_d_values:
        model = AbsorptionModel(float(tau), delta_t, total_theta)
        res = run_absorption(model, state, backend=backend)
        rows.append((model.zeno_n, res.p_error, res.p_heralded))
    return rows
