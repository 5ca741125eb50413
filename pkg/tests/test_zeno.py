import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from zenogate.dynamics import CouplerSpec, evolve
from zenogate.fock import FockVector, Statistics
from zenogate.zeno import (
    InvalidProtocolError,
    ZenoProtocol,
    closed_form_error,
    conditional_map,
    run_zeno,
    zeno_error_curve,
    zeno_limit_conditional_map,
    zeno_limit_numeric,
)

B = Statistics.BOSON


def brute_force_error(n, theta=np.pi / 4):
    """Independent route: scipy expm on a hand-built generator, explicit projector."""
    h = np.zeros((6, 6))
    h[1, 2] = h[2, 1] = 1.0
    for i in (3, 5):
        h[i, 4] = h[4, i] = np.sqrt(2)
    u = scipy.linalg.expm(-1j * (theta / n) * h)
    p = np.diag([1, 1, 1, 0, 1, 0]).astype(complex)
    psi = np.zeros(6, complex)
    psi[4] = 1
    for _ in range(n):
        psi = p @ u @ psi
    return 1 - np.vdot(psi, psi).real


@pytest.mark.parametrize("n", [1, 2, 3, 7, 10, 100, 1000])
def test_closed_form_confirmed_by_brute_force(n):
    assert brute_force_error(n) == pytest.approx(float(closed_form_error(n)), abs=1e-10)


def test_single_measurement_is_hom(both_photons):
    out = run_zeno(ZenoProtocol(1), both_photons)
    assert out.error_probability == pytest.approx(1.0, abs=1e-12)
    assert out.success_probability == pytest.approx(0.0, abs=1e-12)


def test_n10_value(both_photons):
    out = run_zeno(ZenoProtocol(10), both_photons)
    assert out.error_probability == pytest.approx(1 - np.cos(np.pi / 20) ** 20, abs=1e-12)


@pytest.mark.parametrize("n", [1, 5, 50])
def test_single_photon_never_fails(n):
    state = FockVector.basis_state(B, 1, 0)
    out = run_zeno(ZenoProtocol(n), state)
    assert out.error_probability == pytest.approx(0.0, abs=1e-12)
    plain = evolve(state, CouplerSpec(np.pi / 4)).output
    assert np.allclose(out.conditional_state.amplitudes, plain.amplitudes, atol=1e-14)


@given(st.integers(1, 200), st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3),
       st.complex_numbers(max_magnitude=3))
def test_low_sector_matches_plain_evolution(n, c0, c1, c2):
    amps = np.array([c0, c1, c2, 0, 0, 0])
    if np.linalg.norm(amps) < 1e-3:
        return
    state = FockVector.from_amplitudes(B, amps)
    out = run_zeno(ZenoProtocol(n), state)
    plain = evolve(state, CouplerSpec(np.pi / 4)).output
    assert np.max(np.abs(out.conditional_state.amplitudes - plain.amplitudes)) < 1e-12
    assert out.error_probability < 1e-12


@given(st.integers(2, 300))
def test_outcome_bookkeeping(n):
    out = run_zeno(ZenoProtocol(n), FockVector.basis_state(B, 1, 1))
    assert out.success_probability + out.error_probability == pytest.approx(1.0, abs=1e-12)
    assert out.success_probability == pytest.approx(np.prod(out.branch_record), abs=1e-12)
    assert np.ptp(out.branch_record) < 1e-12
    assert abs(out.conditional_state.amplitude(1, 1)) == pytest.approx(1.0, abs=1e-12)


def test_invalid_protocols():
    with pytest.raises(InvalidProtocolError):
        ZenoProtocol(0)
    with pytest.raises(InvalidProtocolError):
        ZenoProtocol(2, statistics=Statistics.FERMION)
    with pytest.raises(InvalidProtocolError):
        zeno_error_curve([])


def test_curve_monotone_and_asymptote():
    rows = zeno_error_curve([1, 2, 5, 10, 100, 1000, 10_000])
    pes = [p for _, p in rows]
    assert rows[0] == (1, pytest.approx(1.0))
    assert np.all(np.diff(pes) <= 0)
    n, p = rows[-1]
    assert n * p == pytest.approx(np.pi**2 / 4, rel=1e-3)


def test_conditional_map_leakage_is_error(both_photons):
    m = conditional_map(ZenoProtocol(10))
    col = m[:, 4]
    assert 1 - np.vdot(col, col).real == pytest.approx(run_zeno(ZenoProtocol(10), both_photons).error_probability, abs=1e-12)


def test_zeno_limit_map():
    m = zeno_limit_conditional_map()
    assert m[4, 4] == 1.0
    assert np.allclose(m[1:3, 1], [1 / np.sqrt(2), -1j / np.sqrt(2)], atol=1e-15)
    assert m[0, 0] == pytest.approx(1.0)
    assert np.all(m[:, 3] == 0) and np.all(m[:, 5] == 0)
    assert np.max(np.abs(zeno_limit_numeric(n=100_000) - m)) < 1e-4
