import math

import numpy as np
import pytest
from sympy.physics.quantum.cg import CG

from hanle.angular import ZeemanBasis, coupling_operator, magnetic_projection, wigner_t
from hanle.errors import DomainError, SingularSystemError
from hanle.gobe import (DensityMatrix, build_liouvillian, collisional_depolarization,
                        excited_population, spontaneous_transfer, steady_state)
from hanle.params import SystemParams, random_params
from hanle.reduced import NormalizedParams, analytic_coeffs, pi_e0


def _rhs(p: SystemParams, rho):
    """Time derivative of the full density matrix written out in operator form."""
    p = p.scaled()
    b = ZeemanBasis(p.fg, p.fe)
    g, e = b.g, b.e
    pe = b.projector("e")
    v = b.embed(coupling_operator(p.fg, p.fe, p.pol), "e", "g")
    h = (-p.delta * pe + p.omega_g * b.embed(magnetic_projection(p.fg, p.b_direction), "g", "g")
         + p.omega_e_eff * b.embed(magnetic_projection(p.fe, p.b_direction), "e", "e")
         + p.kappa * (v + v.conj().T))
    out = -1j * (h @ rho - rho @ h)
    out[e, g] -= p.gamma_eg * rho[e, g]
    out[g, e] -= p.gamma_eg * rho[g, e]
    ree = rho[e, e]
    out[e, e] -= (p.gamma_r + p.Gamma) * ree + collisional_depolarization(ree, p.gamma_1)
    out[g, g] += spontaneous_transfer(ree, p.fg, p.fe, p.beta, p.gamma_r)
    out[g, g] -= p.Gamma * (rho[g, g] - np.eye(b.ng) / b.ng)
    return out


def _random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def test_stretched_excited_state_feeds_one_ground_state():
    rho = np.zeros((5, 5))
    rho[4, 4] = 1.0
    out = spontaneous_transfer(rho, 1, 2, gamma_r=2.0)
    expect = np.zeros((3, 3))
    expect[2, 2] = 2.0
    np.testing.assert_allclose(out, expect, atol=1e-15)


def test_isotropic_excited_state_decays_isotropically():
    out = spontaneous_transfer(np.eye(5), 1, 2, beta=0.7)
    np.testing.assert_allclose(out, 0.7 * 5 / 3 * np.eye(3), atol=1e-14)
    assert np.trace(out) == pytest.approx(0.7 * 5)


def test_excited_coherence_transfers_to_ground_coherence():
    rho = np.zeros((5, 5))
    rho[3, 1] = 1.0  # |2,1><2,-1|
    out = spontaneous_transfer(rho, 1, 2)
    coeff = float((CG(1, 1, 1, 0, 2, 1) * CG(1, -1, 1, 0, 2, -1)).doit())
    assert out[2, 0] == pytest.approx(coeff, abs=1e-14)
    mask = np.ones((3, 3), bool)
    mask[2, 0] = False
    assert np.abs(out[mask]).max() < 1e-15


def test_collisional_operator_examples():
    np.testing.assert_allclose(collisional_depolarization(np.eye(5) / 5, 3.0), 0, atol=1e-16)
    coh = np.zeros((5, 5), complex)
    coh[0, 3] = 1 + 2j
    np.testing.assert_allclose(collisional_depolarization(coh, 3.0), 3.0 * coh)
    rng = np.random.default_rng(1)
    m = _random_hermitian(rng, 5)
    assert abs(np.trace(collisional_depolarization(m, 2.5))) < 1e-13
    with pytest.raises(DomainError):
        collisional_depolarization(m, 1.0, fe=1)


def test_no_light_gives_isotropic_ground_state():
    p = SystemParams(kappa=0.0, Gamma=0.1, omega_g=0.3)
    sol = steady_state(p)
    np.testing.assert_allclose(sol.rho.rho_gg, np.eye(3) / 3, atol=1e-14)
    assert np.abs(sol.rho.rho_ee).max() < 1e-15
    assert np.abs(sol.rho.rho_eg).max() < 1e-15
    assert sol.pi_e == pytest.approx(0.0, abs=1e-15)


def test_closed_system_has_one_dimensional_null_space():
    p = SystemParams(kappa=0.3, delta=0.4, omega_g=0.1, pol=math.pi / 8)
    lmat, src = build_liouvillian(p)
    sv = np.linalg.svd(lmat, compute_uv=False)
    assert sv[-1] < 1e-12 * sv[0]
    assert sv[-2] > 1e-6 * sv[0]
    assert np.all(src == 0)


def test_liouvillian_preserves_hermiticity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = random_params(rng)
        lmat, _ = build_liouvillian(p)
        n = p.fg.dim + p.fe.dim
        rho = _random_hermitian(rng, n)
        out = (lmat @ rho.reshape(-1)).reshape(n, n)
        np.testing.assert_allclose(out, out.conj().T, atol=1e-12)


def test_liouvillian_matches_operator_form():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = random_params(rng)
        lmat, src = build_liouvillian(p)
        n = p.fg.dim + p.fe.dim
        rho = _random_hermitian(rng, n)
        lhs = (src - lmat @ rho.reshape(-1)).reshape(n, n)
        np.testing.assert_allclose(lhs, _rhs(p, rho), atol=1e-11)


def test_steady_state_is_stationary_under_independent_rhs():
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = random_params(rng)
        sol = steady_state(p)
        assert np.abs(_rhs(p, sol.rho.full())).max() < 1e-10


def test_low_saturation_matches_closed_form_center():
    n = NormalizedParams(Omega=0.0, Delta=0.0, epsilon=math.pi / 8, S=1e-4)
    p = n.to_system()
    pc = analytic_coeffs(0.0, math.pi / 8)
    ref = pc.n[0, 0] / pc.d[0, 0]
    assert steady_state(p).pi_e / pi_e0(p) == pytest.approx(ref, rel=1e-3)


def test_sigma_plus_pumps_to_stretched_states():
    p = SystemParams(kappa=0.05, Gamma=1e-6, pol=math.pi / 4)
    rho = steady_state(p).rho
    pops = np.diag(rho.rho_gg).real
    assert np.argmax(pops) == 2 and pops[2] > 0.99 * pops.sum()
    assert np.argmax(np.diag(rho.rho_ee).real) == 4


def test_no_light_means_no_excitation():
    assert steady_state(SystemParams(kappa=0.0, Gamma=0.05)).pi_e == 0.0


def test_open_transition_without_transit_has_no_steady_state():
    with pytest.raises(SingularSystemError, match="no steady state"):
        steady_state(SystemParams(kappa=0.1, beta=0.9))


def test_trace_and_hermiticity_on_solution():
    p = SystemParams(kappa=0.2, delta=1.0, omega_g=0.05, gamma_1=1.0, gamma_eg=1.0,
                     b_direction=(0.6, 0, 0.8), pol=0.3)
    sol = steady_state(p)
    assert sol.rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert sol.rho.hermiticity_error() <= 1e-12
    assert sol.residual_norm <= 1e-10
    assert sol.hermiticity_defect < 1e-10
    assert excited_population(sol.rho) == pytest.approx(sol.pi_e)


def test_open_transition_loses_population():
    sol = steady_state(SystemParams(kappa=0.3, Gamma=0.01, beta=0.5))
    assert sol.rho.trace() < 1.0


def test_sublevel_cap():
    with pytest.raises(DomainError):
        steady_state(SystemParams(fg=1, fe=2), max_sublevels=3)


def test_density_matrix_round_trip():
    b = ZeemanBasis(1, 2)
    rng = np.random.default_rng(0)
    full = _random_hermitian(rng, 8)
    dm = DensityMatrix.from_full(full, b)
    np.testing.assert_array_equal(dm.full(), full)
    np.testing.assert_array_equal(dm.rho_ge, full[:3, 3:])


def test_rates_scale_out():
    # results depend only on rates in units of gamma_r
    p = SystemParams(kappa=0.1, delta=0.3, omega_g=0.02, Gamma=0.01, pol=0.2)
    q = SystemParams(kappa=0.3, delta=0.9, omega_g=0.06, Gamma=0.03, gamma_r=3.0, pol=0.2)
    assert steady_state(p).pi_e == pytest.approx(steady_state(q).pi_e, rel=1e-12)


def test_half_integer_levels():
    p = SystemParams(fg=1.5, fe=2.5, kappa=0.2, Gamma=0.01, omega_g=0.1,
                     b_direction=(0, 1, 0), pol=0.1)
    sol = steady_state(p)
    assert sol.rho.rho_gg.shape == (4, 4) and sol.rho.rho_ee.shape == (6, 6)
    assert sol.rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert wigner_t(2.5, 1.5, 0).shape == (6, 4)
