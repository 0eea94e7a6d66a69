import itertools
import math

import numpy as np
import pytest

from hanle.errors import DomainError, SingularSystemError, UnsupportedRegimeError
from hanle.gobe import steady_state
from hanle.params import SystemParams
from hanle.reduced import (NormalizedParams, analytic_coeffs, analytic_pi_e, normalized_reduced,
                           pi_e0, reduced_numeric, reduced_pi_e)


def test_coefficient_tables_at_linear_polarization():
    pc = analytic_coeffs(0.0, 0.0)
    assert pc.n[0, 0] == 50 and pc.d[0, 0] == 85
    assert pc.n[2, 0] == 1200 and pc.d[2, 0] == 2112
    # odd total powers vanish
    for i, j in itertools.product(range(3), range(3)):
        if (i + j) % 2:
            assert pc.n[i, j] == 0 and pc.d[i, j] == 0


def test_center_and_wing_values():
    assert analytic_pi_e(NormalizedParams()) == pytest.approx(10 / 17, abs=1e-15)
    far = analytic_pi_e(NormalizedParams(Omega=1e8))
    assert far == pytest.approx(25 / 44, rel=1e-12)
    assert 25 / 44 < 10 / 17


@pytest.mark.parametrize("eps,Delta", [(0.0, 1.7), (0.3, 0.0), (-0.5, 0.0), (0.0, -4.0)])
def test_symmetric_in_field_when_linear_or_resonant(eps, Delta):
    for om in (0.3, 1.0, 4.0):
        a = analytic_pi_e(NormalizedParams(Omega=om, Delta=Delta, epsilon=eps, gamma1_tilde=0.7))
        b = analytic_pi_e(NormalizedParams(Omega=-om, Delta=Delta, epsilon=eps, gamma1_tilde=0.7))
        assert a == pytest.approx(b, rel=1e-14)


def test_asymmetric_for_elliptical_and_detuned():
    a = analytic_pi_e(NormalizedParams(Omega=1.0, Delta=1.0, epsilon=0.3))
    b = analytic_pi_e(NormalizedParams(Omega=-1.0, Delta=1.0, epsilon=0.3))
    assert abs(a - b) > 1e-3


def test_transit_rate_not_supported_by_closed_form():
    with pytest.raises(UnsupportedRegimeError):
        analytic_pi_e(NormalizedParams(Gamma_tilde=0.1))


def test_linear_absorption_reference():
    p = SystemParams(kappa=math.sqrt(0.01 * 0.25), gamma_eg=0.5)
    assert p.saturation == pytest.approx(0.01)
    assert pi_e0(p) == pytest.approx(0.01, rel=1e-14)
    assert pi_e0(SystemParams()) == 0.0


def test_analytic_matches_numeric_reduced_model():
    worst = 0.0
    for om, de, g1, eps in itertools.product(np.linspace(-5, 5, 5), np.linspace(-5, 5, 5),
                                             (0.0, 1.0, 10.0), (0.0, math.pi / 8, math.pi / 5)):
        n = NormalizedParams(Omega=om, Delta=de, gamma1_tilde=g1, epsilon=eps)
        a, r = analytic_pi_e(n), normalized_reduced(n)
        worst = max(worst, abs(a - r) / abs(r))
    assert worst <= 1e-9


def test_independent_of_gamma_eg_choice():
    # in normalized variables the reduced model does not depend on gamma_eg/gamma_r
    n = NormalizedParams(Omega=1.3, Delta=0.7, gamma1_tilde=2.0, epsilon=0.2)
    assert normalized_reduced(n, gamma_eg=3.0) == pytest.approx(normalized_reduced(n), rel=1e-11)


def test_weak_light_with_transit_is_linear_absorption():
    # unpumped isotropic ground state: pi_e/pi_e0 = Tr(V V^dagger)/3 = 5/9
    p = SystemParams(kappa=1e-6, Gamma=0.1, pol=0.3, omega_g=0.2)
    sol = reduced_numeric(p)
    np.testing.assert_allclose(sol.rho.rho_gg, np.eye(3) / 3, atol=1e-9)
    assert sol.pi_e / pi_e0(p) == pytest.approx(5 / 9, rel=1e-9)


def test_numeric_model_density_matrix_close_to_full_solution():
    p = SystemParams(kappa=0.01, delta=0.4, omega_g=0.002, Gamma=1e-3, pol=0.3,
                     b_direction=(0.6, 0.0, 0.8))
    red, full = reduced_numeric(p), steady_state(p)
    S = p.saturation
    assert np.abs(red.rho.rho_gg - full.rho.rho_gg).max() < 10 * S
    assert np.abs(red.rho.rho_eg - full.rho.rho_eg).max() < 10 * S * math.sqrt(S)
    assert red.pi_e == pytest.approx(full.pi_e, rel=10 * S)
    assert red.pi_e == pytest.approx(float(reduced_pi_e(p)), rel=1e-12)


def test_deviation_from_full_model_is_first_order_in_saturation():
    n = dict(Omega=3.0, Delta=-1.5, gamma1_tilde=1.0, epsilon=math.pi / 8)
    dev = []
    for S in (1e-3, 1e-4):
        p = NormalizedParams(S=S, **n).to_system()
        dev.append(abs(steady_state(p).pi_e / float(reduced_pi_e(p)) - 1))
    assert dev[0] / dev[1] == pytest.approx(10, rel=0.05)


def test_vectorized_scan_matches_pointwise():
    p = SystemParams(kappa=0.02, delta=0.3, pol=0.2)
    grid = np.linspace(-0.01, 0.01, 7)
    vec = reduced_pi_e(p, omega_g=grid)
    pts = [float(reduced_pi_e(p.replace(omega_g=float(g)))) for g in grid]
    np.testing.assert_allclose(vec, pts, rtol=1e-13)
    two_d = reduced_pi_e(p, omega_g=grid[None, :], delta=np.array([[0.3], [1.0]]))
    assert two_d.shape == (2, 7)
    np.testing.assert_allclose(two_d[0], vec, rtol=1e-13)


def test_normalized_round_trip():
    n = NormalizedParams(Omega=1.5, Delta=-0.5, gamma1_tilde=0.0, Gamma_tilde=0.2,
                         epsilon=0.1, S=2e-3)
    back = NormalizedParams.from_system(n.to_system())
    for k in ("Omega", "Delta", "gamma1_tilde", "Gamma_tilde", "epsilon", "S"):
        assert getattr(back, k) == pytest.approx(getattr(n, k), rel=1e-12, abs=1e-15)
    assert n.to_system().gamma_eg == pytest.approx(0.5 + n.to_system().Gamma)


def test_no_light_no_transit_is_singular():
    with pytest.raises(SingularSystemError):
        reduced_pi_e(SystemParams())


def test_parameter_validation():
    with pytest.raises(DomainError):
        NormalizedParams(S=-1)
    with pytest.raises(DomainError):
        analytic_coeffs(-1.0, 0.0)
    with pytest.raises(DomainError):
        SystemParams(gamma_1=1.0)
    with pytest.raises(DomainError):
        SystemParams(gamma_eg=0.3)
    with pytest.warns(UserWarning):
        NormalizedParams(S=0.5)
