"""Cross-path consistency checks shared by the ``validate`` CLI mode and the tests."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .gobe import collisional_depolarization, steady_state
from .lineshape import eval_lorentzian, lorentzian_from_coeffs, sign_reversal_gamma1
from .params import random_params
from .reduced import (NormalizedParams, analytic_coeffs, analytic_pi_e, normalized_reduced,
                      pi_e0, reduced_pi_e)

SEED = 20050101


@dataclass(frozen=True)
class Check:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)


def oracle_grid(n_omega=5, n_delta=5):
    oms = np.linspace(-5, 5, n_omega)
    des = np.linspace(-5, 5, n_delta)
    return itertools.product(oms, des, (0.0, 1.0, 10.0), (0.0, math.pi / 8, math.pi / 5))


def three_path_deviations(S: float = 1e-3, n_omega=5, n_delta=5):
    """Max relative deviations (analytic vs reduced, reduced vs full) on the oracle grid."""
    d_ar = d_rg = 0.0
    for om, de, g1, eps in oracle_grid(n_omega, n_delta):
        n = NormalizedParams(Omega=om, Delta=de, gamma1_tilde=g1, epsilon=eps, S=S)
        a = analytic_pi_e(n)
        r = normalized_reduced(n)
        p = n.to_system()
        full = steady_state(p).pi_e / pi_e0(p)
        d_ar = max(d_ar, abs(a - r) / abs(r))
        d_rg = max(d_rg, abs(full - r) / abs(r))
    return d_ar, d_rg


def structure_deviations(draws: int, seed: int = SEED):
    """Worst Hermiticity, trace, residual and collisional-trace errors over random draws."""
    rng = np.random.default_rng(seed)
    herm = trace = resid = coll = 0.0
    for _ in range(draws):
        p = random_params(rng)
        sol = steady_state(p)
        herm = max(herm, sol.rho.hermiticity_error())
        if p.beta == 1:
            trace = max(trace, abs(sol.rho.trace() - 1))
        resid = max(resid, sol.residual_norm)
        ne = p.fe.dim
        m = rng.normal(size=(ne, ne)) + 1j * rng.normal(size=(ne, ne))
        coll = max(coll, abs(np.trace(collisional_depolarization(m + m.conj().T, p.gamma_1))))
    return herm, trace, resid, coll


def lorentzian_representation_error():
    worst = 0.0
    omegas = np.linspace(-20, 20, 401)
    for g1, eps, de in itertools.product((0.0, 1.0, 10.0), (0.0, math.pi / 8, -math.pi / 5),
                                         (-5.0, 0.0, 1.0, 5.0)):
        pc = analytic_coeffs(g1, eps)
        exact = pc.ratio(omegas, de)
        lp = lorentzian_from_coeffs(pc, de)
        worst = max(worst, np.max(np.abs(exact - eval_lorentzian(lp, omegas))) / np.max(np.abs(exact)))
    return worst


def run_all(draws: int = 200, seed: int = SEED) -> list[Check]:
    checks = []
    center = analytic_pi_e(NormalizedParams())
    checks.append(Check("center_value_10_over_17", abs(center - 10 / 17), 1e-12))
    rev = max(abs(sign_reversal_gamma1(0.0, d) - 2.5) for d in (0.0, 1.0, 5.0))
    checks.append(Check("reversal_eps0_at_5_over_2", rev, 1e-8))
    d_ar, d_rg = three_path_deviations()
    checks.append(Check("analytic_vs_reduced", d_ar, 1e-9))
    checks.append(Check("reduced_vs_gobe_S1e-3", d_rg, 5e-3))
    checks.append(Check("lorentzian_representation", lorentzian_representation_error(), 1e-10))
    herm, trace, resid, coll = structure_deviations(draws, seed)
    checks.append(Check("hermiticity", herm, 1e-12))
    checks.append(Check("trace_conservation", trace, 1e-10))
    checks.append(Check("gobe_residual", resid, 1e-10))
    checks.append(Check("collisional_trace", coll, 1e-12))
    return checks


def low_saturation_scaling(S: float, seed: int = SEED, points: int = 20) -> float:
    """Largest (full - reduced)/reduced relative deviation divided by S on random points."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        n = NormalizedParams(Omega=rng.uniform(-5, 5), Delta=rng.uniform(-5, 5),
                             gamma1_tilde=rng.uniform(0, 10),
                             epsilon=rng.uniform(-math.pi / 4, math.pi / 4), S=S)
        p = n.to_system()
        full = steady_state(p).pi_e
        red = float(reduced_pi_e(p))
        worst = max(worst, abs(full - red) / red / S)
    return worst
