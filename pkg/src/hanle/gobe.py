"""
Steady state of the full optical Bloch equations for an Fg -> Fe transition.

The density matrix lives on the concatenated Zeeman basis (see
:class:`hanle.angular.ZeemanBasis`) and is vectorized row-major, so that
``vec(A @ X @ B) == kron(A, B.T) @ vec(X)``. The optical coherences are the
slowly varying envelopes in the frame rotating at the laser frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .angular import ZeemanBasis, coupling_operator, magnetic_projection, wigner_t
from .errors import DomainError, SingularSystemError
from .params import SystemParams

#: largest number of sublevels accepted per level
MAX_SUBLEVELS = 21


@dataclass(frozen=True)
class DensityMatrix:
    """Block view of a density matrix; ``rho_eg`` is the slowly varying coherence."""

    rho_gg: np.ndarray
    rho_ee: np.ndarray
    rho_eg: np.ndarray

    @property
    def rho_ge(self) -> np.ndarray:
        return self.rho_eg.conj().T

    def full(self) -> np.ndarray:
        return np.block([[self.rho_gg, self.rho_ge], [self.rho_eg, self.rho_ee]])

    @classmethod
    def from_full(cls, rho: np.ndarray, basis: ZeemanBasis) -> "DensityMatrix":
        return cls(rho[basis.g, basis.g].copy(), rho[basis.e, basis.e].copy(),
                   rho[basis.e, basis.g].copy())

    def hermiticity_error(self) -> float:
        return max(np.abs(self.rho_gg - self.rho_gg.conj().T).max(),
                   np.abs(self.rho_ee - self.rho_ee.conj().T).max())

    def trace(self) -> float:
        return float(np.trace(self.rho_gg).real + np.trace(self.rho_ee).real)


@dataclass(frozen=True)
class SteadyStateSolution:
    rho: DensityMatrix
    pi_e: float
    residual_norm: float
    #: anti-Hermitian part of the raw solve, removed by projection (round-off diagnostic)
    hermiticity_defect: float = 0.0


def excited_population(rho: DensityMatrix) -> float:
    """Total excited-state population Tr(rho_ee)."""
    return float(np.trace(rho.rho_ee).real)


def spontaneous_transfer(rho_ee, fg, fe, beta: float = 1.0, gamma_r: float = 1.0) -> np.ndarray:
    """
    Ground-state repopulation by spontaneous decay.

    Computes beta * gamma_r * sum_q T_q^dagger rho_ee T_q, which carries both
    the excited populations and the excited Zeeman coherences down to the
    ground level.
    """
    rho_ee = np.asarray(rho_ee)
    out = 0
    for q in (-1, 0, 1):
        t = wigner_t(fe, fg, q)
        out = out + t.T @ rho_ee @ t
    return beta * gamma_r * out


def collisional_depolarization(rho_ee, gamma_1: float, fe=None) -> np.ndarray:
    """gamma_1 * (rho_ee - Pi_e Tr(rho_ee)/(2Fe+1)); the result is traceless."""
    rho_ee = np.asarray(rho_ee)
    n = rho_ee.shape[0]
    if fe is not None and n != int(round(2 * float(getattr(fe, "f", fe)))) + 1:
        raise DomainError(f"rho_ee has {n} rows but Fe={fe}")
    out = rho_ee - np.eye(n) * (np.trace(rho_ee) / n)
    return gamma_1 * out


def _spre(a):
    return np.kron(a, np.eye(a.shape[0]))


def _spost(a):
    return np.kron(np.eye(a.shape[0]), a.T)


def _check_size(p: SystemParams, max_sublevels: int):
    for f in (p.fg, p.fe):
        if f.dim > max_sublevels:
            raise DomainError(f"level F={f} has {f.dim} sublevels, cap is {max_sublevels}")


def build_liouvillian(params: SystemParams, max_sublevels: int = MAX_SUBLEVELS):
    """
    Linear steady-state system ``L x = s`` for the vectorized density matrix.

    ``L`` is minus the generator of the time evolution and ``s`` is the
    transit-relaxation source Gamma * rho_gg^(0), so a steady state solves
    ``L @ vec(rho) = s``. Rates are taken in units of gamma_r.
    """
    _check_size(params, max_sublevels)
    p = params.scaled()
    basis = ZeemanBasis(p.fg, p.fe)
    n = basis.dim
    pg, pe = basis.projector("g"), basis.projector("e")

    v = basis.embed(coupling_operator(p.fg, p.fe, p.pol), "e", "g")
    h = (-p.delta * pe
         + p.omega_g * basis.embed(magnetic_projection(p.fg, p.b_direction), "g", "g")
         + p.omega_e_eff * basis.embed(magnetic_projection(p.fe, p.b_direction), "e", "e")
         + p.kappa * (v + v.conj().T))
    gen = -1j * (_spre(h) - _spost(h))

    # optical coherence dephasing
    gen -= p.gamma_eg * (_spre(pe) @ _spost(pg) + _spre(pg) @ _spost(pe))
    # excited-state decay and collisional depolarization
    ee = _spre(pe) @ _spost(pe)
    gen -= (p.Gamma + p.gamma_r + p.gamma_1) * ee
    vec_pe = pe.reshape(-1)
    gen += p.gamma_1 / basis.ne * np.outer(vec_pe, vec_pe)
    # transit relaxation of the ground level
    gen -= p.Gamma * _spre(pg) @ _spost(pg)
    # spontaneous transfer e -> g
    for q in (-1, 0, 1):
        t = basis.embed(wigner_t(p.fe, p.fg, q), "e", "g")
        gen += p.beta * p.gamma_r * np.kron(t.conj().T, t.T)

    source = np.zeros(n * n, dtype=complex)
    source += p.Gamma * (pg / basis.ng).reshape(-1)
    return -gen, source


def steady_state(params: SystemParams, max_sublevels: int = MAX_SUBLEVELS,
                 tol: float = 1e-10) -> SteadyStateSolution:
    """
    Solve the full optical Bloch equations for the stationary density matrix.

    With ``Gamma > 0`` the inhomogeneous system is solved directly. With
    ``Gamma == 0`` on a closed transition the equation for the population of
    ``|g, m=-Fg>`` is replaced by Tr(rho) = 1. An open transition without
    transit refill has no steady state and raises
    :class:`SingularSystemError`.
    """
    p = params.scaled()
    if p.Gamma == 0 and p.beta < 1:
        raise SingularSystemError("no steady state: open transition drains population")
    lmat, src = build_liouvillian(p, max_sublevels)
    basis = ZeemanBasis(p.fg, p.fe)
    n = basis.dim
    if p.Gamma == 0:
        lmat = lmat.copy()
        src = src.copy()
        lmat[0, :] = np.eye(n).reshape(-1)
        src[0] = 1.0
    if np.linalg.cond(lmat) > 1e13:
        raise SingularSystemError("steady-state system is singular (no unique steady state)")
    try:
        lu = scipy.linalg.lu_factor(lmat, check_finite=True)
        x = scipy.linalg.lu_solve(lu, src)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularSystemError(f"steady-state system is singular: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("steady-state system is singular")
    # one step of iterative refinement
    x = x + scipy.linalg.lu_solve(lu, src - lmat @ x)
    # L commutes with rho -> rho^dagger and the solution is unique, so the
    # anti-Hermitian part of x is pure round-off
    full = x.reshape(n, n)
    defect = float(np.abs(full - full.conj().T).max())
    full = 0.5 * (full + full.conj().T)
    x = full.reshape(-1)
    resid = np.linalg.norm(lmat @ x - src) / max(1.0, np.linalg.norm(src))
    if resid > tol:
        raise SingularSystemError(f"steady-state residual {resid:.3g} exceeds {tol:.3g}")
    rho = DensityMatrix.from_full(full, basis)
    return SteadyStateSolution(rho=rho, pi_e=excited_population(rho), residual_norm=float(resid),
                               hermiticity_defect=defect)
