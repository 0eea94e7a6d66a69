"""
Low-saturation model: optical coherences adiabatically eliminated.

Two independent routes to the excited population are provided:

* :func:`reduced_numeric` solves the closed ground-state equation numerically
  for any level pair, field direction and transit rate;
* :func:`analytic_pi_e` evaluates the closed-form rational lineshape of the
  1 -> 2 transition with B along the light wavevector and no transit
  relaxation.

Normalized variables
--------------------
The closed-form coefficient tables use a frequency unit of ``2 gamma_eg``
for the optical detuning and ``2 gamma_eg S`` for the ground Zeeman
splitting and transit rate::

    Omega = omega_g / (2 gamma_eg S)      Delta = delta / (2 gamma_eg)
    Gamma_tilde = Gamma / (2 gamma_eg S)  gamma1_tilde = gamma_1 / gamma_r

With this convention both routes agree to round-off. The excited
population is reported relative to ``pi_e0 = 2 gamma_eg S / (gamma_r + Gamma)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .angular import AngularMomentum, Polarization, coupling_operator, magnetic_projection, wigner_t
from .errors import DomainError, SingularSystemError, UnsupportedRegimeError
from .gobe import DensityMatrix, SteadyStateSolution
from .params import SystemParams

#: frequency unit of the normalized variables, in units of gamma_eg (resp. gamma_eg S)
UNIT_FACTOR = 2.0

#: saturation above which the low-saturation model is flagged
SATURATION_WARNING = 0.1


@dataclass(frozen=True)
class NormalizedParams:
    """Dimensionless parameters of the 1 -> 2 lineshape (see module docstring)."""

    Omega: float = 0.0
    Delta: float = 0.0
    gamma1_tilde: float = 0.0
    Gamma_tilde: float = 0.0
    epsilon: float = 0.0
    S: float = 1e-3

    def __post_init__(self):
        if self.S < 0:
            raise DomainError("saturation S must be non-negative")
        if self.gamma1_tilde < 0 or self.Gamma_tilde < 0:
            raise DomainError("relaxation rates must be non-negative")
        Polarization(self.epsilon)
        if self.S > SATURATION_WARNING:
            warnings.warn(f"S={self.S:g} is outside the low-saturation regime", stacklevel=2)

    @classmethod
    def from_system(cls, params: SystemParams) -> "NormalizedParams":
        p = params.scaled()
        S = p.saturation
        unit = UNIT_FACTOR * p.gamma_eg * S
        if unit == 0:
            raise DomainError("normalized variables need a non-zero saturation")
        return cls(Omega=p.omega_g / unit, Delta=p.delta / (UNIT_FACTOR * p.gamma_eg),
                   gamma1_tilde=p.gamma_1, Gamma_tilde=p.Gamma / unit,
                   epsilon=p.pol.epsilon, S=S)

    def to_system(self, gamma_r: float = 1.0, gamma_eg: float | None = None,
                  **extra) -> SystemParams:
        """
        Physical parameters of the 1 -> 2 transition reproducing these values.

        ``gamma_eg`` defaults to the collisionless value gamma_r/2 + Gamma;
        ``extra`` is forwarded to :class:`SystemParams` (e.g. ``g_ratio``).
        """
        S = self.S
        if gamma_eg is None:
            # Gamma = 2 Gamma_tilde S gamma_eg with gamma_eg = gamma_r/2 + Gamma
            Gamma = self.Gamma_tilde * S * gamma_r / (1 - UNIT_FACTOR * self.Gamma_tilde * S)
            gamma_eg = gamma_r / 2 + Gamma
        else:
            Gamma = UNIT_FACTOR * self.Gamma_tilde * S * gamma_eg
        delta = UNIT_FACTOR * gamma_eg * self.Delta
        kappa = math.sqrt(S * (gamma_eg ** 2 + delta ** 2))
        return SystemParams(
            fg=1, fe=2, kappa=kappa, delta=delta, gamma_r=gamma_r,
            gamma_1=self.gamma1_tilde * gamma_r, gamma_eg=gamma_eg, Gamma=Gamma,
            omega_g=UNIT_FACTOR * gamma_eg * S * self.Omega,
            pol=Polarization(self.epsilon), **extra)


@dataclass(frozen=True)
class PolyCoeffs:
    """
    Coefficient tables of the rational lineshape.

    ``n[i, j]`` multiplies Omega**i Delta**j in the numerator and ``d[k, l]``
    multiplies Omega**k Delta**l in the denominator.
    """

    n: np.ndarray
    d: np.ndarray

    def numerator(self, Delta):
        """(N0, N1, N2) at the given detuning."""
        return tuple(np.polynomial.polynomial.polyval(Delta, self.n[i]) for i in range(3))

    def denominator(self, Delta):
        """(D0, D1, D2) at the given detuning."""
        return tuple(np.polynomial.polynomial.polyval(Delta, self.d[k]) for k in range(3))

    def ratio(self, Omega, Delta):
        """pi_e / pi_e0 for arrays of Omega and Delta."""
        n0, n1, n2 = self.numerator(Delta)
        d0, d1, d2 = self.denominator(Delta)
        return (n0 + n1 * Omega + n2 * Omega ** 2) / (d0 + d1 * Omega + d2 * Omega ** 2)


def analytic_coeffs(gamma1_tilde: float, epsilon: float) -> PolyCoeffs:
    """Closed-form coefficients of the 1 -> 2 lineshape without transit relaxation."""
    if gamma1_tilde < 0:
        raise DomainError("gamma1_tilde must be non-negative")
    g = float(gamma1_tilde)
    c = math.cos(2 * epsilon)
    s = math.sin(2 * epsilon)
    c2, c4 = c * c, c ** 4
    g2, g3 = g * g, g ** 3
    h = (1 + g) ** 2
    a = 5 + 32 * g + 36 * g2

    n = np.zeros((3, 3))
    d = np.zeros((3, 3))
    n[0, 0] = (5 + 7 * g) * (25 + 115 * g + 172 * g2 + 84 * g3
                             - c2 * (15 + 9 * g - 76 * g2 - 84 * g3) - 4 * c4 * g)
    n[0, 2] = -4 * h * (-25 * (5 + 16 * g + 12 * g2) + c2 * (175 + 320 * g - 12 * g2)
                        - 12 * c4 * (5 - 4 * g - 24 * g2))
    n[1, 1] = 160 * s * h * (15 + 48 * g + 36 * g2 - c2 * (8 - 6 * g - 36 * g2))
    n[2, 0] = 48 * h * (12 * (1 + 2 * g) * (5 + 6 * g) - 5 * c2 * (7 - 5 * g - 30 * g2))

    d[0, 0] = (5 + 7 * g) * ((5 + 7 * g) * a - 4 * c2 * (2 + 5 * g - 8 * g2 - 14 * g3))
    d[0, 2] = -4 * h * (-25 * a + 4 * c2 * (35 + 194 * g + 166 * g2) - 32 * c4 * (1 + g - 6 * g2))
    d[1, 1] = 160 * s * h * (3 * a - c2 * (4 + 2 * g - 24 * g2))
    d[2, 0] = 192 * h * (3 * a - c2 * (4 - 25 * g2))
    return PolyCoeffs(n=n, d=d)


def analytic_pi_e(np_: NormalizedParams) -> float:
    """pi_e / pi_e0 from the closed-form rational function (Gamma_tilde must be 0)."""
    if np_.Gamma_tilde != 0:
        raise UnsupportedRegimeError(
            "closed-form coefficients exist only without transit relaxation; "
            "use reduced_numeric for Gamma > 0")
    pc = analytic_coeffs(np_.gamma1_tilde, np_.epsilon)
    d0, d1, d2 = pc.denominator(np_.Delta)
    den = d0 + d1 * np_.Omega + d2 * np_.Omega ** 2
    if den == 0:
        raise DomainError("lineshape denominator vanishes")
    return float(pc.ratio(np_.Omega, np_.Delta))


def pi_e0(params: SystemParams) -> float:
    """Linear absorption of unpolarized atoms, 2 gamma_eg S / (gamma_r + Gamma)."""
    return 2 * params.gamma_eg * params.saturation / (params.gamma_r + params.Gamma)


class _GroundSystem:
    """
    Pieces of the closed ground-state equation, vectorized row-major.

    For a ground block x = vec(rho_gg) the stationary equation reads
    ``(G + omega_g Z + S (gamma_eg P + delta Q - R)) x = Gamma vec(rho_gg^(0))``
    where only ``S``, ``delta`` and ``omega_g`` vary along scans.
    """

    def __init__(self, p: SystemParams):
        self.p = p
        fg, fe = p.fg, p.fe
        ng, ne = fg.dim, fe.dim
        self.ng, self.ne = ng, ne
        eye = np.eye(ng)
        v = coupling_operator(fg, fe, p.pol)
        vdv = v.T @ v
        fb = magnetic_projection(fg, p.b_direction)

        self.G = p.Gamma * np.eye(ng * ng, dtype=complex)
        self.Z = 1j * (np.kron(fb, eye) - np.kron(eye, fb.T))
        self.P = np.kron(vdv, eye) + np.kron(eye, vdv.T)
        self.Q = 1j * (np.kron(vdv, eye) - np.kron(eye, vdv.T))

        # rho_ee = S * E @ x
        k_v = np.kron(v, v.conj())
        vec_pe = np.eye(ne).reshape(-1)
        loss = p.Gamma + p.gamma_r
        self.E = (2 * p.gamma_eg / (loss + p.gamma_1)) * (
            k_v + p.gamma_1 / (loss * ne) * np.outer(vec_pe, vec_pe) @ k_v)
        k_sp = sum(np.kron(wigner_t(fe, fg, q).T, wigner_t(fe, fg, q).T) for q in (-1, 0, 1))
        self.R = p.beta * p.gamma_r * k_sp @ self.E
        self.source = p.Gamma * (eye / ng).reshape(-1).astype(complex)
        self.trace_row = eye.reshape(-1).astype(complex)
        # pi_e = S * pe_row @ x
        self.pe_row = (2 * p.gamma_eg / loss) * vdv.T.reshape(-1)

    def matrices(self, omega_g, delta):
        p = self.p
        omega_g = np.asarray(omega_g, dtype=float)[..., None, None]
        delta = np.asarray(delta, dtype=float)[..., None, None]
        S = p.kappa ** 2 / (p.gamma_eg ** 2 + delta ** 2)
        m = self.G + omega_g * self.Z + S * (p.gamma_eg * self.P + delta * self.Q - self.R)
        return m, S[..., 0, 0]

    def solve(self, omega_g, delta):
        m, S = self.matrices(omega_g, delta)
        rhs = np.broadcast_to(self.source, m.shape[:-1]).copy()
        if self.p.Gamma == 0:
            # leading-order normalization Tr(rho_gg) = 1
            m = m.copy()
            m[..., 0, :] = self.trace_row
            rhs[..., 0] = 1.0
        try:
            x = np.linalg.solve(m, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"ground-state system is singular: {exc}") from exc
        resid = np.linalg.norm((m @ x[..., None])[..., 0] - rhs, axis=-1)
        resid /= np.maximum(1.0, np.linalg.norm(rhs, axis=-1))
        return x, S, resid


def reduced_pi_e(params: SystemParams, omega_g=None, delta=None) -> np.ndarray:
    """
    Excited population of the low-saturation model, vectorized over scans.

    ``omega_g`` and ``delta`` (same units as ``params``) broadcast against
    each other and default to the values stored in ``params``.
    """
    r = params.gamma_r
    p = params.scaled()
    om = p.omega_g if omega_g is None else np.asarray(omega_g, dtype=float) / r
    de = p.delta if delta is None else np.asarray(delta, dtype=float) / r
    om, de = np.broadcast_arrays(np.asarray(om, dtype=float), np.asarray(de, dtype=float))
    sys_ = _GroundSystem(p)
    if p.kappa == 0 and p.Gamma == 0:
        raise SingularSystemError("no light and no transit relaxation: ground state undetermined")
    x, S, resid = sys_.solve(om, de)
    if not np.all(np.isfinite(x)) or np.any(resid > 1e-8):
        raise SingularSystemError("ground-state system is singular")
    return S * (x @ sys_.pe_row).real


def reduced_numeric(params: SystemParams) -> SteadyStateSolution:
    """
    Stationary density matrix of the low-saturation model.

    The ground block is obtained from the closed ground-state equation with
    the excited block substituted; the excited block and the optical
    coherences follow from it. The excited-level Zeeman term is not part of
    this model. Without transit relaxation the ground block is normalized to
    unit trace.
    """
    p = params.scaled()
    if p.kappa == 0 and p.Gamma == 0:
        raise SingularSystemError("no light and no transit relaxation: ground state undetermined")
    if p.saturation > SATURATION_WARNING:
        warnings.warn(f"S={p.saturation:g} is outside the low-saturation regime", stacklevel=2)
    sys_ = _GroundSystem(p)
    x, S, resid = sys_.solve(p.omega_g, p.delta)
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("ground-state system is singular")
    ng, ne = sys_.ng, sys_.ne
    rho_gg = x.reshape(ng, ng)
    rho_ee = (S * (sys_.E @ x)).reshape(ne, ne)
    v = coupling_operator(p.fg, p.fe, p.pol)
    rho_eg = -1j * p.kappa * (v @ rho_gg) / (p.gamma_eg - 1j * p.delta)
    rho = DensityMatrix(rho_gg=rho_gg, rho_ee=rho_ee, rho_eg=rho_eg)
    return SteadyStateSolution(rho=rho, pi_e=float(np.trace(rho_ee).real), residual_norm=float(resid))


def normalized_reduced(np_: NormalizedParams, **to_system_kw) -> float:
    """pi_e / pi_e0 of the numeric low-saturation model at normalized parameters."""
    p = np_.to_system(**to_system_kw)
    return float(reduced_pi_e(p)) / pi_e0(p)
