"""
Generalized-Lorentzian description of magneto-optical resonances.

A resonance is written as::

    A w^2/((x - x0)^2 + w^2) + B w (x - x0)/((x - x0)^2 + w^2) + C

Positive ``A`` is an absorption peak at the resonance (EIA), negative ``A``
a transparency dip (EIT).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize

from .errors import DegenerateResonanceError, DomainError, NoReversalError
from .params import SystemParams
from .reduced import PolyCoeffs, analytic_coeffs
from .scan import ScanResult, omega_scan


@dataclass(frozen=True)
class LorentzianParams:
    a: float
    b: float
    c_bg: float
    omega0: float
    w: float

    def __post_init__(self):
        if not self.w > 0:
            raise DomainError(f"width must be positive, got {self.w}")

    def rescaled(self, amplitude: float = 1.0, frequency: float = 1.0) -> "LorentzianParams":
        """Change units: amplitudes times ``amplitude``, positions/width times ``frequency``."""
        return replace(self, a=self.a * amplitude, b=self.b * amplitude,
                       c_bg=self.c_bg * amplitude, omega0=self.omega0 * frequency,
                       w=self.w * abs(frequency))

    @property
    def kind(self) -> str:
        return "EIA" if self.a > 0 else "EIT"


def lorentzian_from_coeffs(pc: PolyCoeffs, Delta: float) -> LorentzianParams:
    """
    Exact generalized-Lorentzian parameters of N(Omega)/D(Omega).

    Amplitudes are relative to pi_e0 and frequencies are in the normalized
    Omega unit. Raises :class:`DegenerateResonanceError` unless D2 != 0 and
    4 D0 D2 - D1^2 > 0.
    """
    n0, n1, n2 = pc.numerator(Delta)
    d0, d1, d2 = pc.denominator(Delta)
    disc = 4 * d0 * d2 - d1 * d1
    if d2 == 0 or not disc > 0:
        raise DegenerateResonanceError(f"resonance degenerate (D2={d2}, 4D0D2-D1^2={disc})")
    root = math.sqrt(disc)
    a = 2 * (2 * n0 * d2 ** 2 + n2 * d1 ** 2 - n1 * d1 * d2 - 2 * n2 * d0 * d2) / (d2 * disc)
    b = 2 * (n1 * d2 - n2 * d1) / (d2 * root)
    return LorentzianParams(a=float(a), b=float(b), c_bg=float(n2 / d2),
                            omega0=float(-d1 / (2 * d2)), w=float(root / (2 * abs(d2))))


def eval_lorentzian(lp: LorentzianParams, omega_g):
    x = np.asarray(omega_g, dtype=float) - lp.omega0
    den = x * x + lp.w * lp.w
    return lp.a * lp.w ** 2 / den + lp.b * lp.w * x / den + lp.c_bg


def _model(p, x):
    a, b, c, x0, w = p
    d = x - x0
    den = d * d + w * w
    return a * w * w / den + b * w * d / den + c


def _jac(p, x):
    a, b, c, x0, w = p
    d = x - x0
    den = d * d + w * w
    den2 = den * den
    return np.column_stack([
        w * w / den,
        w * d / den,
        np.ones_like(x),
        2 * a * w * w * d / den2 + b * w * (d * d - w * w) / den2,
        2 * a * w * d * d / den2 + b * d * (d * d - w * w) / den2,
    ])


@dataclass(frozen=True)
class FitResult:
    params: LorentzianParams
    goodness: float
    converged: bool
    message: str = ""


def initial_guess(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Discrete estimates (A, B, C, x0, w): wings mean, extremum, half-width scan."""
    n = len(x)
    k = max(1, n // 10)
    c = 0.5 * (y[:k].mean() + y[-k:].mean())
    dev = y - c
    i0 = int(np.argmax(np.abs(dev)))
    a = dev[i0]
    half = np.abs(dev) >= abs(a) / 2
    lo = i0
    while lo > 0 and half[lo - 1]:
        lo -= 1
    hi = i0
    while hi < n - 1 and half[hi + 1]:
        hi += 1
    step = (x[-1] - x[0]) / (n - 1)
    w = 0.5 * (x[hi] - x[lo] + step)
    return np.array([a, 0.0, c, x[i0], w])


def fit_lorentzian(samples, signal=None, max_nfev: int = 2000) -> FitResult:
    """
    Least-squares fit of the generalized Lorentzian to a sampled curve.

    Accepts a :class:`ScanResult` or two arrays. The fit runs in rescaled
    coordinates (abscissa centred and scaled to the span, ordinate scaled to
    its maximum) with Levenberg-Marquardt and an analytic Jacobian.
    ``goodness`` is the RMS residual divided by max |signal|. A fit that does
    not converge, or whose grid spans fewer than four widths, comes back
    with ``converged=False`` and the best parameters found.
    """
    if signal is None:
        x, y = samples.omega_g_grid, samples.signal
    else:
        x, y = np.asarray(samples, dtype=float), np.asarray(signal, dtype=float)
    if len(x) < 7:
        raise DomainError("need at least 7 samples to fit five parameters")
    xc = 0.5 * (x[0] + x[-1])
    xs = 0.5 * (x[-1] - x[0])
    ys = float(np.max(np.abs(y))) or 1.0
    u, v = (x - xc) / xs, y / ys

    p0 = initial_guess(u, v)
    res = scipy.optimize.least_squares(
        lambda p: _model(p, u) - v, p0, jac=lambda p: _jac(p, u),
        method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    a, b, c, x0, w = res.x
    if w < 0:
        w, b = -w, -b
    ok = bool(res.success) and w > 0
    msg = res.message
    if ok and x[-1] - x[0] < 4 * w * xs:
        ok, msg = False, "grid spans fewer than 4 widths"
    lp = LorentzianParams(a=a * ys, b=b * ys, c_bg=c * ys, omega0=xc + x0 * xs,
                          w=max(w, np.finfo(float).tiny) * xs)
    goodness = float(np.sqrt(np.mean((_model(res.x, u) - v) ** 2)))
    return FitResult(lp, goodness, ok, msg)


def fit_resonance(params: SystemParams, path: str = "reduced", points: int = 161,
                  span: float = 10.0, threads: int = 1):
    """
    Scan omega_g around the resonance of ``params`` and fit it.

    A first pass on a wide grid locates the resonance; the second pass
    samples ``points`` values over ``x0 +- span * w``. Returns
    ``(FitResult, ScanResult)`` of the second pass.
    """
    p = params.scaled()
    guess = 2 * p.gamma_eg * p.saturation + p.Gamma
    scale = params.gamma_r
    grid = np.linspace(-12 * guess, 12 * guess, points) * scale
    fit = fit_lorentzian(omega_scan(params, grid, path, threads))
    lp = fit.params
    grid = lp.omega0 + np.linspace(-span, span, points) * lp.w
    scan = omega_scan(params, grid, path, threads)
    return fit_lorentzian(scan), scan


def symmetric_amplitude(gamma1_tilde: float, epsilon: float, Delta: float) -> float:
    """A / pi_e0 from the closed-form coefficients."""
    return lorentzian_from_coeffs(analytic_coeffs(gamma1_tilde, epsilon), Delta).a


def sign_reversal_gamma1(epsilon: float, Delta: float, lo: float = 0.0, hi: float = 20.0,
                         samples: int = 400, xtol: float = 1e-12) -> float:
    """
    Depolarization rate gamma_1/gamma_r at which the symmetric amplitude changes sign.

    The interval [lo, hi] is scanned for sign changes of A; exactly one is
    required and is then refined by bisection.
    """
    g = np.linspace(lo, hi, samples + 1)
    a = np.array([symmetric_amplitude(x, epsilon, Delta) for x in g])
    exact = np.flatnonzero(a == 0)
    if len(exact):
        return float(g[exact[0]])
    flips = np.flatnonzero(np.sign(a[:-1]) != np.sign(a[1:]))
    if len(flips) == 0:
        raise NoReversalError(f"no reversal in range [{lo}, {hi}]")
    if len(flips) > 1:
        raise NoReversalError(f"{len(flips)} sign changes in [{lo}, {hi}]; reversal is ambiguous")
    i = flips[0]
    f = lambda x: symmetric_amplitude(x, epsilon, Delta)  # noqa: E731
    return float(scipy.optimize.bisect(f, g[i], g[i + 1], xtol=xtol, maxiter=200))
