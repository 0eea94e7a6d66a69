"""
Maxwell velocity averaging of per-velocity signals.

The average ``<f> = (sqrt(pi) vbar)^-1 int f(kv) exp(-(v/vbar)^2) dv`` is
taken over the Doppler shift ``kv``. Two rules are available:

* Gauss-Hermite with ``quadrature_order`` nodes, adequate when ``f`` is
  smooth on the scale of the Doppler width;
* a composite sinh-mapped Gauss-Legendre rule clustered around a resonant
  Doppler shift ``center`` with feature width ``scale``: two panels on each
  side of the centre, ``quadrature_order`` nodes per panel. This is what the
  scans use. Per-velocity lineshapes are Lorentzian-like in the detuning
  with width ~gamma_eg, far narrower than the Doppler width in a warm
  vapour, and they carry light-shift (Raman) features at Doppler shifts of
  a few gamma_eg; plain Gauss-Hermite resolves neither.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
import scipy.constants

from .errors import DomainError, GridTooNarrowError, HanleError
from .params import SystemParams
from .reduced import reduced_pi_e
from .scan import ScanResult

#: Doppler shifts beyond this many k*vbar carry weight below exp(-49)
VELOCITY_CUTOFF = 7.0

#: Gauss-Legendre panels on each side of the resonant velocity
PANELS_PER_SIDE = 2

#: ground Zeeman shift, in units of gamma_r, used for the large-field background
BACKGROUND_FIELD = 1e6


@dataclass(frozen=True)
class DopplerParams:
    k_vbar: float
    quadrature_order: int = 96

    def __post_init__(self):
        if not self.k_vbar >= 0:
            raise DomainError("k_vbar must be non-negative")
        if int(self.quadrature_order) != self.quadrature_order or self.quadrature_order < 1:
            raise DomainError("quadrature_order must be a positive integer")

    @classmethod
    def from_temperature(cls, wavenumber: float, temperature: float, mass: float,
                         rate_unit: float = 1.0, quadrature_order: int = 96) -> "DopplerParams":
        """
        Build from k [1/m], T [K] and atomic mass M [kg].

        ``rate_unit`` is the angular frequency [rad/s] of one rate unit, e.g.
        gamma_r, so that ``k_vbar`` comes out in the same units as the rates.
        """
        vbar = math.sqrt(2 * scipy.constants.k * temperature / mass)
        return cls(wavenumber * vbar / rate_unit, quadrature_order)


@lru_cache(maxsize=32)
def _hermite(n: int):
    x, w = np.polynomial.hermite.hermgauss(n)
    return x, w / w.sum()


@lru_cache(maxsize=32)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def velocity_nodes(dp: DopplerParams, center: float = 0.0, scale: Optional[float] = None):
    """
    Doppler shifts ``kv`` and normalized weights of the averaging rule.

    With ``scale=None`` this is Gauss-Hermite with ``quadrature_order``
    nodes. Otherwise the nodes are ``x = x_c + h sinh(t)``, with
    ``x_c = center / k_vbar`` and ``h = scale / k_vbar``, and ``t`` is
    covered by ``2 * PANELS_PER_SIDE`` Gauss-Legendre panels of
    ``quadrature_order`` nodes each, split at ``t = 0``.
    """
    n = int(dp.quadrature_order)
    if dp.k_vbar == 0:
        return np.zeros(1), np.ones(1)
    if scale is None:
        x, w = _hermite(n)
        return dp.k_vbar * x, w
    if not scale > 0:
        raise DomainError("feature scale must be positive")
    xc, h = center / dp.k_vbar, scale / dp.k_vbar
    t0 = math.asinh((-VELOCITY_CUTOFF - xc) / h)
    t1 = math.asinh((VELOCITY_CUTOFF - xc) / h)
    k = PANELS_PER_SIDE
    if t0 < 0 < t1:
        edges = np.concatenate([np.linspace(t0, 0, k + 1)[:-1], np.linspace(0, t1, k + 1)])
    else:
        edges = np.linspace(t0, t1, 2 * k + 1)
    tl, wl = _legendre(n)
    half = 0.5 * np.diff(edges)[:, None]
    t = (half * tl + 0.5 * (edges[1:] + edges[:-1])[:, None]).ravel()
    wt = (half * wl).ravel()
    x = xc + h * np.sinh(t)
    w = wt * h * np.cosh(t) * np.exp(-x * x) / math.sqrt(math.pi)
    return dp.k_vbar * x, w / w.sum()


def doppler_average(signal_fn: Callable, dp: DopplerParams, center: float = 0.0,
                    scale: Optional[float] = None):
    """
    Maxwell average of ``signal_fn`` over the Doppler shift.

    ``signal_fn`` receives a 1-d array of Doppler shifts ``kv`` and returns
    values along axis 0 (extra trailing axes are averaged independently).
    For ``k_vbar == 0`` it is called once at ``kv = 0`` and that value is
    returned unchanged.
    """
    kv, w = velocity_nodes(dp, center, scale)
    vals = np.asarray(signal_fn(kv))
    if dp.k_vbar == 0:
        return vals[0]
    return np.tensordot(w, vals, axes=(0, 0))


def _averaged_pi_e(params: SystemParams, dp: DopplerParams, grid: np.ndarray) -> np.ndarray:
    # bounded batches keep the stacked ground-state systems small
    step = max(1, 20000 // max(1, grid.size))

    def per_velocity(kv):
        return np.concatenate([
            reduced_pi_e(params, omega_g=grid[None, :], delta=params.delta - kv[i:i + step, None])
            for i in range(0, len(kv), step)])
    return doppler_average(per_velocity, dp, center=params.delta, scale=params.gamma_eg)


def averaged_scan(params: SystemParams, dp: DopplerParams, grid, normalize: bool = False) -> ScanResult:
    """
    Velocity-averaged excited population along an omega_g grid.

    Each velocity class sees the detuning ``delta - kv`` and its own
    saturation parameter. With ``normalize=True`` the large-field background
    is subtracted and the curve is divided by its value at omega_g = 0
    (minus background). Background and centre values are kept in ``meta``.
    """
    grid = np.asarray(grid, dtype=float)
    try:
        sig = _averaged_pi_e(params, dp, grid)
        ref = _averaged_pi_e(params, dp, np.array([0.0, BACKGROUND_FIELD * params.gamma_r]))
    except HanleError as exc:
        raise type(exc)(f"{exc} (k_vbar={dp.k_vbar}, delta={params.delta})") from exc
    center, background = float(ref[0]), float(ref[1])
    meta = {**params.as_dict(), "k_vbar": dp.k_vbar, "quadrature_order": dp.quadrature_order,
            "path": "reduced", "background": background, "center": center,
            "normalized": normalize}
    if normalize:
        sig = (sig - background) / (center - background)
        meta["note"] = "background subtracted, normalized to omega_g = 0"
    return ScanResult(grid, sig, meta)


def resonance_width(scan: ScanResult, background: Optional[float] = None) -> float:
    """
    Full width at half height of the feature centred at omega_g = 0.

    The background defaults to ``scan.meta['background']`` (0 for normalized
    scans) or, failing that, the mean of the two end points. Half-height
    crossings are located by linear interpolation, walking outward from the
    grid point nearest zero.
    """
    x, y = scan.omega_g_grid, scan.signal
    if background is None:
        if scan.meta.get("normalized"):
            background = 0.0
        else:
            background = scan.meta.get("background", 0.5 * (y[0] + y[-1]))
    y = y - background
    i0 = int(np.argmin(np.abs(x)))
    h = y[i0]
    if h == 0 or not np.isfinite(h):
        raise GridTooNarrowError("no central feature above background")
    above = y / h >= 0.5

    def crossing(step):
        i = i0
        while 0 <= i + step < len(x):
            j = i + step
            if not above[j]:
                f = (y[i] - h / 2) / (y[i] - y[j])
                return x[i] + f * (x[j] - x[i])
            i = j
        raise GridTooNarrowError("grid too narrow: half-height not reached")

    return float(crossing(1) - crossing(-1))
