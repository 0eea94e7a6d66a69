"""Sampled resonance curves and the three signal paths that produce them."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

import numpy as np

from .errors import DomainError
from .gobe import steady_state
from .params import SystemParams
from .reduced import NormalizedParams, analytic_coeffs, pi_e0, reduced_pi_e

PATHS = ("gobe", "reduced", "analytic")


def fmt(x) -> str:
    """Fixed float formatting used in every output file."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".17g")  # no "-0"
    return str(x)


@dataclass
class ScanResult:
    omega_g_grid: np.ndarray
    signal: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega_g_grid = np.asarray(self.omega_g_grid, dtype=float)
        self.signal = np.asarray(self.signal, dtype=float)
        if self.omega_g_grid.shape != self.signal.shape or self.signal.ndim != 1:
            raise DomainError("grid and signal must be 1-d arrays of equal length")
        if np.any(np.diff(self.omega_g_grid) <= 0):
            raise DomainError("grid must be strictly increasing")

    def __len__(self):
        return len(self.signal)

    def to_csv(self, fh: TextIO, comments: Iterable[str] = (), extra: Optional[dict] = None):
        cols = {"omega_g": self.omega_g_grid, "signal": self.signal}
        cols.update(extra or {})
        write_csv(fh, cols, comments)


def write_csv(fh: TextIO, columns: dict, comments: Iterable[str] = ()):
    for line in comments:
        fh.write(f"# {line}\n")
    names = list(columns)
    fh.write(",".join(names) + "\n")
    n = len(next(iter(columns.values())))
    for i in range(n):
        fh.write(",".join(fmt(columns[k][i]) for k in names) + "\n")


def _analytic_curve(params: SystemParams, grid: np.ndarray) -> np.ndarray:
    p = params
    if (p.fg.twice_f, p.fe.twice_f) != (2, 4) or p.beta != 1 or p.Gamma != 0:
        raise DomainError("analytic path covers only the closed 1 -> 2 transition with Gamma = 0")
    if not np.allclose(p.b_direction, (0, 0, 1)):
        raise DomainError("analytic path requires B along z")
    n = NormalizedParams.from_system(p.replace(omega_g=0.0))
    unit = 2 * p.gamma_eg * p.saturation
    pc = analytic_coeffs(n.gamma1_tilde, n.epsilon)
    return pi_e0(p) * pc.ratio(grid / unit, n.Delta)


def signal_curve(params: SystemParams, grid, path: str = "reduced",
                 threads: int = 1) -> np.ndarray:
    """Excited population versus omega_g along ``grid`` via the chosen path."""
    grid = np.asarray(grid, dtype=float)
    if path == "reduced":
        return reduced_pi_e(params, omega_g=grid)
    if path == "analytic":
        return _analytic_curve(params, grid)
    if path == "gobe":
        def one(om):
            return steady_state(params.replace(omega_g=float(om))).pi_e
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                return np.array(list(pool.map(one, grid)))
        return np.array([one(om) for om in grid])
    raise DomainError(f"unknown path {path!r}; expected one of {PATHS}")


def omega_scan(params: SystemParams, grid, path: str = "reduced", threads: int = 1) -> ScanResult:
    grid = np.asarray(grid, dtype=float)
    sig = signal_curve(params, grid, path, threads)
    return ScanResult(grid, sig, meta={"path": path, **params.as_dict()})
