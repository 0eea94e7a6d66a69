"""
Angular-momentum algebra on Zeeman sublevels.

Clebsch-Gordan coefficients use the Racah closed-form sum evaluated in exact
rational arithmetic (Condon-Shortley phases). Operators are returned as
dense numpy blocks; :class:`ZeemanBasis` lifts them into the concatenated
ground-then-excited space.

Basis ordering is part of the public contract: ground sublevels first, then
excited sublevels, each in ascending ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import DomainError

HalfInt = Union[int, float, Fraction]


def _twice(x: HalfInt, what: str = "value") -> int:
    """Return 2*x as an int, rejecting anything that is not a half-integer."""
    t = Fraction(x) * 2
    if t.denominator != 1:
        raise DomainError(f"{what}={x!r} is not an integer or half-integer")
    return int(t)


@dataclass(frozen=True)
class AngularMomentum:
    """Angular momentum quantum number stored as ``2F`` so half-integers stay exact."""

    twice_f: int

    def __post_init__(self):
        if not isinstance(self.twice_f, (int, np.integer)) or self.twice_f < 0:
            raise DomainError(f"twice_f must be a non-negative integer, got {self.twice_f!r}")

    @classmethod
    def of(cls, f: HalfInt) -> "AngularMomentum":
        return cls(_twice(f, "F"))

    @property
    def f(self) -> float:
        return self.twice_f / 2

    @property
    def dim(self) -> int:
        return self.twice_f + 1

    @property
    def twice_m(self) -> list[int]:
        return list(range(-self.twice_f, self.twice_f + 1, 2))

    @property
    def m_values(self) -> np.ndarray:
        return np.array(self.twice_m, dtype=float) / 2

    def __str__(self):
        return str(Fraction(self.twice_f, 2))


def _as_am(f) -> AngularMomentum:
    return f if isinstance(f, AngularMomentum) else AngularMomentum.of(f)


@dataclass(frozen=True)
class Polarization:
    """
    Elliptical polarization of a running wave along z.

    ``epsilon`` is the ellipticity angle: tan(epsilon) is the ratio of the
    ellipse semiaxes. epsilon = 0 is linear polarization along x and
    epsilon = +-pi/4 are the two circular polarizations.
    """

    epsilon: float

    def __post_init__(self):
        if not abs(self.epsilon) <= math.pi / 4 + 1e-12:
            raise DomainError(f"epsilon={self.epsilon!r} outside [-pi/4, pi/4]")

    @property
    def e_plus(self) -> float:
        """Weight of the sigma+ spherical component."""
        return math.cos(self.epsilon - math.pi / 4)

    @property
    def e_minus(self) -> float:
        """Weight of the sigma- spherical component."""
        return math.sin(self.epsilon - math.pi / 4)

    @property
    def c(self) -> float:
        return math.cos(2 * self.epsilon)

    @property
    def s(self) -> float:
        return math.sin(2 * self.epsilon)

    def components(self) -> dict[int, float]:
        return {+1: self.e_plus, 0: 0.0, -1: self.e_minus}


@lru_cache(maxsize=None)
def _cg_twice(j1: int, m1: int, j2: int, m2: int, j: int, m: int) -> float:
    # all arguments are doubled quantum numbers
    if m1 + m2 != m:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m) > j:
        return 0.0
    if (j1 + m1) % 2 or (j2 + m2) % 2 or (j + m) % 2:
        return 0.0
    if not abs(j1 - j2) <= j <= j1 + j2 or (j1 + j2 + j) % 2:
        return 0.0

    fac = math.factorial

    def h(x):  # doubled -> integer argument of a factorial
        return x // 2

    pref = Fraction(
        (j + 1) * fac(h(j + j1 - j2)) * fac(h(j - j1 + j2)) * fac(h(j1 + j2 - j)),
        fac(h(j1 + j2 + j) + 1),
    )
    pref *= (fac(h(j + m)) * fac(h(j - m)) * fac(h(j1 - m1)) * fac(h(j1 + m1))
             * fac(h(j2 - m2)) * fac(h(j2 + m2)))

    total = Fraction(0)
    kmin = max(0, h(j2 - j - m1), h(j1 + m2 - j))
    kmax = min(h(j1 + j2 - j), h(j1 - m1), h(j2 + m2))
    for k in range(kmin, kmax + 1):
        den = (fac(k) * fac(h(j1 + j2 - j) - k) * fac(h(j1 - m1) - k) * fac(h(j2 + m2) - k)
               * fac(h(j - j2 + m1) + k) * fac(h(j - j1 - m2) + k))
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    return math.copysign(math.sqrt(pref * total * total), total)


def cg_coefficient(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt,
                   j: HalfInt, m: HalfInt) -> float:
    """General Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m>."""
    args = [_twice(v) for v in (j1, m1, j2, m2, j, m)]
    for jj, mm in ((args[0], args[1]), (args[2], args[3]), (args[4], args[5])):
        if jj < 0 or abs(mm) > jj:
            raise DomainError(f"projection {mm / 2} out of range for j={jj / 2}")
    return _cg_twice(*args)


def clebsch_gordan(f_a, m_a: HalfInt, f_b, m_b: HalfInt, q: int) -> float:
    """
    Dipole coupling coefficient C^{F_a m_a}_{F_b m_b; 1 q}.

    Parameters
    ----------
    f_a, f_b : AngularMomentum or half-integer
        Final and initial angular momenta.
    m_a, m_b : half-integer
        Magnetic quantum numbers, ``|m| <= F``.
    q : int
        Spherical component of the photon, one of -1, 0, +1.

    Returns
    -------
    float
        Zero unless ``m_a == m_b + q`` and ``|F_a - F_b| <= 1``.
    """
    f_a, f_b = _as_am(f_a), _as_am(f_b)
    ta, tb = _twice(m_a, "m_a"), _twice(m_b, "m_b")
    if abs(ta) > f_a.twice_f or (ta + f_a.twice_f) % 2:
        raise DomainError(f"m_a={m_a} invalid for F_a={f_a}")
    if abs(tb) > f_b.twice_f or (tb + f_b.twice_f) % 2:
        raise DomainError(f"m_b={m_b} invalid for F_b={f_b}")
    if q not in (-1, 0, 1):
        raise DomainError(f"q must be -1, 0 or +1, got {q!r}")
    return _cg_twice(f_b.twice_f, tb, 2, 2 * q, f_a.twice_f, ta)


@lru_cache(maxsize=None)
def _wigner_t(twice_a: int, twice_b: int, q: int) -> np.ndarray:
    fa, fb = AngularMomentum(twice_a), AngularMomentum(twice_b)
    out = np.zeros((fa.dim, fb.dim))
    for i, ma in enumerate(fa.twice_m):
        for k, mb in enumerate(fb.twice_m):
            if ma == mb + 2 * q:
                out[i, k] = _cg_twice(twice_b, mb, 2, 2 * q, twice_a, ma)
    out.setflags(write=False)
    return out


def wigner_t(f_a, f_b, q: int) -> np.ndarray:
    """
    Block of the Wigner vector operator T^{ab}_q.

    Rows run over the sublevels of ``f_a``, columns over ``f_b``, both in
    ascending ``m``. The returned array is read-only and shared between
    callers.
    """
    f_a, f_b = _as_am(f_a), _as_am(f_b)
    if abs(f_a.twice_f - f_b.twice_f) > 2:
        raise DomainError(f"|F_a - F_b| > 1 for F_a={f_a}, F_b={f_b}")
    if q not in (-1, 0, 1):
        raise DomainError(f"q must be -1, 0 or +1, got {q!r}")
    return _wigner_t(f_a.twice_f, f_b.twice_f, q)


def coupling_operator(fg, fe, pol: Polarization) -> np.ndarray:
    """Excited-by-ground block of V = e_{+1} T^{eg}_{+1} + e_{-1} T^{eg}_{-1}."""
    fg, fe = _as_am(fg), _as_am(fe)
    if not isinstance(pol, Polarization):
        pol = Polarization(float(pol))
    return pol.e_plus * wigner_t(fe, fg, +1) + pol.e_minus * wigner_t(fe, fg, -1)


def spherical_components(vec) -> dict[int, complex]:
    """Spherical components with e_{+-1} = -+(e_x +- i e_y)/sqrt(2)."""
    x, y, z = (float(v) for v in vec)
    return {+1: -(x + 1j * y) / math.sqrt(2), 0: complex(z), -1: (x - 1j * y) / math.sqrt(2)}


def _unit(b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (3,):
        raise DomainError(f"direction must be a 3-vector, got shape {b.shape}")
    if abs(np.linalg.norm(b) - 1.0) > 1e-9:
        raise DomainError(f"direction {b.tolist()} is not a unit vector")
    return b


def magnetic_projection(f, b_direction=(0.0, 0.0, 1.0)) -> np.ndarray:
    """
    Projection of the angular momentum of one level on a unit direction.

    Built as sqrt(F(F+1)) T^{aa} . b, so for ``b = z`` the result is
    ``diag(m)``. Raises :class:`DomainError` if ``b_direction`` is not unit.
    """
    f = _as_am(f)
    b = spherical_components(_unit(b_direction))
    scale = math.sqrt(f.f * (f.f + 1))
    out = np.zeros((f.dim, f.dim), dtype=complex)
    for q in (-1, 0, 1):
        # T . b = sum_q (-1)^q T_q b_{-q}
        out += (-1) ** q * b[-q] * wigner_t(f, f, q)
    return scale * out


class ZeemanBasis:
    """
    Concatenated Zeeman basis of a ground level ``fg`` and excited level ``fe``.

    Index ``i < ng`` is ground sublevel ``m = -Fg + i``; index ``ng + k`` is
    excited sublevel ``m = -Fe + k``.
    """

    def __init__(self, fg, fe):
        self.fg = _as_am(fg)
        self.fe = _as_am(fe)
        self.ng = self.fg.dim
        self.ne = self.fe.dim
        self.dim = self.ng + self.ne
        self.g = slice(0, self.ng)
        self.e = slice(self.ng, self.dim)

    def _slice(self, level: str) -> slice:
        if level not in ("g", "e"):
            raise DomainError(f"level must be 'g' or 'e', got {level!r}")
        return self.g if level == "g" else self.e

    def embed(self, block, rows: str, cols: str) -> np.ndarray:
        """Place ``block`` into the (rows, cols) block of a full-space zero matrix."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        out[self._slice(rows), self._slice(cols)] = block
        return out

    def projector(self, level: str) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        s = self._slice(level)
        out[s, s] = np.eye(s.stop - s.start)
        return out

    def labels(self) -> list[tuple[str, float]]:
        return ([("g", m) for m in self.fg.m_values]
                + [("e", m) for m in self.fe.m_values])
