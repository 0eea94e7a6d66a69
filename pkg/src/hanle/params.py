"""Physical parameter bundle shared by the numeric paths."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .angular import AngularMomentum, Polarization, _as_am, _unit
from .errors import DomainError

RATE_FIELDS = ("kappa", "gamma_r", "gamma_1", "gamma_eg", "Gamma", "omega_g", "omega_e", "delta")


@dataclass(frozen=True)
class SystemParams:
    """
    Level structure, field and relaxation parameters of one atom class.

    All rates share one arbitrary unit. ``delta`` is the optical detuning
    seen by the atom (Doppler shift included). ``gamma_eg=None`` applies the
    collisionless relation gamma_eg = gamma_r/2 + Gamma, which is only
    accepted when ``gamma_1 == 0``. ``omega_e=None`` means
    ``omega_g * g_ratio``.
    """

    fg: AngularMomentum = AngularMomentum(2)
    fe: AngularMomentum = AngularMomentum(4)
    kappa: float = 0.0
    delta: float = 0.0
    gamma_r: float = 1.0
    gamma_1: float = 0.0
    gamma_eg: Optional[float] = None
    Gamma: float = 0.0
    omega_g: float = 0.0
    omega_e: Optional[float] = None
    g_ratio: float = 1.0
    beta: float = 1.0
    b_direction: tuple = (0.0, 0.0, 1.0)
    pol: Polarization = field(default_factory=lambda: Polarization(0.0))

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("fg", _as_am(self.fg))
        set_("fe", _as_am(self.fe))
        if not isinstance(self.pol, Polarization):
            set_("pol", Polarization(float(self.pol)))
        set_("b_direction", tuple(float(x) for x in _unit(self.b_direction)))
        if abs(self.fg.twice_f - self.fe.twice_f) > 2:
            raise DomainError(f"dipole transition needs |Fe - Fg| <= 1, got {self.fg} -> {self.fe}")
        if not self.gamma_r > 0:
            raise DomainError("gamma_r must be positive")
        for name in ("gamma_1", "Gamma"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        if not 0 < self.beta <= 1:
            raise DomainError(f"beta={self.beta} outside (0, 1]")
        if self.gamma_eg is None:
            if self.gamma_1 != 0:
                raise DomainError("gamma_eg must be given explicitly when gamma_1 > 0")
            set_("gamma_eg", self.gamma_r / 2 + self.Gamma)
        if self.gamma_eg <= 0:
            raise DomainError("gamma_eg must be positive")
        if self.gamma_1 == 0 and self.gamma_eg < self.gamma_r / 2 * (1 - 1e-12):
            raise DomainError("gamma_eg < gamma_r/2 is unphysical without collisions")
        for name in ("kappa", "delta", "omega_g", "g_ratio"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def omega_e_eff(self) -> float:
        return self.omega_g * self.g_ratio if self.omega_e is None else self.omega_e

    @property
    def saturation(self) -> float:
        """S = |kappa|^2 / (gamma_eg^2 + delta^2)."""
        return self.kappa ** 2 / (self.gamma_eg ** 2 + self.delta ** 2)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def scaled(self) -> "SystemParams":
        """Copy with every rate expressed in units of gamma_r."""
        r = self.gamma_r
        return self.replace(
            kappa=self.kappa / r, delta=self.delta / r, gamma_r=1.0,
            gamma_1=self.gamma_1 / r, gamma_eg=self.gamma_eg / r, Gamma=self.Gamma / r,
            omega_g=self.omega_g / r,
            omega_e=None if self.omega_e is None else self.omega_e / r,
        )

    def as_dict(self) -> dict:
        """Flat, fully-resolved view used for manifests."""
        return {
            "Fg": str(self.fg), "Fe": str(self.fe), "kappa": self.kappa, "delta": self.delta,
            "gamma_r": self.gamma_r, "gamma_1": self.gamma_1, "gamma_eg": self.gamma_eg,
            "Gamma": self.Gamma, "omega_g": self.omega_g, "omega_e": self.omega_e_eff,
            "g_ratio": self.g_ratio, "beta": self.beta,
            "b_direction": "{:.17g},{:.17g},{:.17g}".format(*self.b_direction),
            "epsilon": self.pol.epsilon, "saturation": self.saturation,
        }


def random_params(rng: np.random.Generator, fg=None, fe=None) -> SystemParams:
    """Draw a random, valid parameter set; used by the structural test suites."""
    if fg is None:
        fg = rng.choice([0.5, 1, 1.5, 2])
    if fe is None:
        fe = fg + rng.choice([-1, 0, 1]) if fg >= 1 else fg + rng.choice([0, 1])
    b = rng.normal(size=3)
    gamma_1 = float(rng.choice([0.0, rng.uniform(0, 5)]))
    Gamma = float(rng.choice([0.0, rng.uniform(1e-4, 0.2)]))
    beta = 1.0 if Gamma == 0 else float(rng.choice([1.0, rng.uniform(0.3, 1.0)]))
    return SystemParams(
        fg=float(fg), fe=float(fe),
        kappa=float(rng.uniform(0, 2)),
        delta=float(rng.uniform(-5, 5)),
        gamma_1=gamma_1,
        gamma_eg=0.5 + Gamma + gamma_1 * float(rng.uniform(0, 1)),
        Gamma=Gamma,
        omega_g=float(rng.uniform(-1, 1)),
        g_ratio=float(rng.uniform(-2, 2)),
        beta=beta,
        b_direction=tuple(b / np.linalg.norm(b)),
        pol=Polarization(float(rng.uniform(-np.pi / 4, np.pi / 4))),
    )
