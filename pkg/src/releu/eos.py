"""Equation-of-state algebra for the barotropic law p(rho) = rho**gamma.

All quantities are in units where the speed of light is 1 and the constant in
the pressure law is 1. The number density n parametrizes everything:

    rho(n) = n * (1 - n**(gamma-1)) ** (1/(1-gamma))
    cs2(n) = gamma * n**(gamma-1) / (1 - n**(gamma-1))
    s(n)   = (1 - n**(gamma-1)) ** (-gamma/(gamma-1))

The formulas are finite for n**(gamma-1) < 1; causality (sound speed below
light speed) restricts further to n**(gamma-1) < 1/(gamma+1), which is
enforced separately by `require_causal` so that the algebra can still be
evaluated at and slightly past the causal endpoint when a check needs it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def p_zero_index(gamma: float) -> int:
    """Given gamma > 1, return the extra-derivative count p0: the smallest
    nonnegative integer with 1 + 1/(gamma-1) - p0 <= 2."""
    if gamma <= 1.0:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    return max(0, math.ceil(1.0 / (gamma - 1.0) - 1.0))


@dataclass(frozen=True)
class Eos:
    """Barotropic equation of state p = rho**gamma, gamma > 1."""

    gamma: float = 2.0

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    @property
    def n_causal(self) -> float:
        """Largest number density with sound speed below light speed:
        n**(gamma-1) = 1/(gamma+1)."""
        g = self.gamma
        return (1.0 / (g + 1.0)) ** (1.0 / (g - 1.0))

    @property
    def p0(self) -> int:
        return p_zero_index(self.gamma)

    def _w(self, n):
        """1 - n**(gamma-1), the common denominator; errors where <= 0."""
        n = np.asarray(n, dtype=float)
        if np.any(n < 0.0):
            raise ValueError("number density must be nonnegative")
        w = 1.0 - n ** (self.gamma - 1.0)
        if np.any(w <= 0.0):
            raise ValueError(
                "number density at or beyond the unit-enthalpy singularity "
                "n**(gamma-1) = 1"
            )
        return w

    def rho_of_n(self, n):
        """Given the number density, return the energy density
        n * (1 - n**(gamma-1))**(1/(1-gamma)); for gamma = 2, n/(1-n)."""
        n = np.asarray(n, dtype=float)
        out = n * self._w(n) ** (1.0 / (1.0 - self.gamma))
        return out if out.ndim else float(out)

    def pressure_of_n(self, n):
        """Given the number density, return p = rho(n)**gamma."""
        r = np.asarray(self.rho_of_n(n))
        out = r**self.gamma
        return out if out.ndim else float(out)

    def sound_speed_sq(self, n):
        """Given the number density, return cs^2 = gamma*n**(gamma-1) /
        (1 - n**(gamma-1)), the squared sound speed as a fraction of c^2."""
        n = np.asarray(n, dtype=float)
        out = self.gamma * n ** (self.gamma - 1.0) / self._w(n)
        return out if out.ndim else float(out)

    def enthalpy_s(self, n):
        """Given the number density, return the enthalpy per particle
        s = (1 - n**(gamma-1))**(-gamma/(gamma-1)); for gamma = 2,
        1/(1-n)**2."""
        n = np.asarray(n, dtype=float)
        out = self._w(n) ** (-self.gamma / (self.gamma - 1.0))
        return out if out.ndim else float(out)

    def enthalpy_s_prime(self, n):
        """Given the number density, return ds/dn = gamma*n**(gamma-2) *
        (1 - n**(gamma-1))**(-(2*gamma-1)/(gamma-1))."""
        n = np.asarray(n, dtype=float)
        g = self.gamma
        out = g * n ** (g - 2.0) * self._w(n) ** (-(2.0 * g - 1.0) / (g - 1.0))
        return out if out.ndim else float(out)

    def enthalpy_S_of_f(self, f):
        """Given the Lagrangian number density f, return S = s(f)."""
        return self.enthalpy_s(f)

    def is_causal(self, n, margin: float = 1e-12) -> bool:
        """Whether all densities keep the sound speed strictly below light
        speed, with a guard margin off the endpoint."""
        n = np.asarray(n, dtype=float)
        g = self.gamma
        return bool(np.all(n >= 0.0) and np.all(n ** (g - 1.0) < 1.0 / (g + 1.0) - margin))

    def require_causal(self, n, margin: float = 1e-12) -> None:
        """Raise if any density reaches the causal bound
        n**(gamma-1) >= 1/(gamma+1) (sound speed at light speed)."""
        if not self.is_causal(n, margin=margin):
            raise ValueError(
                "number density violates the causal bound "
                "n**(gamma-1) < 1/(gamma+1): sound speed would reach light speed"
            )
