"""Barotropic gas models: pressure laws and the specific enthalpy integral.

A model bundles a monotone pressure law p(rho) with the enthalpy
h(rho) = integral from r0 to rho of p'(r)/r dr, which the weakly
conservative scheme uses in place of direct pressure differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.integrate import quad

from .errors import NonMonotonePressure, NonPositiveDensity

FloatOrArray = Union[float, np.ndarray]


def _check_density(rho) -> np.ndarray:
    arr = np.asarray(rho, dtype=float)
    if not np.all(arr > 0.0):
        raise NonPositiveDensity("density must be strictly positive")
    return arr


@dataclass(frozen=True)
class IsentropicLaw:
    """Power law p(rho) = p1 * rho**gamma with p1 > 0, gamma > 1."""

    p1: float
    gamma: float

    def __post_init__(self):
        if self.p1 <= 0.0:
            raise ValueError("p1 must be > 0")
        if self.gamma <= 1.0:
            raise ValueError("gamma must be > 1")


@dataclass(frozen=True)
class TabulatedLaw:
    """Pressure law given by callables for p(rho) and p'(rho).

    Monotonicity p' > 0 is checked at every evaluation, not up front.
    """

    p: Callable[[np.ndarray], np.ndarray]
    p_prime: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GasModel:
    """Pressure law plus the reference density r0 of the enthalpy integral.

    For an isentropic law the enthalpy has the closed form
    h(rho) = gamma/(gamma-1) * p(rho)/rho (shifted by a constant when
    r0 > 0); a tabulated law is integrated numerically and then r0 must
    be positive.
    """

    law: Union[IsentropicLaw, TabulatedLaw]
    r0: float = 0.0

    def __post_init__(self):
        if self.r0 < 0.0:
            raise ValueError("r0 must be >= 0")

    @classmethod
    def isentropic(cls, p1: float = 1.0, gamma: float = 2.0, r0: float = 0.0) -> "GasModel":
        return cls(IsentropicLaw(p1, gamma), r0)

    def pressure(self, rho: FloatOrArray):
        """Return (p(rho), p'(rho)); raises if rho <= 0 or p' <= 0."""
        arr = _check_density(rho)
        if isinstance(self.law, IsentropicLaw):
            p1, g = self.law.p1, self.law.gamma
            p = p1 * arr**g
            dp = g * p1 * arr ** (g - 1.0)
        else:
            p = np.asarray(self.law.p(arr), dtype=float)
            dp = np.asarray(self.law.p_prime(arr), dtype=float)
            if not np.all(dp > 0.0):
                raise NonMonotonePressure("pressure law returned p'(rho) <= 0")
        if np.ndim(rho) == 0:
            return float(p), float(dp)
        return p, dp

    def enthalpy(self, rho: FloatOrArray):
        """Return (h(rho), h'(rho)) with h'(rho) = p'(rho)/rho."""
        arr = _check_density(rho)
        if isinstance(self.law, IsentropicLaw):
            p1, g = self.law.p1, self.law.gamma
            coeff = g / (g - 1.0)
            h = coeff * p1 * arr ** (g - 1.0)
            if self.r0 > 0.0:
                h = h - coeff * p1 * self.r0 ** (g - 1.0)
            hp = g * p1 * arr ** (g - 2.0)
        else:
            if self.r0 <= 0.0:
                raise ValueError("a tabulated law needs r0 > 0 to anchor the enthalpy integral")
            flat = np.atleast_1d(arr).ravel()
            vals = [
                quad(lambda r: float(self.law.p_prime(r)) / r, self.r0, x,
                     epsabs=1e-12, epsrel=1e-12)[0]
                for x in flat
            ]
            h = np.array(vals).reshape(np.shape(arr))
            _, dp = self.pressure(arr)
            hp = dp / arr
        if np.ndim(rho) == 0:
            return float(h), float(hp)
        return h, hp

    def sound_speed(self, rho: FloatOrArray):
        """sqrt(p'(rho))."""
        _, dp = self.pressure(rho)
        return np.sqrt(dp)
