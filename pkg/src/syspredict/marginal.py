"""Common component-lifetime distributions.

All identical components share one absolutely continuous marginal with
support [0, inf).  Only the survival function, its inverse, and the density
are needed; everything downstream works through F-bar, so any family with an
exact inverse plugs in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NegativeTime, OutOfRange


def _check_times(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise NegativeTime("lifetimes must be >= 0")
    return arr


def _check_probs(p):
    arr = np.asarray(p, dtype=float)
    if np.any(arr <= 0) or np.any(arr > 1):
        raise OutOfRange("survival levels must lie in (0, 1]")
    return arr


@dataclass(frozen=True)
class Exponential:
    """Exponential lifetimes with the given mean."""

    mean: float = 1.0

    def __post_init__(self):
        if not self.mean > 0:
            raise OutOfRange(f"mean must be positive, got {self.mean}")

    def sf(self, t):
        return np.exp(-_check_times(t) / self.mean)

    def inv_sf(self, p):
        with np.errstate(divide="ignore"):
            return -self.mean * np.log(_check_probs(p))

    def pdf(self, t):
        return np.exp(-_check_times(t) / self.mean) / self.mean


@dataclass(frozen=True)
class Weibull:
    """Weibull lifetimes: F-bar(t) = exp(-(t/scale)^shape)."""

    shape: float
    scale: float

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise OutOfRange("shape and scale must be positive")

    def sf(self, t):
        return np.exp(-((_check_times(t) / self.scale) ** self.shape))

    def inv_sf(self, p):
        with np.errstate(divide="ignore"):
            return self.scale * (-np.log(_check_probs(p))) ** (1.0 / self.shape)

    def pdf(self, t):
        t = _check_times(t)
        k, lam = self.shape, self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (t / lam) ** (k - 1.0)
        return (k / lam) * z * np.exp(-((t / lam) ** k))


def marginal_from_config(doc) -> Exponential | Weibull:
    """Build a marginal from its config mapping."""
    family = doc.get("family")
    if family == "exponential":
        return Exponential(mean=float(doc.get("mean", 1.0)))
    if family == "weibull":
        return Weibull(shape=float(doc["shape"]), scale=float(doc["scale"]))
    raise ConfigError(f"unknown marginal family {family!r}")
