"""Linear quantile regression by exact candidate enumeration.

The pinball loss L(a, b) = sum rho_tau(y_i - a - b x_i) is convex and
piecewise linear in (a, b), so some optimum interpolates two sample points
(or is a horizontal line through one when all slopes tie); scanning that
finite candidate set is exact, unlike iterative solvers.  Ties break
deterministically: smallest loss, then smallest |slope|, then smallest
intercept.  Two interchangeable kernels implement the scan (a compiled lane
and a blocked-numpy lane); the compiled one is picked at import when
available.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateDesign, OutOfRange
from . import _pinball_np

try:
    from . import _pinball  # compiled lane

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-dependent
    _pinball = None
    HAVE_COMPILED = False


@dataclass(frozen=True)
class FittedLine:
    """One fitted regression line; tau is None for least squares."""

    intercept: float
    slope: float
    loss: float
    tau: Optional[float] = None


def _as_xy(pairs):
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise DegenerateDesign(f"need an (n, 2) array with n >= 2, got shape {arr.shape}")
    x = np.ascontiguousarray(arr[:, 0])
    y = np.ascontiguousarray(arr[:, 1])
    if np.unique(x).size < 2:
        raise DegenerateDesign("need at least two distinct abscissae")
    return x, y


def pinball_loss(pairs, intercept, slope, tau):
    """Pinball loss of one line over the sample."""
    arr = np.asarray(pairs, dtype=float)
    resid = arr[:, 1] - intercept - slope * arr[:, 0]
    return float(np.sum(resid * (tau - (resid < 0.0))))


def fit_lqr(pairs, tau, engine="auto") -> FittedLine:
    """Exact linear tau-quantile regression over the candidate-line set."""
    tau = float(tau)
    if not 0.0 < tau < 1.0:
        raise OutOfRange(f"tau must lie in (0, 1), got {tau}")
    x, y = _as_xy(pairs)
    if engine == "auto":
        kernel = _pinball if HAVE_COMPILED else _pinball_np
    elif engine == "compiled":
        if not HAVE_COMPILED:
            raise OutOfRange("compiled kernel is not available")
        kernel = _pinball
    elif engine == "numpy":
        kernel = _pinball_np
    else:
        raise OutOfRange(f"unknown engine {engine!r}")
    a, b, loss = kernel.scan(x, y, tau)
    return FittedLine(intercept=a, slope=b, loss=loss, tau=tau)


def fit_ols(pairs) -> FittedLine:
    """Least squares via the normal equations, loss = sum of squared residuals."""
    x, y = _as_xy(pairs)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - intercept - slope * x
    return FittedLine(intercept=intercept, slope=slope, loss=float(np.sum(resid**2)))


def detect_crossings(fits, x_lo, x_hi):
    """Pairs of fitted quantile lines whose order inverts on [x_lo, x_hi].

    Lines are ordered by tau; a higher-tau line dipping below a lower-tau
    line anywhere in the range (differences are linear, so checking the
    endpoints suffices) is reported as (tau_low, tau_high).
    """
    ordered = sorted((f for f in fits if f.tau is not None), key=lambda f: f.tau)
    out = []
    for i, low in enumerate(ordered):
        for high in ordered[i + 1:]:
            d_lo = (high.intercept + high.slope * x_lo) - (low.intercept + low.slope * x_lo)
            d_hi = (high.intercept + high.slope * x_hi) - (low.intercept + low.slope * x_hi)
            if min(d_lo, d_hi) < 0.0:
                out.append((low.tau, high.tau))
    return out


def load_xy(path, x_col="t1", y_col="t"):
    """Read (x, y) pairs from a CSV file with named columns."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or x_col not in reader.fieldnames or y_col not in reader.fieldnames:
            raise DegenerateDesign(
                f"CSV must provide columns {x_col!r} and {y_col!r}, got {reader.fieldnames}"
            )
        rows = [(float(row[x_col]), float(row[y_col])) for row in reader]
    return np.asarray(rows, dtype=float)
