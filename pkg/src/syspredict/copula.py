"""Survival copulas of the component lifetimes, with analytic partials.

A survival copula C-hat couples the marginal survival functions:
P(X_1 > x_1, ..., X_n > x_n) = C-hat(F-bar(x_1), ..., F-bar(x_n)).  The
distortion machinery needs three things from a family: pointwise evaluation,
lower-dimensional slices (some coordinates pinned to shared variables or to
1), and mixed partial derivatives up to order three with respect to distinct
coordinates.  Partials are derived by hand per family; a finite-difference
oracle (computed in extended precision) cross-checks them in the tests.

Families:

* ``ProductCopula`` -- independent components.
* ``FGMCopula`` -- one-parameter Farlie-Gumbel-Morgenstern,
  C-hat(u) = prod u_i * (1 + theta * prod (1 - u_i)), |theta| <= 1.
* ``ClaytonPairCopula`` -- one Clayton-coupled pair, all other components
  independent: the pair factor is (p^-theta + q^-theta - 1)^(-1/theta),
  theta > 0; theta = 1 reduces to the rational form pq / (p + q - pq).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _iterproduct

import numpy as np

from .errors import (
    BoundaryTooClose,
    IncompleteAssignment,
    IndexOutOfRange,
    LengthMismatch,
    OutOfRange,
    OutOfUnitInterval,
    UnsupportedCopula,
    UnsupportedOrder,
)

# slice assignment symbols
U, V, W, ONE = "u", "v", "w", "one"

_FD_STEPS = {1: 1e-6, 2: 1e-5, 3: 1e-3}


class SurvivalCopula:
    """Shared validation, slicing, and the finite-difference oracle."""

    n: int

    # -- helpers ----------------------------------------------------------

    def _check_point(self, u):
        arr = np.asarray(u)
        if arr.shape[-1:] != (self.n,):
            raise LengthMismatch(
                f"expected {self.n} coordinates, got shape {arr.shape}"
            )
        if np.any(arr < 0) or np.any(arr > 1):
            raise OutOfUnitInterval("copula arguments must lie in [0, 1]")
        return arr

    def _check_indices(self, indices):
        idx = tuple(indices)
        if len(set(idx)) != len(idx):
            raise UnsupportedOrder(f"repeated coordinate indices in {idx}")
        if not 1 <= len(idx) <= 3:
            raise UnsupportedOrder(
                f"partials are supported for 1..3 distinct coordinates, got {len(idx)}"
            )
        for i in idx:
            if not 1 <= i <= self.n:
                raise IndexOutOfRange(f"coordinate index {i} outside 1..{self.n}")
        return tuple(sorted(idx))

    # -- interface --------------------------------------------------------

    def eval(self, u):
        raise NotImplementedError

    def partial(self, indices, u):
        raise NotImplementedError

    def slice(self, assignment):
        """Pin each coordinate to one of the symbols u, v, w or to 1.

        Returns a callable of the distinct free symbols present, in u, v, w
        order.  Example: ``{1: U, 2: V, 3: V}`` yields ``f(u, v)``.
        """
        keys = set(assignment)
        if keys != set(range(1, self.n + 1)):
            raise IncompleteAssignment(
                f"assignment must cover coordinates 1..{self.n} exactly, got {sorted(keys)}"
            )
        symbols = {}
        for i, sym in assignment.items():
            sym = str(sym).lower()
            if sym not in (U, V, W, ONE):
                raise IncompleteAssignment(f"unknown symbol {sym!r} for coordinate {i}")
            symbols[i] = sym
        free = [s for s in (U, V, W) if s in symbols.values()]

        def sliced(*args):
            if len(args) != len(free):
                raise LengthMismatch(
                    f"slice takes {len(free)} arguments ({', '.join(free)})"
                )
            values = dict(zip(free, (np.asarray(a) for a in args)))
            shape = np.broadcast_shapes(*(v.shape for v in values.values())) if values else ()
            point = np.ones(shape + (self.n,))
            for i, sym in symbols.items():
                if sym != ONE:
                    point[..., i - 1] = values[sym]
            return self.eval(point)

        return sliced

    def fd_partial(self, indices, u, h=None):
        """Central finite-difference oracle for :meth:`partial`.

        Evaluates the 2^k stencil in extended precision so the order-3
        stencil stays accurate at small steps.  Raises if any differentiated
        coordinate sits within h of the unit-cube boundary.
        """
        idx = self._check_indices(indices)
        k = len(idx)
        if h is None:
            h = _FD_STEPS[k]
        base = np.asarray(self._check_point(u), dtype=np.longdouble)
        for i in idx:
            xi = base[..., i - 1]
            if np.any(xi < h) or np.any(xi > 1 - h):
                raise BoundaryTooClose(
                    f"coordinate {i} within {h} of the boundary"
                )
        total = 0.0
        for signs in _iterproduct((1.0, -1.0), repeat=k):
            point = base.copy()
            weight = 1.0
            for s, i in zip(signs, idx):
                point[..., i - 1] = base[..., i - 1] + s * h
                weight *= s
            total = total + weight * self.eval(point)
        spacing = 1.0
        for i in idx:
            spacing = spacing * ((base[..., i - 1] + h) - (base[..., i - 1] - h))
        return np.asarray(total / spacing, dtype=float)


@dataclass(frozen=True)
class ProductCopula(SurvivalCopula):
    """Independent components: C-hat(u) = prod u_i."""

    n: int = 3

    def __post_init__(self):
        if self.n < 1:
            raise IndexOutOfRange("dimension must be >= 1")

    def eval(self, u):
        return np.prod(self._check_point(u), axis=-1)

    def partial(self, indices, u):
        idx = self._check_indices(indices)
        arr = self._check_point(u)
        keep = [i - 1 for i in range(1, self.n + 1) if i not in idx]
        return np.prod(arr[..., keep], axis=-1) if keep else np.ones(arr.shape[:-1])


@dataclass(frozen=True)
class FGMCopula(SurvivalCopula):
    """Farlie-Gumbel-Morgenstern: prod u_i + theta * prod u_i (1 - u_i)."""

    theta: float = 1.0
    n: int = 3

    def __post_init__(self):
        if not -1.0 <= self.theta <= 1.0:
            raise OutOfRange(f"FGM needs |theta| <= 1, got {self.theta}")
        if self.n < 2:
            raise IndexOutOfRange("dimension must be >= 2")

    def eval(self, u):
        arr = self._check_point(u)
        base = np.prod(arr, axis=-1)
        return base + self.theta * np.prod(arr * (1.0 - arr), axis=-1)

    def partial(self, indices, u):
        # d/du_S [prod u + theta prod u(1-u)]
        #   = prod_{j not in S} u_j + theta prod_{i in S}(1-2u_i) prod_{j not in S} u_j(1-u_j)
        idx = self._check_indices(indices)
        arr = self._check_point(u)
        keep = [i - 1 for i in range(1, self.n + 1) if i not in idx]
        diff = [i - 1 for i in idx]
        ones = np.ones(arr.shape[:-1], dtype=arr.dtype)
        kept = np.prod(arr[..., keep], axis=-1) if keep else ones
        kept_fgm = np.prod(arr[..., keep] * (1.0 - arr[..., keep]), axis=-1) if keep else ones
        bent = np.prod(1.0 - 2.0 * arr[..., diff], axis=-1)
        return kept + self.theta * bent * kept_fgm


def _pair_value(p, q, theta):
    """Clayton pair factor with the boundary-zero convention."""
    p = np.asarray(p)
    q = np.asarray(q)
    if theta == 1.0:
        den = p + q - p * q
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den > 0, p * q / np.where(den > 0, den, 1.0), 0.0)
        return out
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s = p ** (-theta) + q ** (-theta) - 1.0
        out = s ** (-1.0 / theta)
    return np.where((p > 0) & (q > 0), out, 0.0)


def _pair_d1(p, q, theta):
    """d/dp of the pair factor (continuous extension at the boundary)."""
    p = np.asarray(p)
    q = np.asarray(q)
    if theta == 1.0:
        den = p + q - p * q
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den > 0, (q / np.where(den > 0, den, 1.0)) ** 2, 0.0)
        return out
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s = p ** (-theta) + q ** (-theta) - 1.0
        out = s ** (-1.0 / theta - 1.0) * p ** (-theta - 1.0)
    out = np.where(q > 0, out, 0.0)
    return np.where((p > 0) | (q <= 0), out, 1.0)  # limit as p -> 0+ with q > 0 is 1


def _pair_d12(p, q, theta):
    """d^2/dp dq of the pair factor."""
    p = np.asarray(p)
    q = np.asarray(q)
    if theta == 1.0:
        den = p + q - p * q
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den > 0, 2.0 * p * q / np.where(den > 0, den, 1.0) ** 3, 0.0)
        return out
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s = p ** (-theta) + q ** (-theta) - 1.0
        out = (1.0 + theta) * s ** (-1.0 / theta - 2.0) * (p * q) ** (-theta - 1.0)
    return np.where((p > 0) & (q > 0), out, 0.0)


@dataclass(frozen=True)
class ClaytonPairCopula(SurvivalCopula):
    """One Clayton-coupled pair of components, the rest independent."""

    pair: tuple[int, int] = (2, 3)
    theta: float = 1.0
    n: int = 3

    def __post_init__(self):
        if self.n < 2:
            raise IndexOutOfRange("dimension must be >= 2")
        j, k = self.pair
        if not (1 <= j <= self.n and 1 <= k <= self.n) or j == k:
            raise IndexOutOfRange(f"pair {self.pair} must be two distinct indices in 1..{self.n}")
        if j > k:
            object.__setattr__(self, "pair", (k, j))
        if not self.theta > 0:
            raise OutOfRange(f"Clayton pair needs theta > 0, got {self.theta}")

    def _split(self):
        j, k = self.pair
        others = [i for i in range(1, self.n + 1) if i not in (j, k)]
        return j, k, others

    def eval(self, u):
        arr = self._check_point(u)
        j, k, others = self._split()
        indep = np.prod(arr[..., [i - 1 for i in others]], axis=-1) if others else 1.0
        return indep * _pair_value(arr[..., j - 1], arr[..., k - 1], self.theta)

    def partial(self, indices, u):
        idx = self._check_indices(indices)
        arr = self._check_point(u)
        j, k, others = self._split()
        keep = [i - 1 for i in others if i not in idx]
        indep = np.prod(arr[..., keep], axis=-1) if keep else np.ones(arr.shape[:-1], dtype=arr.dtype)
        p, q = arr[..., j - 1], arr[..., k - 1]
        in_j, in_k = j in idx, k in idx
        if in_j and in_k:
            pair = _pair_d12(p, q, self.theta)
        elif in_j:
            pair = _pair_d1(p, q, self.theta)
        elif in_k:
            pair = _pair_d1(q, p, self.theta)  # symmetric factor
        else:
            pair = _pair_value(p, q, self.theta)
        return indep * pair


def copula_from_config(doc) -> SurvivalCopula:
    """Build a copula from its config mapping."""
    family = doc.get("family")
    n = int(doc.get("n", 3))
    if family == "product":
        return ProductCopula(n=n)
    if family == "fgm":
        return FGMCopula(theta=float(doc.get("theta", 1.0)), n=n)
    if family == "clayton_pair":
        pair = tuple(int(i) for i in doc.get("pair", (2, 3)))
        return ClaytonPairCopula(pair=pair, theta=float(doc.get("theta", 1.0)), n=n)
    raise UnsupportedCopula(f"unknown copula family {family!r}")
