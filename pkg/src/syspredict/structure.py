"""Coherent-system structures described by their minimal path sets.

A system over components 1..n works exactly when some minimal path set has
all of its components working, so its lifetime given component lifetimes
x_1..x_n is

    T = max over path sets P of ( min over j in P of x_j ).

The joint survival of T under a survival copula comes from inclusion-exclusion
over unions of path sets; :meth:`SystemStructure.inclusion_exclusion` produces
that signed expansion, which downstream modules turn into distortion
functions.

Component sets are stored as bitmasks (component j <-> bit j-1), so n is
capped at 64; the 2^r inclusion-exclusion enumeration additionally caps the
number of path sets at 24.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    EmptyPaths,
    IndexOutOfRange,
    LengthMismatch,
    NonMinimalPath,
    TermLimitExceeded,
    UncoveredComponent,
)

MAX_COMPONENTS = 64
MAX_PATHS = 24


def _mask(indices):
    m = 0
    for j in indices:
        m |= 1 << (j - 1)
    return m


def _indices(mask):
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)


@dataclass(frozen=True)
class SignedTermList:
    """Merged inclusion-exclusion expansion: sum of coeff * P(all of mask work).

    ``terms`` holds ``(coeff, mask)`` pairs with integer coefficients (signs
    merged over identical unions, zero coefficients dropped), in deterministic
    order (set size, then mask value).
    """

    n: int
    terms: tuple[tuple[int, int], ...]

    @property
    def term_sets(self):
        """Terms with the component sets spelled out as index tuples."""
        return tuple((c, _indices(m)) for c, m in self.terms)


@dataclass(frozen=True)
class SystemStructure:
    """A validated coherent structure: component count and minimal path sets."""

    n: int
    path_masks: tuple[int, ...]

    @property
    def paths(self):
        return tuple(_indices(m) for m in self.path_masks)

    @property
    def r(self):
        return len(self.path_masks)

    def lifetime(self, times):
        """System lifetime from component lifetimes.

        ``times`` is an array whose last axis has length n; returns max over
        path sets of the min inside each set, elementwise over leading axes.
        """
        arr = np.asarray(times, dtype=float)
        if arr.shape[-1:] != (self.n,):
            raise LengthMismatch(
                f"expected {self.n} component times, got shape {arr.shape}"
            )
        mins = [arr[..., [j - 1 for j in _indices(m)]].min(axis=-1)
                for m in self.path_masks]
        return np.max(np.stack(mins, axis=0), axis=0)

    def inclusion_exclusion(self) -> SignedTermList:
        """Signed expansion of P(T > t) over unions of path sets.

        P(T > t) = sum over nonempty subfamilies S of (-1)^(|S|+1)
        P(all components in union(S) survive t).  Identical unions are merged.
        """
        if self.r > MAX_PATHS:
            raise TermLimitExceeded(
                f"{self.r} path sets exceed the enumeration cap of {MAX_PATHS}"
            )
        acc: dict[int, int] = {}
        masks = self.path_masks
        for k in range(1, len(masks) + 1):
            sign = 1 if k % 2 == 1 else -1
            for combo in combinations(masks, k):
                union = 0
                for m in combo:
                    union |= m
                acc[union] = acc.get(union, 0) + sign
        terms = tuple(
            (c, m)
            for m, c in sorted(acc.items(), key=lambda kv: (bin(kv[0]).count("1"), kv[0]))
            if c != 0
        )
        return SignedTermList(self.n, terms)


def validate_structure(n, paths) -> SystemStructure:
    """Validate and normalize minimal path sets; raise on any defect.

    Normalization: indices inside a path are deduplicated and sorted, and
    repeated identical path sets are merged.  A path set strictly contained
    in another is an error (the family would not be minimal); so is a
    component that appears in no path set.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise IndexOutOfRange(f"component count must be a positive integer, got {n!r}")
    if n > MAX_COMPONENTS:
        raise IndexOutOfRange(f"n={n} exceeds the {MAX_COMPONENTS}-component cap")
    paths = list(paths)
    if not paths:
        raise EmptyPaths("at least one path set is required")
    masks = []
    for p in paths:
        p = list(p)
        if not p:
            raise EmptyPaths("path sets must be nonempty")
        for j in p:
            if not isinstance(j, (int, np.integer)) or j < 1 or j > n:
                raise IndexOutOfRange(f"component index {j!r} outside 1..{n}")
        m = _mask(p)
        if m not in masks:
            masks.append(m)
    for a, b in combinations(masks, 2):
        if a & b == a or a & b == b:
            raise NonMinimalPath(
                f"path set {_indices(min(a, b, key=lambda x: bin(x).count('1')))} "
                "is contained in another"
            )
    covered = 0
    for m in masks:
        covered |= m
    if covered != (1 << n) - 1:
        missing = _indices(((1 << n) - 1) ^ covered)
        raise UncoveredComponent(f"components {missing} appear in no path set")
    return SystemStructure(n, tuple(sorted(masks)))


def series(n) -> SystemStructure:
    """All components in one path set: T = min of all lifetimes."""
    return validate_structure(n, [list(range(1, n + 1))])


def parallel(n) -> SystemStructure:
    """Each component its own path set: T = max of all lifetimes."""
    return validate_structure(n, [[j] for j in range(1, n + 1)])


def k_out_of_n(k, n) -> SystemStructure:
    """Works while at least k of n components work (path sets = k-subsets)."""
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"need 1 <= k <= n, got k={k}, n={n}")
    return validate_structure(n, [list(c) for c in combinations(range(1, n + 1), k)])
