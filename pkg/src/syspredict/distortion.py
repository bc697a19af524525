"""Distortion representations of system-lifetime laws.

Write q-bar for the univariate distortion of a system lifetime T with
minimal path sets P_1..P_r under survival copula C-hat:

    P(T > t) = q-bar(F-bar(t)),
    q-bar(u) = sum over nonempty subfamilies S of (-1)^(|S|+1)
               C-hat(u at union(S), 1 elsewhere).

For two ordered lifetimes T1 <= T built on the same components, the joint
survival P(T1 > x, T > y) is a bivariate distortion D-hat(u, v) of
(u, v) = (F-bar(x), F-bar(y)).  On the ordered region v <= u (that is,
x <= y) it expands over pairs of subfamilies: coordinates in P = union(S)
carry v, coordinates in union(S*) \\ P carry u, the rest are pinned to 1.
On v > u the joint event degenerates to {T1 > x}, so D-hat(u, v) =
q-bar_T1(u).  The first partial d1 = dD-hat/du feeds the conditional laws;
its limit as v -> 0+ captures any defect mass, and the v > u branch
evaluated at v = 1 is the density transform q-bar_T1'(u) that normalizes
them.  d1 has a kink across u = v, so the evaluation side at equality is
explicit (`side="ordered"` for v <= u, the default, or `side="tail"`).

With three ordered lifetimes T1 <= T2 <= T the same expansion runs over
triples of subfamilies on the ordered region w <= v <= u; each coordinate
takes the variable of the innermost union containing it (w for the system,
then v, then u, else 1).  The mixed partial d12 drives conditioning on the
first two failure times; its normalizing denominator is the mixed partial
of the (T1, T2) bivariate distortion, exposed as `d12_boundary`.

Expansions are merged (equal coordinate patterns, summed coefficients,
zeros dropped) and capped at 2^20 raw terms.
"""

from __future__ import annotations

import numpy as np

from .copula import SurvivalCopula
from .errors import DimensionMismatch, RegionError, TermLimitExceeded
from .structure import SystemStructure

TERM_BUDGET = 1 << 20


def _subset_unions(masks):
    """Union and sign for every nonempty subfamily, via bit-index DP."""
    r = len(masks)
    unions = [0] * (1 << r)
    for s in range(1, 1 << r):
        low = s & -s
        unions[s] = unions[s ^ low] | masks[low.bit_length() - 1]
    signs = [1 if bin(s).count("1") % 2 else -1 for s in range(1 << r)]
    return unions, signs


def _ids(mask):
    return tuple(i for i in range(64) if mask >> i & 1)


def _check_same_n(copula, *structures):
    n = copula.n
    for s in structures:
        if s.n != n:
            raise DimensionMismatch(
                f"structure has {s.n} components but the copula has {n}"
            )


def _merge(acc):
    # deterministic order: coordinate pattern sorted, zero coefficients dropped
    return tuple(
        (coeff, key) for key, coeff in sorted(acc.items()) if coeff != 0
    )


class _TermSum:
    """Signed sum of copula slices sharing a variable layout."""

    def __init__(self, copula: SurvivalCopula, terms):
        # terms: ((coeff, (mask_per_variable, ...)), ...); variables ordered
        # innermost-first when evaluating
        self.copula = copula
        self.n = copula.n
        self._terms = tuple(
            (coeff, tuple(_ids(m) for m in masks)) for coeff, masks in terms
        )

    def _points(self, values):
        shape = np.broadcast_shapes(*(np.shape(v) for v in values))
        vals = [np.broadcast_to(np.asarray(v), shape) for v in values]
        return shape, vals

    def value(self, *values):
        shape, vals = self._points(values)
        total = np.zeros(shape)
        for coeff, ids in self._terms:
            point = np.ones(shape + (self.n,))
            for axis_ids, val in zip(ids, vals):
                for i in axis_ids:
                    point[..., i] = val
            total += coeff * self.copula.eval(point)
        return total

    def d_var(self, var, *values):
        """Sum of first partials over the coordinates carrying variable `var`."""
        shape, vals = self._points(values)
        total = np.zeros(shape)
        for coeff, ids in self._terms:
            if not ids[var]:
                continue
            point = np.ones(shape + (self.n,))
            for axis_ids, val in zip(ids, vals):
                for i in axis_ids:
                    point[..., i] = val
            for i in ids[var]:
                total += coeff * self.copula.partial((i + 1,), point)
        return total

    def d_mixed(self, var_a, var_b, *values):
        """Sum of mixed partials over coordinate pairs carrying two variables."""
        shape, vals = self._points(values)
        total = np.zeros(shape)
        for coeff, ids in self._terms:
            if not ids[var_a] or not ids[var_b]:
                continue
            point = np.ones(shape + (self.n,))
            for axis_ids, val in zip(ids, vals):
                for i in axis_ids:
                    point[..., i] = val
            for i in ids[var_a]:
                for j in ids[var_b]:
                    total += coeff * self.copula.partial((i + 1, j + 1), point)
        return total

    @property
    def terms(self):
        """(coeff, per-variable 1-based index tuples) for inspection."""
        return tuple(
            (coeff, tuple(tuple(i + 1 for i in axis) for axis in ids))
            for coeff, ids in self._terms
        )


class UnivariateDistortion:
    """q-bar for one system lifetime: P(T > t) = q-bar(F-bar(t))."""

    def __init__(self, structure: SystemStructure, copula: SurvivalCopula):
        _check_same_n(copula, structure)
        self.structure = structure
        self.copula = copula
        expansion = structure.inclusion_exclusion()
        self._sum = _TermSum(copula, tuple((c, (m,)) for c, m in expansion.terms))

    @property
    def terms(self):
        return self._sum.terms

    def value(self, u):
        return self._sum.value(u)

    def derivative(self, u):
        return self._sum.d_var(0, u)


class BivariateDistortion:
    """D-hat(u, v) for an ordered pair T1 <= T of system lifetimes."""

    def __init__(self, first, system, copula, mode="strict"):
        _check_same_n(copula, first, system)
        if mode not in ("strict", "weak"):
            raise RegionError(f"mode must be 'strict' or 'weak', got {mode!r}")
        r_first, r_sys = first.r, system.r
        if (1 << (r_first + r_sys)) > TERM_BUDGET:
            raise TermLimitExceeded(
                f"2^{r_first + r_sys} raw terms exceed the 2^20 budget"
            )
        self.first = first
        self.system = system
        self.copula = copula
        self.n = copula.n
        self.mode = mode

        sys_unions, sys_signs = _subset_unions(system.path_masks)
        first_unions, first_signs = _subset_unions(first.path_masks)
        acc = {}
        for s in range(1, 1 << r_sys):
            p = sys_unions[s]
            sgn = sys_signs[s]
            for s1 in range(1, 1 << r_first):
                key = (first_unions[s1] & ~p, p)  # (mask_u, mask_v)
                acc[key] = acc.get(key, 0) + sgn * first_signs[s1]
        self._ordered = _TermSum(copula, _merge(acc))
        self._tail = UnivariateDistortion(first, copula)

    @property
    def terms(self):
        """Ordered-region terms as (coeff, (u indices, v indices))."""
        return self._ordered.terms

    @property
    def tail_terms(self):
        return self._tail.terms

    def value(self, u, v):
        u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
        return np.where(v <= u, self._ordered.value(u, v), self._tail.value(u))

    def d1(self, u, v, side="ordered"):
        """dD-hat/du; `side` picks the branch on the kink u == v."""
        if side not in ("ordered", "tail"):
            raise RegionError(f"side must be 'ordered' or 'tail', got {side!r}")
        u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
        ordered = self._ordered.d_var(0, u, v)
        tail = self._tail.derivative(u)
        on_ordered = (v <= u) if side == "ordered" else (v < u)
        return np.where(on_ordered, ordered, tail)

    def d1_at_zero_plus(self, u):
        """Term-by-term limit of d1(u, v) as v -> 0+ (defect mass at infinity)."""
        u = np.asarray(u, dtype=float)
        return self._ordered.d_var(0, u, np.zeros_like(u))

    def d12(self, u, v):
        """Mixed partial on the ordered region (0 beyond it)."""
        u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
        return np.where(v <= u, self._ordered.d_mixed(0, 1, u, v), 0.0)


class TrivariateDistortion:
    """D-hat(u, v, w) for ordered lifetimes T1 <= T2 <= T."""

    def __init__(self, first, second, system, copula):
        _check_same_n(copula, first, second, system)
        r1, r2, r_sys = first.r, second.r, system.r
        if (1 << (r1 + r2 + r_sys)) > TERM_BUDGET:
            raise TermLimitExceeded(
                f"2^{r1 + r2 + r_sys} raw terms exceed the 2^20 budget"
            )
        self.first = first
        self.second = second
        self.system = system
        self.copula = copula
        self.n = copula.n

        sys_unions, sys_signs = _subset_unions(system.path_masks)
        sec_unions, sec_signs = _subset_unions(second.path_masks)
        fir_unions, fir_signs = _subset_unions(first.path_masks)
        acc = {}
        for s in range(1, 1 << r_sys):
            p = sys_unions[s]
            sgn_s = sys_signs[s]
            for s2 in range(1, 1 << r2):
                p2 = sec_unions[s2]
                sgn_s2 = sgn_s * sec_signs[s2]
                mask_v = p2 & ~p
                shadow = ~p2 & ~p
                for s1 in range(1, 1 << r1):
                    key = (fir_unions[s1] & shadow, mask_v, p)  # (u, v, w) masks
                    acc[key] = acc.get(key, 0) + sgn_s2 * fir_signs[s1]
        self._ordered = _TermSum(copula, _merge(acc))
        # w -> 1 boundary: the (T1, T2) joint law
        self._pair = BivariateDistortion(first, second, copula, mode="weak")

    @property
    def terms(self):
        """Ordered-region terms as (coeff, (u indices, v indices, w indices))."""
        return self._ordered.terms

    def value(self, u, v, w):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        if np.any(v > u) or np.any(w > v):
            raise RegionError("value requires the ordered region u >= v >= w")
        return self._ordered.value(u, v, w)

    def boundary_value(self, u, v):
        """D-hat(u, v, 1): the (T1, T2) bivariate distortion."""
        return self._pair.value(u, v)

    def d12(self, u, v, w):
        """Mixed partial in (u, v) on the ordered region."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        if np.any(v > u) or np.any(w > v):
            raise RegionError("d12 requires the ordered region u >= v >= w")
        return self._ordered.d_mixed(0, 1, u, v, w)

    def d12_at_zero_plus(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return self._ordered.d_mixed(0, 1, u, v, np.zeros(np.broadcast_shapes(u.shape, v.shape)))

    def d12_boundary(self, u, v):
        """Mixed partial of the w -> 1 boundary slice (the (T1,T2) law)."""
        return self._pair.d12(u, v)


def build_univariate(structure, copula) -> UnivariateDistortion:
    """Distortion of one system lifetime."""
    return UnivariateDistortion(structure, copula)


def build_bivariate(first, system, copula, mode="strict") -> BivariateDistortion:
    """Joint distortion of (T1, T); `mode` records whether T1 < T holds a.s.

    The construction is identical for both modes; the flag documents the
    caller's ordering contract (checked post hoc by the Monte Carlo ordering
    report, since it is not decidable from the path sets alone).
    """
    return BivariateDistortion(first, system, copula, mode=mode)


def build_trivariate(first, second, system, copula) -> TrivariateDistortion:
    """Joint distortion of (T1, T2, T) for strictly ordered failure times."""
    return TrivariateDistortion(first, second, system, copula)
