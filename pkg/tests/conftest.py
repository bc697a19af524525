"""Shared fixtures: the reference designs used throughout the tests.

Naming: `relay` is the three-component system that works while component 1
or the series pair {2,3} works (T = max(X1, min(X2,X3))); `gate` is its
dual, component 1 in series with the redundant pair {2,3}
(T = min(X1, max(X2,X3))).  Both are observed at the first component
failure.  `parallel3` systems are additionally observed at the second
failure for the two-failure conditioning mode.
"""

import numpy as np
import pytest

from syspredict import ClaytonPairCopula, Exponential, FGMCopula, ProductCopula
from syspredict.structure import k_out_of_n, parallel, series, validate_structure


@pytest.fixture(scope="session")
def exp1():
    return Exponential(1.0)


@pytest.fixture(scope="session")
def first3():
    # first component failure of three = series system
    return series(3)


@pytest.fixture(scope="session")
def relay():
    return validate_structure(3, [[1], [2, 3]])


@pytest.fixture(scope="session")
def gate():
    return validate_structure(3, [[1, 2], [1, 3]])


@pytest.fixture(scope="session")
def parallel3():
    return parallel(3)


@pytest.fixture(scope="session")
def two_of_three():
    return k_out_of_n(2, 3)


@pytest.fixture(scope="session")
def product3():
    return ProductCopula(3)


@pytest.fixture(scope="session")
def fgm1():
    return FGMCopula(theta=1.0, n=3)


@pytest.fixture(scope="session")
def clayton23():
    return ClaytonPairCopula(pair=(2, 3), theta=1.0, n=3)


@pytest.fixture
def interior_grid():
    """Deterministic interior (u, v) pairs with both orderings present."""
    rng = np.random.default_rng(20240815)
    u = rng.uniform(0.02, 0.98, 250)
    v = rng.uniform(0.02, 0.98, 250)
    return u, v
