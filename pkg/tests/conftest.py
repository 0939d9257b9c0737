"""Shared fixtures for the phmaps test suite."""
from fractions import Fraction

import pytest

from phmaps.construct import HarmonicCandidate, build
from phmaps.numeric import FDConfig
from phmaps.polyalg import Component, variable


@pytest.fixture(scope="session")
def plane_candidate():
    """(x1^2 - x2^2, 2 x1 x2)."""
    return build(2, "hurwitz")


@pytest.fixture(scope="session")
def linear_candidate():
    """The identity map of R^3, admissible with k = 1."""
    comps = tuple(Component.make(variable(3, i)) for i in range(3))
    return HarmonicCandidate(3, 3, 1, comps, "identity(n=3)")


@pytest.fixture(scope="session")
def reference_n3():
    x = [variable(3, i) for i in range(3)]
    half = Fraction(1, 2)
    return HarmonicCandidate.from_components([
        Component.make(x[0] ** 2 - x[1] ** 2, half, 3),
        Component.make(x[0] ** 2 + x[1] ** 2 - x[2] ** 2 * 2, half),
        Component.make(x[0] * x[1] * 2, half, 3),
        Component.make(x[0] * x[2] * 2, half, 3),
        Component.make(x[1] * x[2] * 2, half, 3),
    ], k=2, provenance="reference(n=3)")


@pytest.fixture(scope="session")
def reference_n4():
    x = [variable(4, i) for i in range(4)]
    return HarmonicCandidate.from_components([
        Component.make(x[0] ** 2 + x[1] ** 2 - x[2] ** 2 - x[3] ** 2),
        Component.make((x[0] * x[2] + x[1] * x[3]) * 2),
        Component.make((x[0] * x[3] - x[1] * x[2]) * 2),
    ], k=2, provenance="reference(n=4)")


@pytest.fixture(scope="session")
def reference_n5():
    x = [variable(5, i) for i in range(5)]
    quarter = Fraction(1, 4)
    comps = [
        Component.make(x[0] ** 2 + x[1] ** 2 - x[2] ** 2 - x[3] ** 2, quarter, 15),
        Component.make(x[0] ** 2 + x[1] ** 2 + x[2] ** 2 + x[3] ** 2 - x[4] ** 2 * 4, quarter),
        Component.make((x[0] * x[2] + x[1] * x[3]) * 2, quarter, 15),
        Component.make((x[0] * x[3] - x[1] * x[2]) * 2, quarter, 15),
    ]
    comps += [Component.make(x[i] * x[4] * 2, quarter, 10) for i in range(4)]
    return HarmonicCandidate.from_components(comps, k=2, provenance="reference(n=5)")


@pytest.fixture
def fd_config():
    return FDConfig(seed=42)


@pytest.fixture
def accurate_fd_config():
    """Extrapolated plain gradients and a finer outer step, for checks near rounding noise."""
    return FDConfig(step=1e-3, outer_step=1e-3, richardson=True, seed=42)
