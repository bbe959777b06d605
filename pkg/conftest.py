"""
Shared lattice fixtures for the test suite
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from lattice_core import Lattice  # noqa: E402


@pytest.fixture
def trivial_lattice():
    return Lattice([])


@pytest.fixture
def rank_one():
    """[[2]]: A = Z/2 with Q(1/2) = 1/4."""
    return Lattice([[2]])


@pytest.fixture
def split_two():
    """diag(2, -2): A = (Z/2)^2 with one non-zero isotropic element."""
    return Lattice([[2, 0], [0, -2]])


@pytest.fixture
def hyperbolic_two():
    return Lattice([[0, 2], [2, 0]])


@pytest.fixture
def hyperbolic_three():
    """U(3) = [[0, 3], [3, 0]], signature (1, 1), A = (Z/3)^2."""
    return Lattice([[0, 3], [3, 0]])


@pytest.fixture
def hyperbolic_five():
    return Lattice([[0, 5], [5, 0]])


@pytest.fixture
def corpus(rank_one, split_two, hyperbolic_two, hyperbolic_three):
    return [rank_one, split_two, hyperbolic_two, hyperbolic_three]
