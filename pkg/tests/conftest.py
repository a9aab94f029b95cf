from pathlib import Path

import numpy as np
import pytest

from conekit import automaton as au
from conekit import cone as cn
from conekit.verify import SwitchedSystem

DATA = Path(__file__).parent / "data"

A0 = np.diag([5.0, 1.0])
A1 = np.diag([1.0, 3.0])
TRI_A1 = np.array([[2.0, 0.0], [1.65, 0.5]])
TRI_A2 = np.array([[2.0, 0.0], [1.3636, 0.5]])
ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])
B = np.array([[2.0, 1.0], [1.0, 2.0]])


def birkhoff_orthant(x, y):
    """Independent oracle: log max_ij (x_i y_j)/(x_j y_i) on the open orthant."""
    r = np.log(x) - np.log(y)
    return float(r.max() - r.min())


def random_cone_rays(rng, n, extra=3, spread=0.5):
    """Rays scattered around the diagonal; all on the positive side of it."""
    c = np.ones(n) / np.sqrt(n)
    while True:
        R = c + spread * rng.standard_normal((n + extra, n))
        R = R[R @ c > 0.05]
        if len(R) >= n and np.linalg.matrix_rank(R) == n:
            return R


def interior_point(K, rng):
    return rng.uniform(0.1, 1.0, size=len(K.generators)) @ K.generators


@pytest.fixture
def dp_system():
    return SwitchedSystem({"0": A0, "1": A1})


@pytest.fixture
def dp_automaton():
    return au.validate(
        {
            "states": ["q0", "q1"],
            "alphabet": ["0", "1"],
            "transitions": [["q0", "0", "q1"], ["q1", "0", "q1"], ["q1", "1", "q0"]],
        }
    )


@pytest.fixture
def K0():
    return cn.from_generators([[1, 1], [1, -1]])


@pytest.fixture
def K1():
    return cn.from_generators([[4, 1], [4, -1]])


@pytest.fixture
def dp_cones(K0, K1):
    return {"q0": K0, "q1": K1}


@pytest.fixture
def orthant2():
    return cn.from_generators(np.eye(2))
