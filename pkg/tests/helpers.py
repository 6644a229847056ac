"""Representations built directly in code, independent of the bundled fixture files."""

import numpy as np

from monicrep.algebra import field_algebra, truncated_polynomial
from monicrep.exactlin import GF2, Field, Matrix
from monicrep.homological import simple_module
from monicrep.modules import AModule
from monicrep.quiver import Quiver
from monicrep.repmod import Representation

GF3 = Field(3)

A = truncated_polynomial(GF2, 2)
K = simple_module(A, 0)
V_QUIVER = Quiver.build(["1", "2", "3"], [("alpha", "2", "1"), ("beta", "3", "1")])

QUIVERS = {
    "A2": Quiver.linear(2),
    "A3": Quiver.linear(3),
    "V": V_QUIVER,
    "kronecker": Quiver.build(["1", "2"], [("a", "2", "1"), ("b", "2", "1")]),
    "D4": Quiver.build(["1", "2", "3", "4"], [("a", "2", "1"), ("b", "3", "1"), ("c", "4", "1")]),
}


def example_x() -> Representation:
    """X1 = A + k in the basis (1, x, s); alpha = (0, id), beta = (sigma, id)."""
    x1 = AModule(A, np.array([np.eye(3, dtype=np.int64), [[0, 0, 0], [1, 0, 0], [0, 0, 0]]]))
    return Representation(A, V_QUIVER, [x1, K, K], {
        "alpha": Matrix(GF2, [[0], [0], [1]]),
        "beta": Matrix(GF2, [[0], [1], [1]]),
    })


def example_y() -> Representation:
    """Y1 = A, Y2 = Y3 = k, both arrows the socle inclusion."""
    sigma = Matrix(GF2, [[0], [1]])
    return Representation(A, V_QUIVER, [AModule.regular(A), K, K], {"alpha": sigma, "beta": sigma})


def k_algebra(field):
    return field_algebra(field)
