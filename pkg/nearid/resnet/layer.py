"""A single residual block h(x) = A tanh(Bx) + x."""

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.maps.base import Map


class ResidualLayer(Map):
    """h(x) = A tanh(B x) + x as a map on R^d."""

    kind = "residual"
    jacobian_rule = "analytic"

    def __init__(self, A, B):
        A = np.array(A, dtype=float, ndmin=2)
        B = np.array(B, dtype=float, ndmin=2)
        if A.shape != B.T.shape:
            raise err.DimensionError(
                "A must be (d, k) and B (k, d); got {} and {}.".format(A.shape, B.shape)
            )
        super().__init__(A.shape[0])
        A.setflags(write=False)
        B.setflags(write=False)
        self.A = A
        self.B = B

    @property
    def is_identity(self):
        return not self.A.any() or not self.B.any()

    @property
    def deviation_bound(self):
        return layer_deviation_bound(self.A, self.B)

    def _forward(self, X):
        return X + np.tanh(X @ self.B.T) @ self.A.T

    def _jacobian(self, X):
        S = 1.0 - np.tanh(X @ self.B.T) ** 2
        return np.eye(self.d) + np.einsum("ik,nk,kj->nij", self.A, S, self.B)

    def describe(self):
        return {"kind": self.kind, "deviation_bound": self.deviation_bound}


def layer_deviation_bound(A, B):
    """Returns |A|_2 |B|_2, an upper bound on |h - Id|_L for h(x) = A tanh(Bx) + x."""
    A, B = np.atleast_2d(A), np.atleast_2d(B)
    return float(np.linalg.norm(A, 2) * np.linalg.norm(B, 2))
