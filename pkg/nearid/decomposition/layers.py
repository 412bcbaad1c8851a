"""Layers of a decomposition: translations, linear factors and nonlinear splits."""

# ThirdParty Imports
import numpy as np
from scipy import linalg

# Internal Imports
import nearid.errors as err
from nearid.maps.base import Map

LAYER_TOL = 1e-12


class Translation(Map):
    """x -> x + shift."""

    kind = "translation"
    jacobian_rule = "analytic"

    def __init__(self, shift):
        shift = np.array(shift, dtype=float).reshape(-1)
        super().__init__(shift.shape[0])
        shift.setflags(write=False)
        self.shift = shift

    @property
    def is_identity(self):
        return not self.shift.any()

    def _forward(self, X):
        return X + self.shift

    def _jacobian(self, X):
        return np.broadcast_to(np.eye(self.d), (X.shape[0], self.d, self.d)).copy()

    def _inverse(self, Y, tol, max_iter):
        return Y - self.shift

    def describe(self):
        return {"kind": self.kind, "shift": self.shift.tolist()}


class LinearLayer(Map):
    """x -> (I + A) x."""

    kind = "linear"
    jacobian_rule = "analytic"

    def __init__(self, A):
        A = np.atleast_2d(np.array(A, dtype=float))
        super().__init__(A.shape[0])
        A.setflags(write=False)
        self.A = A
        self.matrix = np.eye(self.d) + A
        self._lu = linalg.lu_factor(self.matrix)

    @property
    def is_identity(self):
        return not self.A.any()

    @property
    def deviation(self):
        return float(np.linalg.norm(self.A, 2))

    def _forward(self, X):
        return X @ self.matrix.T

    def _jacobian(self, X):
        return np.broadcast_to(self.matrix, (X.shape[0], self.d, self.d)).copy()

    def _inverse(self, Y, tol, max_iter):
        return linalg.lu_solve(self._lu, Y.T).T

    def describe(self):
        return {"kind": self.kind, "norm": self.deviation}


class NonlinearLayer(Map):
    """Layer i of the split h = h_m o ... o h_1 of a normalized map h.

    With g_i(x) = h(a_i x) / a_i the layer is h_1 = g_1 and
    h_i = g_i o g_{i-1}^-1 for i > 1, so the layers telescope to g_m = h.

    Attributes:
        index (int): The 1-based layer index i.
        base (SmoothMap): The normalized map h.
        a_prev (float): a_{i-1}, or None for the first layer.
        a_i (float): a_i.
        tol (float): Residual tolerance of each inner inversion.
    """

    kind = "nonlinear"
    jacobian_rule = "analytic"

    def __init__(self, index, base, a_prev, a_i, tol=LAYER_TOL):
        super().__init__(base.d)
        self.index = int(index)
        self.base = base
        self.a_prev = None if a_prev is None else float(a_prev)
        self.a_i = float(a_i)
        self.tol = float(tol)

    @property
    def is_identity(self):
        return self.base.is_identity

    def _g_inverse(self, Y, a):
        # h(a u) = a y solved to tol * a, so g_a(u) = y to tol
        try:
            return self.base._inverse(a * Y, self.tol * a, 100) / a
        except err.InversionError as e:
            raise err.LayerError(
                "Inversion inside the layer failed: {}".format(e), self.index
            )

    def _forward(self, X):
        if self.is_identity:
            return np.array(X, dtype=float)
        U = X if self.a_prev is None else self._g_inverse(X, self.a_prev)
        return self.base._forward(self.a_i * U) / self.a_i

    def _jacobian(self, X):
        if self.is_identity:
            return np.broadcast_to(np.eye(self.d), (X.shape[0], self.d, self.d)).copy()
        if self.a_prev is None:
            return self.base.jacobian(self.a_i * X)
        U = self._g_inverse(X, self.a_prev)
        J_out = self.base.jacobian(self.a_i * U)
        J_in = self.base.jacobian(self.a_prev * U)
        # J_out @ inv(J_in), solved on the transposes
        return np.swapaxes(
            np.linalg.solve(np.swapaxes(J_in, 1, 2), np.swapaxes(J_out, 1, 2)), 1, 2
        )

    def _inverse(self, Y, tol, max_iter):
        if self.is_identity:
            return np.array(Y, dtype=float)
        V = self._g_inverse(Y, self.a_i)
        if self.a_prev is None:
            return V
        return self.base._forward(self.a_prev * V) / self.a_prev

    def describe(self):
        return {
            "kind": self.kind,
            "index": self.index,
            "a_prev": self.a_prev,
            "a_i": self.a_i,
        }
