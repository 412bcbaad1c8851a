"""Functions known only at finite sample points."""

# ThirdParty Imports
import numpy as np
from scipy.spatial import cKDTree

# Internal Imports
import nearid.errors as err
from nearid.maps.base import Map


class SampledFunction(object):
    """Values v_j at distinct base points p_j, nearest-neighbour elsewhere.

    Attributes:
        points (ndarray): Base points, shape (n, d).
        values (ndarray): Values, shape (n, d_out).
        interpolation (str): Always 'nearest'.

    Raises:
        DatasetError: The points are empty, repeated or do not match the values.
    """

    interpolation = "nearest"

    def __init__(self, points, values):
        P = np.atleast_2d(np.array(points, dtype=float))
        V = np.atleast_2d(np.array(values, dtype=float))
        if P.size == 0:
            raise err.DatasetError("A sampled function needs at least one point.")
        if P.shape[0] != V.shape[0]:
            raise err.DatasetError(
                "Got {} points but {} values.".format(P.shape[0], V.shape[0])
            )
        if np.unique(P, axis=0).shape[0] != P.shape[0]:
            raise err.DatasetError("Base points of a sampled function must be distinct.")
        P.setflags(write=False)
        V.setflags(write=False)
        self.points = P
        self.values = V
        self._tree = cKDTree(P)

    def __len__(self):
        return self.points.shape[0]

    def __call__(self, x):
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        _, idx = self._tree.query(np.atleast_2d(X))
        out = self.values[idx]
        return out[0] if single else out

    def is_zero(self):
        return not self.values.any()

    def induced_norm(self, floor):
        """Returns max |v_j| / |p_j| over base points with |p_j| >= floor.

        Raises:
            DatasetError: No base point reaches the floor.
        """
        radius = np.linalg.norm(self.points, axis=1)
        keep = radius >= floor
        if not keep.any():
            raise err.DatasetError("No sample point has norm at least {}.".format(floor))
        return float((np.linalg.norm(self.values[keep], axis=1) / radius[keep]).max())

    def scaled(self, factor):
        return SampledFunction(self.points, factor * self.values)


class SampledLayer(Map):
    """A layer given by its values on its input cloud.

    It has no Jacobian; off-sample inputs take the value of the nearest
    sample point.
    """

    kind = "sampled"
    jacobian_rule = None

    def __init__(self, function):
        super().__init__(function.points.shape[1])
        self.function = function

    def _forward(self, X):
        return self.function(X)

    def _inverse(self, Y, tol, max_iter):
        raise err.NearIdError("A sampled layer has no inverse.")

    def describe(self):
        return {"kind": self.kind, "n_points": len(self.function)}
