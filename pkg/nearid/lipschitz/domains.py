"""Sampling domains for certification: a Euclidean ball or a finite point cloud."""

# ThirdParty Imports
import numpy as np
from scipy.spatial import cKDTree

# Internal Imports
import nearid.errors as err
from nearid.maps.sampling import sample_ball, sample_sphere

DEFAULT_GRID = 512


class Ball(object):
    """The closed ball of radius R about the origin of R^d."""

    kind = "ball"

    def __init__(self, R, d):
        if not R > 0 or int(d) < 1:
            raise err.ConfigError("A ball needs R > 0 and d >= 1, got R={}, d={}.".format(R, d))
        self.R = float(R)
        self.d = int(d)

    def sample(self, n, rng):
        return sample_ball(n, self.d, self.R, seed=rng)

    def grid(self, n_grid=None, seed=0):
        """Quasi-random grid used for the Jacobian estimate."""
        return sample_ball(n_grid or DEFAULT_GRID, self.d, self.R, seed=seed, method="halton")

    def neighbour_pairs(self):
        return None

    def describe(self):
        return {"kind": self.kind, "R": self.R, "d": self.d}


class Cloud(object):
    """A finite sample of a domain, such as the image of a ball under a layer prefix.

    Raises:
        DatasetError: The cloud is empty.
    """

    kind = "cloud"

    def __init__(self, points):
        P = np.atleast_2d(np.array(points, dtype=float))
        if P.size == 0 or P.ndim != 2:
            raise err.DatasetError("A domain cloud needs at least one point.")
        P.setflags(write=False)
        self.points = P
        self.d = P.shape[1]
        radius = float(np.linalg.norm(P, axis=1).max())
        self.R = radius if radius > 0 else 1.0
        self._tree = None

    def __len__(self):
        return self.points.shape[0]

    def sample(self, n, rng):
        return self.points[rng.integers(0, len(self), size=n)]

    def grid(self, n_grid=None, seed=0):
        if n_grid is None or n_grid >= len(self):
            return self.points
        rng = np.random.default_rng(seed)
        return self.points[np.sort(rng.choice(len(self), size=n_grid, replace=False))]

    def neighbour_pairs(self):
        """Returns each point paired with its nearest distinct neighbour."""
        if len(self) < 2:
            return None
        if self._tree is None:
            self._tree = cKDTree(self.points)
        dist, idx = self._tree.query(self.points, k=2)
        keep = dist[:, 1] > 0
        return self.points[keep], self.points[idx[keep, 1]]

    def describe(self):
        return {"kind": self.kind, "n_points": len(self), "R": self.R, "d": self.d}


def perturbed(X, scale, rng):
    """Returns X + delta with |delta| = scale in uniformly random directions."""
    return X + scale * sample_sphere(X.shape[0], X.shape[1], seed=rng)
