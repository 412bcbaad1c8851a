"""Affine normalization h(x) -> Dh(x0)^-1 (h(x + x0) - h(x0))."""

# Standard Imports
import logging

# ThirdParty Imports
import numpy as np
from scipy import linalg

# Internal Imports
from nearid.maps.base import SmoothMap
from nearid.maps.families import AffineMap, IdentityMap

logger = logging.getLogger(__name__)


class NormalizedMap(SmoothMap):
    """The conjugate of a map that fixes the origin with identity Jacobian there.

    With D0 = Dh(x0) the normalized map is
    h~(x) = D0^-1 (h(x + x0) - h(x0)) and
    h(x) = D0 h~(x - x0) + h(x0).

    Attributes:
        base (SmoothMap): The original map.
        D0 (ndarray): Dh(x0).
        h0 (ndarray): h(x0).
    """

    family = "normalized"
    jacobian_rule = "analytic"

    def __init__(self, base):
        base.check_orientation()
        D0 = np.array(base.jacobian(base.x0), dtype=float)
        h0 = np.array(base.eval(base.x0), dtype=float)
        inv_norm = 1.0 / linalg.svdvals(D0)[-1]
        super().__init__(
            base.d,
            alpha=inv_norm * base.alpha,
            M=base.M * np.linalg.norm(D0, 2),
            R=base.R + np.linalg.norm(base.x0),
            lipschitz=None if base.lipschitz is None else inv_norm * base.lipschitz,
            constants_source=base.constants_source,
        )
        D0.setflags(write=False)
        h0.setflags(write=False)
        self.base = base
        self.D0 = D0
        self.h0 = h0
        self._inv_norm = inv_norm
        self._lu = linalg.lu_factor(D0)

    def _forward(self, X):
        Y = self.base._forward(X + self.base.x0) - self.h0
        return linalg.lu_solve(self._lu, Y.T).T

    def _jacobian(self, X):
        J = self.base.jacobian(X + self.base.x0)
        return np.stack([linalg.lu_solve(self._lu, Jk) for Jk in J])

    def _inverse(self, Y, tol, max_iter):
        target = Y @ self.D0.T + self.h0
        X = self.base._inverse(target, tol / self._inv_norm, max_iter)
        return X - self.base.x0

    def to_spec(self):
        spec = self.base.to_spec()
        spec["normalized"] = True
        return spec


def normalize(smooth_map):
    """Conjugates a map so that it fixes the origin with Jacobian I there.

    Affine maps normalize to the exact identity.

    Args:
        smooth_map (SmoothMap): A map with det(Dh(x0)) > 0.

    Returns:
        A SmoothMap h~ with h~(0) = 0 and Dh~(0) = I. Its constants are
        alpha |D0^-1|, M |D0| and radius R + |x0|.

    Raises:
        OrientationError: Dh(x0) is singular or reverses orientation.
    """
    smooth_map.check_orientation()
    R = smooth_map.R + float(np.linalg.norm(smooth_map.x0))
    if isinstance(smooth_map, AffineMap):
        logger.debug("Affine map normalizes to the identity on radius %.4g.", R)
        return IdentityMap(smooth_map.d, R=R)
    return NormalizedMap(smooth_map)
