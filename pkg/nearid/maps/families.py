"""Built-in smooth invertible map families with exact inverses and known constants."""

# Standard Imports
import math

# ThirdParty Imports
import numpy as np
from scipy import linalg

# Internal Imports
import nearid.errors as err
from nearid.maps.base import SmoothMap, newton_inverse, scalar_newton

# sup |d/dz sech^2(z)| = 4 / (3 sqrt 3), attained at tanh(z) = 1/sqrt(3)
SECH2_SLOPE = 4.0 / (3.0 * math.sqrt(3.0))
AFFINE_ALPHA = 1e-12
MIN_SINGULAR_VALUE = 1e-12


def _sech2(Z):
    return 1.0 - np.tanh(Z) ** 2


def _source(alpha, M):
    return "supplied" if alpha is not None or M is not None else "derived"


class AffineMap(SmoothMap):
    """h(x) = Dx + b with det(D) > 0.

    The true smoothness constant is 0; a tiny positive alpha stands in for it.

    Raises:
        ConditioningError: D has a singular value below 1e-12.
        OrientationError: det(D) <= 0.
    """

    family = "affine"
    jacobian_rule = "analytic"

    def __init__(self, D, b=None, *, R=1.0, x0=None, alpha=None, M=None):
        D = np.atleast_2d(np.array(D, dtype=float))
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise err.DimensionError("D must be a square matrix, got {}.".format(D.shape))
        d = D.shape[0]
        b = np.zeros(d) if b is None else np.array(b, dtype=float).reshape(-1)
        if b.shape != (d,):
            raise err.DimensionError("b must have shape ({},), got {}.".format(d, b.shape))
        sigma = linalg.svdvals(D)
        if sigma[-1] < MIN_SINGULAR_VALUE:
            raise err.ConditioningError(
                "D is singular to working precision (smallest singular value {:.3e}).".format(
                    sigma[-1]
                )
            )
        super().__init__(
            d,
            alpha=AFFINE_ALPHA if alpha is None else alpha,
            M=1.0 / sigma[-1] if M is None else M,
            R=R,
            x0=x0,
            lipschitz=sigma[0],
            constants_source=_source(alpha, M),
        )
        D.setflags(write=False)
        b.setflags(write=False)
        self.D = D
        self.b = b
        self.check_orientation()
        self._lu = linalg.lu_factor(D)

    @property
    def is_identity(self):
        return bool(np.array_equal(self.D, np.eye(self.d)) and not self.b.any())

    def _forward(self, X):
        return X @ self.D.T + self.b

    def _jacobian(self, X):
        return np.broadcast_to(self.D, (X.shape[0], self.d, self.d)).copy()

    def _inverse(self, Y, tol, max_iter):
        return linalg.lu_solve(self._lu, (Y - self.b).T).T

    def _params(self):
        return {"D": self.D.tolist(), "b": self.b.tolist()}


class IdentityMap(AffineMap):
    """The identity on R^d."""

    family = "identity"

    def __init__(self, d, *, R=1.0, x0=None):
        super().__init__(np.eye(int(d)), R=R, x0=x0)

    def _forward(self, X):
        return np.array(X, dtype=float)

    def _inverse(self, Y, tol, max_iter):
        return np.array(Y, dtype=float)

    def _params(self):
        return {}


class RadialTanhMap(SmoothMap):
    """Componentwise h(x) = x + beta * tanh(x) with beta in (0, 1).

    Constants: alpha = beta * 4 / (3 sqrt 3), M = 1 and |Dh| <= 1 + beta.
    """

    family = "radial_tanh"
    jacobian_rule = "analytic"

    def __init__(self, d, beta, *, R=1.0, x0=None, alpha=None, M=None):
        if not 0.0 < beta < 1.0:
            raise err.ConstantsError("beta must lie in (0, 1), got {}.".format(beta))
        self.beta = float(beta)
        super().__init__(
            d,
            alpha=self.beta * SECH2_SLOPE if alpha is None else alpha,
            M=1.0 if M is None else M,
            R=R,
            x0=x0,
            lipschitz=1.0 + self.beta,
            constants_source=_source(alpha, M),
        )
        self.check_orientation()

    def _forward(self, X):
        return X + self.beta * np.tanh(X)

    def _jacobian(self, X):
        diag = 1.0 + self.beta * _sech2(X)
        J = np.zeros((X.shape[0], self.d, self.d))
        idx = np.arange(self.d)
        J[:, idx, idx] = diag
        return J

    def _inverse(self, Y, tol, max_iter):
        beta = self.beta
        # per-coordinate tolerance keeps the Euclidean residual below tol
        return scalar_newton(
            lambda x: x + beta * np.tanh(x),
            lambda x: 1.0 + beta * _sech2(x),
            Y,
            Y,
            tol=tol / math.sqrt(self.d),
            max_iter=max_iter,
        )

    def _params(self):
        return {"beta": self.beta}


class TriangularFlow(SmoothMap):
    """Lower-triangular flow h(x) = x + g * tanh(x) + beta * tanh(Wx).

    W is strictly lower triangular so coordinate j only sees x_1..x_{j-1},
    and the inverse runs by forward substitution.

    Attributes:
        weights (ndarray): The strictly lower-triangular W.
        beta (float): Coupling strength.
        diag_beta (float): Strength g of the componentwise term.

    Raises:
        ConstantsError: The derived deviation beta|W| + g is not below 1 and
            no inverse-Lipschitz constant M was supplied.
    """

    family = "triangular"
    jacobian_rule = "analytic"

    def __init__(self, weights, beta, diag_beta=0.0, *, R=1.0, x0=None, alpha=None, M=None):
        W = np.atleast_2d(np.array(weights, dtype=float))
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise err.DimensionError("weights must be square, got {}.".format(W.shape))
        if np.triu(W).any():
            raise err.ConstantsError("weights must be strictly lower triangular.")
        if beta < 0 or diag_beta < 0:
            raise err.ConstantsError("beta and diag_beta must be non-negative.")
        W.setflags(write=False)
        self.weights = W
        self.beta = float(beta)
        self.diag_beta = float(diag_beta)
        w_norm = float(np.linalg.norm(W, 2)) if W.any() else 0.0
        deviation = self.diag_beta + self.beta * w_norm
        derived_alpha = SECH2_SLOPE * (self.diag_beta + self.beta * w_norm ** 2)
        if alpha is None and derived_alpha == 0.0:
            derived_alpha = AFFINE_ALPHA
        if M is None and deviation >= 1.0:
            raise err.ConstantsError(
                "Cannot derive M: the deviation {:.4g} is not below 1. "
                "Supply M explicitly.".format(deviation)
            )
        super().__init__(
            W.shape[0],
            alpha=derived_alpha if alpha is None else alpha,
            M=1.0 / (1.0 - deviation) if M is None else M,
            R=R,
            x0=x0,
            lipschitz=1.0 + deviation,
            constants_source=_source(alpha, M),
        )
        self.check_orientation()

    def _forward(self, X):
        return X + self.diag_beta * np.tanh(X) + self.beta * np.tanh(X @ self.weights.T)

    def _jacobian(self, X):
        n = X.shape[0]
        J = np.broadcast_to(np.eye(self.d), (n, self.d, self.d)).copy()
        idx = np.arange(self.d)
        J[:, idx, idx] += self.diag_beta * _sech2(X)
        S = _sech2(X @ self.weights.T)
        J += self.beta * S[:, :, None] * self.weights[None, :, :]
        return J

    def _inverse(self, Y, tol, max_iter):
        X = np.zeros_like(Y)
        g = self.diag_beta
        coord_tol = tol / math.sqrt(self.d)
        for j in range(self.d):
            rhs = Y[:, j] - self.beta * np.tanh(X @ self.weights[j])
            if g == 0.0:
                X[:, j] = rhs
            else:
                X[:, j] = scalar_newton(
                    lambda x: x + g * np.tanh(x),
                    lambda x: 1.0 + g * _sech2(x),
                    rhs,
                    rhs,
                    tol=coord_tol,
                    max_iter=max_iter,
                )
        return X

    def _params(self):
        return {
            "weights": self.weights.tolist(),
            "beta": self.beta,
            "diag_beta": self.diag_beta,
        }


class ComposedMap(SmoothMap):
    """The composition maps[-1] o ... o maps[0].

    Constants follow the chain rule: for h2 o h1,
    alpha = alpha_2 * L_1^2 + L_2 * alpha_1, L = L_2 * L_1 and M = M_2 * M_1.
    The domain radius and anchor are those of the innermost map.
    """

    family = "composition"
    jacobian_rule = "analytic"

    def __init__(self, maps, *, alpha=None, M=None):
        maps = list(maps)
        if not maps:
            raise err.ConstantsError("A composition needs at least one map.")
        d = maps[0].d
        if any(h.d != d for h in maps):
            raise err.DimensionError("All composed maps must share one dimension.")
        if any(h.lipschitz is None for h in maps):
            raise err.ConstantsError("Composed maps must carry a Lipschitz bound.")
        a, L, m = maps[0].alpha, maps[0].lipschitz, maps[0].M
        for h in maps[1:]:
            a = h.alpha * L ** 2 + h.lipschitz * a
            L = h.lipschitz * L
            m = h.M * m
        self.maps = tuple(maps)
        super().__init__(
            d,
            alpha=a if alpha is None else alpha,
            M=m if M is None else M,
            R=maps[0].R,
            x0=maps[0].x0,
            lipschitz=L,
            constants_source=_source(alpha, M),
        )
        self.check_orientation()

    def _forward(self, X):
        for h in self.maps:
            X = h._forward(X)
        return X

    def _jacobian(self, X):
        J = np.broadcast_to(np.eye(self.d), (X.shape[0], self.d, self.d)).copy()
        for h in self.maps:
            J = h.jacobian(X) @ J
            X = h._forward(X)
        return J

    def _inverse(self, Y, tol, max_iter):
        try:
            X = Y
            for h in reversed(self.maps):
                X = h._inverse(X, tol / len(self.maps), max_iter)
        except err.InversionError:
            X = None
        if X is None or np.linalg.norm(self._forward(X) - Y, axis=1).max() > tol:
            return newton_inverse(self, Y, tol=tol, max_iter=max_iter, x_start=X)
        return X

    def _params(self):
        return {"maps": [h.to_spec() for h in self.maps]}
