"""Base classes for evaluable, differentiable and invertible maps on R^d."""

# Standard Imports
import copy
import logging

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err

DEFAULT_TOL = 1e-10
MAX_NEWTON_ITER = 100
MAX_HALVINGS = 30
FD_RELATIVE_STEP = 1e-6

logger = logging.getLogger(__name__)


class Map(object):
    """A map from R^d to R^d with evaluation, Jacobian and inverse.

    Every public method accepts a single point of shape (d,) or a batch of
    shape (n, d) and answers in the same shape. Subclasses implement the
    batched hooks `_forward`, and optionally `_jacobian` and `_inverse`.

    Attributes:
        d (int): The dimension.
        jacobian_rule (str): 'analytic', 'finite_difference' or None when
            the map has no usable derivative.

    Note:
        Any attributes or methods prefixed with _underscores are
        intended to be "private" internal use only.
    """

    jacobian_rule = "finite_difference"

    def __init__(self, d):
        if int(d) < 1:
            raise err.DimensionError("The dimension must be positive, got {}.".format(d))
        self.d = int(d)
        self._logger = logging.getLogger(__name__)

    def __call__(self, x):
        return self.eval(x)

    @property
    def is_identity(self):
        """True when the map is exactly the identity."""
        return False

    def eval(self, x):
        """Evaluates the map at a point or a batch of points."""
        X, single = self._as_batch(x)
        out = self._forward(X)
        return out[0] if single else out

    def jacobian(self, x):
        """Returns Dh(x), entries J[i, j] = dh_i/dx_j.

        Falls back to central differences with step 1e-6 * max(1, |x|)
        when the map has no analytic rule.

        Raises:
            DimensionError: The point does not live in R^d.
        """
        X, single = self._as_batch(x)
        if self.jacobian_rule == "analytic":
            J = self._jacobian(X)
        elif self.jacobian_rule == "finite_difference":
            J = finite_difference_jacobian(self._forward, X)
        else:
            raise err.NearIdError(
                "{} has no Jacobian rule.".format(type(self).__name__)
            )
        return J[0] if single else J

    def invert(self, y, tol=DEFAULT_TOL, max_iter=MAX_NEWTON_ITER):
        """Returns x with |h(x) - y| <= tol.

        Raises:
            InversionError: The solver did not reach tol within max_iter.
        """
        if tol <= 0:
            raise err.NearIdError("The inversion tolerance must be positive.")
        Y, single = self._as_batch(y)
        X = self._inverse(Y, tol, max_iter)
        return X[0] if single else X

    def _forward(self, X):
        raise NotImplementedError

    def _jacobian(self, X):
        raise NotImplementedError

    def _inverse(self, Y, tol, max_iter):
        return newton_inverse(self, Y, tol=tol, max_iter=max_iter)

    def _as_batch(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0 and self.d == 1:
            x = x.reshape(1)
        if x.ndim == 1 and x.shape[0] == self.d:
            return x[None, :], True
        if x.ndim == 2 and x.shape[1] == self.d:
            return x, False
        raise err.DimensionError(
            "Expected a point in R^{d} or an (n, {d}) batch, got shape {s}.".format(
                d=self.d, s=x.shape
            )
        )


class FunctionMap(Map):
    """Wraps a batched callable as a Map with a finite-difference Jacobian.

    Pass jacobian_rule=None when differences of fn are meaningless, for
    example a piecewise-constant interpolant.
    """

    def __init__(self, fn, d, inverse=None, jacobian_rule="finite_difference"):
        super().__init__(d)
        self._fn = fn
        self._inverse_fn = inverse
        self.jacobian_rule = jacobian_rule

    def _forward(self, X):
        return np.asarray(self._fn(X), dtype=float)

    def _inverse(self, Y, tol, max_iter):
        if self._inverse_fn is not None:
            return np.asarray(self._inverse_fn(Y), dtype=float)
        return super()._inverse(Y, tol, max_iter)


class SmoothMap(Map):
    """An invertible differentiable map with the constants of a smooth bi-Lipschitz h.

    Attributes:
        alpha (float): Smoothness constant, |(Dh(y) - Dh(x))u| <= alpha|y - x||u|.
        M (float): Lipschitz constant of the inverse.
        R (float): Radius of the domain ball.
        x0 (ndarray): Orientation anchor with det(Dh(x0)) > 0.
        lipschitz (float): Upper bound on |Dh|_2 over the domain, used
            when maps are composed or normalized.
        constants_source (str): 'derived' from the family, 'supplied' by
            the caller or 'estimated' from samples.
    """

    family = None

    def __init__(self, d, *, alpha, M, R, x0=None, lipschitz=None, constants_source="derived"):
        super().__init__(d)
        x0 = np.zeros(self.d) if x0 is None else np.array(x0, dtype=float)
        if x0.shape != (self.d,):
            raise err.DimensionError(
                "The anchor x0 must have shape ({},), got {}.".format(self.d, x0.shape)
            )
        if not (alpha > 0 and M > 0 and R > 0):
            raise err.ConstantsError(
                "alpha, M and R must be positive, got alpha={}, M={}, R={}.".format(
                    alpha, M, R
                )
            )
        x0.setflags(write=False)
        self.alpha = float(alpha)
        self.M = float(M)
        self.R = float(R)
        self.x0 = x0
        self.lipschitz = None if lipschitz is None else float(lipschitz)
        self.constants_source = constants_source

    def check_orientation(self):
        """Checks det(Dh(x0)) > 0.

        Raises:
            OrientationError: The Jacobian at x0 is singular or reverses orientation.
        """
        det = float(np.linalg.det(self.jacobian(self.x0)))
        if not det > 0:
            raise err.OrientationError(
                "det(Dh(x0)) must be positive, got {:.6g}.".format(det)
            )
        return det

    def with_constants(self, *, alpha=None, M=None, source="supplied"):
        """Returns a copy carrying new constants.

        Estimated constants are sampled lower bounds, so using them for a
        certified schedule is logged as a warning.
        """
        other = copy.copy(self)
        if alpha is not None:
            other.alpha = float(alpha)
        if M is not None:
            other.M = float(M)
        if not (other.alpha > 0 and other.M > 0):
            raise err.ConstantsError("alpha and M must be positive.")
        other.constants_source = source
        if source == "estimated":
            self._logger.warning(
                "Using sampled constants alpha=%.4g, M=%.4g; they are lower "
                "estimates, not certified bounds.",
                other.alpha,
                other.M,
            )
        return other

    def to_spec(self):
        """Serializes the map into a MapSpec dict."""
        return {
            "family": self.family,
            "params": self._params(),
            "alpha": self.alpha if self.constants_source == "supplied" else None,
            "M": self.M if self.constants_source == "supplied" else None,
            "R": self.R,
            "x0": self.x0.tolist(),
            "d": self.d,
        }

    def _params(self):
        raise NotImplementedError


def finite_difference_jacobian(fn, X):
    """Central-difference Jacobian of a batched map, step 1e-6 * max(1, |x|)."""
    n, d = X.shape
    steps = FD_RELATIVE_STEP * np.maximum(1.0, np.linalg.norm(X, axis=1))
    J = np.empty((n, d, d))
    for j in range(d):
        E = np.zeros_like(X)
        E[:, j] = steps
        J[:, :, j] = (fn(X + E) - fn(X - E)) / (2.0 * steps[:, None])
    return J


def newton_inverse(h, Y, tol=DEFAULT_TOL, max_iter=MAX_NEWTON_ITER, x_start=None):
    """Damped Newton solve of h(x) = y for every row of Y.

    The iteration starts at x_start, or at x = y when none is given. The
    step is halved while the residual does not decrease.

    Raises:
        InversionError: Some row did not reach tol within max_iter.
    """
    X = np.array(Y if x_start is None else x_start, dtype=float)
    F = h._forward(X) - Y
    res = np.linalg.norm(F, axis=1)
    active = res > tol
    iteration = 0
    for iteration in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        try:
            step = np.linalg.solve(h.jacobian(X[idx]), F[idx][..., None])[..., 0]
        except np.linalg.LinAlgError:
            raise err.InversionError(
                "Singular Jacobian during Newton inversion.", float(res.max())
            )
        lam = np.ones(len(idx))
        trial = X[idx] - step
        F_trial = h._forward(trial) - Y[idx]
        res_trial = np.linalg.norm(F_trial, axis=1)
        for _ in range(MAX_HALVINGS):
            worse = ~(res_trial < res[idx])
            if not worse.any():
                break
            lam[worse] *= 0.5
            trial[worse] = X[idx][worse] - lam[worse, None] * step[worse]
            F_trial[worse] = h._forward(trial[worse]) - Y[idx][worse]
            res_trial[worse] = np.linalg.norm(F_trial[worse], axis=1)
        improved = res_trial < res[idx]
        upd = idx[improved]
        X[upd] = trial[improved]
        F[upd] = F_trial[improved]
        res[upd] = res_trial[improved]
        # rows that cannot improve sit at the rounding floor
        active[idx[~improved]] = False
        active[upd] = res[upd] > tol
    logger.debug("Newton inversion finished after %s iterations.", iteration + 1)
    if (res > tol).any():
        raise err.InversionError(
            "Newton inversion did not reach tolerance {:.1e} in {} iterations.".format(
                tol, max_iter
            ),
            float(res.max()),
        )
    return X


def scalar_newton(fn, dfn, target, x_start, tol=DEFAULT_TOL, max_iter=MAX_NEWTON_ITER):
    """Elementwise Newton solve of fn(x) = target for a monotone scalar fn.

    Raises:
        InversionError: Some entry did not reach tol within max_iter.
    """
    x = np.array(x_start, dtype=float)
    for _ in range(max_iter):
        r = fn(x) - target
        if np.all(np.abs(r) <= tol):
            return x
        x = x - r / dfn(x)
    r = np.abs(fn(x) - target)
    if np.all(r <= tol):
        return x
    raise err.InversionError(
        "Scalar Newton did not reach tolerance {:.1e} in {} iterations.".format(
            tol, max_iter
        ),
        float(r.max()),
    )
