"""Sampled estimates of map constants and the linearization property checks."""

# Standard Imports
import logging
from dataclasses import dataclass

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.maps.sampling import sample_ball, sample_sphere

logger = logging.getLogger(__name__)

DEGENERATE_GAP = 1e-12
IDENTITY_JACOBIAN_TOL = 1e-8


@dataclass(frozen=True)
class ConstantEstimate:
    """Sampled lower estimates of alpha, M and the Lipschitz constant L."""

    alpha_hat: float
    M_hat: float
    L_hat: float
    n_samples: int
    source: str = "estimated"


@dataclass(frozen=True)
class Lemma2Report:
    """Violation counts and worst ratios of the quadratic and Lipschitz bounds.

    A ratio is observed / bound; values above 1 are violations.
    """

    n_pairs: int
    quadratic_violations: int
    quadratic_worst_ratio: float
    lipschitz_checked: bool
    lipschitz_violations: int
    lipschitz_worst_ratio: float

    @property
    def passed(self):
        return self.quadratic_violations == 0 and self.lipschitz_violations == 0


def estimate_constants(smooth_map, n_samples=1000, seed=0):
    """Estimates alpha, M and L of a map from sampled points of its ball.

    alpha_hat is the largest |(Dh(y) - Dh(x))u| / (|y - x||u|), M_hat the
    largest |x - y| / |h(x) - h(y)| and L_hat the largest
    |h(x) - h(y)| / |x - y|. Coincident samples are skipped.

    Args:
        smooth_map (SmoothMap): The map to probe.
        n_samples (int): Number of sampled (x, y, u) triples, at least 2.
        seed (int): Seed for the draw.

    Returns:
        A ConstantEstimate. All three values are lower bounds on the truth.
    """
    if n_samples < 2:
        raise err.ConfigError("estimate_constants needs n_samples >= 2.")
    rng = np.random.default_rng(seed)
    d, R = smooth_map.d, smooth_map.R
    X = sample_ball(n_samples, d, R, seed=rng)
    Y = sample_ball(n_samples, d, R, seed=rng)
    U = sample_sphere(n_samples, d, seed=rng)

    gap = np.linalg.norm(Y - X, axis=1)
    keep = gap > DEGENERATE_GAP
    X, Y, U, gap = X[keep], Y[keep], U[keep], gap[keep]
    if not keep.all():
        logger.debug("Skipped %s coincident samples.", int((~keep).sum()))

    dJ = smooth_map.jacobian(Y) - smooth_map.jacobian(X)
    alpha_hat = np.linalg.norm(np.einsum("nij,nj->ni", dJ, U), axis=1) / gap
    image_gap = np.linalg.norm(smooth_map.eval(X) - smooth_map.eval(Y), axis=1)
    separated = image_gap > 0
    return ConstantEstimate(
        alpha_hat=float(alpha_hat.max(initial=0.0)),
        M_hat=float((gap[separated] / image_gap[separated]).max(initial=0.0)),
        L_hat=float((image_gap / gap).max(initial=0.0)),
        n_samples=int(keep.sum()),
    )


def check_lemma2(smooth_map, n_pairs=1000, seed=0, atol=1e-12):
    """Checks the linearization error and the Lipschitz bound on sampled pairs.

    The quadratic bound |h(y) - h(x) - Dh(x)(y - x)| <= alpha/2 |y - x|^2 is
    checked for every map. The bound |h|_L <= 1 + alpha R only holds when
    Dh(0) = I and is skipped otherwise.

    Args:
        smooth_map (SmoothMap): The map, carrying alpha and R.
        n_pairs (int): Number of sampled pairs of the ball.
        seed (int): Seed for the draw.
        atol (float): Absolute slack for round-off.

    Returns:
        A Lemma2Report.
    """
    rng = np.random.default_rng(seed)
    d, R, alpha = smooth_map.d, smooth_map.R, smooth_map.alpha
    X = sample_ball(n_pairs, d, R, seed=rng)
    Y = sample_ball(n_pairs, d, R, seed=rng)
    step = Y - X
    gap = np.linalg.norm(step, axis=1)
    hX, hY = smooth_map.eval(X), smooth_map.eval(Y)

    linear = hX + np.einsum("nij,nj->ni", smooth_map.jacobian(X), step)
    quad_err = np.linalg.norm(hY - linear, axis=1)
    quad_bound = 0.5 * alpha * gap ** 2 + atol
    quad_ratio = quad_err / quad_bound

    J0 = smooth_map.jacobian(np.zeros(d))
    lip_checked = bool(np.linalg.norm(J0 - np.eye(d), 2) <= IDENTITY_JACOBIAN_TOL)
    lip_violations, lip_worst = 0, 0.0
    if lip_checked:
        lip_err = np.linalg.norm(hY - hX, axis=1)
        lip_ratio = lip_err / ((1.0 + alpha * R) * gap + atol)
        lip_violations = int((lip_ratio > 1.0).sum())
        lip_worst = float(lip_ratio.max())
    else:
        logger.debug("Dh(0) is not the identity; skipping the Lipschitz bound.")

    return Lemma2Report(
        n_pairs=n_pairs,
        quadratic_violations=int((quad_ratio > 1.0).sum()),
        quadratic_worst_ratio=float(quad_ratio.max()),
        lipschitz_checked=lip_checked,
        lipschitz_violations=lip_violations,
        lipschitz_worst_ratio=lip_worst,
    )
