"""Full-batch gradient descent and the zero-network critical point instance."""

# Standard Imports
import logging
import math
from dataclasses import dataclass

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.maps.sampling import sample_ball
from nearid.resnet.dataset import Dataset
from nearid.resnet.network import forward, grad, loss

logger = logging.getLogger(__name__)

DIVERGENCE_LOSS = 1e12
N_PROBE = 64


@dataclass(frozen=True)
class Trajectory:
    """A gradient descent run.

    Attributes:
        losses (tuple): Loss before the first step and after every step.
        grad_norms (tuple): Gradient norm at the start of every step.
        theta (ResNetParams): The final parameters.
        diverged (bool): True when the loss passed 1e12 or stopped being finite.
    """

    losses: tuple
    grad_norms: tuple
    theta: object
    diverged: bool

    @property
    def steps(self):
        return len(self.grad_norms)

    def rows(self):
        """(step, loss, grad_norm) rows, grad_norm None after the last step."""
        norms = list(self.grad_norms) + [None] * (len(self.losses) - len(self.grad_norms))
        return [(i, l, g) for i, (l, g) in enumerate(zip(self.losses, norms))]


def train_gd(theta0, data, lr, steps):
    """Runs plain full-batch gradient descent theta <- theta - lr grad Q.

    Raises:
        ConfigError: lr is not positive or steps is negative.
    """
    if not lr > 0:
        raise err.ConfigError("The learning rate must be positive, got {}.".format(lr))
    if steps < 0:
        raise err.ConfigError("steps must be non-negative, got {}.".format(steps))
    theta = theta0
    losses, norms = [loss(theta, data)], []
    diverged = False
    for step in range(int(steps)):
        g = grad(theta, data)
        norms.append(g.norm())
        theta = theta.unflatten(theta.flatten() - lr * g.flatten())
        current = loss(theta, data)
        losses.append(current)
        if not math.isfinite(current) or current > DIVERGENCE_LOSS:
            diverged = True
            logger.warning("Gradient descent diverged at step %s (loss %.3g).", step + 1, current)
            break
    return Trajectory(
        losses=tuple(losses), grad_norms=tuple(norms), theta=theta, diverged=diverged
    )


def make_saddle_instance(theta_star, n, R, seed=0):
    """Builds a dataset on which the all-zero network is a suboptimal critical point.

    The inputs come in antithetic pairs (p, -p), plus the origin when n is
    odd, so their mean is exactly zero. Targets are y = h_theta*(x).

    Args:
        theta_star (ResNetParams): A network that is not the identity on the ball.
        n (int): Number of samples, at least 2.
        R (float): Radius of the input ball.
        seed (int): Seed for the draw.

    Returns:
        A Dataset whose header records the seed and the digest of theta_star.

    Raises:
        IdentityTargetError: theta_star computes the identity on every probe point
            or on every sample.
    """
    if n < 2:
        raise err.DatasetError("A saddle instance needs n >= 2, got {}.".format(n))
    probe = sample_ball(N_PROBE, theta_star.d, R, seed=seed)
    out, _ = forward(theta_star, probe)
    if not np.abs(out - probe).max() > 0:
        raise err.IdentityTargetError(
            "The target network computes the identity on all {} probe points.".format(N_PROBE)
        )

    half = sample_ball(n // 2, theta_star.d, R, seed=seed)
    X = np.empty((n, theta_star.d))
    X[0 : 2 * (n // 2) : 2] = half
    X[1 : 2 * (n // 2) : 2] = -half
    if n % 2:
        X[-1] = 0.0
    if any(math.fsum(X[:, j]) != 0.0 for j in range(theta_star.d)):
        raise err.DatasetError("Antithetic inputs failed to have mean zero.")

    Y, _ = forward(theta_star, X)
    displacement = float(np.mean(np.sum((Y - X) ** 2, axis=1)))
    if not displacement > 0:
        raise err.IdentityTargetError("The target network moves none of the samples.")
    logger.debug("Saddle instance: n=%s, mean squared displacement %.4g.", n, displacement)
    return Dataset(
        X,
        Y,
        R,
        meta={"seed": seed, "generator": theta_star.digest(), "displacement": displacement},
    )
