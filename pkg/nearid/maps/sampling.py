"""Seeded point sampling on Euclidean balls and spheres."""

# ThirdParty Imports
import numpy as np
from scipy.stats import norm, qmc

# Internal Imports
import nearid.errors as err

SAMPLING_METHODS = ("uniform", "halton")


def sample_sphere(n, d, seed=0):
    """Draws n unit vectors uniformly from the sphere in R^d."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, d))
    return _unit_rows(G)


def sample_ball(n, d, R=1.0, seed=0, method="uniform"):
    """Draws n points from the closed Euclidean ball of radius R in R^d.

    Args:
        n (int): Number of points.
        d (int): Dimension.
        R (float): Ball radius.
        seed (int or numpy Generator): Seed for the draw.
        method (str): 'uniform' for i.i.d. uniform points or 'halton'
            for a scrambled Halton sequence pushed onto the ball.

    Returns:
        An (n, d) array.
    """
    if method not in SAMPLING_METHODS:
        raise err.ConfigError(
            "Unknown sampling method '{}'. Use one of {}.".format(
                method, SAMPLING_METHODS
            )
        )
    if method == "uniform":
        rng = np.random.default_rng(seed)
        directions = _unit_rows(rng.standard_normal((n, d)))
        radii = R * rng.random(n) ** (1.0 / d)
    else:
        sampler = qmc.Halton(d + 1, scramble=True, seed=seed)
        P = np.clip(sampler.random(n), 1e-12, 1.0 - 1e-12)
        directions = _unit_rows(norm.ppf(P[:, :d]))
        radii = R * P[:, d] ** (1.0 / d)
    return directions * radii[:, None]


def _unit_rows(G):
    norms = np.linalg.norm(G, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return G / norms
