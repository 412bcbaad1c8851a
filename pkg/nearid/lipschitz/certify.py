"""Sampled certification of the Lipschitz deviation |f - Id|_L over a domain."""

# Standard Imports
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.lipschitz.domains import perturbed
from nearid.maps.base import FunctionMap, Map

logger = logging.getLogger(__name__)

CHUNK_SIZE = 256
PERTURBATION_SCALE = 1e-4
MIN_GAP = 1e-300


@dataclass(frozen=True)
class LipschitzCertificate:
    """Sampled lower bound and Jacobian-grid estimate of |f - Id|_L.

    Attributes:
        pair_lower_bound (float): Largest sampled difference quotient of f - Id.
        jac_grid_estimate (float): Largest |Df(x) - I|_2 over the grid, or
            None when f has no Jacobian rule.
        n_pairs (int): Sampled pairs, not counting nearest-neighbour pairs.
        n_neighbour_pairs (int): Nearest-neighbour pairs of a cloud domain.
        n_grid (int): Points of the Jacobian grid.
        domain (dict): Description of the domain.
        seed (int): Seed of the pair draw.
    """

    pair_lower_bound: float
    jac_grid_estimate: Optional[float]
    n_pairs: int
    n_neighbour_pairs: int
    n_grid: int
    domain: dict
    seed: int

    @property
    def grid_gap(self):
        """How far the pair bound exceeds the grid estimate, never negative."""
        if self.jac_grid_estimate is None:
            return None
        return max(0.0, self.pair_lower_bound - self.jac_grid_estimate)

    @property
    def estimate(self):
        """The larger of the two estimates."""
        if self.jac_grid_estimate is None:
            return self.pair_lower_bound
        return max(self.pair_lower_bound, self.jac_grid_estimate)

    def to_dict(self):
        return {
            "pair_lower_bound": self.pair_lower_bound,
            "jac_grid_estimate": self.jac_grid_estimate,
            "grid_gap": self.grid_gap,
            "n_pairs": self.n_pairs,
            "n_neighbour_pairs": self.n_neighbour_pairs,
            "n_grid": self.n_grid,
            "domain": self.domain,
            "seed": self.seed,
        }


def as_map(f, d, jacobian_rule=None):
    """Wraps a plain batched callable as a Map, by default without a Jacobian rule."""
    if isinstance(f, Map):
        return f
    if not callable(f):
        raise err.NearIdError("Expected a Map or a callable, got {}.".format(type(f)))
    return FunctionMap(f, d, jacobian_rule=jacobian_rule)


def sample_pairs(domain, n_pairs, seed):
    """Draws n_pairs point pairs in fixed chunks seeded by (seed, chunk).

    Each chunk holds uniform pairs followed by perturbation pairs with
    |x - y| = 1e-4 R. Every draw of n pairs is a prefix of a larger draw.
    """
    X, Y = [], []
    n_chunks = -(-n_pairs // CHUNK_SIZE)
    half = CHUNK_SIZE // 2
    for chunk in range(n_chunks):
        rng = np.random.default_rng([seed, chunk])
        x_uni, y_uni = domain.sample(half, rng), domain.sample(half, rng)
        x_pert = domain.sample(CHUNK_SIZE - half, rng)
        y_pert = perturbed(x_pert, PERTURBATION_SCALE * domain.R, rng)
        X.append(np.vstack([x_uni, x_pert]))
        Y.append(np.vstack([y_uni, y_pert]))
    if not X:
        return np.empty((0, domain.d)), np.empty((0, domain.d))
    return np.vstack(X)[:n_pairs], np.vstack(Y)[:n_pairs]


def deviation_quotients(f, X, Y):
    """Returns |(f(x) - x) - (f(y) - y)| / |x - y| row by row, 0 for x = y."""
    gap = np.linalg.norm(X - Y, axis=1)
    num = np.linalg.norm((f.eval(X) - X) - (f.eval(Y) - Y), axis=1)
    out = np.zeros_like(gap)
    ok = gap > MIN_GAP
    out[ok] = num[ok] / gap[ok]
    return out


def jacobian_deviation(f, points):
    """Returns max |Df(x) - I|_2 over the points."""
    J = f.jacobian(points) - np.eye(f.d)
    return float(np.linalg.norm(J, 2, axis=(1, 2)).max(initial=0.0))


def certify_deviation(f, domain, n_pairs=1000, seed=0, n_grid=None, threads=1):
    """Certifies |f - Id|_L on a ball or a point cloud.

    Args:
        f (Map or callable): The map to certify.
        domain (Ball or Cloud): Where the seminorm is taken.
        n_pairs (int): Number of sampled pairs, at least 1.
        seed (int): Seed of the pair draw.
        n_grid (int): Points of the Jacobian grid; all cloud points by default.
        threads (int): Worker threads for pair evaluation.

    Returns:
        A LipschitzCertificate.

    Raises:
        DatasetError: The domain cloud is empty.
    """
    if n_pairs < 1:
        raise err.ConfigError("certify_deviation needs n_pairs >= 1.")
    f = as_map(f, domain.d)
    if f.d != domain.d:
        raise err.DimensionError(
            "Map dimension {} does not match domain dimension {}.".format(f.d, domain.d)
        )
    X, Y = sample_pairs(domain, n_pairs, seed)
    neighbours = domain.neighbour_pairs()
    n_neighbour = 0
    if neighbours is not None:
        n_neighbour = neighbours[0].shape[0]
        X, Y = np.vstack([X, neighbours[0]]), np.vstack([Y, neighbours[1]])

    bounds = np.arange(0, X.shape[0], CHUNK_SIZE)
    slices = [slice(b, b + CHUNK_SIZE) for b in bounds]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(lambda s: deviation_quotients(f, X[s], Y[s]), slices))
    else:
        parts = [deviation_quotients(f, X[s], Y[s]) for s in slices]
    pair_bound = float(max(p.max(initial=0.0) for p in parts))

    jac_estimate, grid_size = None, 0
    if f.jacobian_rule is not None:
        grid = domain.grid(n_grid, seed=seed)
        grid_size = grid.shape[0]
        jac_estimate = jacobian_deviation(f, grid)

    logger.debug(
        "Certified deviation on %s: pairs %.6g, grid %s.",
        domain.kind,
        pair_bound,
        jac_estimate,
    )
    return LipschitzCertificate(
        pair_lower_bound=pair_bound,
        jac_grid_estimate=jac_estimate,
        n_pairs=int(n_pairs),
        n_neighbour_pairs=int(n_neighbour),
        n_grid=int(grid_size),
        domain=domain.describe(),
        seed=seed,
    )
