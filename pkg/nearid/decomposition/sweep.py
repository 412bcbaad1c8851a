"""Decay of the per-layer deviation with the number of layers."""

# Standard Imports
import logging
import math
from dataclasses import dataclass

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.decomposition.pipeline import PASS_ATOL, PASS_RTOL, full_decompose
from nearid.decomposition.schedule import compute_B, feasibility_threshold
from nearid.maps import normalize

logger = logging.getLogger(__name__)

DEFAULT_MS = (4, 8, 16, 32, 64)


@dataclass(frozen=True)
class DecayRow:
    m: int
    epsilon_target: float
    max_pair: float
    max_jac: float
    composition_error: float

    @property
    def max_cert(self):
        return max(self.max_pair, self.max_jac)

    @property
    def passed(self):
        return self.max_cert <= self.epsilon_target * (1.0 + PASS_RTOL) + PASS_ATOL

    def to_dict(self):
        return {
            "m": self.m,
            "epsilon_target": self.epsilon_target,
            "max_pair": self.max_pair,
            "max_jac": self.max_jac,
            "max_cert": self.max_cert,
            "composition_error": self.composition_error,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of the max deviation against ln(2m) / (m - 1) through 0."""

    slope: float
    relative_residuals: tuple
    decreasing: bool

    @property
    def max_relative_residual(self):
        return max(abs(r) for r in self.relative_residuals)

    def to_dict(self):
        return {
            "slope": self.slope,
            "relative_residuals": list(self.relative_residuals),
            "max_relative_residual": self.max_relative_residual,
            "decreasing": self.decreasing,
        }


def decay_sweep(
    smooth_map,
    ms=DEFAULT_MS,
    m_linear=4,
    n_domain=256,
    n_pairs=1000,
    n_check=1000,
    seed=0,
    threads=1,
):
    """Decomposes the map for each m with epsilon(m) = B ln(2m) / (m - 1).

    Returns:
        One DecayRow per m, carrying the largest certified deviation over
        the nonlinear layers.
    """
    normalized = normalize(smooth_map)
    B = compute_B(normalized.alpha, normalized.R, normalized.M)
    rows = []
    for m in ms:
        epsilon = feasibility_threshold(B, m)
        stack = full_decompose(
            smooth_map,
            m_linear,
            m,
            epsilon,
            n_domain=n_domain,
            n_pairs=n_pairs,
            n_check=n_check,
            seed=seed,
            threads=threads,
        )
        pair, jac = stack.max_nonlinear_certificate()
        rows.append(
            DecayRow(
                m=int(m),
                epsilon_target=epsilon,
                max_pair=pair,
                max_jac=jac,
                composition_error=stack.composition_error,
            )
        )
        logger.debug("m=%s: epsilon=%.4g, max deviation %.4g.", m, epsilon, rows[-1].max_cert)
    return rows


def fit_decay(rows):
    """Fits max deviation ~ slope * ln(2m) / (m - 1).

    Raises:
        DatasetError: Fewer than two rows.
    """
    if len(rows) < 2:
        raise err.DatasetError("A decay fit needs at least two values of m.")
    x = np.array([math.log(2.0 * r.m) / (r.m - 1.0) for r in rows])
    y = np.array([r.max_cert for r in rows])
    slope = float(x @ y / (x @ x))
    predicted = slope * x
    residuals = tuple(
        float((yi - pi) / pi) if pi > 0 else 0.0 for yi, pi in zip(y, predicted)
    )
    order = np.argsort([r.m for r in rows])
    decreasing = bool(np.all(np.diff(y[order]) <= 0))
    return DecayFit(slope=slope, relative_residuals=residuals, decreasing=decreasing)
