"""Property suite for near-identity maps with |f - Id|_L <= alpha < 1.

Three consequences are checked on sampled data:

* sandwich: (1 - alpha)|x - y| <= |f(x) - f(y)| <= (1 + alpha)|x - y|
* inverse: |f^-1 - Id|_L <= alpha / (1 - alpha) on pairs of image points
* composition: for F(g) = f o g and perturbations D of g,
  |(f(g + D) - (g + D)) - (f(g) - g)| <= alpha |D| at every sample
"""

# Standard Imports
import logging
from dataclasses import dataclass

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.lipschitz.certify import as_map, sample_pairs

logger = logging.getLogger(__name__)

RTOL = 1e-9
INVERSE_TOL = 1e-12
MIN_T = 1e-4
ROUNDOFF = 1e-14
COMPOSITION_STREAM = 2 ** 31 - 1


@dataclass(frozen=True)
class PartResult:
    """Outcome of one property on n samples.

    worst_margin is the smallest bound - observed over the samples, so a
    negative margin beyond round-off is a violation.
    """

    name: str
    passed: bool
    worst_margin: float
    observed: float
    bound: float
    violations: int
    n: int
    detail: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "observed": self.observed,
            "bound": self.bound,
            "violations": self.violations,
            "n": self.n,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Lemma4Report:
    alpha: float
    parts: tuple

    @property
    def passed(self):
        return all(p.passed for p in self.parts)

    def __getitem__(self, name):
        for part in self.parts:
            if part.name == name:
                return part
        raise KeyError(name)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "passed": self.passed,
            "parts": [p.to_dict() for p in self.parts],
        }


def lemma4_suite(f, alpha, domain, n=1000, seed=0):
    """Runs the sandwich, inverse and composition checks for a near-identity f.

    Args:
        f (Map or callable): A map with |f - Id|_L <= alpha on the domain.
        alpha (float): The certified or assumed deviation, in [0, 1).
        domain (Ball or Cloud): Where pairs are sampled.
        n (int): Samples per part.
        seed (int): Seed for the draws.

    Returns:
        A Lemma4Report with one PartResult per property.

    Raises:
        RegimeError: alpha is not in [0, 1).
    """
    if not 0.0 <= alpha < 1.0:
        raise err.RegimeError(
            "The near-identity properties need 0 <= alpha < 1, got {}.".format(alpha)
        )
    f = as_map(f, domain.d, jacobian_rule="finite_difference")
    X, Y = sample_pairs(domain, n, seed)
    keep = np.linalg.norm(X - Y, axis=1) > 0
    X, Y = X[keep], Y[keep]
    parts = (
        _sandwich(f, alpha, X, Y),
        _inverse(f, alpha, X, Y),
        _composition(f, alpha, domain, n, seed),
    )
    report = Lemma4Report(alpha=float(alpha), parts=parts)
    if not report.passed:
        logger.warning(
            "Near-identity properties failed at alpha=%.4g: %s",
            alpha,
            [p.name for p in parts if not p.passed],
        )
    return report


def _sandwich(f, alpha, X, Y):
    ratio = np.linalg.norm(f.eval(X) - f.eval(Y), axis=1) / np.linalg.norm(X - Y, axis=1)
    low, high = 1.0 - alpha, 1.0 + alpha
    margin = np.minimum(ratio - low, high - ratio)
    bad = (ratio < low * (1.0 - RTOL)) | (ratio > high * (1.0 + RTOL))
    return PartResult(
        name="sandwich",
        passed=not bad.any(),
        worst_margin=float(margin.min()),
        observed=float(np.abs(ratio - 1.0).max()),
        bound=float(alpha),
        violations=int(bad.sum()),
        n=int(ratio.size),
    )


def _inverse(f, alpha, X, Y):
    bound = alpha / (1.0 - alpha)
    U, V = f.eval(X), f.eval(Y)
    try:
        FU = f.invert(U, tol=INVERSE_TOL)
        FV = f.invert(V, tol=INVERSE_TOL)
    except err.NearIdError as e:
        return PartResult(
            name="inverse",
            passed=False,
            worst_margin=float("-inf"),
            observed=float("nan"),
            bound=bound,
            violations=U.shape[0],
            n=U.shape[0],
            detail=str(e),
        )
    gap = np.linalg.norm(U - V, axis=1)
    ok = gap > 0
    quotient = np.linalg.norm((FU - U) - (FV - V), axis=1)[ok] / gap[ok]
    # each inverse is only accurate to INVERSE_TOL
    slack = bound * RTOL + 2.0 * INVERSE_TOL / gap[ok]
    bad = quotient > bound + slack
    return PartResult(
        name="inverse",
        passed=not bad.any(),
        worst_margin=float((bound - quotient).min(initial=bound)),
        observed=float(quotient.max(initial=0.0)),
        bound=bound,
        violations=int(bad.sum()),
        n=int(quotient.size),
    )


def _composition(f, alpha, domain, n, seed):
    rng = np.random.default_rng([seed, COMPOSITION_STREAM])
    G = domain.sample(n, rng)
    Q = domain.sample(n, rng)
    t = np.exp(rng.uniform(np.log(MIN_T), 0.0, size=n))
    Delta = t[:, None] * (Q - G)
    size = np.linalg.norm(Delta, axis=1)
    ok = size > 0
    G, Delta, size = G[ok], Delta[ok], size[ok]
    moved = G + Delta
    change = np.linalg.norm((f.eval(moved) - moved) - (f.eval(G) - G), axis=1)
    ratio = change / size
    bad = ratio > alpha * (1.0 + RTOL) + ROUNDOFF * (1.0 + domain.R) / size
    return PartResult(
        name="composition",
        passed=not bad.any(),
        worst_margin=float((alpha - ratio).min(initial=alpha)),
        observed=float(ratio.max(initial=0.0)),
        bound=float(alpha),
        violations=int(bad.sum()),
        n=int(ratio.size),
    )
