"""Geometric schedules a_i = (1 - c)^(m - i) and the constant B."""

# Standard Imports
import logging
import math
from dataclasses import dataclass

# Internal Imports
import nearid.errors as err

logger = logging.getLogger(__name__)

C_CAP = 0.9
FEASIBILITY_RTOL = 1e-12
MAX_SCAN_M = 2 ** 62


@dataclass(frozen=True)
class Schedule:
    """Decomposition parameters for m nonlinear layers.

    Attributes:
        m (int): Number of layers.
        epsilon (float): Target deviation |h_i - Id|_L.
        c (float): Geometric ratio in (0, 1).
        a (tuple): a_1..a_m with a_m = 1.
        feasible (bool): Both c <= epsilon / B and
            (1 - c)^(m - 1) <= epsilon / (2 alpha R) hold.
        B (float): The constant from compute_B.
        alpha (float): Smoothness constant of the normalized map.
        R (float): Domain radius of the normalized map.
        M (float): Inverse-Lipschitz constant of the normalized map.
        min_feasible_m (int): Smallest m with B ln(2m) / (m - 1) <= epsilon.
    """

    m: int
    epsilon: float
    c: float
    a: tuple
    feasible: bool
    B: float
    alpha: float
    R: float
    M: float
    min_feasible_m: int

    @property
    def near_identity_regime(self):
        return self.epsilon < 1.0

    @property
    def threshold(self):
        return feasibility_threshold(self.B, self.m)

    def to_dict(self):
        return {
            "m": self.m,
            "epsilon": self.epsilon,
            "c": self.c,
            "a": list(self.a),
            "feasible": self.feasible,
            "B": self.B,
            "alpha": self.alpha,
            "R": self.R,
            "M": self.M,
            "threshold": self.threshold,
            "min_feasible_m": self.min_feasible_m,
            "near_identity_regime": self.near_identity_regime,
        }


def compute_B(alpha, R, M):
    """Returns max(alpha M (R + M), M (L + 1 + 2 R alpha) + alpha R^2) with L = 1 + alpha R.

    Raises:
        ConstantsError: Some input is not positive.
    """
    if not (alpha > 0 and R > 0 and M > 0):
        raise err.ConstantsError(
            "compute_B needs positive inputs, got alpha={}, R={}, M={}.".format(alpha, R, M)
        )
    L = 1.0 + alpha * R
    return max(alpha * M * (R + M), M * (L + 1.0 + 2.0 * R * alpha) + alpha * R ** 2)


def feasibility_threshold(B, m):
    """Returns B ln(2m) / (m - 1), the smallest epsilon the construction guarantees."""
    if m < 2:
        raise err.ScheduleError("The threshold needs m >= 2, got {}.".format(m))
    return B * math.log(2.0 * m) / (m - 1.0)


def minimal_feasible_m(B, epsilon):
    """Returns the smallest m >= 2 with B ln(2m) / (m - 1) <= epsilon.

    The threshold decreases in m, so the search doubles and then bisects.
    """
    if not epsilon > 0:
        raise err.ScheduleError("epsilon must be positive, got {}.".format(epsilon))
    hi = 2
    while feasibility_threshold(B, hi) > epsilon:
        hi *= 2
        if hi > MAX_SCAN_M:
            raise err.ScheduleError("No feasible m below 2**62 for epsilon={}.".format(epsilon))
    lo = max(2, hi // 2)
    if feasibility_threshold(B, lo) <= epsilon:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasibility_threshold(B, mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def build_schedule(m, epsilon, alpha, R, M, c_override=None):
    """Chooses c and a_1..a_m for m layers of deviation at most epsilon.

    c must satisfy 1 - (epsilon / (2 alpha R))^(1/(m-1)) <= c <= epsilon / B.
    The largest admissible c is taken, capped at 0.9 to keep a_1 from
    underflowing. An infeasible schedule still builds, with feasible=False
    and c = min(epsilon / B, 0.9).

    Args:
        m (int): Number of layers, at least 2.
        epsilon (float): Target deviation, positive.
        alpha (float): Smoothness constant.
        R (float): Domain radius.
        M (float): Inverse-Lipschitz constant.
        c_override (float): Use this c instead, for debugging.

    Returns:
        A Schedule.

    Raises:
        ScheduleError: m < 2, epsilon <= 0 or c_override outside (0, 1).
    """
    if int(m) != m or m < 2:
        raise err.ScheduleError("A schedule needs an integer m >= 2, got {}.".format(m))
    if not epsilon > 0:
        raise err.ScheduleError("epsilon must be positive, got {}.".format(epsilon))
    m = int(m)
    B = compute_B(alpha, R, M)
    upper = epsilon / B
    ratio = epsilon / (2.0 * alpha * R)
    lower = 0.0 if ratio >= 1.0 else 1.0 - ratio ** (1.0 / (m - 1))

    if c_override is not None:
        if not 0.0 < c_override < 1.0:
            raise err.ScheduleError("c must lie in (0, 1), got {}.".format(c_override))
        c = float(c_override)
        feasible = lower <= c * (1.0 + FEASIBILITY_RTOL) and c <= upper * (1.0 + FEASIBILITY_RTOL)
    else:
        feasible = lower <= upper * (1.0 + FEASIBILITY_RTOL)
        c = min(upper, C_CAP)
        if feasible:
            c = max(lower, c)

    a = tuple((1.0 - c) ** (m - i) for i in range(1, m + 1))
    schedule = Schedule(
        m=m,
        epsilon=float(epsilon),
        c=c,
        a=a,
        feasible=feasible,
        B=B,
        alpha=float(alpha),
        R=float(R),
        M=float(M),
        min_feasible_m=minimal_feasible_m(B, epsilon),
    )
    logger.debug(
        "Schedule m=%s epsilon=%.4g: B=%.4g, c=%.4g in [%.4g, %.4g], feasible=%s.",
        m,
        epsilon,
        B,
        c,
        lower,
        upper,
        feasible,
    )
    if not schedule.near_identity_regime:
        logger.warning(
            "epsilon=%.4g is outside the near-identity optimization regime (epsilon < 1).",
            epsilon,
        )
    return schedule
