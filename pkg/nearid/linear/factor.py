"""Factorization of a positive-determinant matrix into near-identity factors.

D = Q P is split into its polar parts, the rotation Q = U V^T and the
stretch P = V S V^T taken from the SVD D = U S V^T. Both have real logs:
the skew log of Q comes from its real Schur form and the symmetric log of
P from log S. Each log X is cut into k equal pieces exp(X / k), so

    D = (I + A_1)(I + A_2) ... (I + A_m)

with the rotation pieces first and the stretch pieces last.
"""

# Standard Imports
import logging
import math
from dataclasses import dataclass

# ThirdParty Imports
import numpy as np
from scipy import linalg

# Internal Imports
import nearid.errors as err

logger = logging.getLogger(__name__)

MIN_SINGULAR_VALUE = 1e-12
LOG_ZERO_TOL = 1e-12
SCHUR_BLOCK_TOL = 1e-14
# max |A_i| <= C_F * (gamma + pi) / m for every matrix in the regression set
C_F = 8.0


@dataclass(frozen=True)
class LinearFactorization:
    """The factors A_1..A_m with D = (I + A_1) ... (I + A_m).

    Attributes:
        factors (tuple): The d x d matrices A_1..A_m.
        gamma (float): |log sigma_max(D)| + |log sigma_min(D)|.
        reconstruction_error (float): Relative Frobenius error of the product.
        max_norm (float): max_i |A_i|_2.
        c_f (float): The constant of the target bound.
        target_bound (float): c_f * (gamma + pi) / m.
        seats (dict): Factors spent on the rotation and the stretch.
    """

    factors: tuple
    gamma: float
    reconstruction_error: float
    max_norm: float
    c_f: float
    target_bound: float
    seats: dict

    @property
    def m(self):
        return len(self.factors)

    @property
    def within_target(self):
        return self.max_norm <= self.target_bound

    def product(self):
        """Returns (I + A_1) ... (I + A_m)."""
        d = self.factors[0].shape[0]
        P = np.eye(d)
        for A in self.factors:
            P = P @ (np.eye(d) + A)
        return P

    def to_dict(self):
        return {
            "m": self.m,
            "gamma": self.gamma,
            "reconstruction_error": self.reconstruction_error,
            "max_norm": self.max_norm,
            "factor_norms": [float(np.linalg.norm(A, 2)) for A in self.factors],
            "c_f": self.c_f,
            "target_bound": self.target_bound,
            "within_target": self.within_target,
            "seats": dict(self.seats),
            "factors": [A.tolist() for A in self.factors],
        }


def gamma_of(D):
    """Returns |log sigma_max(D)| + |log sigma_min(D)|.

    Raises:
        ConditioningError: D is singular to working precision.
    """
    s = linalg.svdvals(np.atleast_2d(np.asarray(D, dtype=float)))
    if s[-1] < MIN_SINGULAR_VALUE:
        raise err.ConditioningError(
            "Matrix is singular (smallest singular value {:.3e}).".format(s[-1])
        )
    return abs(math.log(s[0])) + abs(math.log(s[-1]))


def rotation_log(Q):
    """Returns a real skew-symmetric S with expm(S) = Q for a rotation Q.

    Eigenvalues at -1 are paired into rotations by pi.

    Raises:
        OrientationError: Q has an unpaired eigenvalue -1 (det(Q) = -1).
    """
    d = Q.shape[0]
    T, Z = linalg.schur(Q, output="real")
    S = np.zeros((d, d))
    reflected = []
    i = 0
    while i < d:
        if i + 1 < d and abs(T[i + 1, i]) > SCHUR_BLOCK_TOL:
            a, b, c = T[i, i], T[i, i + 1], T[i + 1, i]
            theta = math.atan2(0.5 * (c - b), a)
            S[i, i + 1], S[i + 1, i] = -theta, theta
            i += 2
            continue
        if T[i, i] < 0:
            reflected.append(i)
        i += 1
    if len(reflected) % 2:
        raise err.OrientationError("The rotation part has determinant -1.")
    for p, q in zip(reflected[::2], reflected[1::2]):
        S[p, q], S[q, p] = -math.pi, math.pi
    S = Z @ S @ Z.T
    return 0.5 * (S - S.T)


def allocate_seats(norms, m):
    """Splits m factors across blocks by the largest norm-per-factor ratio.

    Every block with a non-zero norm gets one factor first; ties go to the
    earlier block. The allocation only grows as m grows. When m is below
    the number of non-zero blocks the caller merges the surplus factors.
    """
    seats = [0] * len(norms)
    active = [j for j, n in enumerate(norms) if n > 0]
    for j in active:
        seats[j] = 1
    if not active:
        return seats
    for _ in range(max(0, m - sum(seats))):
        j = max(active, key=lambda k: (norms[k] / seats[k], -k))
        seats[j] += 1
    return seats


def factor_near_identity(D, m):
    """Factors D into m near-identity factors.

    Args:
        D (array): A d x d matrix with det(D) > 0.
        m (int): Number of factors, at least 1.

    Returns:
        A LinearFactorization with D = (I + A_1) ... (I + A_m).

    Raises:
        OrientationError: det(D) <= 0.
        ConditioningError: The smallest singular value is below 1e-12.
    """
    D = np.atleast_2d(np.asarray(D, dtype=float))
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise err.DimensionError("D must be square, got shape {}.".format(D.shape))
    if int(m) < 1:
        raise err.ScheduleError("m must be at least 1, got {}.".format(m))
    m, d = int(m), D.shape[0]
    U, s, Vt = linalg.svd(D)
    if s[-1] < MIN_SINGULAR_VALUE:
        raise err.ConditioningError(
            "D is singular to working precision (smallest singular value {:.3e}).".format(
                s[-1]
            )
        )
    if not np.linalg.det(D) > 0:
        raise err.OrientationError("det(D) must be positive.")

    blocks = [
        ("rotation", rotation_log(U @ Vt)),
        ("stretch", (Vt.T * np.log(s)) @ Vt),
    ]
    norms = [float(np.linalg.norm(X, 2)) for _, X in blocks]
    norms = [n if n > LOG_ZERO_TOL else 0.0 for n in norms]
    seats = allocate_seats(norms, m)

    pieces = []
    for (name, X), k in zip(blocks, seats):
        if k:
            pieces.extend([linalg.expm(X / k)] * k)
    if not pieces:
        pieces = [np.eye(d)]
    if len(pieces) > m:
        merged = np.eye(d)
        for F in pieces[m - 1 :]:
            merged = merged @ F
        pieces = pieces[: m - 1] + [merged]
    pieces.extend([np.eye(d)] * (m - len(pieces)))
    factors = tuple(F - np.eye(d) for F in pieces)

    gamma = abs(math.log(s[0])) + abs(math.log(s[-1]))
    product = np.eye(d)
    for A in factors:
        product = product @ (np.eye(d) + A)
    error = float(np.linalg.norm(product - D) / np.linalg.norm(D))
    max_norm = max(float(np.linalg.norm(A, 2)) for A in factors)
    logger.debug(
        "Factored a %sx%s matrix into %s factors (seats %s), max norm %.4g.",
        d,
        d,
        m,
        seats,
        max_norm,
    )
    return LinearFactorization(
        factors=factors,
        gamma=gamma,
        reconstruction_error=error,
        max_norm=max_norm,
        c_f=C_F,
        target_bound=C_F * (gamma + math.pi) / m,
        seats={name: k for (name, _), k in zip(blocks, seats)},
    )
