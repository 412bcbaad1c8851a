"""Functional derivatives of the quadratic loss with respect to one layer.

For a state h = h_m o ... o h_1 and a target h*, the perturbation of
layer i

    D(y_j) = c [Dh_m(z_{m-1,j}) ... Dh_{i+1}(z_{i,j})]^-1 (h*(x_j) - h(x_j))

at its input points y_j = z_{i-1,j} pushes forward to c (h* - h) at the
output, so the derivative of Q along D is -c mean |h - h*|^2. Choosing c
so that D has unit sample-induced norm gives a descent direction whose
slope is bounded away from zero whenever Q(h) > Q(h*).
"""

# Standard Imports
import logging
from dataclasses import dataclass, field
from typing import Optional

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.functional.sampled import SampledFunction, SampledLayer

logger = logging.getLogger(__name__)

FLOOR_FRACTION = 1e-3
DEFAULT_T = 1e-5
DEFAULT_SLACK = 1e-6
MAX_HALVINGS = 50


@dataclass(frozen=True)
class DirectionalDerivative:
    """Three evaluations of D_{h_i} Q(h)(D).

    Attributes:
        fd_value (float): (Q(h with layer i moved by t D) - Q(h)) / t.
        exact_value (float): -c mean |h - h*|^2, or chain_value without c.
        chain_value (float): mean of (h - h*) . (pushed-forward D).
        t (float): The finite-difference step.
    """

    fd_value: float
    exact_value: float
    chain_value: float
    t: float


@dataclass(frozen=True)
class LayerBound:
    i: int
    c: Optional[float]
    exact_value: float
    fd_value: float
    bound_rhs: float
    margin: float
    passed: bool

    def to_dict(self):
        return {
            "i": self.i,
            "c": self.c,
            "exact_value": self.exact_value,
            "fd_value": self.fd_value,
            "bound_rhs": self.bound_rhs,
            "margin": self.margin,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class BoundReport:
    """Per-layer check of exact_value <= -(1 - eps)^(m-1) (Q - Q*) / |h - h*|."""

    epsilon: float
    m: int
    prefactor: float
    loss: float
    loss_star: float
    gap_norm: float
    norm_floor: float
    origin_fixed: bool
    per_layer: tuple = field(default_factory=tuple)

    @property
    def passed(self):
        return all(row.passed for row in self.per_layer)

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "m": self.m,
            "prefactor": self.prefactor,
            "loss": self.loss,
            "loss_star": self.loss_star,
            "gap_norm": self.gap_norm,
            "norm_floor": self.norm_floor,
            "origin_fixed": self.origin_fixed,
            "passed": self.passed,
            "per_layer": [row.to_dict() for row in self.per_layer],
        }


@dataclass(frozen=True)
class DescentResult:
    losses: tuple
    halvings: int
    state: object


def residual(state, target=None):
    """Returns h - h* at the inputs x_j.

    Args:
        state (CompositionState): The composition and its sample.
        target (callable): h*; the state's targets Y when omitted.
    """
    Y = state.Y if target is None else np.asarray(target(state.X), dtype=float)
    return SampledFunction(state.X, state.output - Y)


def default_floor(state):
    return FLOOR_FRACTION * state.R


def build_delta(state, i, delta_floor=None):
    """Builds the unit-norm perturbation of layer i.

    Args:
        state (CompositionState): The composition.
        i (int): The 1-based layer index.
        delta_floor (float): Points closer to 0 are left out of the norm;
            1e-3 R by default.

    Returns:
        (SampledFunction at the layer inputs, c). When h = h* on the sample
        D is zero and c is None.

    Raises:
        RegimeError: A downstream Jacobian is singular.
    """
    state._check_index(i)
    floor = default_floor(state) if delta_floor is None else delta_floor
    W = state.Y - state.output
    points = state.Z[i - 1]
    if not W.any():
        return SampledFunction(points, np.zeros_like(W)), None
    for j in range(state.m, i, -1):
        J = state.layers[j - 1].jacobian(state.Z[j - 1])
        try:
            W = np.linalg.solve(J, W[..., None])[..., 0]
        except np.linalg.LinAlgError:
            raise err.RegimeError(
                "Layer {} has a singular Jacobian on the sample.".format(j)
            )
    norm = SampledFunction(points, W).induced_norm(floor)
    if norm == 0:
        return SampledFunction(points, np.zeros_like(W)), None
    c = 1.0 / norm
    return SampledFunction(points, c * W), c


def push_forward(state, i, delta):
    """Returns Dh_m ... Dh_{i+1} D(z_{i-1,j}) for every sample."""
    state._check_index(i)
    W = delta(state.Z[i - 1])
    for j in range(i + 1, state.m + 1):
        J = state.layers[j - 1].jacobian(state.Z[j - 1])
        W = np.einsum("nab,nb->na", J, W)
    return W


def directional_derivative(state, i, delta, t=DEFAULT_T, c=None):
    """Evaluates the derivative of Q along a perturbation of layer i.

    Args:
        state (CompositionState): The composition.
        i (int): The 1-based layer index.
        delta (SampledFunction): The perturbation at the layer inputs.
        t (float): Finite-difference step, positive.
        c (float): The scale returned by build_delta, enabling the closed form.

    Returns:
        A DirectionalDerivative.
    """
    if not t > 0:
        raise err.ConfigError("The step t must be positive, got {}.".format(t))
    state._check_index(i)
    moved = state.Z[i] + t * delta(state.Z[i - 1])
    out = state.propagate(i, moved)
    q_moved = float(0.5 * np.mean(np.sum((out - state.Y) ** 2, axis=1)))
    fd_value = (q_moved - state.loss()) / t

    r = state.output - state.Y
    chain = float(np.mean(np.sum(r * push_forward(state, i, delta), axis=1)))
    if c is None:
        exact = 0.0 if delta.is_zero() else chain
    else:
        exact = float(-c * np.mean(np.sum(r ** 2, axis=1)))
    return DirectionalDerivative(fd_value=fd_value, exact_value=exact, chain_value=chain, t=t)


def verify_theorem3_bound(
    state, epsilon=None, q_star=0.0, slack=DEFAULT_SLACK, delta_floor=None, t=DEFAULT_T
):
    """Checks the descent lower bound at every layer.

    For every i the exact derivative along the unit perturbation must
    satisfy exact_value <= -(1 - eps)^(m-1) (Q(h) - Q*) / |h - h*|, with the
    norm taken on the sample above the floor, up to a relative slack.

    Args:
        state (CompositionState): A composition of near-identity layers.
        epsilon (float): Per-layer deviation; certified on the sample when omitted.
        q_star (float): Q(h*), 0 on realizable samples.
        slack (float): Relative slack on the right-hand side.
        delta_floor (float): Norm floor, 1e-3 R by default.
        t (float): Step of the finite-difference value in the report.

    Returns:
        A BoundReport.

    Raises:
        RegimeError: epsilon >= 1.
    """
    if epsilon is None:
        epsilon = state.certified_epsilon()
    if not 0.0 <= epsilon < 1.0:
        raise err.RegimeError(
            "The descent bound needs near-identity layers (epsilon < 1), got {}.".format(
                epsilon
            )
        )
    floor = default_floor(state) if delta_floor is None else delta_floor
    origin_fixed = state.origin_fixed()
    if not origin_fixed:
        logger.warning("Some layer does not fix the origin; |h - h*| may be infinite.")
    prefactor = (1.0 - epsilon) ** (state.m - 1)
    q = state.loss()
    gap = residual(state)
    gap_norm = 0.0 if gap.is_zero() else gap.induced_norm(floor)
    rhs = 0.0 if gap_norm == 0 else -prefactor * (q - q_star) / gap_norm

    rows = []
    for i in range(1, state.m + 1):
        delta, c = build_delta(state, i, delta_floor=floor)
        dd = directional_derivative(state, i, delta, t=t, c=c)
        allowed = rhs * (1.0 - slack)
        rows.append(
            LayerBound(
                i=i,
                c=c,
                exact_value=dd.exact_value,
                fd_value=dd.fd_value,
                bound_rhs=rhs,
                margin=allowed - dd.exact_value,
                passed=dd.exact_value <= allowed,
            )
        )
    return BoundReport(
        epsilon=float(epsilon),
        m=state.m,
        prefactor=prefactor,
        loss=q,
        loss_star=float(q_star),
        gap_norm=gap_norm,
        norm_floor=floor,
        origin_fixed=origin_fixed,
        per_layer=tuple(rows),
    )


def functional_descent_demo(state, i, step=1.0, n_steps=50, delta_floor=None):
    """Descends on layer i in function space with every other layer frozen.

    Layer i becomes a SampledLayer over its fixed input points, and each
    step moves its values by s D with D rebuilt from the current state.
    s starts at step and is halved until the loss does not increase.

    Returns:
        A DescentResult with the on-sample losses, including the initial
        one, and the number of halvings.
    """
    state._check_index(i)
    points = state.Z[i - 1]
    values = state.Z[i]
    current = state.replace_layer(i, SampledLayer(SampledFunction(points, values)))
    losses = [current.loss()]
    halvings = 0
    for _ in range(int(n_steps)):
        delta, c = build_delta(current, i, delta_floor=delta_floor)
        if c is None:
            losses.append(losses[-1])
            continue
        s = step
        for _ in range(MAX_HALVINGS):
            trial_values = values + s * delta.values
            out = current.propagate(i, trial_values)
            trial_loss = float(0.5 * np.mean(np.sum((out - current.Y) ** 2, axis=1)))
            if trial_loss <= losses[-1]:
                break
            s *= 0.5
            halvings += 1
        else:
            logger.warning("No decrease after %s halvings; stopping.", MAX_HALVINGS)
            losses.append(losses[-1])
            break
        if s < step:
            logger.debug("Backtracked to step %.3g.", s)
        values = trial_values
        current = current.replace_layer(i, SampledLayer(SampledFunction(points, values)))
        losses.append(current.loss())
    return DescentResult(losses=tuple(losses), halvings=halvings, state=current)
