"""Forward pass, quadratic loss and exact reverse-mode gradient of a tanh ResNet."""

# Standard Imports
import logging
from dataclasses import dataclass

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err

logger = logging.getLogger(__name__)

FD_STEP = 1e-5


@dataclass(frozen=True)
class ForwardTrace:
    """Cached values of one forward pass.

    Attributes:
        pre (tuple): B_i z_{i-1} for each layer, shape (n, k).
        act (tuple): tanh(B_i z_{i-1}) for each layer, shape (n, k).
        z (tuple): z_0 = x, ..., z_m = output, shape (n, d).
    """

    pre: tuple
    act: tuple
    z: tuple


def forward(theta, x):
    """Evaluates h_theta = h_m o ... o h_1.

    Args:
        theta (ResNetParams): The network.
        x (array): A point of shape (d,) or a batch of shape (n, d).

    Returns:
        The output, in the shape of x, and a ForwardTrace over the batch.
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != theta.d:
        raise err.DimensionError(
            "Expected inputs in R^{}, got shape {}.".format(theta.d, np.shape(x))
        )
    pre, act, zs = [], [], [X]
    z = X
    for A, B in zip(theta.A, theta.B):
        p = z @ B.T
        t = np.tanh(p)
        z = z + t @ A.T
        pre.append(p)
        act.append(t)
        zs.append(z)
    trace = ForwardTrace(pre=tuple(pre), act=tuple(act), z=tuple(zs))
    return (z[0] if single else z), trace


def loss(theta, data):
    """Returns Q(theta) = mean of 1/2 |h_theta(x_j) - y_j|^2.

    Raises:
        DatasetError: The dataset is empty.
    """
    X, Y = _unpack(data)
    out, _ = forward(theta, X)
    return float(0.5 * np.mean(np.sum((out - Y) ** 2, axis=1)))


def grad(theta, data):
    """Returns dQ/dtheta by reverse accumulation, shaped like ResNetParams.

    For the residual recursion z_i = z_{i-1} + A_i tanh(B_i z_{i-1}) with
    G = dQ/dz_i and t = tanh(B_i z_{i-1}):
    dA_i = G^T t, dB_i = ((G A_i) * (1 - t^2))^T z_{i-1} and
    dQ/dz_{i-1} = G + ((G A_i) * (1 - t^2)) B_i.

    Raises:
        DatasetError: The dataset is empty.
    """
    X, Y = _unpack(data)
    out, trace = forward(theta, X)
    G = (out - Y) / X.shape[0]
    dA, dB = [None] * theta.m, [None] * theta.m
    for i in reversed(range(theta.m)):
        t, z_prev = trace.act[i], trace.z[i]
        dA[i] = G.T @ t
        dp = (G @ theta.A[i]) * (1.0 - t ** 2)
        dB[i] = dp.T @ z_prev
        G = G + dp @ theta.B[i]
    return type(theta)(dA, dB)


def finite_difference_grad(theta, data, step=FD_STEP):
    """Central-difference gradient over every flattened coordinate."""
    base = theta.flatten()
    out = np.empty_like(base)
    for j in range(base.size):
        e = np.zeros_like(base)
        e[j] = step
        out[j] = (loss(theta.unflatten(base + e), data) - loss(theta.unflatten(base - e), data)) / (
            2.0 * step
        )
    return theta.unflatten(out)


def _unpack(data):
    if hasattr(data, "X"):
        X, Y = data.X, data.Y
    else:
        X, Y = data
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.size == 0:
        raise err.DatasetError("The dataset is empty.")
    if X.shape != Y.shape:
        raise err.DatasetError(
            "Inputs and targets differ in shape: {} and {}.".format(X.shape, Y.shape)
        )
    return X, Y
