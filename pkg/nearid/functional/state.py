"""A composition of layers evaluated on a finite sample."""

# Standard Imports
import logging

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.lipschitz import Cloud, certify_deviation

logger = logging.getLogger(__name__)

ORIGIN_ATOL = 1e-12


class CompositionState(object):
    """Layers h_1..h_m with their intermediate points on a sample.

    Attributes:
        layers (tuple): The layers, first applied first.
        X (ndarray): Inputs x_j, shape (n, d).
        Y (ndarray): Targets h*(x_j), shape (n, d).
        Z (tuple): Z[i] = h_i o ... o h_1 applied to X, with Z[0] = X.
        R (float): Radius of the inputs.
    """

    def __init__(self, layers, X, Y, R=None):
        self.layers = tuple(layers)
        if not self.layers:
            raise err.LayerError("A composition needs at least one layer.", 0)
        X = np.atleast_2d(np.array(X, dtype=float))
        Y = np.atleast_2d(np.array(Y, dtype=float))
        if X.size == 0:
            raise err.DatasetError("A composition state needs at least one sample.")
        if X.shape != Y.shape:
            raise err.DatasetError(
                "Inputs and targets differ in shape: {} and {}.".format(X.shape, Y.shape)
            )
        self.X, self.Y = X, Y
        self.R = float(np.linalg.norm(X, axis=1).max()) if R is None else float(R)
        Z = [X]
        for k, layer in enumerate(self.layers):
            try:
                Z.append(layer.eval(Z[-1]))
            except err.InversionError as e:
                raise err.LayerError(str(e), k + 1)
        self.Z = tuple(Z)

    @classmethod
    def from_resnet(cls, theta, data):
        """State of a ResNet on a Dataset or an (X, Y) pair."""
        X, Y = (data.X, data.Y) if hasattr(data, "X") else data
        R = getattr(data, "R", None)
        return cls(theta.layers(), X, Y, R=R)

    @classmethod
    def from_stack(cls, stack, X, Y, R=None):
        """State of a LayerStack, or any list of layers."""
        return cls(list(stack), X, Y, R=R)

    @property
    def m(self):
        return len(self.layers)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def output(self):
        return self.Z[-1]

    def loss(self):
        """Q(h) = mean of 1/2 |h(x_j) - y_j|^2."""
        return float(0.5 * np.mean(np.sum((self.output - self.Y) ** 2, axis=1)))

    def replace_layer(self, i, layer):
        """Returns the state with layer i (1-based) swapped out."""
        self._check_index(i)
        layers = list(self.layers)
        layers[i - 1] = layer
        return CompositionState(layers, self.X, self.Y, R=self.R)

    def propagate(self, i, Z_i):
        """Runs points given at the output of layer i through layers i+1..m."""
        out = Z_i
        for layer in self.layers[i:]:
            out = layer.eval(out)
        return out

    def origin_fixed(self):
        """True when every layer maps 0 to 0."""
        zero = np.zeros(self.X.shape[1])
        for layer in self.layers:
            if np.linalg.norm(layer.eval(zero)) > ORIGIN_ATOL:
                return False
        return True

    def certify(self, n_pairs=1000, seed=0):
        """Certifies each layer on the cloud of its input points."""
        return [
            certify_deviation(layer, Cloud(self.Z[k]), n_pairs=n_pairs, seed=seed)
            for k, layer in enumerate(self.layers)
        ]

    def certified_epsilon(self, n_pairs=1000, seed=0):
        """Largest per-layer deviation, preferring the Jacobian-grid estimate."""
        bounds = []
        for layer, cert in zip(self.layers, self.certify(n_pairs=n_pairs, seed=seed)):
            bound = cert.estimate
            deviation_bound = getattr(layer, "deviation_bound", None)
            if deviation_bound is not None:
                bound = max(bound, deviation_bound)
            bounds.append(bound)
        return float(max(bounds))

    def _check_index(self, i):
        if not 1 <= i <= self.m:
            raise err.LayerError("Layer index must lie in [1, {}].".format(self.m), i)
