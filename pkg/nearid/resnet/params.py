"""Parameters of an (m, d, k) tanh residual network."""

# Standard Imports
import hashlib
import json

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.resnet.layer import ResidualLayer


class ResNetParams(object):
    """theta = (A_1..A_m, B_1..B_m) for layers h_i(x) = A_i tanh(B_i x) + x.

    Attributes:
        m (int): Depth.
        d (int): Width of the residual stream.
        k (int): Hidden size of each layer.
        A (tuple): m matrices of shape (d, k).
        B (tuple): m matrices of shape (k, d).
    """

    def __init__(self, A, B):
        A = tuple(np.array(a, dtype=float, ndmin=2) for a in A)
        B = tuple(np.array(b, dtype=float, ndmin=2) for b in B)
        if not A or len(A) != len(B):
            raise err.DimensionError("A and B must hold the same positive number of layers.")
        d, k = A[0].shape
        for a, b in zip(A, B):
            if a.shape != (d, k) or b.shape != (k, d):
                raise err.DimensionError(
                    "Every A_i must be ({d}, {k}) and every B_i ({k}, {d}); "
                    "got {a} and {b}.".format(
                        d=d, k=k, a=a.shape, b=b.shape
                    )
                )
            if not (np.isfinite(a).all() and np.isfinite(b).all()):
                raise err.ConfigError("Network parameters must be finite.")
        self.A = A
        self.B = B
        self.m, self.d, self.k = len(A), d, k

    @classmethod
    def zeros(cls, m, d, k):
        return cls([np.zeros((d, k))] * m, [np.zeros((k, d))] * m)

    @classmethod
    def random(cls, m, d, k, bound=0.2, seed=0):
        """Draws Gaussian layers rescaled so that |A_i|_2 |B_i|_2 = bound."""
        rng = np.random.default_rng(seed)
        A, B = [], []
        for _ in range(m):
            a = rng.standard_normal((d, k))
            b = rng.standard_normal((k, d))
            scale = np.sqrt(bound / (np.linalg.norm(a, 2) * np.linalg.norm(b, 2)))
            A.append(scale * a)
            B.append(scale * b)
        return cls(A, B)

    @property
    def size(self):
        return 2 * self.m * self.d * self.k

    def is_zero(self):
        return not any(a.any() for a in self.A) and not any(b.any() for b in self.B)

    def flatten(self):
        """Returns all A_i then all B_i as one vector."""
        return np.concatenate([a.ravel() for a in self.A] + [b.ravel() for b in self.B])

    def unflatten(self, vector):
        """Returns parameters of this shape filled from a flat vector."""
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (self.size,):
            raise err.DimensionError(
                "Expected a vector of length {}, got {}.".format(self.size, vector.shape)
            )
        step = self.d * self.k
        blocks = [vector[i * step : (i + 1) * step] for i in range(2 * self.m)]
        A = [blk.reshape(self.d, self.k) for blk in blocks[: self.m]]
        B = [blk.reshape(self.k, self.d) for blk in blocks[self.m :]]
        return ResNetParams(A, B)

    def norm(self):
        return float(np.linalg.norm(self.flatten()))

    def __add__(self, other):
        return self.unflatten(self.flatten() + other.flatten())

    def __sub__(self, other):
        return self.unflatten(self.flatten() - other.flatten())

    def __mul__(self, scalar):
        return self.unflatten(float(scalar) * self.flatten())

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ResNetParams):
            return NotImplemented
        return (self.m, self.d, self.k) == (other.m, other.d, other.k) and np.array_equal(
            self.flatten(), other.flatten()
        )

    def layers(self):
        """Returns the layers as maps on R^d."""
        return [ResidualLayer(a, b) for a, b in zip(self.A, self.B)]

    def to_dict(self):
        return {
            "m": self.m,
            "d": self.d,
            "k": self.k,
            "A": [a.tolist() for a in self.A],
            "B": [b.tolist() for b in self.B],
        }

    @classmethod
    def from_dict(cls, record):
        try:
            params = cls(record["A"], record["B"])
        except KeyError as e:
            raise err.ConfigError("Network record is missing {}.".format(e))
        except (TypeError, ValueError) as e:
            raise err.ConfigError("Malformed network record: {}".format(e))
        for key in ("m", "d", "k"):
            if key in record and int(record[key]) != getattr(params, key):
                raise err.DimensionError(
                    "Network record declares {}={} but its matrices give {}.".format(
                        key, record[key], getattr(params, key)
                    )
                )
        return params

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except ValueError as e:
            raise err.ConfigError("Network record is not valid JSON: {}".format(e))

    def digest(self):
        """SHA-256 of the canonical JSON record."""
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def __repr__(self):
        return "ResNetParams(m={}, d={}, k={})".format(self.m, self.d, self.k)
