# Standard Imports
import json
import os

# ThirdParty Imports
import numpy as np

# Internal Imports
from nearid.maps import AffineMap, RadialTanhMap, TriangularFlow
from nearid.resnet import ResNetParams

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(DATA_DIR, name)


def load_config(name):
    with open(data_path(name)) as fh:
        return json.load(fh)


def write_config(directory, config, name="config.json"):
    path = os.path.join(directory, name)
    with open(path, "w") as fh:
        if isinstance(config, str):
            fh.write(config)
        else:
            json.dump(config, fh)
    return path


def read_result(directory, name):
    with open(os.path.join(directory, name)) as fh:
        return json.load(fh)


def read_bytes(directory, name):
    with open(os.path.join(directory, name), "rb") as fh:
        return fh.read()


def tanh_map(d=2, beta=0.1, R=1.0, x0=None):
    return RadialTanhMap(d, beta, R=R, x0=x0)


def scaling_map(factor, d=1, R=1.0):
    return AffineMap(factor * np.eye(d), R=R)


def triangular_map(R=1.0):
    weights = [[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.3, -0.4, 0.0]]
    return TriangularFlow(weights, beta=0.2, diag_beta=0.05, R=R)


def random_rotation(d, rng):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def well_conditioned_matrix(d, rng, max_log=np.log(10.0)):
    """A matrix with det > 0 and condition number at most exp(2 max_log)."""
    s = np.exp(rng.uniform(-max_log, max_log, size=d))
    return random_rotation(d, rng) @ np.diag(s) @ random_rotation(d, rng).T


def small_network(m=2, d=2, k=3, bound=0.2, seed=0):
    return ResNetParams.random(m, d, k, bound=bound, seed=seed)
