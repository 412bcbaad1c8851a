"""Finite datasets of (x, y) pairs and their CSV form.

The CSV starts with one comment line holding a JSON header, then a
column row x_1..x_d, y_1..y_d and one row per pair::

    # {"R": 1.0, "d": 2, "generator": "...", "n": 200, "seed": 0}
    x_1,x_2,y_1,y_2
    ...
"""

# Standard Imports
import csv
import io
import json
import logging

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err

logger = logging.getLogger(__name__)

RADIUS_RTOL = 1e-12


class Dataset(object):
    """Pairs (x_j, y_j) in R^d with inputs inside the ball of radius R.

    Attributes:
        X (ndarray): Inputs, shape (n, d).
        Y (ndarray): Targets, shape (n, d).
        R (float): Bounding radius of the inputs.
        meta (dict): Extra header fields such as seed and generator.

    Raises:
        DatasetError: The dataset is empty, shapes disagree or an input lies
            outside the ball.
    """

    def __init__(self, X, Y, R, meta=None):
        X = np.atleast_2d(np.array(X, dtype=float))
        Y = np.atleast_2d(np.array(Y, dtype=float))
        if X.size == 0:
            raise err.DatasetError("A dataset needs at least one pair.")
        if X.shape != Y.shape:
            raise err.DatasetError(
                "Inputs and targets differ in shape: {} and {}.".format(X.shape, Y.shape)
            )
        if not (np.isfinite(X).all() and np.isfinite(Y).all()):
            raise err.DatasetError("Dataset entries must be finite.")
        if np.linalg.norm(X, axis=1).max() > R * (1.0 + RADIUS_RTOL):
            raise err.DatasetError("Some inputs lie outside the ball of radius {}.".format(R))
        X.setflags(write=False)
        Y.setflags(write=False)
        self.X = X
        self.Y = Y
        self.R = float(R)
        self.meta = dict(meta or {})

    def __len__(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    def header(self):
        header = dict(self.meta)
        header.update({"d": self.d, "R": self.R, "n": len(self)})
        return header

    def to_csv(self):
        """Returns the CSV text."""
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.header(), sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["x_{}".format(j + 1) for j in range(self.d)]
            + ["y_{}".format(j + 1) for j in range(self.d)]
        )
        for x, y in zip(self.X, self.Y):
            writer.writerow([repr(float(v)) for v in np.concatenate([x, y])])
        return buf.getvalue()

    def save(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text):
        """Parses CSV text written by to_csv.

        Raises:
            DatasetError: The header or rows are malformed.
        """
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise err.DatasetError("Dataset CSV must start with a '# {json}' header line.")
        try:
            header = json.loads(lines[0][1:])
            rows = list(csv.reader(lines[1:]))
            values = np.array([[float(v) for v in row] for row in rows[1:] if row])
        except ValueError as e:
            raise err.DatasetError("Malformed dataset CSV: {}".format(e))
        d = int(header.get("d", 0))
        if values.ndim != 2 or values.shape[1] != 2 * d:
            raise err.DatasetError("Expected {} columns per row.".format(2 * d))
        meta = {k: v for k, v in header.items() if k not in ("d", "R", "n")}
        return cls(values[:, :d], values[:, d:], header["R"], meta=meta)

    @classmethod
    def load(cls, path):
        with open(path, newline="") as fh:
            return cls.from_csv(fh.read())
