"""MapSpec: the JSON record that names a map family and its parameters.

A MapSpec is a JSON object::

    {"family": "radial_tanh", "params": {"beta": 0.1},
     "alpha": null, "M": null, "R": 1.0, "x0": [0.0, 0.0], "d": 2}

`alpha` and `M` are optional; when given they replace the constants the
family derives and are flagged as supplied.
"""

# Standard Imports
import json

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err
from nearid.maps.families import (
    AffineMap,
    ComposedMap,
    IdentityMap,
    RadialTanhMap,
    TriangularFlow,
)
from nearid.maps.normalize import normalize

MAP_FAMILIES = ("identity", "affine", "radial_tanh", "triangular", "composition")


def map_from_spec(spec):
    """Builds a SmoothMap from a MapSpec dict or JSON string.

    Raises:
        ConfigError: The record is malformed or names an unknown family.
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except ValueError as e:
            raise err.ConfigError("MapSpec is not valid JSON: {}".format(e))
    if not isinstance(spec, dict):
        raise err.ConfigError("A MapSpec must be a JSON object.")
    family = spec.get("family")
    if family not in MAP_FAMILIES:
        raise err.ConfigError(
            "Unknown map family '{}'. Use one of {}.".format(family, MAP_FAMILIES)
        )
    params = spec.get("params") or {}
    if not isinstance(params, dict):
        raise err.ConfigError("MapSpec 'params' must be an object.")
    common = {"R": float(spec.get("R", 1.0)), "x0": spec.get("x0")}
    constants = {"alpha": spec.get("alpha"), "M": spec.get("M")}

    try:
        if family == "identity":
            smooth_map = IdentityMap(_require(spec, "d"), **common)
        elif family == "affine":
            smooth_map = AffineMap(_require(params, "D"), params.get("b"), **common, **constants)
        elif family == "radial_tanh":
            smooth_map = RadialTanhMap(
                _require(spec, "d"), _require(params, "beta"), **common, **constants
            )
        elif family == "triangular":
            smooth_map = TriangularFlow(
                _require(params, "weights"),
                _require(params, "beta"),
                params.get("diag_beta", 0.0),
                **common,
                **constants,
            )
        else:
            inner = [map_from_spec(s) for s in _require(params, "maps")]
            smooth_map = ComposedMap(inner, **constants)
            _check_composition_domain(spec, smooth_map)
    except (TypeError, ValueError) as e:
        raise err.ConfigError("Malformed '{}' MapSpec: {}".format(family, e))

    if "d" in spec and spec["d"] is not None and int(spec["d"]) != smooth_map.d:
        raise err.DimensionError(
            "MapSpec declares d={} but its parameters give d={}.".format(
                spec["d"], smooth_map.d
            )
        )
    if spec.get("normalized"):
        smooth_map = normalize(smooth_map)
    return smooth_map


def to_spec(smooth_map):
    """Serializes a map into a MapSpec dict."""
    return smooth_map.to_spec()


def _require(record, key):
    if key not in record or record[key] is None:
        raise err.ConfigError("MapSpec is missing the required field '{}'.".format(key))
    return record[key]


def _check_composition_domain(spec, smooth_map):
    """A composition lives on its innermost map's ball; top-level R/x0 may only restate it."""
    if spec.get("R") is not None and not np.isclose(float(spec["R"]), smooth_map.R):
        raise err.ConfigError(
            "Composition MapSpec declares R={} but its innermost map has R={}.".format(
                spec["R"], smooth_map.R
            )
        )
    if spec.get("x0") is not None:
        x0 = np.asarray(spec["x0"], dtype=float)
        if x0.shape != smooth_map.x0.shape or not np.allclose(x0, smooth_map.x0):
            raise err.ConfigError(
                "Composition MapSpec declares x0={} but its innermost map has x0={}.".format(
                    spec["x0"], smooth_map.x0.tolist()
                )
            )
