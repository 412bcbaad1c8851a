"""Experiment configs: schemas, defaults and the canonical hash.

Every subcommand reads one JSON object. Before anything is computed the
object is checked against the subcommand's schema (unknown keys, missing
keys, types and ranges) and the defaults are filled in. The result is the
*resolved* config; its canonical JSON is hashed with SHA-256 and both are
written into every output of the run.
"""

# Standard Imports
import hashlib
import json
import logging
import numbers
from dataclasses import dataclass
from typing import Callable, Optional

# Internal Imports
import nearid.errors as err
from nearid.maps.spec import map_from_spec

logger = logging.getLogger(__name__)

REQUIRED = object()


@dataclass(frozen=True)
class Field:
    """One key of a schema.

    Attributes:
        kind (str): 'int', 'number', 'bool', 'str', 'object', 'matrix',
            'int_list' or 'str_list'.
        default: The value filled in when the key is absent; REQUIRED
            makes the key mandatory.
        check (callable): Returns an error string for a bad value, else None.
        nullable (bool): None is accepted.
    """

    kind: str
    default: object = REQUIRED
    check: Optional[Callable] = None
    nullable: bool = False


def at_least(low):
    def check(value):
        if value < low:
            return "must be at least {}".format(low)

    return check


def positive(value):
    if not value > 0:
        return "must be positive"


def unit_interval(value):
    if not 0 <= value < 1:
        return "must lie in [0, 1)"


def one_of(*choices):
    def check(value):
        if value not in choices:
            return "must be one of {}".format(", ".join(choices))

    return check


def each(check):
    def check_all(values):
        for value in values:
            problem = check(value)
            if problem:
                return "entries " + problem

    return check_all


SEED = Field("int", 0, at_least(0))

NETWORK_SHAPE = {
    "m": Field("int", REQUIRED, at_least(1)),
    "d": Field("int", REQUIRED, at_least(1)),
    "k": Field("int", REQUIRED, at_least(1)),
    "bound": Field("number", 0.2, positive),
}

SCHEMAS = {
    "decompose": {
        "map": Field("object"),
        "m_linear": Field("int", 4, at_least(1)),
        "m_nonlinear": Field("int", 16, at_least(2)),
        "epsilon": Field("number", None, positive, nullable=True),
        "sweep": Field("int_list", None, each(at_least(2)), nullable=True),
        "n_domain": Field("int", 256, at_least(2)),
        "n_pairs": Field("int", 1000, at_least(1)),
        "n_check": Field("int", 1000, at_least(1)),
        "seed": SEED,
    },
    "certify": {
        "map": Field("object"),
        "stack": Field("bool", False),
        "m_linear": Field("int", 4, at_least(1)),
        "m_nonlinear": Field("int", 16, at_least(2)),
        "epsilon": Field("number", None, positive, nullable=True),
        "n_domain": Field("int", 256, at_least(2)),
        "n_pairs": Field("int", 1000, at_least(1)),
        "n_grid": Field("int", None, at_least(1), nullable=True),
        "lemma4_alpha": Field("number", None, unit_interval, nullable=True),
        "seed": SEED,
    },
    "factor": {
        "matrix": Field("matrix"),
        "m": Field("int", 4, at_least(1)),
        "seed": SEED,
    },
    "saddle": {
        "theta_star": Field("object", None, nullable=True),
        "random_target": Field("object", None, nullable=True),
        "n": Field("int", 200, at_least(2)),
        "R": Field("number", 1.0, positive),
        "lr": Field("number", 0.1, positive),
        "steps": Field("int", 1000, at_least(0)),
        "init": Field("str", "zero", one_of("zero", "target")),
        "seed": SEED,
    },
    "frechet": {
        "network": Field("object", None, nullable=True),
        "target": Field("object", None, nullable=True),
        "random": Field("object", None, nullable=True),
        "map": Field("object", None, nullable=True),
        "target_map": Field("object", None, nullable=True),
        "m_linear": Field("int", 4, at_least(1)),
        "m_nonlinear": Field("int", 16, at_least(2)),
        "schedule_epsilon": Field("number", None, positive, nullable=True),
        "epsilon": Field("number", None, unit_interval, nullable=True),
        "n": Field("int", 200, at_least(2)),
        "R": Field("number", 1.0, positive),
        "t": Field("number", 1e-5, positive),
        "slack": Field("number", 1e-6, at_least(0)),
        "delta_floor": Field("number", None, positive, nullable=True),
        "n_pairs": Field("int", 1000, at_least(1)),
        "descent": Field("object", None, nullable=True),
        "seed": SEED,
    },
    "plot": {
        "inputs": Field("str_list"),
    },
}

SUBSCHEMAS = {
    ("saddle", "random_target"): NETWORK_SHAPE,
    ("frechet", "random"): dict(NETWORK_SHAPE, target_bound=Field("number", 0.2, positive)),
    ("frechet", "descent"): {
        "layer": Field("int", REQUIRED, at_least(1)),
        "step": Field("number", 1.0, positive),
        "n_steps": Field("int", 50, at_least(1)),
    },
}


def load(path):
    """Reads a JSON config file.

    Raises:
        ConfigError: The file is not a JSON object.
    """
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except ValueError as e:
        raise err.ConfigError("Config {} is not valid JSON: {}".format(path, e))
    if not isinstance(raw, dict):
        raise err.ConfigError("Config {} must hold a JSON object.".format(path))
    return raw


def resolve(command, raw, seed=None):
    """Validates a raw config and fills in its defaults.

    Args:
        command (str): The subcommand whose schema applies.
        raw (dict): The config as read.
        seed (int): Overrides the config seed when given.

    Returns:
        The resolved config dict.

    Raises:
        ConfigError: The config breaks the schema.
    """
    if command not in SCHEMAS:
        raise err.ConfigError("No config schema for '{}'.".format(command))
    if not isinstance(raw, dict):
        raise err.ConfigError("A config must be a JSON object.")
    raw = dict(raw)
    if seed is not None:
        if "seed" not in SCHEMAS[command]:
            logger.warning("'%s' takes no seed; ignoring --seed.", command)
        else:
            raw["seed"] = seed
    resolved = _apply(SCHEMAS[command], raw, command)
    for (name, key), schema in SUBSCHEMAS.items():
        if name == command and resolved.get(key) is not None:
            resolved[key] = _apply(schema, resolved[key], "{}.{}".format(command, key))
    _check_sources(command, resolved)
    return resolved


def canonical(resolved):
    return json.dumps(resolved, sort_keys=True, separators=(",", ":"))


def config_hash(resolved):
    """SHA-256 hex digest of the canonical JSON of a resolved config."""
    return hashlib.sha256(canonical(resolved).encode("utf-8")).hexdigest()


def _apply(schema, raw, where):
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise err.ConfigError("Unknown keys in {}: {}.".format(where, ", ".join(unknown)))
    resolved = {}
    for key, field in schema.items():
        if key not in raw:
            if field.default is REQUIRED:
                raise err.ConfigError("Missing required key '{}' in {}.".format(key, where))
            resolved[key] = field.default
            continue
        resolved[key] = _coerce(field, raw[key], "{}.{}".format(where, key))
    return resolved


def _coerce(field, value, where):
    if value is None:
        if field.nullable:
            return None
        raise err.ConfigError("{} must not be null.".format(where))
    value = _typed(field.kind, value, where)
    if field.check is not None:
        problem = field.check(value)
        if problem:
            raise err.ConfigError("{} {}, got {!r}.".format(where, problem, value))
    return value


def _typed(kind, value, where):
    def fail():
        raise err.ConfigError("{} must be of type {}, got {!r}.".format(where, kind, value))

    if kind == "bool":
        if not isinstance(value, bool):
            fail()
        return value
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, numbers.Integral):
            fail()
        return int(value)
    if kind == "number":
        if isinstance(value, bool) or not isinstance(value, numbers.Real):
            fail()
        return float(value)
    if kind == "str":
        if not isinstance(value, str):
            fail()
        return value
    if kind == "object":
        if not isinstance(value, dict):
            fail()
        return value
    if kind == "int_list":
        if not isinstance(value, list) or not value:
            fail()
        return [_typed("int", v, where) for v in value]
    if kind == "str_list":
        if not isinstance(value, list) or not value:
            fail()
        return [_typed("str", v, where) for v in value]
    if kind == "matrix":
        if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
            fail()
        rows = [[_typed("number", v, where) for v in row] for row in value]
        if any(len(row) != len(rows) for row in rows):
            raise err.ConfigError("{} must be a square matrix.".format(where))
        return rows
    raise err.ConfigError("Unknown field kind '{}'.".format(kind))


def _check_sources(command, resolved):
    """Cross-key rules a per-key schema cannot express."""
    for key in ("map", "target_map"):
        if resolved.get(key) is not None:
            map_from_spec(resolved[key])
    if command == "saddle":
        given = [k for k in ("theta_star", "random_target") if resolved[k] is not None]
        if len(given) != 1:
            raise err.ConfigError("saddle needs exactly one of theta_star or random_target.")
    if command == "frechet":
        given = [k for k in ("network", "random", "map") if resolved[k] is not None]
        if len(given) != 1:
            raise err.ConfigError("frechet needs exactly one of network, random or map.")
        if resolved["target"] is not None and resolved["network"] is None:
            raise err.ConfigError("frechet takes a target only together with network.")
        if resolved["target_map"] is not None and resolved["map"] is None:
            raise err.ConfigError("frechet takes a target_map only together with map.")
