"""Writers for the JSON and CSV outputs of an experiment.

Both formats carry the resolved config hash, and both are byte-stable:
keys are sorted, floats are written with repr and nothing depends on the
clock or the output path.
"""

# Standard Imports
import csv
import io
import json
import logging
import os

# ThirdParty Imports
import numpy as np

# Internal Imports
import nearid.errors as err

logger = logging.getLogger(__name__)

HASH_PREFIX = "# config_sha256="


def _default(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("Object of type {} is not JSON serializable".format(type(value).__name__))


def dumps(config, digest, result):
    document = {"config": config, "config_sha256": digest, "result": result}
    return json.dumps(document, sort_keys=True, indent=2, default=_default) + "\n"


def write_json(out, name, config, digest, result):
    """Writes {"config", "config_sha256", "result"} to out/name and returns the path."""
    path = os.path.join(out, name)
    with open(path, "w") as fh:
        fh.write(dumps(config, digest, result))
    logger.debug("Wrote %s.", path)
    return path


def cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(out, name, digest, columns, rows):
    """Writes a CSV whose first line records the config hash.

    Args:
        columns (list): Header names.
        rows (list): Dicts keyed by the header names, or sequences.
    """
    buf = io.StringIO()
    buf.write(HASH_PREFIX + digest + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = [row.get(c) for c in columns] if isinstance(row, dict) else list(row)
        writer.writerow([cell(v) for v in values])
    path = os.path.join(out, name)
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    logger.debug("Wrote %s rows to %s.", len(rows), path)
    return path


def read_csv(path):
    """Reads a CSV written by write_csv.

    Returns:
        (digest or None, columns, rows as dicts of strings).

    Raises:
        DatasetError: The file holds no header or no rows.
    """
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    digest = None
    body = []
    for line in lines:
        if line.startswith(HASH_PREFIX):
            digest = line[len(HASH_PREFIX):].strip()
        elif not line.startswith("#") and line.strip():
            body.append(line)
    if not body:
        raise err.DatasetError("{} is empty.".format(path))
    reader = csv.DictReader(body)
    rows = list(reader)
    if not rows:
        raise err.DatasetError("{} has a header but no rows.".format(path))
    return digest, list(reader.fieldnames), rows
