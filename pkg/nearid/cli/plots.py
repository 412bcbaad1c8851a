"""Static SVG plots of the CSV outputs."""

# Standard Imports
import logging
import os

# ThirdParty Imports
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# Internal Imports
import nearid.errors as err  # noqa: E402
from nearid.cli import output  # noqa: E402

logger = logging.getLogger(__name__)

DECAY_SERIES = ("epsilon_target", "max_cert", "max_pair", "max_jac")


def kind_of(columns):
    """Returns 'decay' or 'trajectory' for the header of a known CSV."""
    if "m" in columns and "epsilon_target" in columns:
        return "decay"
    if "step" in columns and "loss" in columns:
        return "trajectory"
    raise err.DatasetError(
        "Cannot plot a CSV with columns {}; expected a decay sweep or a trajectory.".format(
            ", ".join(columns)
        )
    )


def _floats(rows, column):
    return [float(row[column]) if row[column] != "" else float("nan") for row in rows]


def plot_decay(ax, rows, columns):
    ms = _floats(rows, "m")
    for name in DECAY_SERIES:
        if name in columns:
            style = "--" if name == "epsilon_target" else "-o"
            ax.plot(ms, _floats(rows, name), style, label=name)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("number of nonlinear layers m")
    ax.set_ylabel("deviation from the identity")
    ax.legend()


def plot_trajectory(ax, rows, columns):
    steps = _floats(rows, "step")
    losses = _floats(rows, "loss")
    ax.plot(steps, losses, "-")
    if all(v > 0 for v in losses):
        ax.set_yscale("log")
    ax.set_xlabel("step")
    ax.set_ylabel("loss")


PLOTTERS = {"decay": plot_decay, "trajectory": plot_trajectory}


def render(path, out, digest):
    """Plots one CSV into out/<stem>.svg.

    Args:
        path (str): A decay or trajectory CSV.
        out (str): The output directory.
        digest (str): The config hash of the plot run, used as the SVG id salt.

    Returns:
        The path of the SVG.

    Raises:
        DatasetError: The CSV is empty or of an unknown kind.
    """
    source, columns, rows = output.read_csv(path)
    kind = kind_of(columns)
    stem = os.path.splitext(os.path.basename(path))[0]
    target = os.path.join(out, stem + ".svg")
    description = "config_sha256={}".format(digest)
    if source:
        description += " source_sha256={}".format(source)
    with plt.rc_context({"svg.hashsalt": digest}):
        fig, ax = plt.subplots(figsize=(6, 4))
        try:
            PLOTTERS[kind](ax, rows, columns)
            ax.set_title(stem)
            fig.tight_layout()
            fig.savefig(
                target, format="svg", metadata={"Date": None, "Description": description}
            )
        finally:
            plt.close(fig)
    logger.debug("Plotted %s (%s) to %s.", path, kind, target)
    return target
