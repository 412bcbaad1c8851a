"""The ``nearid`` command line.

    nearid decompose --config decompose.json --out results/
    nearid plot results/decay.csv --out results/

Exit codes: 0 success, 1 configuration or computation error, 2 an
expected mathematical rejection (infeasible schedule, reversed
orientation, identity target).
"""

# Standard Imports
import argparse
import logging
import os
import sys

# Internal Imports
import nearid.errors as err
from nearid.cli import commands  # noqa: F401
from nearid.cli import config as cfg
from nearid.cli import registry
from nearid.version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECTED = 2

HELP = {
    "decompose": "Decompose a map into near-identity layers.",
    "certify": "Certify the deviation from the identity of a map or its layers.",
    "factor": "Factor a matrix into near-identity linear factors.",
    "saddle": "Run the ResNet saddle experiment.",
    "frechet": "Check the per-layer descent bound of a ResNet.",
    "plot": "Plot decay or trajectory CSVs as SVG.",
}


class ArgumentParser(argparse.ArgumentParser):
    """An ArgumentParser that raises instead of exiting on bad arguments."""

    def error(self, message):
        raise err.ConfigError(message)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="Output directory (default: .)")
    common.add_argument("--seed", type=int, default=None, help="Override the config seed.")
    common.add_argument("--threads", type=int, default=1, help="Worker threads (default: 1)")
    common.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")

    parser = ArgumentParser(prog="nearid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=ArgumentParser)
    sub.required = True
    for name in registry.names():
        p = sub.add_parser(name, parents=[common], help=HELP.get(name))
        if name == "plot":
            p.add_argument("inputs", nargs="+", help="CSV files written by other subcommands.")
        else:
            p.add_argument("--config", required=True, help="Path to the JSON config.")
    return parser


def _configure_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if verbose:
        logging.getLogger("nearid").setLevel(logging.DEBUG)


def run(args):
    """Runs one parsed invocation and returns its Report."""
    if args.threads < 1:
        raise err.ConfigError("--threads must be at least 1, got {}.".format(args.threads))
    if args.command == "plot":
        raw = {"inputs": list(args.inputs)}
    else:
        raw = cfg.load(args.config)
    resolved = cfg.resolve(args.command, raw, seed=args.seed)
    digest = cfg.config_hash(resolved)
    logger.info("Resolved %s config, sha256 %s.", args.command, digest)
    os.makedirs(args.out, exist_ok=True)
    report = registry.run(
        args.command, config=resolved, digest=digest, out=args.out, threads=args.threads
    )
    return report.validate()


def main(argv=None):
    """Entry point of the console script; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.verbose)
        report = run(args)
    except err.RejectionError as e:
        logger.warning("Rejected: %s", e)
        print("rejected: {}".format(e), file=sys.stderr)
        return EXIT_REJECTED
    except (err.NearIdError, OSError, ValueError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_ERROR
    for path in report.outputs:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
