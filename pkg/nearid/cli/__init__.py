from nearid.cli.report import Report  # noqa
from nearid.cli.registry import command  # noqa
from nearid.cli.main import main  # noqa
