"""A container for the results of one experiment."""

# Standard Imports
import logging

# Internal Imports
import nearid.errors as err


class Report(object):
    """A dict-like container of experiment results.

    Attributes:
        command (str): The subcommand that produced the report.
        data (dict): The JSON-ready results.
        checks (dict): Named verdicts; a False value is a failed check.
        outputs (list): Paths of the files written for this report.

    Example:
    ```python
    report = registry.run("factor", config=config, digest=digest, out="results")
    assert report["within_target"]
    report.validate()
    ```

    Note:
        Any attributes or methods prefixed with _underscores are
        intended to be "private" internal use only.
    """

    def __init__(self, command, data, checks=None, outputs=None):
        self.command = command
        self.data = data
        self.checks = dict(checks or {})
        self.outputs = list(outputs or [])
        self._logger = logging.getLogger(__name__)

    def __str__(self):
        return f"{self.data}"

    def __getitem__(self, key):
        """Retrieves any key from the results, None when missing."""
        return self.data.get(key, None)

    def __contains__(self, key):
        return key in self.data

    def get(self, key, default=None):
        return self.data.get(key, default)

    def failures(self):
        return sorted(name for name, ok in self.checks.items() if ok is False)

    def validate(self):
        """Checks that every verdict of the report passed.

        Returns:
            (Report) self

        Raises:
            VerdictError: Some check failed.
        """
        if not self.failures():
            self._logger.debug("Report '%s' passed: %s", self.command, sorted(self.checks))
            return self
        msg = "The '{}' experiment failed its checks.".format(self.command)
        raise err.VerdictError(message=msg, report=self)
