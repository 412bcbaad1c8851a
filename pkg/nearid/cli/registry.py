"""Registration of the experiment subcommands."""

# Standard Imports
import inspect
import logging
from typing import Callable

# Internal Imports
import nearid.errors as err

logger = logging.getLogger(__name__)

_commands = {}


def command(name: str):
    """Registers the decorated function as the handler of a subcommand.

    Handlers are called with keyword arguments only:
    ``handler(config=..., out=..., threads=..., **kwargs)`` and return a
    Report.

    Example:
    ```python
    @command("factor")
    def factor(**payload):
        config = payload["config"]
        ...
    ```

    Raises:
        ConfigError: The handler is not callable, does not accept keyword
            arguments (**kwargs) or the name is taken.
    """

    def decorator(handler: Callable):
        _validate_handler(handler)
        if name in _commands and _commands[name] is not handler:
            raise err.ConfigError("A handler for '{}' is already registered.".format(name))
        _commands[name] = handler
        return handler

    return decorator


def names():
    return sorted(_commands)


def get(name):
    try:
        return _commands[name]
    except KeyError:
        raise err.ConfigError(
            "Unknown subcommand '{}'. Choose one of: {}.".format(name, ", ".join(names()))
        )


def run(name, **payload):
    """Runs the handler registered under name.

    Raises:
        ConfigError: No handler is registered under name.
    """
    handler = get(name)
    logger.debug("Running the '%s' handler.", name)
    try:
        return handler(**payload)
    except Exception as e:
        logger.debug("When calling '%s()' the following error was raised: %s", handler.__name__, e)
        raise


def _validate_handler(handler):
    """Checks if the handler is callable and accepts a kwargs param.

    Raises:
        ConfigError: The specified handler is not callable.
        ConfigError: The handler must accept keyword arguments (**kwargs).
    """
    handler_name = handler.__name__ if hasattr(handler, "__name__") else handler
    if not callable(handler):
        msg = "The specified handler '{}' is not callable.".format(handler_name)
        raise err.ConfigError(msg)
    handler_params = inspect.signature(handler).parameters.values()
    if not any(param for param in handler_params if param.kind == param.VAR_KEYWORD):
        msg = "The handler '{}' must accept keyword arguments (**kwargs).".format(handler_name)
        raise err.ConfigError(msg)
