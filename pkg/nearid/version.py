# see: http://legacy.python.org/dev/peps/pep-0440/#public-version-identifiers
__version__ = "0.1.0"
