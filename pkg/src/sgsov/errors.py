"""Exception types mapped to the command-line exit-code contract."""


class ConfigError(ValueError):
    """Invalid model parameters or run configuration (exit code 2)."""


class ToleranceError(RuntimeError):
    """A verified quantity exceeded its numerical tolerance (exit code 3)."""


class DegenerateModelError(RuntimeError):
    """Parameters hit a degenerate configuration: repeated separation-grid
    zeros, grid collisions, or non-simple joint spectra (exit code 4)."""
