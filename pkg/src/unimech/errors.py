"""Exception types and shared tolerance handling.

All numerical tolerances in the package default to 1e-10 and can be overridden
globally through the UM_TOL environment variable (read at call time, so tests
may monkeypatch the environment).
"""

import os

DEFAULT_TOL = 1e-10


def default_tol() -> float:
    """Package-wide default tolerance, honouring the UM_TOL override."""
    raw = os.environ.get("UM_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"UM_TOL must parse as a float, got {raw!r}") from exc
    if not value > 0.0:
        raise ConfigError(f"UM_TOL must be positive, got {value}")
    return value


class DimensionError(ValueError):
    """Array shapes or block dimensions are inconsistent."""


class UnknownPreset(KeyError):
    """Requested preset name is not registered."""


class SingularInertia(ValueError):
    """Inertia operator is not symmetric positive definite."""


class NonFiniteState(FloatingPointError):
    """Integration produced a NaN or infinity."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"non-finite state after step {step}")


class GroupMismatch(ValueError):
    """Jets living in different groups (or of different order) were combined."""


class SingularMatrix(ValueError):
    """A group element could not be inverted."""


class FactorizationError(ValueError):
    """Jet factorization failed to reproduce the input within tolerance."""


class SingularFiberMap(ValueError):
    """Matrix basis is linearly dependent; coordinates are not well defined."""


class TooFewPoints(ValueError):
    """Not enough trajectory samples for the requested finite-difference stencil."""


class ConfigError(ValueError):
    """Run configuration is missing keys, has bad values, or failed to parse."""
