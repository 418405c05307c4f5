"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration problems exit 2,
runtime aborts (boundary breach, tracking lost) exit 3, and a fit that
was downgraded to the parabola fallback exits 4 after writing outputs.
"""


class LatticeAiryError(Exception):
    """Base class for all package errors."""


class DomainError(LatticeAiryError, ValueError):
    """Invalid numeric input to a pure function (non-finite, wrong sign, ...)."""


class ConfigurationError(LatticeAiryError, ValueError):
    """Inconsistent or incomplete scenario / builder configuration."""


class BoundaryBreachError(LatticeAiryError, RuntimeError):
    """Wavepacket amplitude reached the grid boundary mid-run (grid too small)."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class TrackingLostError(LatticeAiryError, RuntimeError):
    """Peak tracking lost continuity; `last_good_index` is the last trusted snapshot."""

    def __init__(self, message, last_good_index=None):
        super().__init__(message)
        self.last_good_index = last_good_index


class AmbiguousPeakError(LatticeAiryError, RuntimeError):
    """Momentum density is not unimodal; `candidates` lists competing peak positions."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class DivergenceError(LatticeAiryError, ArithmeticError):
    """Quantity is undefined at this argument (e.g. refractive index at a Bessel root)."""


class FitInstabilityWarning(UserWarning):
    """Two-parameter relativistic fit was unstable and fell back to a parabola."""
