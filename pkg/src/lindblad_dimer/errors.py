"""Exception types for anticipated numerical failures.

Invalid inputs raise plain :class:`ValueError`. Everything below signals a
well-formed request that cannot be evaluated numerically; ``kind`` is the
short machine-readable tag used by scan status columns and the CLI.
"""


class LindbladDimerError(Exception):
    kind = "numerical"

    def __init__(self, message, params=None):
        if params is not None:
            message = f"{message} (at {params})"
        super().__init__(message)
        self.params = params


class DegeneracyError(LindbladDimerError):
    """Exceptional point: the non-Hermitian Hamiltonian is (nearly) defective."""

    kind = "degenerate"


class SpectralDecompositionError(DegeneracyError):
    """Liouvillian eigenvector matrix is numerically singular."""


class NoCrossingError(LindbladDimerError):
    kind = "no_crossing"

    def __init__(self, message, horizon=None, params=None):
        super().__init__(message, params=params)
        self.horizon = horizon


class SingularSystemError(LindbladDimerError):
    kind = "singular"


class StepSizeError(LindbladDimerError):
    kind = "step_size"

    def __init__(self, message, t=None, params=None):
        super().__init__(message, params=params)
        self.t = t


class OverdampedWarning(UserWarning):
    """Trap rate exceeds twice the coupling (gamma > 2 v)."""
