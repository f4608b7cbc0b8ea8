"""Exception types shared across the package."""


class BirkhoffError(Exception):
    """Base class for package-specific failures."""


class EvaluationError(BirkhoffError):
    """A user-supplied callable returned non-finite or misshaped values."""


class RegularityError(BirkhoffError):
    """The structure matrix is numerically singular where regularity is required."""


class TransversalityError(BirkhoffError):
    """A transversality determinant vanished.

    Carries the offending determinant in ``det`` (scaled by the matrix
    max-norm, the same quantity the nonsingularity test uses).
    """

    def __init__(self, message: str, det: float):
        super().__init__(f"{message} (|det| = {abs(det):.3e})")
        self.det = det


class NewtonError(BirkhoffError):
    """Newton iteration failed; carries the last iterate and residual norm."""

    def __init__(self, message: str, last_iterate, residual_norm: float, iterations: int):
        super().__init__(
            f"{message} after {iterations} iterations, ||r||_inf = {residual_norm:.3e}"
        )
        self.last_iterate = last_iterate
        self.residual_norm = residual_norm
        self.iterations = iterations


class StepFailure(BirkhoffError):
    """A one-step solve did not converge.

    ``step_index`` and ``trajectory`` (the states accepted before the
    failure) are attached when the failure happens inside ``integrate``.
    """

    def __init__(self, message: str, last_iterate, residual_norm: float, t: float):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual_norm = residual_norm
        self.t = t
        self.step_index = None
        self.trajectory = None


class KindError(BirkhoffError):
    """Operation invoked on a system kind it does not support."""


class InconsistencyError(BirkhoffError):
    """A reconstruction consistency check failed; input is likely not self-adjoint."""


class UnsupportedOrderError(BirkhoffError):
    """Requested expansion order lies above the implemented cap."""
