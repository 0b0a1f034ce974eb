"""Exception types shared across the package."""


class SingdampError(Exception):
    """Base class for all package-specific errors."""


# --- measure construction / atomization ---

class NegativeWeight(SingdampError):
    """A weight, density, or coefficient of a positive measure is negative."""


class OutwardFlow(SingdampError):
    """A flow measure's field fails the inward-pointing condition on some edge."""


class ZeroMass(SingdampError):
    """The measure has total mass zero."""


class ResolutionOverflow(SingdampError):
    """Atomization would exceed the configured atom-count cap."""


class DegenerateFit(SingdampError):
    """A least-squares fit has no usable data (all-zero or collapsed samples)."""


class DomainError(SingdampError):
    """A scalar parameter lies outside its admissible open interval."""


# --- meshing / assembly ---

class DegenerateDomain(SingdampError):
    """Domain endpoints are ordered the wrong way or coincide."""


class NoInteriorDofs(SingdampError):
    """The mesh is too coarse to carry any interior degree of freedom."""


class AtomOutsideDomain(SingdampError):
    """A quadrature atom lies strictly outside the closed domain."""


# --- solvers ---

class SolverFailure(SingdampError):
    """An eigenvalue or linear solver failed to converge."""


class ResidualExceeded(SingdampError):
    """A computed eigenpair violates the declared residual tolerance."""


class NotNormalized(SingdampError):
    """An eigenpair is not normalized in the energy inner product."""


class CorollaryViolation(SingdampError):
    """An imaginary-mode cross-check failed (solver tolerance too loose)."""


class SingularShift(SingdampError):
    """The shifted system is numerically singular (shift hits the spectrum)."""


class DimensionMismatch(SingdampError):
    """State vectors do not match the number of degrees of freedom."""


class TooLarge(SingdampError):
    """The problem exceeds the cap of a dense-only operation."""


# --- harness ---

class ConfigError(SingdampError):
    """An experiment configuration violates the schema or its invariants."""


class TaskError(SingdampError):
    """A task failed while running an experiment; carries task context."""

    def __init__(self, task, cause):
        super().__init__(f"task {task!r} failed: {cause}")
        self.task = task
        self.cause = cause


class UnknownPreset(SingdampError):
    """Requested preset name is not in the catalog."""


class IoError(SingdampError):
    """Writing report artifacts failed."""
