"""Exception types shared across the package."""


class KtspanError(Exception):
    """Base class for package-specific failures."""


class InfeasibleError(KtspanError):
    """No feasible solution exists for the given instance.

    Carries a human-readable diagnostic; solvers attach the first
    obstruction they can identify (e.g. a backbone edge that no
    scorable clique covers).
    """


class InstanceTooLargeError(KtspanError):
    """Instance exceeds a hard safety bound for an exhaustive routine."""


class InconsistentPartitionError(KtspanError):
    """A child separator fails to partition its assigned region.

    Raised when the components hanging off a candidate clique do not
    exactly cover the region they were supposed to split. Indicates a
    malformed state transition, not bad user input.
    """


class NotRetainingError(KtspanError):
    """A k-tree does not contain every edge of the required backbone."""
