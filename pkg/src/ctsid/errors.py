"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user input: shapes, signs, missing fields, malformed config."""


class NumericalError(RuntimeError):
    """A numerical routine failed (SVD non-convergence, expm overflow, ...)."""


class DesignFailureError(RuntimeError):
    """Online experiment design did not reach full rank.

    Carries the partial dataset and the per-step branch log so the caller
    can diagnose a pathological sampling time or a mis-set rank tolerance.
    """

    def __init__(self, message, dataset=None, branch_log=None, rank_report=None):
        super().__init__(message)
        self.dataset = dataset
        self.branch_log = branch_log
        self.rank_report = rank_report


class VerificationError(RuntimeError):
    """A consistency check in the verification pipeline failed."""
