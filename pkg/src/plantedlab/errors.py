"""Exception types shared across the workbench."""


class ParameterError(ValueError):
    """Invalid model/operation parameters."""


class ResourceBudgetError(RuntimeError):
    """An enumeration would exceed its configured budget."""


class InconsistentInputError(RuntimeError):
    """A zero-noise posterior was asked for an observation with no support."""


class IllConditionedError(RuntimeError):
    """A ratio estimate has a denominator indistinguishable from zero."""


class DegenerateInputError(ValueError):
    """Input violates a non-degeneracy requirement (e.g. dependent basis rows)."""


class EstimatorTrialError(RuntimeError):
    """An estimator failed during a Monte-Carlo trial; carries the trial index."""

    def __init__(self, trial: int, cause: BaseException):
        super().__init__(f"estimator failed on trial {trial}: {cause!r}")
        self.trial = trial
        self.cause = cause
