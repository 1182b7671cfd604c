"""Exception types shared across the package."""


class L1LabError(Exception):
    """Base class for package-specific failures."""


class RankDeficiencyError(L1LabError, ValueError):
    """Measurement matrix does not have full row rank."""


class InfeasibleProblemError(L1LabError, RuntimeError):
    """No point satisfies the affine constraints."""


class UnboundedProblemError(L1LabError, RuntimeError):
    """Linear program objective is unbounded below."""


class KappaInfiniteError(UnboundedProblemError):
    """The null-space ratio max ||w_S||_1 / ||w_Sbar||_1 is unbounded."""


class RecoveryStageError(L1LabError, RuntimeError):
    """A stage of a multi-step recovery failed; carries the stage label."""

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"{stage}: {message}")


class ConfigError(L1LabError, ValueError):
    """Invalid experiment configuration."""
