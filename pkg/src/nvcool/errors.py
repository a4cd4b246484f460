"""Exception and warning types shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 1, numerical/physical-regime failures with 2, and non-convergence of
an iterative solve with 3.
"""

__all__ = [
    "ConfigError",
    "DomainError",
    "MasingThresholdError",
    "DegenerateRatesError",
    "StiffnessError",
    "NumericalFailureError",
    "NonConvergenceError",
    "TruncationWarning",
    "ClampWarning",
    "FallbackWarning",
]


class ConfigError(Exception):
    """One or more invalid entries in a run configuration.

    Parameters
    ----------
    source : str
        Where the configuration came from (file name, ``--set``, ...).
    problems : list of (int, str)
        Line number (1-based, 0 for file-level problems) and message for
        every issue found, so a user can fix them all in one pass.
    """

    def __init__(self, source, problems):
        self.source = source
        self.problems = list(problems)
        lines = [f"{source}:{ln}: {msg}" if ln else f"{source}: {msg}"
                 for ln, msg in self.problems]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))


class DomainError(ValueError):
    """An argument lies outside the physically meaningful domain."""


class MasingThresholdError(DomainError):
    """The adiabatic photon-number formula was evaluated past the gain
    threshold, where its denominator is non-positive and the closed-form
    steady state does not exist."""


class DegenerateRatesError(DomainError):
    """The analytic steady-state populations are undefined because the
    rate-coefficient determinant vanishes."""


class NumericalFailureError(RuntimeError):
    """A numerical routine produced an unusable result (NaN/Inf state,
    singular linear system, ...)."""


class StiffnessError(NumericalFailureError):
    """The ODE integrator failed to advance.

    Attributes
    ----------
    time : float
        Integration time at which the step failed.
    """

    def __init__(self, message, time):
        super().__init__(f"{message} (at t = {time:.6g} s)")
        self.time = time


class NonConvergenceError(RuntimeError):
    """An iterative solve stopped without meeting its tolerance.

    Attributes
    ----------
    residual : float
        Norm of the final residual.
    """

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual = {residual:.3e})")
        self.residual = residual


class TruncationWarning(UserWarning):
    """The Fock-space cutoff may be too small for the requested state."""


class ClampWarning(UserWarning):
    """A derived quantity was clamped to its physical range."""


class FallbackWarning(UserWarning):
    """A primary numerical strategy failed and a fallback was used."""
