"""
Exception hierarchy shared by the kernel, the solvers and the CLI.
"""


class CavityError(Exception):
    """Base class for every error raised by this package."""

    kind = "error"

    def __init__(self, message, parameter=None):
        super().__init__(message)
        self.parameter = parameter

    def one_line(self):
        """Single-line, machine-parsable reason used by the CLI."""
        where = f"{self.parameter}: " if self.parameter else ""
        text = " ".join(str(self).split())
        return f"error[{self.kind}]: {where}{text}"


# ----------------------------------------------------------------------------
# special functions
# ----------------------------------------------------------------------------
class SpecialFunctionError(CavityError):
    kind = "specfun"


class DomainError(SpecialFunctionError):
    kind = "domain"


class PoleError(SpecialFunctionError):
    kind = "pole"


class ArgumentOverflowError(SpecialFunctionError):
    kind = "overflow"


class ConvergenceFailure(SpecialFunctionError):
    """A series or recurrence ran out of terms before converging."""

    kind = "convergence"

    def __init__(self, message, partial_value, abs_err_estimate, terms_used, parameter=None):
        super().__init__(message, parameter)
        self.partial_value = partial_value
        self.abs_err_estimate = abs_err_estimate
        self.terms_used = terms_used


# ----------------------------------------------------------------------------
# configuration
# ----------------------------------------------------------------------------
class ConfigError(CavityError):
    kind = "config"


# ----------------------------------------------------------------------------
# spectra
# ----------------------------------------------------------------------------
class SpectrumError(CavityError):
    kind = "solver"


class UnboundSpectrumError(SpectrumError):
    kind = "unbound"


class MissedRootError(SpectrumError):
    kind = "missed-root"

    def __init__(self, message, found, expected, parameter=None):
        super().__init__(message, parameter)
        self.found = found
        self.expected = expected


class SolverConvergenceError(SpectrumError):
    kind = "solver"


class CutoffViolation(CavityError):
    kind = "cutoff"

    def __init__(self, message, n, n_max, parameter="n"):
        super().__init__(message, parameter)
        self.n = n
        self.n_max = n_max


# ----------------------------------------------------------------------------
# currents
# ----------------------------------------------------------------------------
class ImaginaryCurrentError(CavityError):
    kind = "imaginary-current"


class DegenerateGammaError(CavityError):
    kind = "degenerate-gamma"

    def __init__(self, message, ell):
        super().__init__(message, parameter="ell")
        self.ell = ell


class LabelMismatchError(CavityError):
    kind = "label-mismatch"
