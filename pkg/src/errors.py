"""Exception hierarchy shared by the numerical core, the Fock-space oracle and the CLI."""

from __future__ import annotations


class NopaBellError(Exception):
    """Base class for every error raised by this package."""

    pass


class InvalidArgumentError(NopaBellError, ValueError):
    """Raised when an operation receives an out-of-domain argument (negative r, NaN amplitude, ...)."""

    pass


class CutoffTooSmallError(NopaBellError):
    """Raised when the probability discarded by a Fock cutoff exceeds the requested tolerance."""

    def __init__(self, cutoff: int, tail_weight: float, tolerance: float):
        self.cutoff = cutoff
        self.tail_weight = tail_weight
        self.tolerance = tolerance
        super().__init__(f"Fock cutoff N={cutoff} discards probability {tail_weight:.3e} > tolerance {tolerance:.3e}")


class ConvergenceNotReachedError(NopaBellError):
    """Raised when doubling the Fock cutoff moves the oracle value by more than the tolerance."""

    def __init__(self, cutoff: int, value: float, doubled_value: float, tolerance: float):
        self.cutoff = cutoff
        self.value = value
        self.doubled_value = doubled_value
        self.tolerance = tolerance
        super().__init__(f"Oracle not converged at N={cutoff}: |{value!r} - {doubled_value!r}| > {tolerance:.3e} after doubling the cutoff")


class OracleConsistencyError(NopaBellError):
    """Raised when an oracle expectation value is not real within numerical precision."""

    pass


class TsirelsonBoundError(NopaBellError):
    """Raised when a computed CHSH value exceeds the quantum-mechanical maximum 2*sqrt(2)."""

    pass


class SweepConfigError(NopaBellError):
    """
    Raised for an invalid sweep configuration.

    Args:
        diagnostics: (field, message) pairs, one per problem found
        line: Source line in a YAML config file, when the problem is tied to one
    """

    def __init__(self, diagnostics: list[tuple[str, str]], line: int | None = None):
        self.diagnostics = diagnostics
        self.line = line
        where = f" (line {line})" if line is not None else ""
        details = "; ".join(f"{field}: {message}" for field, message in diagnostics)
        super().__init__(f"Invalid sweep configuration{where}: {details}")
