from __future__ import annotations


class FactoringError(Exception):
    """Base class for every error the pipeline reports to its caller."""

    exit_code = 1


class NotPrime(FactoringError):
    """Raised when the modulus is not an odd prime."""


class FieldTooLarge(FactoringError):
    """Raised when the modulus does not fit the 62-bit residue bound."""


class NonResidueScanExhausted(FactoringError):
    """Raised when no quadratic non-residue is found below the scan bound."""


class ZeroInput(FactoringError):
    """Raised when an operation needs a nonzero argument."""


class BothZero(FactoringError):
    """Raised when a gcd is requested of two zero polynomials."""


class DegenerateInput(FactoringError):
    """Raised when a polynomial has degree below what the operation needs."""


class TrivialResult(FactoringError):
    """Raised when a lifted factor comes back trivial."""


class MultiplicityOverflow(FactoringError):
    """Raised when a squarefree decomposition meets a multiplicity >= p."""


class OracleBoundExceeded(FactoringError):
    """Raised when the brute-force oracle is asked to scan too large a field."""


class DimensionCeilingExceeded(FactoringError):
    """Raised when a tower would exceed the configured dimension ceiling."""


class MalformedInput(FactoringError):
    """Raised when an explicit coloring is not well behaved."""


class AxiomViolation(FactoringError):
    """Raised when explicit colors violate an association-scheme axiom."""

    def __init__(self, which: str, witness: tuple[int, ...] = (), detail: str = "") -> None:
        self.which = which
        self.witness = tuple(witness)
        message = f"Scheme axiom violated: {which}"
        if self.witness:
            message += f" at {self.witness}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class NotTransitive(FactoringError):
    """Raised when fixture generators do not act transitively."""


class TrivialClosedSubset(FactoringError):
    """Raised when a primitive reduction is asked for {I} or the whole scheme."""


class ConfigInvalid(FactoringError):
    """Raised when a run configuration fails validation."""


class InternalInvariantBroken(FactoringError):
    """Raised when an internal invariant fails; always a bug, never an input problem."""

    exit_code = 2


class InvalidWitness(InternalInvariantBroken):
    """Raised when a zero-divisor witness turns out to be invertible or zero."""


class NoDistinguishingCoefficient(InternalInvariantBroken):
    """Raised when a proper closed subset yields only scalar block coefficients."""
