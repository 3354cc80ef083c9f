"""Exception hierarchy shared across the package.

Three families matter to callers: validation errors (bad input), cap errors
(the computation would exceed a configured exhaustive-search bound), and
breach errors (an exact identity that must hold came out false, which means
either a bug or a falsified structural claim).  The CLI maps these to exit
codes 2, 3 and 4.
"""


class PosetcodesError(Exception):
    """Base class for all package errors."""


class ValidationError(PosetcodesError):
    """Bad or out-of-contract input."""


class CapExceeded(PosetcodesError):
    """An exhaustive enumeration hit its configured bound."""

    def __init__(self, what, cap):
        super().__init__(f"{what} exceeds cap {cap}")
        self.what = what
        self.cap = cap


class BreachError(PosetcodesError):
    """An exact structural identity failed; loud by design."""


# -- validation -------------------------------------------------------------

class RangeError(ValidationError):
    """Element index outside {1..n}."""


class CycleError(ValidationError):
    """Input relation is not acyclic."""


class NotAnIdeal(ValidationError):
    """Subset is not downward closed."""


class NotATree(ValidationError):
    """Induced subposet is not a rooted tree/forest."""


class NotAnIsomorphism(ValidationError):
    """Map fails to preserve and reflect the order."""


class SizeOverflow(ValidationError):
    """Requested structure is larger than the configured bound."""


class ShapeDomainError(ValidationError):
    """Input does not live in the ordered Hamming (NRT) space asked for."""


class IEViolation(ValidationError):
    """Operation requires the ideal-extension property but the poset lacks it."""


class NotSelfDual(ValidationError):
    """Operation requires a self-dual poset."""


class MalformedIsometry(ValidationError):
    """Matrix/permutation pair is not a linear isometry."""


class DimensionMismatch(ValidationError):
    """Objects live over different (p, n)."""


class NotGraded(ValidationError):
    """Level fibers are ill-defined: some cover skips a level."""


class DomainError(ValidationError):
    """Parameter outside the mathematical domain of the formula."""


class ParseError(ValidationError):
    """Malformed input document."""


class UnknownCommand(ValidationError):
    """CLI dispatch got a command it does not know."""


# -- breaches ---------------------------------------------------------------

class AxiomViolation(BreachError):
    """A brute-force check of the association scheme axioms failed."""


class NonIntegralEigenvalue(BreachError):
    """A character sum did not collapse to a rational integer."""


class NonIntegralQ(BreachError):
    """Second eigenmatrix entry failed to be an integer."""


class NonIntegralResult(BreachError):
    """MacWilliams transform produced a non-integer count."""
