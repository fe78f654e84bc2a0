class LEGZ_Exception(Exception):
    """Base class for exceptions in legz."""


class CoefficientSyntaxError(LEGZ_Exception, ValueError):
    """Text does not spell a Gaussian integer, such as `2+2i`, `-i` or `7`."""


class CoefficientTooLargeError(LEGZ_Exception):
    """
    Factoring a norm would need trial division beyond the configured ceiling.
    Raised instead of returning a factorization that might be wrong.
    The ceiling is set by the LEGZ_FACTOR_CEILING environment variable.
    """


class NotCoprimeError(LEGZ_Exception, ValueError):
    """Arguments are required to be coprime (their gcd must be a unit) but are not."""


class NotNormalFormError(LEGZ_Exception, ValueError):
    """
    An operation requires an equation in normal form,
    i.e. square-free and pairwise coprime coefficients.
    """


class TrivialSolutionError(LEGZ_Exception, ValueError):
    """The triple (0, 0, 0) was supplied where a nontrivial solution is required."""


class PreconditionError(LEGZ_Exception, ValueError):
    """A documented precondition of an operation does not hold for its inputs."""


class InexactDivisionError(LEGZ_Exception, ArithmeticError):
    """Exact division was requested but the divisor leaves a nonzero remainder."""


class InvariantFault(LEGZ_Exception):
    """
    An internal invariant failed.
    These faults would falsify a step of the underlying proof
    (for example the divisibility lemma of the descent)
    and indicate a bug rather than bad input.
    """
