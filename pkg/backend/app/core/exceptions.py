"""
diffset toolkit - Exceptions
Every error raised on bad input subclasses both DiffsetError and ValueError.
"""


class DiffsetError(Exception):
    """Base class for all toolkit errors"""


class ModulusOutOfRange(DiffsetError, ValueError):
    """Modulus outside the supported range"""


class NotAUnit(DiffsetError, ValueError):
    """Residue is not invertible modulo q"""

    def __init__(self, x: int, q: int) -> None:
        super().__init__(f"{x} is not a unit modulo {q}")
        self.x = x
        self.q = q


class NotADivisor(DiffsetError, ValueError):
    """Value does not divide the modulus"""

    def __init__(self, d: int, q: int) -> None:
        super().__init__(f"{d} does not divide {q}")
        self.d = d
        self.q = q


class ModulusMismatch(DiffsetError, ValueError):
    """Operands live in rings with different moduli"""


class EmptySetError(DiffsetError, ValueError):
    """Operation requires a nonempty set"""


class LengthMismatch(DiffsetError, ValueError):
    """Vector length differs from the modulus"""


class NotPrime(DiffsetError, ValueError):
    """Operation is only defined for (odd) primes"""


class InfeasibleCover(DiffsetError, ValueError):
    """No covering set exists for the requested target"""


class DenominatorNotUnit(DiffsetError, ValueError):
    """Mobius action undefined: cx + d is not a unit"""


class MalformedLiteral(DiffsetError, ValueError):
    """Set literal could not be parsed"""


class UnknownSuite(DiffsetError, ValueError):
    """Suite, quantity or objective name not recognized"""


class InvalidRange(DiffsetError, ValueError):
    """Malformed or empty --q / --density range"""


class SearchBudgetExceeded(DiffsetError, RuntimeError):
    """Exact search exceeded its node limit"""
