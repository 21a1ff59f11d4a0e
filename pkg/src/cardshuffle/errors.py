"""Exception hierarchy shared by every module of the package."""


class ShuffleError(Exception):
    """Base class for all errors raised by cardshuffle."""


class DeckError(ShuffleError, ValueError):
    """A deck string or deck value violates the deck invariants."""


class OddLengthError(DeckError):
    pass


class UnbalancedError(DeckError):
    pass


class InvalidCharacterError(DeckError):
    pass


class NotADDeckError(DeckError):
    pass


class AbsorbingInputError(DeckError):
    pass


class NotTier1Error(DeckError):
    pass


class OutOfRangeError(ShuffleError, ValueError):
    """A numeric parameter (n, k, m, ...) is outside its valid range."""


class TooLargeError(OutOfRangeError):
    """The requested size exceeds the documented practical ceiling."""


class EmptyTierError(ShuffleError, ValueError):
    pass


class SingularMatrixError(ShuffleError, ArithmeticError):
    """Raised by the exact solvers; never expected for valid chain inputs."""


class StepCapExceededError(ShuffleError, RuntimeError):
    pass
