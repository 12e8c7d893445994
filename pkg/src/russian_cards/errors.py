"""Exception hierarchy shared by every module in the package."""


class RussianCardsError(Exception):
    """Base class for all errors raised by this package."""


# finite fields and geometry


class NotPrime(RussianCardsError, ValueError):
    pass


class ReducibleModulus(RussianCardsError, ValueError):
    pass


class NoDefaultModulus(RussianCardsError, ValueError):
    pass


class CoincidentPoints(RussianCardsError, ValueError):
    pass


# colourings


class TooLargeForExhaustive(RussianCardsError):
    pass


class DuplicateColourInWitness(RussianCardsError, ValueError):
    pass


class NotEnoughDirections(RussianCardsError):
    pass


class DuplicateSpecialLines(RussianCardsError, ValueError):
    pass


# protocol


class SizeMismatch(RussianCardsError, ValueError):
    pass


class TooManyHeavyLines(RussianCardsError):
    """Bob's set of heavy lines exceeds the colour budget; the protocol is not executable here."""


class NotALine(RussianCardsError):
    pass


class NoMatchingLine(RussianCardsError):
    pass


class AmbiguousLine(RussianCardsError):
    """Two full lines of the announced colour: the colouring was not distinguished."""


class MalformedTranscript(RussianCardsError, ValueError):
    pass


# parameters


class RegimeInfeasibleAtThisA(RussianCardsError):
    pass
