"""Exception hierarchy shared by every layer of the package."""


class HocodimError(Exception):
    pass


class InputError(HocodimError, ValueError):
    """Malformed user input: bad words, bad permutations, unresolved names."""


class WordParseError(InputError):
    pass


class RelatorError(HocodimError):
    """A relator does not evaluate to the identity in a finite quotient."""

    def __init__(self, relator: str, where: str = ""):
        self.relator = relator
        msg = f"relator {relator!r} is not killed"
        if where:
            msg += f" by {where}"
        super().__init__(msg)


class QuotientTooLarge(HocodimError):
    pass


class RingMismatch(HocodimError, ValueError):
    pass


class ComplexError(HocodimError):
    """A chain-level identity (dd = 0, chain map, diagonal) fails in a reduction."""


class Infeasible(HocodimError):
    """A bounded linear system (lift, certificate) has no solution."""


class BudgetExceeded(HocodimError):
    pass
