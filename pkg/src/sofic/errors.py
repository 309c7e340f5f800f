"""Exception hierarchy.

Every error carries the name of the module it originates from so the CLI can
report it.  Refusals (the construction declines honestly) are separated from
malformed input.
"""


class SoficError(Exception):
    module = "sofic"


class RefusalError(SoficError):
    """The computation declined to produce an answer; the input was valid."""


# core-monoid

class InvalidMonoid(SoficError, ValueError):
    module = "monoids"


class NotAssociative(InvalidMonoid):
    def __init__(self, triple):
        self.triple = tuple(triple)
        i, j, k = self.triple
        super().__init__(f"table is not associative at ({i}, {j}, {k})")


class NoIdentity(InvalidMonoid):
    def __init__(self):
        super().__init__("table has no two-sided identity")


class BadIndex(InvalidMonoid):
    pass


class CapExceeded(RefusalError):
    """A configured size cap would be exceeded; the input itself is valid."""
    module = "monoids"

    def __init__(self, what, needed, cap):
        self.needed = needed
        self.cap = cap
        super().__init__(f"{what}: {needed} exceeds cap {cap}")


class UnsupportedGroup(SoficError, TypeError):
    module = "monoids"


class ParseError(SoficError, ValueError):
    module = "monoids"


# groups

class EmptySet(SoficError, ValueError):
    module = "groups"


class NotAmenableCapable(RefusalError):
    module = "groups"


class SearchBudgetExceeded(RefusalError):
    module = "groups"

    def __init__(self, message, best_quality=None):
        self.best_quality = best_quality
        if best_quality is not None:
            message = f"{message} (best quality {best_quality})"
        super().__init__(message)


class NoSeparatingQuotient(RefusalError):
    module = "groups"


# witness

class MissingTable(SoficError, KeyError):
    module = "witness"

    def __str__(self):
        return self.args[0] if self.args else "missing table"


class IdentityViolated(SoficError):
    module = "witness"


class MalformedFile(SoficError, ValueError):
    module = "witness"

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at {position}"
        super().__init__(message)


# builder

class HypothesesNotMet(RefusalError):
    module = "builder"

    def __init__(self, clause, detail=""):
        self.clause = clause
        super().__init__(f"HypothesesNotMet: {clause}" + (f" ({detail})" if detail else ""))


class WitnessRejected(SoficError):
    """The builder produced a witness its own checker rejects.  Always a bug."""
    module = "builder"
