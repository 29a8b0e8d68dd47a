"""Exception hierarchy shared across freeword modules."""

from __future__ import annotations


class FreewordError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""

    kind = "FreewordError"

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class RegexSyntaxError(FreewordError):
    kind = "RegexSyntaxError"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["position"] = self.position
        return d


class UnknownSymbolError(FreewordError):
    kind = "UnknownSymbol"


class ReservedSymbolError(FreewordError):
    kind = "ReservedSymbol"


class EmptyLanguageError(FreewordError):
    kind = "EmptyLanguage"


class InvalidDfaError(FreewordError):
    kind = "InvalidDfa"


class NoConvergence(FreewordError):
    kind = "NoConvergence"

    def __init__(self, max_iters: int, residual: float):
        super().__init__(f"power iteration did not converge in {max_iters} iterations (residual {residual:.3e})")
        self.max_iters = max_iters
        self.residual = residual


class NonPositiveEigenvector(FreewordError):
    kind = "NonPositiveEigenvector"


class NotStronglyConnected(FreewordError):
    kind = "NotStronglyConnected"


class MaxLengthExceeded(FreewordError):
    kind = "MaxLengthExceeded"


class MaxAttemptsExceeded(FreewordError):
    kind = "MaxAttemptsExceeded"

    def __init__(self, attempts: int, observed_rates: list[float]):
        super().__init__(f"no typical walk found in {attempts} attempts")
        self.attempts = attempts
        self.observed_rates = list(observed_rates)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["attempts"] = self.attempts
        d["observed_rates"] = self.observed_rates
        return d


class UncompletableTail(FreewordError):
    kind = "UncompletableTail"


class ZeroProbabilityEdge(FreewordError):
    kind = "ZeroProbabilityEdge"


class WordRejected(FreewordError):
    kind = "WordRejected"

    def __init__(self, index: int, position: int, symbol: str | None = None):
        where = f"word {index}, position {position}"
        super().__init__(f"word rejected by the automaton ({where}" + (f", symbol {symbol!r})" if symbol else ")"))
        self.index = index
        self.position = position
        self.symbol = symbol

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(index=self.index, position=self.position, symbol=self.symbol)
        return d


class AllZeroTail(FreewordError):
    kind = "AllZeroTail"


class EnumerationOverflow(FreewordError):
    kind = "EnumerationOverflow"
