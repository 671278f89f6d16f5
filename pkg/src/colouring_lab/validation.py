from collections.abc import Sequence


class EnumerationGuardError(ValueError):
    """
    Raised when an exact routine would have to enumerate more objects than its guard allows.
    """

    def __init__(self, what: str, count: int, guard: int):
        self.count = count
        self.guard = guard
        super().__init__(f"{what}: {count} exceeds the enumeration guard {guard}")


class LotteryPreconditionError(ValueError):
    """
    Raised when a lottery has more decks than the tail bounds allow.
    Carries the computed threshold (1 - epsilon) * n * log(n).
    """

    def __init__(self, m: int, threshold: float):
        self.m = m
        self.threshold = threshold
        super().__init__(
            f"Lottery has m={m} decks, more than the allowed (1 - epsilon) n log n = {threshold:.4f}"
        )


class CliqueFoundError(ValueError):
    """
    Raised when a clique shows up where clique-freeness was required.
    """

    def __init__(self, witness: Sequence[int], r: int):
        self.witness = tuple(witness)
        self.r = r
        super().__init__(f"Graph contains K_{r} on vertices {list(self.witness)}")


class CoverValidationError(Exception):
    """
    Exception raised when a cover is structurally invalid.
    Contains a list of errors found during validation.
    """

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__(
            f"Cover validation failed with {len(errors)} errors:\n" + "\n".join(errors)
        )


class DocumentError(Exception):
    """
    Exception raised when an input document cannot be turned into a domain object.
    Contains a list of errors found during validation.
    """

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__(
            f"Document validation failed with {len(errors)} errors:\n" + "\n".join(errors)
        )
