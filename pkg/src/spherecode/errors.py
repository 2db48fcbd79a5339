"""Exception types raised across the package."""


class SphereCodeError(Exception):
    """Base class for all package errors."""


class NonUnitVectorError(SphereCodeError):
    def __init__(self, index, norm):
        super().__init__(f"vector {index} has norm {norm!r}, expected 1")
        self.index = index
        self.norm = norm


class AmbiguousMatchError(SphereCodeError):
    def __init__(self, pair, value, angles):
        super().__init__(
            f"pair {pair} with product {value!r} is within 2*tol_match of "
            f"several angles {angles}"
        )
        self.pair = pair
        self.value = value
        self.angles = angles


class SingularProjectionError(SphereCodeError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class DomainError(SphereCodeError, ValueError):
    pass


class PoleError(SphereCodeError, ZeroDivisionError):
    pass


class NotPSDError(SphereCodeError):
    def __init__(self, eigenvalue, threshold):
        super().__init__(
            f"Gram matrix is not PSD: eigenvalue {eigenvalue!r} < -{threshold!r}"
        )
        self.eigenvalue = eigenvalue


class RankExcessError(SphereCodeError):
    def __init__(self, rank, dim, eigenvalue):
        super().__init__(
            f"Gram matrix has rank {rank} > {dim} "
            f"(smallest retained eigenvalue {eigenvalue!r})"
        )
        self.rank = rank
        self.dim = dim
        self.eigenvalue = eigenvalue


class PreconditionError(SphereCodeError, ValueError):
    pass


class HypothesisError(SphereCodeError, ValueError):
    """The Ramsey-lemma size hypothesis is violated or unverifiable."""


class RamseyFailure(SphereCodeError):
    """The greedy Ramsey chain ran out of vertices."""

    def __init__(self, step, size, needed, steps):
        super().__init__(
            f"greedy chain failed at step {step}: |Y| = {size}, needed {needed}"
        )
        self.step = step
        self.size = size
        self.needed = needed
        self.steps = steps

    def to_dict(self):
        return {
            "error": "ramsey_failure",
            "step": self.step,
            "size": self.size,
            "needed": self.needed,
            "steps": [list(s) for s in self.steps],
        }


class InternalInconsistencyError(SphereCodeError):
    """An assertion of the proof failed on input that validated."""


class SchemaError(SphereCodeError, ValueError):
    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
