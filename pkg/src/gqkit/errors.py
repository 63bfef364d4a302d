"""Exception hierarchy.

Every error carries ``where``, the ``module.operation`` that raised it, so the
command-line front end can report provenance without inspecting tracebacks.
"""


class GQKitError(Exception):
    where = "gqkit"

    def __init__(self, message="", *, where=None):
        super().__init__(message)
        if where is not None:
            self.where = where


# numberlab
class PrecisionExhausted(GQKitError):
    pass


class InsufficientDepth(GQKitError):
    pass


class ZeroMode(GQKitError, ValueError):
    pass


# prequantum
class OutOfDomain(GQKitError, ValueError):
    pass


class QuadratureFailure(GQKitError):
    pass


class NonMonotoneAction(GQKitError):
    pass


# cohomeq
class CutoffMismatch(GQKitError, ValueError):
    pass


class SeedCountMismatch(GQKitError, ValueError):
    pass


class CutoffTooSmall(GQKitError, ValueError):
    pass


class InsufficientWitness(GQKitError):
    pass


# quantize
class HypothesisViolated(GQKitError):
    pass


class RankInconsistent(GQKitError):
    pass


# foliation
class DegenerateTangency(GQKitError):
    pass
