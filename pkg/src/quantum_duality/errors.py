"""Exception types. Each carries enough context to name the offending input."""


class QuantumDualityError(Exception):
    """Base class for domain errors raised by this package."""


class ParseError(QuantumDualityError, ValueError):
    """Malformed textual input; ``token`` is the piece that failed."""

    def __init__(self, message: str, token: str | None = None):
        super().__init__(message)
        self.token = token


class InvalidTriangulation(QuantumDualityError, ValueError):
    pass


class ZeroPolynomial(QuantumDualityError, ValueError):
    pass


class NoHighestTerm(QuantumDualityError, ValueError):
    pass


class NotInQSubalgebra(QuantumDualityError, ValueError):
    def __init__(self, message: str, term=None):
        super().__init__(message)
        self.term = term


class NonRealizable(QuantumDualityError, ValueError):
    pass


class NegativeNonPeripheral(QuantumDualityError, ValueError):
    pass


class InvalidCurve(QuantumDualityError, ValueError):
    pass


class NotPeripheral(QuantumDualityError, ValueError):
    pass


class NotInALattice(QuantumDualityError, ValueError):
    pass


class InternalParityViolation(QuantumDualityError, RuntimeError):
    pass


class PeelFailure(QuantumDualityError, RuntimeError):
    pass


class KernelViolation(QuantumDualityError, ValueError):
    pass
