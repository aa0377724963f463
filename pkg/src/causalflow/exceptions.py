"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`CausalFlowError`, so callers can catch the whole family at once.
"""


class CausalFlowError(Exception):
    """Base class for all package errors."""


class NetworkError(CausalFlowError, ValueError):
    """The network definition violates a structural invariant."""


class CycleDetected(NetworkError):
    pass


class NonPositiveDecay(NetworkError):
    pass


class NegativeNoise(NetworkError):
    pass


class RootWithoutNoise(NetworkError):
    pass


class DuplicateNode(NetworkError):
    pass


class DuplicateEdge(NetworkError):
    pass


class SelfLoop(NetworkError):
    pass


class UnknownNode(NetworkError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NetworkParseError(NetworkError):
    """A network file could not be parsed."""


class NumericalFailure(CausalFlowError, ArithmeticError):
    """A numerical routine produced a result outside its guaranteed accuracy."""


class SingularConditioning(NumericalFailure):
    """The conditioning covariance is singular in a way that cannot be projected out."""


class DeterministicRelation(NumericalFailure):
    """The requested information is infinite because one variable determines another."""


class StepTooLarge(CausalFlowError, ValueError):
    pass


class InsufficientData(CausalFlowError, ValueError):
    pass


class GammaNonZero(CausalFlowError, ValueError):
    """A closed form that only holds for a vanishing x -> y gain was asked for gain != 0."""
