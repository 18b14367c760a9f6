"""Exceptions raised by the factorization toolkit."""

import numpy as np


class FactorizationError(Exception):
    """Common base so callers can catch every library failure at once."""


class NotHermitian(FactorizationError, ValueError):
    pass


class DimensionMismatch(FactorizationError, ValueError):
    pass


class SampledAliasing(FactorizationError, ValueError):
    pass


class IncompatibleRepresentation(FactorizationError, ValueError):
    pass


class DegeneratePartition(FactorizationError, ValueError):
    pass


class OutOfDomain(FactorizationError, ValueError):
    pass


class EndpointSingularity(FactorizationError, ValueError):
    pass


class NotPositiveDefinite(FactorizationError, np.linalg.LinAlgError):
    pass


class Singular(FactorizationError, np.linalg.LinAlgError):
    pass


class SingularSystem(FactorizationError, np.linalg.LinAlgError):
    pass


class NoConvergence(FactorizationError, ArithmeticError):
    pass


class ClosedFormMismatch(FactorizationError, ArithmeticError):
    pass
