"""
Domain errors raised by the netspectra library.

Commands turn every NetSpectraError into a CommandError carrying a JSON body.
"""
from typing import Iterable, Optional


class NetSpectraError(Exception):
    """Base class for all library errors"""


class InputError(NetSpectraError, ValueError):
    """Malformed arguments: wrong dimensions, out-of-range vertex, short data"""


class GenerationError(NetSpectraError, RuntimeError):
    """A seeded generator ran out of retries"""


class NumericError(NetSpectraError, ArithmeticError):
    """An eigensolver or factorization failed to converge"""


class DegenerateSpectrumError(NetSpectraError):
    """Repeated eigenvalues make the Vandermonde regression rank-deficient"""


class LocalizabilityError(NetSpectraError):
    """The system is not localizable in the requested vertex"""

    def __init__(self, vertex: int, singular_values: Optional[Iterable[float]] = None, message: str = ''):
        self.vertex = vertex
        self.singular_values = [float(s) for s in (singular_values if singular_values is not None else [])]
        super().__init__(message or f'system is not localizable in vertex {vertex}')


class ConsistencyError(NetSpectraError):
    """A command finished but one of its internal checks failed"""


class InconsistentSpectraError(NetSpectraError):
    """Vertices of one network observe different leading spectra"""

    def __init__(self, vertex: int, reference: int, distance: float):
        self.vertex = vertex
        self.reference = reference
        self.distance = float(distance)
        super().__init__(
            f'leading eigenvalues at vertex {vertex} differ from vertex {reference} by {distance:.3g}; '
            'the network is not connected or a vertex is not localizable'
        )
