"""
Localizability of a vertex: can its scalar trajectory recover the hidden state?

A vertex is localizable when R = [a12^T; a12^T A22; ...; a12^T A22^(n-2)]
has full rank n-1 after moving the vertex to the front. The Hautus form of
the same test and the strong-connectivity necessary condition live here too.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import networkx as nx
import numpy as np
from scipy import linalg

from ..exceptions import InputError, NumericError
from .defaults import setting
from .dynsys import DependencyGraph, LinearSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LocalizabilityReport:
    vertex: int
    r_matrix: np.ndarray
    singular_values: np.ndarray
    numeric_rank: int
    localizable: bool
    tolerance_used: float

    def to_dict(self) -> dict:
        return {
            'vertex': self.vertex,
            'singular_values': [float(s) for s in self.singular_values],
            'numeric_rank': self.numeric_rank,
            'localizable': self.localizable,
            'tolerance': self.tolerance_used,
        }


def numeric_rank(singular_values: np.ndarray, rel_tol: float) -> int:
    """Singular values above rel_tol * sigma_max; zero for an all-zero matrix."""
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0
    return int(np.count_nonzero(singular_values > rel_tol * singular_values[0]))


def permute_vertex_first(system: LinearSystem, vertex: int) -> LinearSystem:
    """P^T A P moving `vertex` to position 1; the other vertices keep their order."""
    index = system.check_vertex(vertex)
    order = [index] + [i for i in range(system.n) if i != index]
    return LinearSystem(system.A[np.ix_(order, order)])


def split_blocks(system: LinearSystem) -> Tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """a11, a12, a21, A22 of the partition around vertex 1."""
    A = system.A
    return float(A[0, 0]), A[0, 1:], A[1:, 0], A[1:, 1:]


def r_matrix(system: LinearSystem, vertex: int) -> np.ndarray:
    if system.n < 2:
        raise InputError('R is only defined for n >= 2')
    _, a12, _, A22 = split_blocks(permute_vertex_first(system, vertex))
    R = np.empty((system.n - 1, system.n - 1))
    row = a12.copy()
    # iterated row-vector products, never explicit powers of A22
    for l in range(system.n - 1):
        R[l] = row
        row = row @ A22
    return R


def is_localizable(system: LinearSystem, vertex: int, rel_tol: float = None) -> LocalizabilityReport:
    rel_tol = setting('RANK_REL_TOL', rel_tol)
    if rel_tol <= 0:
        raise InputError(f'rel_tol must be positive, got {rel_tol}')
    system.check_vertex(vertex)
    if system.n == 1:
        # empty R: rank 0 = n - 1 holds vacuously
        return LocalizabilityReport(vertex, np.zeros((0, 0)), np.zeros(0), 0, True, rel_tol)

    R = r_matrix(system, vertex)
    singular_values = linalg.svdvals(R)
    rank = numeric_rank(singular_values, rel_tol)
    return LocalizabilityReport(
        vertex=vertex,
        r_matrix=R,
        singular_values=singular_values,
        numeric_rank=rank,
        localizable=rank == system.n - 1,
        tolerance_used=rel_tol,
    )


def localizable_everywhere(system: LinearSystem, rel_tol: float = None) -> Tuple[bool, List[LocalizabilityReport]]:
    reports = [is_localizable(system, v, rel_tol) for v in range(1, system.n + 1)]
    return all(r.localizable for r in reports), reports


def distinct_eigenvalues(eigenvalues: np.ndarray, tol: float) -> np.ndarray:
    """One representative per cluster of eigenvalues within `tol` after sorting."""
    ordered = sorted(np.asarray(eigenvalues, dtype=complex), key=lambda z: (z.real, z.imag))
    kept: List[complex] = []
    for value in ordered:
        if not kept or abs(value - kept[-1]) > tol:
            kept.append(value)
    return np.array(kept, dtype=complex)


def hautus_localizable(system: LinearSystem, vertex: int, rel_tol: float = None, distinct_tol: float = None) -> bool:
    """
    Rank test of [lambda I - A22; a12^T] at every eigenvalue lambda of A22.

    Equivalent to the rank-of-R criterion; complex eigenvalues are tested
    over the complex field.
    """
    rel_tol = setting('RANK_REL_TOL', rel_tol)
    distinct_tol = setting('DISTINCT_TOL', distinct_tol)
    if system.n < 2:
        raise InputError('the Hautus test needs n >= 2')
    _, a12, _, A22 = split_blocks(permute_vertex_first(system, vertex))
    try:
        eigenvalues = linalg.eigvals(A22)
    except linalg.LinAlgError as exc:
        raise NumericError(f'eigenvalues of A22 did not converge: {exc}') from exc

    size = A22.shape[0]
    for lam in distinct_eigenvalues(eigenvalues, distinct_tol):
        stacked = np.vstack([lam * np.eye(size) - A22, a12[None, :]]).astype(complex)
        singular_values = linalg.svdvals(stacked)
        if singular_values[0] == 0 or singular_values[-1] <= rel_tol * singular_values[0]:
            logger.debug('vertex %d fails the Hautus test at lambda=%s', vertex, lam)
            return False
    return True


def is_strongly_connected(graph: DependencyGraph) -> bool:
    return nx.is_strongly_connected(graph.to_networkx())
