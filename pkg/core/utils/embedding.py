"""
Delay embeddings, DMD and companion-structured local models.

A vertex that observes only its own scalar trajectory u^(k) can fit the
bottom row w_0 ... w_{s-1} of a companion matrix C_s; for a localizable
vertex and s = n this model reproduces u^(k) exactly and shares the
spectrum of A.
"""
import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import linalg

from ..exceptions import InputError, LocalizabilityError
from .defaults import setting
from .dynsys import LinearSystem, Trajectory
from .localizability import is_localizable, permute_vertex_first, split_blocks

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DelayMatrices:
    X: np.ndarray
    Y: np.ndarray
    s: int
    p: int


@dataclass(frozen=True, eq=False)
class DMDFit:
    operator: np.ndarray
    rank: int
    singular_values: np.ndarray

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.operator.shape[0]


@dataclass(frozen=True, eq=False)
class CompanionModel:
    """Bottom row of C_s; `scale` is the max |u| the data was normalized by"""

    weights: np.ndarray
    residual: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float).ravel()
        if weights.size < 1:
            raise InputError('a companion model needs at least one weight')
        if self.residual < 0:
            raise InputError('residual must be non-negative')
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    @property
    def s(self) -> int:
        return self.weights.size

    def companion_matrix(self) -> np.ndarray:
        C = np.eye(self.s, k=1)
        C[-1] = self.weights
        return C

    def to_dict(self) -> dict:
        return {
            's': self.s,
            'w': self.weights.tolist(),
            'residual': float(self.residual),
            'scale': float(self.scale),
        }


def truncated_svd(M: np.ndarray, svd_tol: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Thin SVD keeping singular values above svd_tol * sigma_max."""
    U, s, Vh = linalg.svd(M, full_matrices=False)
    rank = 0 if s.size == 0 or s[0] == 0 else int(np.count_nonzero(s > svd_tol * s[0]))
    return U[:, :rank], s, Vh[:rank], rank


def truncated_lstsq(M: np.ndarray, b: np.ndarray, svd_tol: float = None) -> Tuple[np.ndarray, int]:
    """Minimum-norm least-squares solution of M x = b through a truncated SVD."""
    svd_tol = setting('SVD_REL_TOL', svd_tol)
    U, s, Vh, rank = truncated_svd(M, svd_tol)
    if rank == 0:
        return np.zeros(M.shape[1], dtype=np.result_type(M, b)), 0
    coefficients = U.conj().T @ b / s[:rank]
    return Vh.conj().T @ coefficients, rank


def _observations(trajectory) -> np.ndarray:
    if isinstance(trajectory, Trajectory):
        return trajectory.states
    data = np.asarray(trajectory, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2:
        raise InputError(f'trajectory data must be 1-D or 2-D, got shape {data.shape}')
    return data


def hankel_matrices(trajectory: Union[Trajectory, np.ndarray], s: int) -> DelayMatrices:
    """
    Stack s consecutive observations per column.

    Column j of X holds times j ... j+s-1 and column j of Y times j+1 ... j+s.
    """
    data = _observations(trajectory)
    if s < 1:
        raise InputError(f'delay count must be positive, got {s}')
    length, p = data.shape
    if length < s + 1:
        raise InputError(f'trajectory of length {length} is too short for {s} delays')
    columns = length - s
    X = np.vstack([data[r:r + columns].T for r in range(s)])
    Y = np.vstack([data[r + 1:r + 1 + columns].T for r in range(s)])
    return DelayMatrices(X=X, Y=Y, s=s, p=p)


def dmd(X: np.ndarray, Y: np.ndarray, svd_tol: float = None) -> DMDFit:
    """C = Y X^+, the minimum-norm minimizer of ||C X - Y||_F."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise InputError(f'X and Y must have the same shape, got {X.shape} and {Y.shape}')
    svd_tol = setting('SVD_REL_TOL', svd_tol)
    U, s, Vh, rank = truncated_svd(X, svd_tol)
    if rank < X.shape[0]:
        logger.info('DMD data matrix is rank deficient (%d of %d)', rank, X.shape[0])
    operator = (Y @ Vh.T / s[:rank]) @ U.T if rank else np.zeros((Y.shape[0], X.shape[0]))
    return DMDFit(operator=operator, rank=rank, singular_values=s)


def fit_companion(u, s: int, svd_tol: float = None) -> CompanionModel:
    """
    Least-squares fit of u^(k+s) = sum_j w_j u^(k+j) over all admissible k.

    The trajectory is scaled to unit max-abs first. The regression is linear
    in u on both sides, so the scale never changes the weights.
    """
    u = np.asarray(u, dtype=float).ravel()
    if s < 1:
        raise InputError(f'delay count must be positive, got {s}')
    if u.size < 2 * s:
        raise InputError(f'need at least {2 * s} samples for {s} delays, got {u.size}')
    scale = float(np.max(np.abs(u)))
    if scale == 0:
        return CompanionModel(np.zeros(s), residual=0.0, scale=1.0)

    delays = hankel_matrices(u / scale, s)
    M, b = delays.X.T, delays.Y[-1]
    weights, rank = truncated_lstsq(M, b, svd_tol)
    if rank < s:
        logger.info('companion regression has numeric rank %d < %d delays', rank, s)
    residual = float(np.linalg.norm(M @ weights - b)) * scale
    return CompanionModel(weights, residual=residual, scale=scale)


def characteristic_polynomial(A, method: str = 'faddeev-leverrier') -> np.ndarray:
    """
    Coefficients alpha_0 ... alpha_{n-1}, 1 of det(lambda I - A), lowest first.

    'eigenvalues' multiplies out prod(lambda - lambda_i) as an independent check.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if method == 'eigenvalues':
        return np.real(np.poly(linalg.eigvals(A)))[::-1]
    if method != 'faddeev-leverrier':
        raise InputError(f'unknown method {method!r}')
    coefficients = np.zeros(n + 1)
    coefficients[n] = 1.0
    M = np.zeros((n, n))
    eye = np.eye(n)
    for k in range(1, n + 1):
        M = A @ M + coefficients[n - k + 1] * eye
        coefficients[n - k] = -np.trace(A @ M) / k
    return coefficients


def exact_companion(system: LinearSystem) -> CompanionModel:
    """w_i = -alpha_i from the characteristic polynomial of A."""
    return CompanionModel(-characteristic_polynomial(system.A)[:-1])


def predict(model: CompanionModel, window, steps: int) -> np.ndarray:
    """Seed window followed by `steps` values of u^(k+s) = sum_j w_j u^(k+j)."""
    window = np.asarray(window, dtype=float).ravel()
    if window.size != model.s:
        raise InputError(f'window must hold {model.s} values, got {window.size}')
    if steps < 0:
        raise InputError(f'steps must be non-negative, got {steps}')
    out = np.empty(model.s + steps)
    out[:model.s] = window
    for k in range(steps):
        out[model.s + k] = model.weights @ out[k:k + model.s]
    return out


def recover_hidden_state(system: LinearSystem, vertex: int, window, rel_tol: float = None) -> np.ndarray:
    """
    Hidden block v^(k) from n consecutive local values u^(k) ... u^(k+n-1).

    The result is ordered like the remaining vertices of the system with
    `vertex` removed.
    """
    n = system.n
    window = np.asarray(window, dtype=float).ravel()
    if window.size != n:
        raise InputError(f'window must hold n={n} values, got {window.size}')
    report = is_localizable(system, vertex, rel_tol)
    if not report.localizable:
        raise LocalizabilityError(vertex, report.singular_values)
    if n == 1:
        return np.zeros(0)

    a11, _, a21, _ = split_blocks(permute_vertex_first(system, vertex))
    R = report.r_matrix
    # feedthrough terms a12^T A22^l a21, one per row of R
    feedthrough = R @ a21
    b = np.empty(n - 1)
    for r in range(1, n):
        b[r - 1] = window[r] - a11 * window[r - 1] - sum(
            feedthrough[l] * window[r - 2 - l] for l in range(r - 1)
        )
    return linalg.solve(R, b)


def reconstruct_states(system: LinearSystem, vertex: int, u, rel_tol: float = None) -> Trajectory:
    """Global states x^(0) ... x^(len(u)-n) rebuilt from one vertex's trajectory."""
    u = np.asarray(u, dtype=float).ravel()
    n = system.n
    if u.size < n:
        raise InputError(f'need at least n={n} local samples, got {u.size}')
    index = system.check_vertex(vertex)
    others = [i for i in range(n) if i != index]
    states = np.empty((u.size - n + 1, n))
    for k in range(states.shape[0]):
        states[k, index] = u[k]
        states[k, others] = recover_hidden_state(system, vertex, u[k:k + n], rel_tol)
    return Trajectory(states)


def growth_normalized_error(predicted, actual) -> np.ndarray:
    """|predicted_k - actual_k| / max_{j<=k} |actual_j|, so growing spectra compare fairly."""
    predicted = np.asarray(predicted, dtype=float).ravel()
    actual = np.asarray(actual, dtype=float).ravel()
    if predicted.shape != actual.shape:
        raise InputError(f'length mismatch: {predicted.size} vs {actual.size}')
    running = np.maximum.accumulate(np.abs(actual))
    running[running == 0] = 1.0
    return np.abs(predicted - actual) / running
