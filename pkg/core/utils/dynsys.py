"""
Linear and coupled-cell systems on graphs: types, example generators, simulation.

Vertices are numbered from 1 in every public function, matching how the
systems are written down (x_1 ... x_n).
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..exceptions import GenerationError, InputError
from .defaults import setting

logger = logging.getLogger(__name__)


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """x^(k+1) = A x^(k) with A square, finite, n >= 1"""

    A: np.ndarray

    def __post_init__(self):
        A = _frozen(self.A)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise InputError(f'A must be a non-empty square matrix, got shape {A.shape}')
        if not np.all(np.isfinite(A)):
            raise InputError('A contains non-finite entries')
        object.__setattr__(self, 'A', A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def check_vertex(self, vertex: int) -> int:
        """Validate a 1-based vertex and return its 0-based index."""
        if not isinstance(vertex, (int, np.integer)) or not 1 <= vertex <= self.n:
            raise InputError(f'vertex must be in [1, {self.n}], got {vertex}')
        return int(vertex) - 1

    def to_dict(self) -> dict:
        return {'n': self.n, 'A': self.A.tolist()}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States x^(0) ... x^(m), one row per step"""

    states: np.ndarray

    def __post_init__(self):
        states = _frozen(self.states)
        if states.ndim == 1:
            states = _frozen(states[:, None])
        if states.ndim != 2 or states.shape[0] < 1:
            raise InputError(f'trajectory must hold at least one state, got shape {states.shape}')
        object.__setattr__(self, 'states', states)

    @property
    def m(self) -> int:
        return self.states.shape[0] - 1

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def component(self, vertex: int) -> np.ndarray:
        """Local trajectory u^(0) ... u^(m) observed at a 1-based vertex."""
        if not 1 <= vertex <= self.n:
            raise InputError(f'vertex must be in [1, {self.n}], got {vertex}')
        return self.states[:, vertex - 1].copy()


@dataclass(frozen=True)
class DependencyGraph:
    """Edge (j, i) means variable j enters the update of variable i"""

    vertex_count: int
    edges: FrozenSet[Tuple[int, int]]

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(1, self.vertex_count + 1))
        graph.add_edges_from(self.edges)
        return graph


@dataclass(frozen=True, eq=False)
class CoupledCellSystem:
    """d two-dimensional cells with cubic local maps and linear x_{.,1} coupling"""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    S: np.ndarray
    epsilon: float

    def __post_init__(self):
        alpha, beta, gamma = (_frozen(np.ravel(v)) for v in (self.alpha, self.beta, self.gamma))
        S = _frozen(self.S)
        d = alpha.size
        if d < 1 or beta.size != d or gamma.size != d:
            raise InputError('alpha, beta and gamma must have the same non-zero length')
        if S.shape != (d, d):
            raise InputError(f'coupling matrix must be {d}x{d}, got {S.shape}')
        if np.any(np.diag(S) != 0):
            raise InputError('coupling matrix must have a zero diagonal')
        for name, value in (('alpha', alpha), ('beta', beta), ('gamma', gamma), ('S', S)):
            if not np.all(np.isfinite(value)):
                raise InputError(f'{name} contains non-finite entries')
        object.__setattr__(self, 'alpha', alpha)
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'S', S)
        object.__setattr__(self, 'epsilon', float(self.epsilon))

    @property
    def d(self) -> int:
        return self.alpha.size

    def to_dict(self) -> dict:
        return {
            'kind': 'coupled',
            'd': self.d,
            'alpha': self.alpha.tolist(),
            'beta': self.beta.tolist(),
            'gamma': self.gamma.tolist(),
            'S': self.S.tolist(),
            'epsilon': self.epsilon,
        }


def _initial_state(x0, n: int) -> np.ndarray:
    x = np.asarray(x0, dtype=float).ravel()
    if x.size != n:
        raise InputError(f'initial state has dimension {x.size}, expected {n}')
    return x


def _check_steps(steps: int) -> int:
    if steps < 0:
        raise InputError(f'steps must be non-negative, got {steps}')
    return int(steps)


def simulate(system: LinearSystem, x0, steps: int) -> Trajectory:
    x = _initial_state(x0, system.n)
    steps = _check_steps(steps)
    states = np.empty((steps + 1, system.n))
    states[0] = x
    for k in range(steps):
        states[k + 1] = system.A @ states[k]
    return Trajectory(states)


def simulate_local(system: LinearSystem, x0, steps: int, vertex: int) -> np.ndarray:
    system.check_vertex(vertex)
    return simulate(system, x0, steps).component(vertex)


def dependency_graph(system: LinearSystem) -> DependencyGraph:
    # exact zero test: A is specified data, not an estimate
    rows, cols = np.nonzero(system.A)
    edges = frozenset((int(j) + 1, int(i) + 1) for i, j in zip(rows, cols))
    return DependencyGraph(system.n, edges)


def coupled_dependency_graph(cells: CoupledCellSystem) -> DependencyGraph:
    """
    Dependency graph of the nonlinear system from its Jacobian structure.

    State order is x_{1,1}, x_{1,2}, x_{2,1}, x_{2,2}, ...; x_{i,1} is vertex
    2i-1 and x_{i,2} is vertex 2i.
    """
    edges = set()
    for i in range(cells.d):
        first, second = 2 * i + 1, 2 * i + 2
        if cells.alpha[i] != 0:
            edges.add((first, first))
        if cells.beta[i] != 0:
            edges.add((second, first))
        if cells.gamma[i] != 0:
            edges.add((second, second))
        for j in range(cells.d):
            if cells.epsilon * cells.S[i, j] != 0:
                edges.add((2 * j + 1, first))
    return DependencyGraph(2 * cells.d, frozenset(edges))


def _check_adjacency(W) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] < 1:
        raise InputError(f'adjacency must be a non-empty square matrix, got shape {W.shape}')
    if not np.all(np.isfinite(W)) or np.any(W < 0):
        raise InputError('adjacency must be finite and nonnegative')
    if not np.array_equal(W, W.T):
        raise InputError('adjacency must be symmetric')
    return W


def normalized_laplacian(adjacency) -> np.ndarray:
    """L = I - D^(-1/2) W D^(-1/2); every vertex needs positive degree."""
    W = _check_adjacency(adjacency)
    degrees = W.sum(axis=1)
    isolated = np.flatnonzero(degrees <= 0)
    if isolated.size:
        raise InputError(f'isolated vertices {(isolated + 1).tolist()} have zero degree')
    inv_sqrt = 1.0 / np.sqrt(degrees)
    L = np.eye(W.shape[0]) - inv_sqrt[:, None] * W * inv_sqrt[None, :]
    # exact symmetry, the products above can differ in the last bit
    return (L + L.T) / 2


def build_wave_system(L, c: float) -> LinearSystem:
    """Discretized graph wave equation [[2I - c^2 L, -I], [I, 0]]."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise InputError(f'L must be square, got shape {L.shape}')
    if not c > 0:
        raise InputError(f'wave speed must be positive, got {c}')
    n = L.shape[0]
    eye = np.eye(n)
    return LinearSystem(np.block([[2 * eye - c ** 2 * L, -eye], [eye, np.zeros((n, n))]]))


def build_laplacian_system(L, step: Optional[float] = 0.5) -> LinearSystem:
    """
    Diffusion dynamics on a graph.

    x^(k+1) = (I - step*L) x^(k); with step=None the Laplacian itself is the
    update matrix.
    """
    L = np.asarray(L, dtype=float)
    if step is None:
        return LinearSystem(L)
    return LinearSystem(np.eye(L.shape[0]) - step * L)


def generate_sbm(
    cluster_sizes: Sequence[int],
    intra_p: float,
    inter_p: float,
    intra_weight: float = 1.0,
    inter_weight: float = 0.2,
    seed: int = 0,
    require_connected: bool = False,
    max_retries: Optional[int] = None,
) -> np.ndarray:
    """
    Weighted adjacency of a stochastic block model graph.

    Resamples with a derived seed while any vertex is isolated (or, with
    require_connected, while the graph is disconnected).
    """
    sizes = [int(s) for s in cluster_sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise InputError(f'cluster sizes must be positive, got {sizes}')
    for name, p in (('intra_p', intra_p), ('inter_p', inter_p)):
        if not 0.0 <= p <= 1.0:
            raise InputError(f'{name} must be in [0, 1], got {p}')
    if intra_weight <= 0 or inter_weight <= 0:
        raise InputError('edge weights must be positive')
    max_retries = setting('SBM_MAX_RETRIES', max_retries)

    probabilities = np.full((len(sizes), len(sizes)), float(inter_p))
    np.fill_diagonal(probabilities, float(intra_p))
    blocks = np.repeat(np.arange(len(sizes)), sizes)
    n = blocks.size

    seeds = np.random.default_rng(seed)
    attempt_seed = int(seed)
    for attempt in range(max_retries + 1):
        graph = nx.stochastic_block_model(sizes, probabilities.tolist(), seed=attempt_seed)
        for a, b in graph.edges():
            graph[a][b]['weight'] = intra_weight if blocks[a] == blocks[b] else inter_weight
        W = nx.to_numpy_array(graph, nodelist=range(n), weight='weight')
        isolated = np.any(W.sum(axis=1) == 0)
        disconnected = require_connected and not nx.is_connected(graph)
        if not isolated and not disconnected:
            if attempt:
                logger.info('SBM sample accepted after %d resamples (seed=%d)', attempt, seed)
            return W
        logger.debug('SBM attempt %d rejected (isolated=%s, disconnected=%s)', attempt, isolated, disconnected)
        attempt_seed = int(seeds.integers(2 ** 31 - 1))
    raise GenerationError(f'no acceptable SBM sample after {max_retries} retries (seed={seed})')


# Topology of the three-cluster figure graph; the last two edges are the weak ones
_FIGURE_CLUSTER_EDGES = (
    (1, 3), (1, 5), (2, 3), (2, 4), (4, 5),
    (6, 8), (6, 9), (6, 10), (7, 8), (7, 9), (7, 10), (8, 9), (9, 10),
    (11, 12), (11, 13), (11, 14), (12, 14), (12, 15), (13, 14), (13, 15),
)
_FIGURE_CLUSTER_WEAK_EDGES = ((8, 13), (3, 7))


def figure_cluster_graph(intra_weight: float = 1.0, inter_weight: float = 0.2) -> Tuple[np.ndarray, np.ndarray]:
    """Adjacency of the drawn 15-vertex three-cluster graph and its block labels."""
    W = np.zeros((15, 15))
    for edges, weight in ((_FIGURE_CLUSTER_EDGES, intra_weight), (_FIGURE_CLUSTER_WEAK_EDGES, inter_weight)):
        for a, b in edges:
            W[a - 1, b - 1] = W[b - 1, a - 1] = weight
    return W, np.repeat(np.arange(3), 5)


def random_system(
    n: int,
    seed: int = 0,
    density: float = 1.0,
    spectral_radius: Optional[float] = None,
) -> LinearSystem:
    """Standard-normal system, optionally Bernoulli-sparsified and rescaled."""
    if n < 1:
        raise InputError(f'n must be positive, got {n}')
    if not 0.0 < density <= 1.0:
        raise InputError(f'density must be in (0, 1], got {density}')
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    if density < 1.0:
        A *= rng.random((n, n)) < density
    if spectral_radius is not None:
        radius = np.max(np.abs(np.linalg.eigvals(A)))
        if radius > 0:
            A *= spectral_radius / radius
    return LinearSystem(A)


def bipartite_fixture() -> LinearSystem:
    """
    Six-vertex bipartite system localizable everywhere.

    Edges 1<->4, 2<->5, 3<->6, 4->2, 5->1, 5->3, 6->2 and no self-loops.
    Unit weights leave an eigenvector vanishing at vertices 2 and 5, so the
    {4,5,6} -> {1,2,3} block carries weights [[1,1,0],[1,2,1],[0,1,3]].
    """
    B = np.array([[1.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 3.0]])
    zero = np.zeros((3, 3))
    return LinearSystem(np.block([[zero, B], [np.eye(3), zero]]))


COUPLING_STRUCTURE = np.array([
    [0, 1, 0, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 1],
    [1, 0, 0, 0],
], dtype=float)


def coupled_cell_fixture(seed: int = 0, vertex: int = 1, max_redraws: Optional[int] = None) -> CoupledCellSystem:
    """
    Four coupled cells with epsilon = 0.1 and uniformly drawn parameters.

    Parameters are redrawn until the Koopman lift is localizable in the
    lifted `vertex` (x_{1,1} by default).
    """
    from .localizability import is_localizable

    max_redraws = setting('COUPLED_MAX_REDRAWS', max_redraws)
    rng = np.random.default_rng(seed)
    d = COUPLING_STRUCTURE.shape[0]
    for attempt in range(max_redraws + 1):
        cells = CoupledCellSystem(
            alpha=rng.uniform(-1.0, 0.0, d),
            beta=rng.uniform(1.0, 2.0, d),
            gamma=rng.uniform(-1.0, 0.0, d),
            S=COUPLING_STRUCTURE,
            epsilon=0.1,
        )
        if is_localizable(koopman_lift(cells), vertex).localizable:
            if attempt:
                logger.info('coupled-cell parameters redrawn %d times (seed=%d)', attempt, seed)
            return cells
    raise GenerationError(f'no localizable coupled-cell draw after {max_redraws} redraws (seed={seed})')


def simulate_coupled(cells: CoupledCellSystem, x0, steps: int) -> Trajectory:
    """Iterate the nonlinear map; states are ordered (x_{1,1}, x_{1,2}, x_{2,1}, ...)."""
    x = _initial_state(x0, 2 * cells.d)
    steps = _check_steps(steps)
    states = np.empty((steps + 1, 2 * cells.d))
    states[0] = x
    for k in range(steps):
        first, second = states[k, 0::2], states[k, 1::2]
        states[k + 1, 0::2] = (
            cells.alpha * first
            + cells.beta * (second ** 3 - second)
            + cells.epsilon * (cells.S @ first)
        )
        states[k + 1, 1::2] = cells.gamma * second
    return Trajectory(states)


def koopman_lift(cells: CoupledCellSystem) -> LinearSystem:
    """
    Linear system over (x_{i,1}, x_{i,2}, x_{i,3} = x_{i,2}^3), cell by cell.

    Lifted vertex of x_{i,c} is 3(i-1) + c.
    """
    d = cells.d
    A = np.zeros((3 * d, 3 * d))
    for i in range(d):
        base = 3 * i
        A[base:base + 3, base:base + 3] = [
            [cells.alpha[i], -cells.beta[i], cells.beta[i]],
            [0.0, cells.gamma[i], 0.0],
            [0.0, 0.0, cells.gamma[i] ** 3],
        ]
        for j in range(d):
            A[base, 3 * j] += cells.epsilon * cells.S[i, j]
    return LinearSystem(A)


def lift_state(x0) -> np.ndarray:
    """(x_{i,1}, x_{i,2}) pairs -> (x_{i,1}, x_{i,2}, x_{i,2}^3) triples."""
    x = np.asarray(x0, dtype=float).ravel()
    if x.size % 2:
        raise InputError(f'coupled-cell state must have even length, got {x.size}')
    pairs = x.reshape(-1, 2)
    return np.column_stack([pairs, pairs[:, 1] ** 3]).ravel()


def project_lifted(trajectory: Trajectory) -> Trajectory:
    """Drop the x_{i,3} columns of a lifted trajectory."""
    if trajectory.n % 3:
        raise InputError(f'lifted trajectory must have 3d columns, got {trajectory.n}')
    keep = [c for c in range(trajectory.n) if c % 3 != 2]
    return Trajectory(trajectory.states[:, keep])


def block_labels(cluster_sizes: Sequence[int]) -> List[int]:
    return np.repeat(np.arange(len(cluster_sizes)), [int(s) for s in cluster_sizes]).tolist()


def partition(labels: Dict[int, int]) -> FrozenSet[FrozenSet[int]]:
    """Label map -> set of vertex groups, for comparisons up to relabeling."""
    groups: Dict[int, set] = {}
    for vertex, label in labels.items():
        groups.setdefault(label, set()).add(vertex)
    return frozenset(frozenset(g) for g in groups.values())
