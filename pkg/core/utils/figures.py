"""
End-to-end reproductions behind `manage.py demo`: the bipartite spectrum
figure (fig1), decentralized clustering of a block-model graph (fig2) and
the Koopman-lifted coupled-cell comparison (fig3).

Each demo returns data only: CSV tables, an analysis payload and the
consistency checks the command turns into its exit status.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..exceptions import InputError
from .dynsys import (
    block_labels,
    bipartite_fixture,
    build_laplacian_system,
    coupled_cell_fixture,
    figure_cluster_graph,
    generate_sbm,
    koopman_lift,
    lift_state,
    normalized_laplacian,
    partition,
    project_lifted,
    simulate,
    simulate_coupled,
)
from .embedding import fit_companion, growth_normalized_error, predict
from .localizability import localizable_everywhere
from .spectral import (
    AnalysisOptions,
    analyze_vertex,
    complex_to_dict,
    decentralized_cluster_labels,
    decentralized_clustering,
    is_bipartite_spectrum,
    match_spectra,
    sort_eigenvalues,
)

logger = logging.getLogger(__name__)


@dataclass
class DemoBundle:
    name: str
    tables: Dict[str, Tuple[List[str], List[list]]] = field(default_factory=dict)
    analysis: dict = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


class FigureDemo:
    """Seeded demo; subclasses fill a DemoBundle in build()"""

    name = ''

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def initial_state(self, n: int) -> np.ndarray:
        return self.rng.standard_normal(n)

    def build(self) -> DemoBundle:
        raise NotImplementedError


class BipartiteDemo(FigureDemo):
    """Negation-symmetric spectrum read off single-vertex trajectories"""

    name = 'fig1'
    VERTICES = (1, 3, 5)

    def build(self) -> DemoBundle:
        system = bipartite_fixture()
        n = system.n
        x0 = self.initial_state(n)
        trajectory = simulate(system, x0, 4 * n)
        everywhere, reports = localizable_everywhere(system)
        spectrum = sort_eigenvalues(linalg.eigvals(system.A))

        bundle = DemoBundle(self.name)
        rows = [['global', float(z.real), float(z.imag)] for z in spectrum]
        local = {}
        for vertex in self.VERTICES:
            report = analyze_vertex(
                trajectory.component(vertex), n,
                AnalysisOptions(vertex=vertex, bipartite=True, components=False),
            )
            local[vertex] = report
            rows.extend([f'vertex{vertex}', float(z.real), float(z.imag)] for z in report.eigenvalues)

        bundle.tables['eigenvalues.csv'] = (['source', 're', 'im'], rows)
        bundle.tables['trajectories.csv'] = (
            ['k'] + [f'x{v}' for v in self.VERTICES],
            [[k] + [float(trajectory.states[k, v - 1]) for v in self.VERTICES] for k in range(trajectory.m + 1)],
        )
        bundle.analysis = {
            'x0': x0.tolist(),
            'localizable_everywhere': everywhere,
            'localizability': [r.to_dict() for r in reports],
            'global_eigenvalues': [complex_to_dict(z) for z in spectrum],
            'global_bipartite': is_bipartite_spectrum(spectrum),
            'vertices': {
                str(v): dict(r.to_dict(), spectrum_error=match_spectra(r.eigenvalues, spectrum))
                for v, r in local.items()
            },
        }
        bundle.checks = {
            'localizable_everywhere': everywhere,
            'global_spectrum_bipartite': bundle.analysis['global_bipartite'],
            'local_spectra_bipartite': all(r.bipartite for r in local.values()),
        }
        return bundle


def global_sign_labels(L: np.ndarray, x0: np.ndarray, k: int) -> Dict[int, int]:
    """Sign-pattern labels from the exact eigendecomposition of L (the oracle)."""
    mu, vectors = linalg.eigh(L)
    z = vectors.T @ x0
    components = {v + 1: vectors[v, :] * z for v in range(L.shape[0])}
    return decentralized_cluster_labels(components, k)


class ClusterDemo(FigureDemo):
    """Each vertex of a weakly coupled three-block graph labels itself"""

    name = 'fig2'
    SIZES = (5, 5, 5)
    INTRA_P, INTER_P = 0.7, 0.05
    INTRA_WEIGHT, INTER_WEIGHT = 1.0, 0.2
    STEP = 0.5

    def __init__(self, seed: int = 0, sizes: Sequence[int] = None, graph: str = 'sbm'):
        super().__init__(seed)
        if graph not in ('sbm', 'figure'):
            raise InputError(f'unknown cluster graph {graph!r}')
        self.graph = graph
        self.sizes = (5, 5, 5) if graph == 'figure' else tuple(sizes or self.SIZES)

    def adjacency(self) -> np.ndarray:
        if self.graph == 'figure':
            W, _ = figure_cluster_graph(self.INTRA_WEIGHT, self.INTER_WEIGHT)
            return W
        return generate_sbm(
            self.sizes, self.INTRA_P, self.INTER_P, self.INTRA_WEIGHT, self.INTER_WEIGHT,
            seed=self.seed, require_connected=True,
        )

    def build(self) -> DemoBundle:
        W = self.adjacency()
        L = normalized_laplacian(W)
        system = build_laplacian_system(L, self.STEP)
        n = system.n
        x0 = self.initial_state(n)
        trajectory = simulate(system, x0, 4 * n)
        result = decentralized_clustering(trajectory, s=n, k='auto')

        mu = linalg.eigvalsh(L)
        oracle = global_sign_labels(L, x0, result.k)
        blocks = {v + 1: b for v, b in enumerate(block_labels(self.sizes))}
        matches_oracle = partition(result.labels) == partition(oracle)

        bundle = DemoBundle(self.name)
        spectrum_rows = [['global', i + 1, float(m), 0.0] for i, m in enumerate(mu)]
        # dynamics eigenvalue lambda = 1 - step*mu
        local_mu = [(1 - z) / self.STEP for z in result.reports[1].eigenvalues]
        spectrum_rows.extend(['vertex1', i + 1, float(m.real), float(m.imag)] for i, m in enumerate(local_mu))
        bundle.tables['laplacian_spectrum.csv'] = (['source', 'index', 're', 'im'], spectrum_rows)
        bundle.tables['components.csv'] = (
            ['vertex', 'mode', 're', 'im'],
            [
                [v, l + 1, float(c.real), float(c.imag)]
                for v, comps in sorted(result.components().items())
                for l, c in enumerate(comps[:max(result.k, 1)])
            ],
        )
        bundle.analysis = {
            'x0': x0.tolist(),
            'graph': self.graph,
            'W': W.tolist(),
            'cluster_count': result.k,
            'labels': [{'vertex': v, 'cluster': c} for v, c in sorted(result.labels.items())],
            'global_labels': [{'vertex': v, 'cluster': c} for v, c in sorted(oracle.items())],
            'blocks': [{'vertex': v, 'cluster': c} for v, c in sorted(blocks.items())],
            'matches_global_sign_clustering': matches_oracle,
            'matches_blocks': partition(result.labels) == partition(blocks),
        }
        bundle.checks = {
            'every_vertex_labelled': sorted(result.labels) == list(range(1, n + 1)),
            'three_clusters': result.k == len(self.sizes) and len(set(result.labels.values())) == len(self.sizes),
            'finite_trajectory': bool(np.all(np.isfinite(trajectory.states))),
        }
        return bundle


class CoupledCellDemo(FigureDemo):
    """Nonlinear coupled cells against the locally fitted linear model of x_{1,1}"""

    name = 'fig3'
    HORIZON = 50
    LIFT_TOL = 1e-9
    FORECAST_TOL = 1e-4

    def build(self) -> DemoBundle:
        cells = coupled_cell_fixture(self.seed)
        lifted = koopman_lift(cells)
        s = lifted.n
        training = 4 * s
        total = training + self.HORIZON
        x0 = self.initial_state(2 * cells.d)

        nonlinear = simulate_coupled(cells, x0, total)
        through_lift = project_lifted(simulate(lifted, lift_state(x0), total))
        lift_deviation = float(np.max(np.abs(nonlinear.states - through_lift.states)))

        u = nonlinear.component(1)
        model = fit_companion(u[:training + 1], s)
        localized = predict(model, u[:s], total + 1 - s)
        error = growth_normalized_error(localized, u)
        forecast_error = float(np.max(error[training + 1:]))

        bundle = DemoBundle(self.name)
        bundle.tables['trajectory_x11.csv'] = (
            ['k', 'nonlinear', 'localized'],
            [[k, float(u[k]), float(localized[k])] for k in range(total + 1)],
        )
        bundle.analysis = {
            'x0': x0.tolist(),
            'system': cells.to_dict(),
            'lifted_dimension': s,
            'training_steps': training,
            'lift_max_deviation': lift_deviation,
            'model': model.to_dict(),
            'max_prediction_error': float(np.max(error)),
            'max_forecast_error': forecast_error,
        }
        bundle.checks = {
            'lift_exact': lift_deviation <= self.LIFT_TOL,
            'forecast_within_tol': forecast_error <= self.FORECAST_TOL,
        }
        return bundle


def bipartite_demo(seed: int = 0) -> DemoBundle:
    return BipartiteDemo(seed).build()


def cluster_demo(seed: int = 0, graph: str = 'sbm') -> DemoBundle:
    return ClusterDemo(seed, graph=graph).build()


def coupled_cell_demo(seed: int = 0) -> DemoBundle:
    return CoupledCellDemo(seed).build()


DEMOS = {
    BipartiteDemo.name: bipartite_demo,
    ClusterDemo.name: cluster_demo,
    CoupledCellDemo.name: coupled_cell_demo,
}
