import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from scipy import linalg

from core.exceptions import DegenerateSpectrumError, InconsistentSpectraError, InputError
from core.utils.dynsys import (
    Trajectory,
    bipartite_fixture,
    build_laplacian_system,
    build_wave_system,
    generate_sbm,
    normalized_laplacian,
    partition,
    random_system,
    simulate,
)
from core.utils.embedding import CompanionModel, fit_companion
from core.utils.localizability import is_localizable
from core.utils.spectral import (
    AnalysisOptions,
    analyze_vertex,
    companion_eigenvector,
    decentralized_cluster_labels,
    decentralized_clustering,
    detect_cluster_count,
    dominant_modes,
    is_bipartite_spectrum,
    local_eigenvalues,
    local_eigenvector_components,
    match_spectra,
    sort_eigenvalues,
    trace_det,
    wave_dynamics_spectrum,
)

from .helpers import random_weighted_graph, symmetric_system


def sbm_trajectory(seed: int) -> tuple:
    """Connected [5,5,5] block-model graph under x <- (I - L/2) x for 4n steps."""
    W = generate_sbm([5, 5, 5], 0.7, 0.05, 1.0, 0.2, seed=seed, require_connected=True)
    L = normalized_laplacian(W)
    x0 = np.random.default_rng(seed).standard_normal(15)
    return L, x0, simulate(build_laplacian_system(L, 0.5), x0, 60)


def two_cliques_trajectory() -> Trajectory:
    """K3 and K4 with no edge between them, under x <- (I - L/2) x."""
    W = np.zeros((7, 7))
    W[:3, :3] = 1.0 - np.eye(3)
    W[3:, 3:] = 1.0 - np.eye(4)
    x0 = np.random.default_rng(0).standard_normal(7)
    return simulate(build_laplacian_system(normalized_laplacian(W), 0.5), x0, 28)


def global_labels(L: np.ndarray, x0: np.ndarray, k: int) -> dict:
    _, vectors = linalg.eigh(L)
    z = vectors.T @ x0
    return decentralized_cluster_labels({v + 1: vectors[v] * z for v in range(L.shape[0])}, k)


class OrderingTests(SimpleTestCase):
    def test_descending_modulus_then_argument(self):
        ordered = sort_eigenvalues([0.5, -1.0, 1j, -1j, 0.9])
        assert_allclose(ordered, [-1j, 1j, -1.0, 0.9, 0.5])

    def test_match_spectra(self):
        self.assertAlmostEqual(match_spectra([1.0, 2.0], [2.0 + 1e-3, 1.0]), 1e-3)
        self.assertEqual(match_spectra([1.0], [1.0, 2.0]), float('inf'))

    def test_bipartite_spectrum(self):
        self.assertTrue(is_bipartite_spectrum([1.0, -1.0, 2j, -2j]))
        self.assertTrue(is_bipartite_spectrum([0.0, 0.5, -0.5]))
        self.assertFalse(is_bipartite_spectrum([1.0, 2.0]))
        self.assertFalse(is_bipartite_spectrum([1.0, -1.0, 0.5]))


class CompanionSpectrumTests(SimpleTestCase):
    def test_isospectral_on_random_systems(self):
        checked = 0
        for seed in range(100):
            n = 2 + seed % 7
            system = random_system(n, seed=seed, spectral_radius=1.0)
            if not is_localizable(system, 1).localizable:
                continue
            checked += 1
            with self.subTest(seed=seed, n=n):
                x0 = np.random.default_rng(seed).standard_normal(n)
                u = simulate(system, x0, 4 * n).component(1)
                estimated = local_eigenvalues(fit_companion(u, n))
                self.assertLessEqual(match_spectra(estimated, linalg.eigvals(system.A)), 1e-6)
        self.assertGreaterEqual(checked, 95)

    def test_isospectral_with_global_system(self):
        for seed in range(30):
            n = 2 + seed % 7
            with self.subTest(seed=seed, n=n):
                system, _, eigenvalues = symmetric_system(n, seed)
                x0 = np.random.default_rng(seed).standard_normal(n)
                u = simulate(system, x0, 4 * n).component(1 + seed % n)
                estimated = local_eigenvalues(fit_companion(u, n))
                self.assertLessEqual(match_spectra(estimated, eigenvalues), 1e-6)

    def test_companion_eigenvector(self):
        model = CompanionModel([0.06, -0.5, 1.2])
        for lam in local_eigenvalues(model):
            v = companion_eigenvector(lam, 3)
            assert_allclose(model.companion_matrix() @ v, lam * v, atol=1e-12)

    def test_trace_det(self):
        model = CompanionModel([0.06, -0.5, 1.2])
        trace, det = trace_det(model)
        eigenvalues = local_eigenvalues(model)
        self.assertAlmostEqual(trace, float(np.sum(eigenvalues).real))
        self.assertAlmostEqual(det, float(np.prod(eigenvalues).real))


class ComponentTests(SimpleTestCase):
    def test_components_on_random_systems(self):
        for seed in range(50):
            n = 2 + seed % 7
            vertex = 1 + seed % n
            system = random_system(n, seed=seed, spectral_radius=1.0)
            if not is_localizable(system, vertex).localizable:
                continue
            with self.subTest(seed=seed, n=n):
                x0 = np.random.default_rng(seed).standard_normal(n)
                u = simulate(system, x0, 4 * n).component(vertex)
                eigenvalues, vectors = linalg.eig(system.A)
                oracle = vectors[vertex - 1] * linalg.solve(vectors, x0)
                scale = max(1.0, np.max(np.abs(oracle)))
                estimated = local_eigenvalues(fit_companion(u, n))
                components = local_eigenvector_components(u, estimated)
                for lam, c in zip(estimated, components):
                    l = int(np.argmin(np.abs(eigenvalues - lam)))
                    self.assertLessEqual(abs(c - oracle[l]), 1e-7 * scale)
                modes = np.power.outer(estimated, np.arange(u.size)).T @ components
                assert_allclose(modes.real, u, atol=1e-7 * max(1.0, np.max(np.abs(u))))

    def test_components_match_eigendecomposition(self):
        for seed in range(20):
            n = 2 + seed % 7
            vertex = 1 + seed % n
            with self.subTest(seed=seed, n=n):
                system, Q, eigenvalues = symmetric_system(n, seed)
                x0 = np.random.default_rng(seed).standard_normal(n)
                u = simulate(system, x0, 4 * n).component(vertex)
                oracle = Q[vertex - 1] * (Q.T @ x0)
                estimated = local_eigenvalues(fit_companion(u, n))
                components = local_eigenvector_components(u, estimated)
                for lam, c in zip(estimated, components):
                    l = int(np.argmin(np.abs(eigenvalues - lam)))
                    self.assertLessEqual(abs(c - oracle[l]), 1e-6)

    def test_repeated_eigenvalues_rejected(self):
        with self.assertRaises(DegenerateSpectrumError):
            local_eigenvector_components(np.ones(6), [0.5, 0.5])

    def test_needs_more_samples_than_modes(self):
        with self.assertRaises(InputError):
            local_eigenvector_components(np.ones(2), [0.5, 0.2])

    def test_unexcited_modes_dropped(self):
        values, comps = dominant_modes([0.9, 0.5, -0.3], [1.0, 1e-12, -0.4])
        assert_allclose(values, [0.9, -0.3])
        assert_allclose(comps, [1.0, -0.4])


class ClusterCountTests(SimpleTestCase):
    def test_widest_gap(self):
        spectrum = [1.0, 0.95, 0.93, 0.4, 0.35, 0.3, 0.2, 0.1]
        self.assertEqual(detect_cluster_count(spectrum), 3)
        self.assertEqual(detect_cluster_count(spectrum, max_k=2), 1)

    def test_disconnected_union_counts_components(self):
        W = np.zeros((7, 7))
        W[:3, :3] = 1.0 - np.eye(3)
        W[3:, 3:] = 1.0 - np.eye(4)
        spectrum = np.linalg.eigvalsh(np.eye(7) - 0.5 * normalized_laplacian(W))
        self.assertEqual(detect_cluster_count(spectrum), 2)

    def test_short_spectra(self):
        self.assertEqual(detect_cluster_count([0.7]), 1)
        self.assertEqual(detect_cluster_count([]), 1)
        with self.assertRaises(InputError):
            detect_cluster_count([1.0, 0.5], max_k=0)

    def test_wave_pairs_collapse_to_cosines(self):
        theta = np.array([0.0, 0.3, 1.1])
        spectrum = np.concatenate([np.exp(1j * theta), np.exp(-1j * theta[1:])])
        assert_allclose(wave_dynamics_spectrum(spectrum), np.cos(theta), atol=1e-12)


class LabelTests(SimpleTestCase):
    components = {
        1: [1.0, 0.5, 0.3],
        2: [1.0, 0.4, -0.2],
        3: [1.0, -0.6, 0.1],
        4: [1.0, -0.1, -0.3],
    }

    def test_sign_patterns(self):
        self.assertEqual(decentralized_cluster_labels(self.components, 3), {1: 0, 2: 1, 3: 2, 4: 3})
        self.assertEqual(decentralized_cluster_labels(self.components, 2), {1: 0, 2: 0, 3: 1, 4: 1})

    def test_single_cluster(self):
        self.assertEqual(set(decentralized_cluster_labels(self.components, 1).values()), {0})

    def test_two_cliques(self):
        # Fiedler-like second component: positive on one clique, negative on the other
        components = {v: [1.0, 0.4 if v <= 3 else -0.4] for v in range(1, 7)}
        labels = decentralized_cluster_labels(components, 2)
        self.assertEqual(partition(labels), {frozenset({1, 2, 3}), frozenset({4, 5, 6})})

    def test_near_zero_resolves_positive(self):
        labels = decentralized_cluster_labels({1: [1.0, 1e-12], 2: [1.0, 0.3]}, 2)
        self.assertEqual(labels[1], labels[2])

    def test_too_few_components(self):
        with self.assertRaises(InputError):
            decentralized_cluster_labels({1: [1.0]}, 2)


class AnalyzeVertexTests(SimpleTestCase):
    def test_bipartite_from_single_vertices(self):
        system = bipartite_fixture()
        trajectory = simulate(system, np.random.default_rng(0).standard_normal(6), 24)
        for vertex in (1, 3, 5):
            with self.subTest(vertex=vertex):
                report = analyze_vertex(trajectory.component(vertex), 6, AnalysisOptions(vertex=vertex))
                self.assertTrue(report.bipartite)
                self.assertAlmostEqual(report.trace_estimate, 0.0, places=6)
                self.assertAlmostEqual(report.det_estimate, -2.0, places=6)
                self.assertLessEqual(match_spectra(report.eigenvalues, linalg.eigvals(system.A)), 1e-6)

    def test_geometric_trajectory(self):
        report = analyze_vertex(3.0 * 0.7 ** np.arange(12), 1, AnalysisOptions(bipartite=False))
        assert_allclose(report.eigenvalues, [0.7])
        assert_allclose(report.vertex_components[1], [3.0])

    def test_report_serialization(self):
        payload = analyze_vertex(0.5 ** np.arange(6), 1).to_dict()
        self.assertEqual(len(payload['eigenvalues']), 1)
        self.assertAlmostEqual(payload['eigenvalues'][0]['re'], 0.5)
        self.assertEqual(payload['eigenvalues'][0]['im'], 0.0)
        self.assertFalse(payload['bipartite'])
        self.assertIn('model', payload)
        self.assertIsNone(payload['labels'])

    def test_unknown_dynamics(self):
        options = AnalysisOptions(detect_gap=True, dynamics='heat')
        with self.assertRaises(InputError):
            analyze_vertex(0.5 ** np.arange(6), 1, options)


class WaveSpectrumTests(SimpleTestCase):
    def test_global_spectrum_on_unit_circle(self):
        for seed in range(20):
            L = normalized_laplacian(random_weighted_graph(4 + seed % 3, seed))
            for c in (0.5, 1.0, 1.4):
                with self.subTest(seed=seed, c=c):
                    moduli = np.abs(linalg.eigvals(build_wave_system(L, c).A))
                    self.assertLessEqual(np.max(np.abs(moduli - 1)), 1e-6)

    def test_simple_eigenvalues_exactly_on_circle(self):
        L = normalized_laplacian(random_weighted_graph(5, 1))
        eigenvalues = linalg.eigvals(build_wave_system(L, 1.0).A)
        # the zero Laplacian mode is a Jordan block at 1
        simple = eigenvalues[np.abs(eigenvalues - 1) > 1e-4]
        self.assertLessEqual(np.max(np.abs(np.abs(simple) - 1)), 1e-10)

    def test_local_spectrum_on_unit_circle(self):
        for seed in range(10):
            n = 4
            L = normalized_laplacian(random_weighted_graph(n, seed))
            y = np.random.default_rng(seed).standard_normal(n)
            for c in (0.5, 1.0, 1.4):
                with self.subTest(seed=seed, c=c):
                    trajectory = simulate(build_wave_system(L, c), np.concatenate([y, y]), 8 * n)
                    report = analyze_vertex(
                        trajectory.component(1), 2 * n - 1, AnalysisOptions(bipartite=False, components=False),
                    )
                    self.assertLessEqual(np.max(np.abs(np.abs(report.eigenvalues) - 1)), 1e-6)


class DecentralizedClusteringTests(SimpleTestCase):
    def test_block_model_recovery(self):
        matches = 0
        for seed in range(20):
            L, x0, trajectory = sbm_trajectory(seed)
            try:
                result = decentralized_clustering(trajectory, k='auto')
            except InconsistentSpectraError:
                continue
            if result.k == 3 and partition(result.labels) == partition(global_labels(L, x0, 3)):
                matches += 1
        self.assertGreaterEqual(matches, 18)

    def test_disconnected_cliques_rejected(self):
        trajectory = two_cliques_trajectory()
        for k in ('auto', 2):
            with self.subTest(k=k), self.assertRaises(InconsistentSpectraError) as ctx:
                decentralized_clustering(trajectory, k=k)
            self.assertEqual(ctx.exception.reference, 1)
            self.assertGreater(ctx.exception.vertex, 3)

    def test_forced_single_cluster(self):
        _, _, trajectory = sbm_trajectory(0)
        result = decentralized_clustering(trajectory, k=1)
        self.assertEqual(set(result.labels.values()), {0})
        self.assertEqual(sorted(result.labels), list(range(1, 16)))

    def test_workers_do_not_change_labels(self):
        _, _, trajectory = sbm_trajectory(4)
        serial = decentralized_clustering(trajectory, k=3, workers=1)
        pooled = decentralized_clustering(trajectory, k=3, workers=4)
        self.assertEqual(serial.labels, pooled.labels)

    def test_bad_k(self):
        _, _, trajectory = sbm_trajectory(0)
        with self.assertRaises(InputError):
            decentralized_clustering(Trajectory(trajectory.states), k=0)
