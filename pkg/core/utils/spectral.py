"""
Global spectral information recovered from one vertex's trajectory.

Each vertex fits its own companion model, reads the eigenvalues off it,
solves a Vandermonde regression for its eigenvector components z_l*xi_v^(l)
and derives bipartiteness and cluster structure. No step here needs data
from another vertex except the final label fold in decentralized_clustering.
"""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from ..exceptions import DegenerateSpectrumError, InconsistentSpectraError, InputError, NumericError
from .defaults import setting
from .dynsys import Trajectory
from .embedding import CompanionModel, fit_companion, truncated_lstsq

logger = logging.getLogger(__name__)


def complex_to_dict(value: complex) -> dict:
    return {'re': float(np.real(value)), 'im': float(np.imag(value))}


@dataclass(frozen=True)
class AnalysisOptions:
    """Switches and tolerances for analyze_vertex; None reads the settings."""

    vertex: int = 1
    bipartite: bool = True
    components: bool = True
    detect_gap: bool = False
    max_k: Optional[int] = None
    dynamics: str = 'laplacian'
    svd_tol: Optional[float] = None
    distinct_tol: Optional[float] = None
    bipartite_tol: Optional[float] = None
    amplitude_tol: Optional[float] = None


@dataclass(eq=False)
class SpectralReport:
    eigenvalues: np.ndarray
    vertex_components: Dict[int, np.ndarray]
    trace_estimate: float
    det_estimate: float
    bipartite: Optional[bool] = None
    cluster_count: Optional[int] = None
    labels: Optional[Dict[int, int]] = None
    model: Optional[CompanionModel] = None
    modes: Optional[np.ndarray] = None
    tolerances: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        payload = {
            'eigenvalues': [complex_to_dict(z) for z in self.eigenvalues],
            'vertex_components': {
                str(v): [complex_to_dict(c) for c in comps]
                for v, comps in sorted(self.vertex_components.items())
            },
            'trace_estimate': float(self.trace_estimate),
            'det_estimate': float(self.det_estimate),
            'bipartite': self.bipartite,
            'cluster_count': self.cluster_count,
            'labels': None if self.labels is None else [
                {'vertex': v, 'cluster': c} for v, c in sorted(self.labels.items())
            ],
            'tolerances': dict(sorted(self.tolerances.items())),
        }
        if self.model is not None:
            payload['model'] = self.model.to_dict()
        return payload


def sort_eigenvalues(eigenvalues) -> np.ndarray:
    """Descending modulus, ties broken by ascending argument."""
    values = np.asarray(eigenvalues, dtype=complex).ravel()
    # rounded modulus so conjugate pairs tie despite last-bit differences
    order = np.lexsort((np.angle(values), -np.round(np.abs(values), 12)))
    return values[order]


def local_eigenvalues(model: CompanionModel) -> np.ndarray:
    try:
        eigenvalues = linalg.eigvals(model.companion_matrix())
    except linalg.LinAlgError as exc:
        raise NumericError(f'companion eigenvalues did not converge: {exc}') from exc
    return sort_eigenvalues(eigenvalues)


def companion_eigenvector(lam: complex, s: int) -> np.ndarray:
    if s < 1:
        raise InputError(f's must be positive, got {s}')
    return np.power(complex(lam), np.arange(s))


def trace_det(model: CompanionModel) -> Tuple[float, float]:
    trace = float(model.weights[-1])
    det = float((-1) ** (model.s + 1) * model.weights[0])
    return trace, det


def match_spectra(first, second) -> float:
    """
    Greedy nearest-neighbour multiset distance between two spectra.

    Returns the largest pair distance, or inf when the sizes differ.
    """
    a = sort_eigenvalues(first)
    b = list(np.asarray(second, dtype=complex).ravel())
    if a.size != len(b):
        return float('inf')
    worst = 0.0
    for value in a:
        distances = [abs(value - other) for other in b]
        j = int(np.argmin(distances))
        worst = max(worst, distances[j])
        b.pop(j)
    return worst


def is_bipartite_spectrum(eigenvalues, tol: float = None) -> bool:
    """True iff {lambda} equals {-lambda} as a multiset within `tol`."""
    tol = setting('BIPARTITE_TOL', tol)
    values = sort_eigenvalues(eigenvalues)
    used = np.zeros(values.size, dtype=bool)
    for i, lam in enumerate(values):
        if used[i]:
            continue
        used[i] = True
        if abs(lam) <= tol:
            continue
        free = np.flatnonzero(~used)
        if free.size == 0:
            return False
        distances = np.abs(values[free] + lam)
        best = int(np.argmin(distances))
        if distances[best] > tol:
            return False
        used[free[best]] = True
    return True


def _check_distinct(eigenvalues: np.ndarray, tol: float) -> None:
    for i in range(eigenvalues.size):
        for j in range(i + 1, eigenvalues.size):
            if abs(eigenvalues[i] - eigenvalues[j]) <= tol:
                raise DegenerateSpectrumError(
                    f'eigenvalues {eigenvalues[i]} and {eigenvalues[j]} coincide within {tol}'
                )


def local_eigenvector_components(u, eigenvalues, svd_tol: float = None, distinct_tol: float = None) -> np.ndarray:
    """
    Coefficients c_l = z_l * xi_v^(l) in u^(k) = sum_l c_l lambda_l^k.

    Vandermonde columns are normalized before the truncated-SVD solve; for
    real data the coefficients of conjugate eigenvalue pairs are made exact
    conjugates.
    """
    distinct_tol = setting('DISTINCT_TOL', distinct_tol)
    u = np.asarray(u, dtype=float).ravel()
    eigenvalues = np.asarray(eigenvalues, dtype=complex).ravel()
    if u.size <= eigenvalues.size:
        raise InputError(f'need more than {eigenvalues.size} samples, got {u.size}')
    _check_distinct(eigenvalues, distinct_tol)

    V = np.power.outer(eigenvalues, np.arange(u.size)).T
    norms = np.linalg.norm(V, axis=0)
    norms[norms == 0] = 1.0
    scaled, _ = truncated_lstsq(V / norms, u.astype(complex), svd_tol)
    coefficients = scaled / norms

    # conjugate symmetry of real data
    for l, lam in enumerate(eigenvalues):
        if abs(lam.imag) <= distinct_tol:
            coefficients[l] = coefficients[l].real
            continue
        if lam.imag < 0:
            continue
        partner = int(np.argmin(np.abs(eigenvalues - np.conj(lam))))
        if partner != l and abs(eigenvalues[partner] - np.conj(lam)) <= 1e-6 * max(1.0, abs(lam)):
            average = (coefficients[l] + np.conj(coefficients[partner])) / 2
            coefficients[l] = average
            coefficients[partner] = np.conj(average)
    return coefficients


def wave_dynamics_spectrum(eigenvalues, tol: float = 1e-8) -> np.ndarray:
    """
    Real parts cos(theta) of a wave system's unit-circle eigenvalues, one per
    conjugate pair; cos(theta) = 1 - c^2 mu / 2 orders modes like the
    Laplacian dynamics do.
    """
    values = np.asarray(eigenvalues, dtype=complex).ravel()
    return np.sort(values[values.imag >= -tol].real)[::-1]


def detect_cluster_count(eigenvalues, max_k: Optional[int] = None) -> int:
    """Position of the widest gap among the max_k leading dynamics eigenvalues."""
    values = np.asarray(eigenvalues, dtype=complex).ravel()
    if values.size < 2:
        return 1
    if np.any(np.abs(values.imag) > 1e-8):
        logger.warning('discarding imaginary parts up to %.3g in gap detection', np.max(np.abs(values.imag)))
    ordered = np.sort(values.real)[::-1]
    if max_k is None:
        max_k = int(np.ceil(ordered.size / 2))
    if max_k < 1:
        raise InputError(f'max_k must be at least 1, got {max_k}')
    upper = min(max_k, ordered.size)
    if upper < 2:
        return 1
    gaps = ordered[:upper - 1] - ordered[1:upper]
    # argmax returns the first index on ties
    return int(np.argmax(gaps)) + 1


def dominant_modes(eigenvalues, components, amplitude_tol: float = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Modes whose fitted amplitude is at least amplitude_tol of the largest,
    sorted like sort_eigenvalues.

    Rank-deficient companion fits add spurious roots that the data does not
    excite; they carry no amplitude and would otherwise shift mode indices.
    """
    amplitude_tol = setting('AMPLITUDE_REL_TOL', amplitude_tol)
    eigenvalues = np.asarray(eigenvalues, dtype=complex).ravel()
    components = np.asarray(components, dtype=complex).ravel()
    amplitudes = np.abs(components)
    if amplitudes.size == 0 or amplitudes.max() == 0:
        return eigenvalues, components
    keep = amplitudes >= amplitude_tol * amplitudes.max()
    if not np.all(keep):
        logger.debug('dropping %d unexcited modes', int(np.count_nonzero(~keep)))
    kept_values, kept_components = eigenvalues[keep], components[keep]
    order = np.lexsort((np.angle(kept_values), -np.round(np.abs(kept_values), 12)))
    return kept_values[order], kept_components[order]


def decentralized_cluster_labels(components: Dict[int, Sequence[complex]], k: int, sign_tol: float = None) -> Dict[int, int]:
    """
    Sign pattern of Re(c_2) ... Re(c_k) at each vertex, canonicalized to
    0, 1, ... by first appearance in vertex order.
    """
    sign_tol = setting('SIGN_TOL', sign_tol)
    if k < 1:
        raise InputError(f'k must be at least 1, got {k}')
    ids: Dict[Tuple[bool, ...], int] = {}
    labels: Dict[int, int] = {}
    for vertex in sorted(components):
        values = np.asarray(components[vertex], dtype=complex).ravel()
        if values.size < k:
            raise InputError(f'vertex {vertex} supplies {values.size} components, need {k}')
        pattern = tuple(bool(v) for v in values[1:k].real >= -sign_tol)
        labels[vertex] = ids.setdefault(pattern, len(ids))
    return labels


def _gap_spectrum(eigenvalues: np.ndarray, dynamics: str) -> np.ndarray:
    if dynamics == 'wave':
        return wave_dynamics_spectrum(eigenvalues)
    if dynamics != 'laplacian':
        raise InputError(f'unknown dynamics {dynamics!r}')
    return eigenvalues


def analyze_vertex(u, s: int, options: AnalysisOptions = None) -> SpectralReport:
    """fit_companion -> local_eigenvalues -> components -> flags."""
    options = options or AnalysisOptions()
    svd_tol = setting('SVD_REL_TOL', options.svd_tol)
    distinct_tol = setting('DISTINCT_TOL', options.distinct_tol)
    bipartite_tol = setting('BIPARTITE_TOL', options.bipartite_tol)
    amplitude_tol = setting('AMPLITUDE_REL_TOL', options.amplitude_tol)

    model = fit_companion(u, s, svd_tol)
    eigenvalues = local_eigenvalues(model)
    trace, det = trace_det(model)
    report = SpectralReport(
        eigenvalues=eigenvalues,
        vertex_components={},
        trace_estimate=trace,
        det_estimate=det,
        model=model,
        tolerances={
            'svd': svd_tol,
            'distinct': distinct_tol,
            'bipartite': bipartite_tol,
            'amplitude': amplitude_tol,
            'sign': setting('SIGN_TOL'),
        },
    )
    if options.bipartite:
        report.bipartite = is_bipartite_spectrum(eigenvalues, bipartite_tol)

    ranked = eigenvalues
    if options.components or options.detect_gap:
        components = local_eigenvector_components(u, eigenvalues, svd_tol, distinct_tol)
        ranked, components = dominant_modes(eigenvalues, components, amplitude_tol)
        report.modes = ranked
        report.vertex_components[options.vertex] = components
    if options.detect_gap:
        report.cluster_count = detect_cluster_count(_gap_spectrum(ranked, options.dynamics), options.max_k)
    return report


def leading_spectrum(report: SpectralReport, count: int, dynamics: str = 'laplacian') -> np.ndarray:
    """The count largest dynamics eigenvalues a vertex observed, descending."""
    return np.sort(np.real(_gap_spectrum(report.modes, dynamics)))[::-1][:count]


def check_spectra_agree(
    reports: Dict[int, SpectralReport], count: int, dynamics: str = 'laplacian', tol: float = None,
) -> None:
    """
    Every vertex of a connected, localizable network sees the same leading
    eigenvalues; sign patterns are only comparable when they do.
    """
    tol = setting('SPECTRUM_AGREEMENT_TOL', tol)
    vertices = sorted(reports)
    reference = leading_spectrum(reports[vertices[0]], count, dynamics)
    for vertex in vertices[1:]:
        observed = leading_spectrum(reports[vertex], count, dynamics)
        common = min(observed.size, reference.size)
        distance = float(np.max(np.abs(observed[:common] - reference[:common]))) if common else 0.0
        if distance > tol:
            raise InconsistentSpectraError(vertex, vertices[0], distance)


@dataclass(eq=False)
class ClusteringResult:
    k: int
    labels: Dict[int, int]
    reports: Dict[int, SpectralReport]

    def components(self) -> Dict[int, np.ndarray]:
        return {v: r.vertex_components[v] for v, r in self.reports.items()}


def decentralized_clustering(
    trajectory: Trajectory,
    s: Optional[int] = None,
    k: Union[int, str] = 'auto',
    options: AnalysisOptions = None,
    workers: Optional[int] = None,
    sign_tol: float = None,
    agreement_tol: float = None,
) -> ClusteringResult:
    """
    analyze_vertex at every vertex independently, then the label fold.

    With k='auto' each vertex counts clusters from its own spectral gap and
    the most common count wins (the smallest on ties).
    """
    options = options or AnalysisOptions()
    s = trajectory.n if s is None else s
    workers = setting('CLUSTER_WORKERS', workers)
    auto = k == 'auto'
    vertices = list(range(1, trajectory.n + 1))

    def run(vertex: int) -> SpectralReport:
        per_vertex = replace(options, vertex=vertex, components=True, detect_gap=auto)
        return analyze_vertex(trajectory.component(vertex), s, per_vertex)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = dict(zip(vertices, pool.map(run, vertices)))
    else:
        reports = {v: run(v) for v in vertices}

    if auto:
        counts = Counter(r.cluster_count for r in reports.values())
        best = max(counts.values())
        k = min(c for c, n in counts.items() if n == best)
        logger.info('per-vertex cluster counts %s -> k=%d', dict(sorted(counts.items())), k)
    k = int(k)
    if k < 1:
        raise InputError(f'k must be at least 1, got {k}')
    check_spectra_agree(reports, max(k, 2), options.dynamics, agreement_tol)
    if k == 1:
        labels = {v: 0 for v in vertices}
    else:
        labels = decentralized_cluster_labels({v: r.vertex_components[v] for v, r in reports.items()}, k, sign_tol)
    for vertex, report in reports.items():
        report.labels = {vertex: labels[vertex]}
        report.cluster_count = k
    return ClusteringResult(k=k, labels=labels, reports=reports)
