import numpy as np
from scipy import linalg

from core.utils.dynsys import LinearSystem


def separated_spectrum(n: int) -> np.ndarray:
    """Real, simple eigenvalues of alternating sign with moduli in [0.5, 0.97]."""
    magnitudes = np.linspace(0.5, 0.97, n)
    return magnitudes * (-1.0) ** np.arange(n)


def symmetric_system(n: int, seed: int):
    """A = Q diag(lambda) Q^T with a random orthogonal Q; returns (system, Q, lambda)."""
    rng = np.random.default_rng(seed)
    Q, _ = linalg.qr(rng.standard_normal((n, n)))
    eigenvalues = separated_spectrum(n)
    return LinearSystem(Q @ np.diag(eigenvalues) @ Q.T), Q, eigenvalues


def random_weighted_graph(n: int, seed: int) -> np.ndarray:
    """Complete graph with uniform weights in [0.5, 1.5]."""
    rng = np.random.default_rng(seed)
    W = np.triu(rng.uniform(0.5, 1.5, (n, n)), 1)
    return W + W.T
