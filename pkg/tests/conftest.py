"""Shared generators for randomized valid test networks."""

import numpy as np
import pytest

from linsync import ConnectivityMatrix
from linsync.spectral import centered_product


def rho_cu(C: ConnectivityMatrix) -> float:
    return float(np.abs(np.linalg.eigvals(centered_product(C))).max())


def random_valid_network(
    rng: np.random.Generator,
    n: int,
    signed: bool = False,
    symmetric: bool = False,
    rho_cap: float = 0.97,
) -> ConnectivityMatrix:
    """Random coupling matrix with an exact zero mode and rho(CU) < rho_cap.

    Built as C = I - t L for a random weighted in-degree Laplacian L, whose
    column Gershgorin disks keep the spectrum inside the unit disk; an
    optional signed column-centered perturbation makes the weights mixed in
    sign while staying inside the validity region.
    """
    for _ in range(100):
        W = rng.uniform(0.0, 1.0, (n, n)) * (rng.random((n, n)) < 0.6)
        if symmetric:
            W = (W + W.T) / 2.0
        np.fill_diagonal(W, 0.0)
        indeg = W.sum(axis=0)
        if indeg.max() <= 0:
            continue
        L = np.diag(indeg) - W
        t = rng.uniform(0.2, 0.95) / indeg.max()
        base = np.eye(n) - t * L
        C = ConnectivityMatrix.from_array(base)
        if signed:
            Z = rng.normal(size=(n, n))
            if symmetric:
                Z = (Z + Z.T) / 2.0
            Z = Z - Z.mean(axis=0, keepdims=True)
            if symmetric:
                # Re-symmetrize while keeping zero column sums.
                Z = Z - Z.mean(axis=1, keepdims=True)
            eps = 0.3 / max(np.abs(np.linalg.eigvals(Z)).max(), 1e-12)
            while eps > 1e-8:
                cand = ConnectivityMatrix.from_array(base + eps * Z)
                if rho_cu(cand) < rho_cap:
                    return cand
                eps /= 2.0
            continue
        if rho_cu(C) < rho_cap:
            return C
    raise RuntimeError("failed to draw a valid random network")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
