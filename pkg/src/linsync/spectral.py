"""Eigenvalue analysis of coupling matrices.

Provides the full nonsymmetric spectrum, identification and exclusion of
the zero mode (the eigenpair carried by the uniform row vector), the
synchronization-condition verdicts for continuous and discrete dynamics,
the extremal real-part heuristics, the symmetric closed forms for the
steady-state distance from synchronization, and the Kemeny constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AmbiguousZeroModeError, EigensolverError, ValidityError
from .netgen import ConnectivityMatrix

__all__ = [
    "SpectralSummary",
    "eigenvalues",
    "classify",
    "sigma2_symmetric_continuous",
    "sigma2_symmetric_discrete",
    "kemeny_constant",
    "centered_product",
]

# Eigenvector match threshold for zero-mode identification (normalized
# dot product with the uniform direction).
_ZERO_MODE_OVERLAP = 1.0 - 1e-6


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    zero_mode_index: Optional[int]
    re_lambda1: float
    re_lambda2: float
    rho_CU: float
    sync_continuous: bool
    sync_discrete: bool

    @property
    def nonzero_mode_eigenvalues(self) -> np.ndarray:
        if self.zero_mode_index is None:
            return self.eigenvalues
        mask = np.ones(len(self.eigenvalues), dtype=bool)
        mask[self.zero_mode_index] = False
        return self.eigenvalues[mask]


def _eig(matrix: np.ndarray):
    try:
        return np.linalg.eig(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"dense eigensolver did not converge for a {matrix.shape[0]}x"
            f"{matrix.shape[0]} matrix: {exc}"
        ) from exc


def eigenvalues(C: ConnectivityMatrix) -> np.ndarray:
    """All n eigenvalues of C (order deterministic for a given input)."""
    try:
        return np.linalg.eigvals(C.weights)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"dense eigensolver did not converge for n={C.n}: {exc}"
        ) from exc


def centered_product(C: ConnectivityMatrix) -> np.ndarray:
    """The matrix C @ U with U the centering projector, formed directly."""
    w = C.weights
    return w - w.mean(axis=1, keepdims=True)


def classify(C: ConnectivityMatrix, tol: float = 1e-8) -> SpectralSummary:
    """Full spectral summary: zero-mode exclusion, sync verdicts, heuristics.

    The zero mode is identified through the left eigenvector (row-vector
    convention): the uniform direction must be reproduced within tol and
    the matching eigenvalue must lie within tol of 1.
    """
    w = C.weights
    n = C.n
    eigs, right_of_T = _eig(w.T)  # right eigenvectors of C^T = left of C
    psi0 = np.ones(n) / np.sqrt(n)

    zero_mode_index: Optional[int] = None
    scale = max(1.0, float(np.abs(w).max()))
    residual = float(np.abs(w.sum(axis=0) - 1.0).max())
    if residual <= tol * scale:
        overlaps = np.abs(right_of_T.T.conj() @ psi0) / np.linalg.norm(
            right_of_T, axis=0
        )
        matched = [
            k
            for k in range(n)
            if overlaps[k] >= _ZERO_MODE_OVERLAP and abs(eigs[k] - 1.0) <= max(tol, 1e-6)
        ]
        if len(matched) > 1:
            distinct = {round(float(eigs[k].real), 9) for k in matched}
            if len(distinct) > 1:
                raise AmbiguousZeroModeError(
                    f"{len(matched)} eigenpairs match the uniform direction "
                    f"with eigenvalues {[eigs[k] for k in matched]}"
                )
            matched = matched[:1]
        if matched:
            zero_mode_index = matched[0]
        else:
            # Degenerate eigenspace: the solver may return a basis that does
            # not contain the uniform direction even though psi0 C = psi0
            # holds.  Exclude the eigenvalue nearest 1.
            zero_mode_index = int(np.argmin(np.abs(eigs - 1.0)))

    if zero_mode_index is None:
        rest = eigs
    else:
        rest = np.delete(eigs, zero_mode_index)

    if len(rest) == 0:
        re1 = re2 = float("-inf")
        sync_c = sync_d = True
    else:
        re_sorted = np.sort(rest.real)[::-1]
        re1 = float(re_sorted[0])
        re2 = float(re_sorted[1]) if len(re_sorted) > 1 else float(re_sorted[0])
        sync_c = bool(re1 < 1.0)
        sync_d = bool(np.abs(rest).max() < 1.0)

    if n == 1:
        rho_cu = 0.0
    else:
        try:
            rho_cu = float(np.abs(np.linalg.eigvals(centered_product(C))).max())
        except np.linalg.LinAlgError as exc:
            raise EigensolverError(f"eigensolver failed on C@U, n={n}: {exc}") from exc

    return SpectralSummary(
        eigenvalues=eigs,
        zero_mode_index=zero_mode_index,
        re_lambda1=re1,
        re_lambda2=re2,
        rho_CU=rho_cu,
        sync_continuous=sync_c,
        sync_discrete=sync_d,
    )


def _real_nonzero_mode(summary: SpectralSummary) -> np.ndarray:
    rest = summary.nonzero_mode_eigenvalues
    return rest.real


def sigma2_symmetric_continuous(summary: SpectralSummary, n: int) -> float:
    """Closed-form distance from synchronization for symmetric C, continuous time.

    Evaluates (1/2N) sum 1/(1 - lambda) over the non-zero-mode spectrum
    (theta = zeta = 1 convention).
    """
    lams = _real_nonzero_mode(summary)
    if np.any(lams >= 1.0 - 1e-14):
        raise ValidityError(
            "closed form diverges: a non-zero-mode eigenvalue is >= 1 "
            f"(max {lams.max():.6g})"
        )
    return float(np.sum(1.0 / (1.0 - lams)) / (2 * n))


def sigma2_symmetric_discrete(summary: SpectralSummary, n: int) -> float:
    """Closed-form distance from synchronization for symmetric C, discrete time.

    Evaluates (1/N) sum 1/(1 - lambda^2) over the non-zero-mode spectrum
    (zeta = 1 convention).
    """
    lams = _real_nonzero_mode(summary)
    if np.any(np.abs(lams) >= 1.0 - 1e-14):
        raise ValidityError(
            "closed form diverges: a non-zero-mode eigenvalue has |lambda| >= 1 "
            f"(max {np.abs(lams).max():.6g})"
        )
    return float(np.sum(1.0 / (1.0 - lams**2)) / n)


def kemeny_constant(summary: SpectralSummary, n: int) -> float:
    """Kemeny constant K = sum 1/(1 - lambda) over non-unit eigenvalues.

    For a symmetric stochastic C with zero mode this satisfies
    sigma2_symmetric_continuous = K / (2N) identically (same summation).
    """
    return 2 * n * sigma2_symmetric_continuous(summary, n)
