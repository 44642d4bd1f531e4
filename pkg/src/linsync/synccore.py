"""Projected steady-state covariance and distance from synchronization.

The steady-state covariance of the noise-driven linear dynamics, after
centering out the uniform mode, is computed either by a truncated power
series in the centered coupling matrix B = C @ U or by iterating the
stationarity recurrence to its fixed point.  Both are valid whenever the
spectral radius of B is below 1.  The distance from synchronization is
trace of that projected covariance divided by N.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidityError
from .netgen import ConnectivityMatrix
from .spectral import centered_product

__all__ = [
    "DynamicsParams",
    "ProjectedCovariance",
    "SyncEstimate",
    "centering_apply",
    "omega_u_series",
    "omega_u_fixed_point",
    "omega_unprojected",
    "sigma2",
]


@dataclass(frozen=True)
class DynamicsParams:
    """Dynamics selector: continuous OU reversion or discrete VAR iteration."""

    kind: str  # "continuous" or "discrete"
    theta: float = 1.0
    zeta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("continuous", "discrete"):
            raise ValueError(f"kind must be 'continuous' or 'discrete', got {self.kind!r}")
        if self.kind == "continuous" and self.theta <= 0:
            raise ValueError("theta must be positive")
        if self.zeta <= 0:
            raise ValueError("zeta must be positive")

    @classmethod
    def continuous(cls, theta: float = 1.0, zeta: float = 1.0) -> "DynamicsParams":
        return cls(kind="continuous", theta=theta, zeta=zeta)

    @classmethod
    def discrete(cls, zeta: float = 1.0) -> "DynamicsParams":
        return cls(kind="discrete", zeta=zeta)

    @property
    def prefactor(self) -> float:
        """Leading coefficient of the projected-covariance series."""
        if self.kind == "continuous":
            return self.zeta**2 / (2.0 * self.theta)
        return self.zeta**2


@dataclass(frozen=True)
class ProjectedCovariance:
    omega_u: np.ndarray
    terms_used: int
    residual_norm: float
    converged: bool

    @property
    def n(self) -> int:
        return self.omega_u.shape[0]


@dataclass(frozen=True)
class SyncEstimate:
    sigma2: float
    method: str
    terms_used: int
    residual: float
    converged: bool = True
    # Difference between the mean autocovariance (diagonal of the projected
    # covariance) and the mean over all its entries; equals sigma2 because
    # the uniform mode is annihilated.
    cov_difference: Optional[float] = None


def _centering(n: int) -> np.ndarray:
    return np.eye(n) - np.full((n, n), 1.0 / n)


def centering_apply(A: np.ndarray) -> np.ndarray:
    """Compute U @ A @ U by row/column mean subtraction, exact to round-off."""
    A = np.asarray(A, dtype=float)
    B = A - A.mean(axis=0, keepdims=True)
    return B - B.mean(axis=1, keepdims=True)


def _rho(matrix: np.ndarray) -> float:
    if matrix.shape[0] == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvals(matrix)).max())


def _require_valid(B: np.ndarray):
    rho = _rho(B)
    if rho >= 1.0:
        raise ValidityError(
            f"spectral radius of the centered coupling matrix is {rho:.6g} >= 1; "
            "the projected-covariance solution does not apply"
        )
    return rho


def omega_u_series(
    C: ConnectivityMatrix,
    params: DynamicsParams,
    tol: float = 1e-10,
    max_terms: int = 10_000,
) -> ProjectedCovariance:
    """Projected covariance via the truncated power series in B = C @ U.

    Continuous case: the binomially weighted inner sum per order m is
    maintained through the two-sided averaged update
    S_m = (B^T S_{m-1} + S_{m-1} B) / 2 with S_0 = U, which reproduces the
    series term by term at O(n^3) per order and without forming binomial
    coefficients.  Discrete case: terms (B^u)^T U B^u accumulated in u.
    Truncation is relative: stop once the max-norm of the newest term
    drops below tol times the partial-sum max-norm.
    """
    B = centered_product(C)
    _require_valid(B)
    n = C.n
    U = _centering(n)

    term = U.copy()
    total = U.copy()
    converged = False
    terms = 1
    term_norm = 1.0
    for _ in range(max_terms):
        if params.kind == "continuous":
            term = (B.T @ term + term @ B) / 2.0
        else:
            term = B.T @ term @ B
        total += term
        terms += 1
        term_norm = float(np.abs(term).max())
        if term_norm <= tol * max(np.abs(total).max(), np.finfo(float).tiny):
            converged = True
            break
    pref = params.prefactor
    return ProjectedCovariance(
        omega_u=pref * total,
        terms_used=terms,
        residual_norm=pref * term_norm,
        converged=converged,
    )


def omega_u_fixed_point(
    C: ConnectivityMatrix,
    params: DynamicsParams,
    tol: float = 1e-11,
    max_iters: int = 1_000_000,
) -> ProjectedCovariance:
    """Projected covariance via fixed-point iteration of the stationarity recurrence.

    Continuous: 2 X = (zeta^2/theta) U + B^T X + X B.
    Discrete:     X = B^T X B + zeta^2 U.
    Iterates from a scaled centering projector until the successive-iterate
    max-norm change drops below tol (relative to the iterate scale); the
    reported residual is the max-norm defect of the recurrence itself.
    """
    B = centered_product(C)
    _require_valid(B)
    n = C.n
    U = _centering(n)

    if params.kind == "continuous":
        q = params.zeta**2 / params.theta
        X = (q / 2.0) * U
        src = q * U
    else:
        q = params.zeta**2
        X = q * U
        src = q * U

    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        if params.kind == "continuous":
            Xn = (src + B.T @ X + X @ B) / 2.0
        else:
            Xn = B.T @ X @ B + src
        delta = float(np.abs(Xn - X).max())
        X = Xn
        if delta <= tol * max(1.0, float(np.abs(X).max())):
            converged = True
            break

    if params.kind == "continuous":
        defect = 2.0 * X - src - B.T @ X - X @ B
    else:
        defect = X - B.T @ X @ B - src
    residual = float(np.abs(defect).max())
    return ProjectedCovariance(
        omega_u=X, terms_used=iters, residual_norm=residual, converged=converged
    )


def omega_unprojected(
    C: ConnectivityMatrix,
    params: DynamicsParams,
    tol: float = 1e-10,
    max_terms: int = 10_000,
) -> np.ndarray:
    """Unprojected steady-state covariance, valid only for rho(C) < 1.

    This is the regime without a zero mode; centering the result matches
    the projected series.
    """
    rho = _rho(C.weights)
    if rho >= 1.0:
        raise ValidityError(
            f"spectral radius of C is {rho:.6g} >= 1; the unprojected covariance "
            "series does not converge"
        )
    n = C.n
    Cw = C.weights
    term = np.eye(n)
    total = np.eye(n)
    for _ in range(max_terms):
        if params.kind == "continuous":
            term = (Cw.T @ term + term @ Cw) / 2.0
        else:
            term = Cw.T @ term @ Cw
        total += term
        if np.abs(term).max() <= tol * np.abs(total).max():
            break
    return params.prefactor * total


def sigma2(
    C: ConnectivityMatrix,
    params: DynamicsParams,
    tol: float = 1e-10,
    max_terms: int = 1_000_000,
    method: str = "fixed_point",
) -> SyncEstimate:
    """Steady-state distance from synchronization, trace(Omega_U) / N."""
    n = C.n
    if n == 1:
        # A single node is always synchronized with itself.
        return SyncEstimate(
            sigma2=0.0, method=method, terms_used=0, residual=0.0, cov_difference=0.0
        )
    if method == "series":
        cov = omega_u_series(C, params, tol=tol, max_terms=max_terms)
    elif method == "fixed_point":
        cov = omega_u_fixed_point(C, params, tol=tol, max_iters=max_terms)
    else:
        raise ValueError(f"unknown method {method!r}")
    omega = cov.omega_u
    value = float(np.trace(omega)) / n
    diff = float(np.diagonal(omega).mean() - omega.mean())
    return SyncEstimate(
        sigma2=value,
        method=method,
        terms_used=cov.terms_used,
        residual=cov.residual_norm,
        converged=cov.converged,
        cov_difference=diff,
    )
