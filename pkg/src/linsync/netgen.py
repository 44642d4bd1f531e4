"""Construction, validation and serialization of network coupling matrices.

The central object is a dense weighted adjacency matrix C where entry
(j, i) is the weight of the directed edge from node j to node i, acting
on row-vector states as x @ C.  The generator builds directed
Watts-Strogatz ring ensembles whose columns always sum to 1, so the
uniform row vector stays a left eigenvector with eigenvalue 1 (the
"zero mode") and nontrivial synchronization is possible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MatrixFormatError

MATRIX_FORMAT_MAGIC = "linsync-matrix 1"

__all__ = [
    "ConnectivityMatrix",
    "RingEnsembleParams",
    "ZeroModeReport",
    "build_ring",
    "rewire",
    "check_zero_mode",
    "read_matrix",
    "write_matrix",
    "split_rng",
]


@dataclass(frozen=True)
class ConnectivityMatrix:
    """Dense n x n real coupling matrix, immutable after construction."""

    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        if w.shape[0] != self.n:
            raise ValueError(f"n={self.n} does not match weights shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_array(cls, weights) -> "ConnectivityMatrix":
        w = np.asarray(weights, dtype=float)
        return cls(n=w.shape[0], weights=w)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.abs(self.weights).max()))
        return bool(np.abs(self.weights - self.weights.T).max() <= tol * scale)


@dataclass(frozen=True)
class RingEnsembleParams:
    """Parameters of the directed ring ensemble with source rewiring."""

    n: int
    d: int
    c: float
    p: float = 0.0
    seed: int = 0

    def validate(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.d < 2 or self.d % 2 != 0:
            raise ValueError(f"in-degree d must be a positive even integer, got {self.d}")
        if self.d >= self.n:
            raise ValueError(f"in-degree d={self.d} must be smaller than n={self.n}")
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"total incoming weight c={self.c} must lie in [0, 1]")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"rewiring probability p={self.p} must lie in [0, 1]")


@dataclass(frozen=True)
class ZeroModeReport:
    has_zero_mode: bool
    residual: float
    eigenvalue_at_zero_mode: float


def split_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Derive an independent generator from a master seed and an index key.

    Uses numpy's SeedSequence spawn-key mechanism, so streams for distinct
    keys are independent and the assignment of work to threads or
    processes cannot change any stream.
    """
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)


def _ring_sources(i: int, n: int, d: int) -> list[int]:
    half = d // 2
    return [(i - k) % n for k in range(1, half + 1)] + [(i + k) % n for k in range(1, half + 1)]


def build_ring(params: RingEnsembleParams) -> ConnectivityMatrix:
    """Build the regular directed ring (the p=0 ensemble member).

    Node i receives edges of weight c/d from its d/2 nearest ring
    neighbors on each side, plus a self-weight 1-c, so every column sums
    to exactly 1.
    """
    params.validate()
    n, d, c = params.n, params.d, params.c
    w = np.zeros((n, n))
    for i in range(n):
        for j in _ring_sources(i, n, d):
            w[j, i] = c / d
        w[i, i] = 1.0 - c
    return ConnectivityMatrix(n=n, weights=w)


def rewire(
    C: ConnectivityMatrix, params: RingEnsembleParams, rng: np.random.Generator
) -> ConnectivityMatrix:
    """Randomize edge sources with probability p, preserving column sums.

    Each non-self incoming edge of each node independently has its source
    redrawn (with probability p) uniformly from nodes that are neither
    the target nor already a source of that target.  A redraw may land on
    the edge's current source, which counts as no change.  Self-links are
    never rewired, in-degree stays exactly d and weights stay c/d.
    """
    params.validate()
    n, d, c, p = params.n, params.d, params.c, params.p
    w = np.array(C.weights)
    weight = c / d
    for i in range(n):
        sources = set(np.nonzero(w[:, i])[0].tolist()) - {i}
        # Zero weight c=0 leaves no off-diagonal support; fall back to the
        # ring layout so rewiring remains well-defined.
        if not sources:
            sources = set(_ring_sources(i, n, d))
        # Process edges in circular-offset order from the target so the
        # ensemble is rotation covariant (node-index order would treat
        # targets near the index wrap-around differently).
        for s in sorted(sources, key=lambda v: (v - i) % n):
            if rng.random() >= p:
                continue
            candidates = [v for v in range(n) if v != i and (v == s or v not in sources)]
            new = int(candidates[rng.integers(len(candidates))])
            if new != s:
                sources.discard(s)
                sources.add(new)
                w[s, i] = 0.0
                w[new, i] = weight
    return ConnectivityMatrix(n=n, weights=w)


def check_zero_mode(C: ConnectivityMatrix, tol: float = 1e-9) -> ZeroModeReport:
    """Check whether the uniform row vector is a left eigenvector with value 1."""
    col_sums = C.weights.sum(axis=0)
    residual = float(np.abs(col_sums - 1.0).max()) if C.n else 0.0
    return ZeroModeReport(
        has_zero_mode=residual <= tol,
        residual=residual,
        eigenvalue_at_zero_mode=float(col_sums.mean()) if C.n else 1.0,
    )


def write_matrix(C: ConnectivityMatrix, path) -> None:
    """Write C in the dense text format (17 significant digits)."""
    lines = [MATRIX_FORMAT_MAGIC, str(C.n)]
    for row in C.weights:
        lines.append(" ".join(f"{x:.17g}" for x in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path) -> ConnectivityMatrix:
    """Read a matrix written by write_matrix, reporting errors with line numbers."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw or raw[0].strip() != MATRIX_FORMAT_MAGIC:
        raise MatrixFormatError(
            f"expected header {MATRIX_FORMAT_MAGIC!r}", line=1
        )
    if len(raw) < 2:
        raise MatrixFormatError("missing node count", line=2)
    try:
        n = int(raw[1].strip())
    except ValueError:
        raise MatrixFormatError(f"node count is not an integer: {raw[1]!r}", line=2)
    if n < 1:
        raise MatrixFormatError(f"node count must be positive, got {n}", line=2)
    body = [ln for ln in raw[2:] if ln.strip()]
    if len(body) != n:
        raise MatrixFormatError(
            f"expected {n} matrix rows, found {len(body)}", line=2 + len(body) + 1
        )
    w = np.empty((n, n))
    for r, ln in enumerate(body):
        tokens = ln.split()
        lineno = 3 + r
        if len(tokens) != n:
            raise MatrixFormatError(
                f"row has {len(tokens)} entries, expected {n}", line=lineno
            )
        for col, tok in enumerate(tokens):
            try:
                val = float(tok)
            except ValueError:
                raise MatrixFormatError(f"non-numeric token {tok!r}", line=lineno)
            if not np.isfinite(val):
                raise MatrixFormatError(f"non-finite entry {tok!r}", line=lineno)
            w[r, col] = val
    return ConnectivityMatrix(n=n, weights=w)
