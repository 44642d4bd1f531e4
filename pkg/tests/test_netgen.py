import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linsync import (
    ConnectivityMatrix,
    RingEnsembleParams,
    build_ring,
    check_zero_mode,
    read_matrix,
    rewire,
    split_rng,
    write_matrix,
)
from linsync.errors import MatrixFormatError


def test_build_ring_4_nodes():
    C = build_ring(RingEnsembleParams(n=4, d=2, c=0.5))
    w = C.weights
    assert np.allclose(np.diag(w), 0.5)
    for i in range(4):
        assert w[(i - 1) % 4, i] == 0.25
        assert w[(i + 1) % 4, i] == 0.25
    assert np.abs(w.sum(axis=0) - 1.0).max() <= 1e-12


def test_build_ring_zero_mode_residual():
    C = build_ring(RingEnsembleParams(n=100, d=4, c=0.5))
    report = check_zero_mode(C)
    assert report.has_zero_mode
    assert report.residual <= 1e-12


@pytest.mark.parametrize(
    "params",
    [
        RingEnsembleParams(n=4, d=3, c=0.5),  # odd in-degree
        RingEnsembleParams(n=4, d=4, c=0.5),  # d >= n
        RingEnsembleParams(n=10, d=2, c=1.5),  # c out of range
        RingEnsembleParams(n=10, d=2, c=-0.1),
    ],
)
def test_build_ring_rejects_bad_params(params):
    with pytest.raises(ValueError):
        build_ring(params)


def test_build_ring_is_circulant():
    C = build_ring(RingEnsembleParams(n=12, d=4, c=0.3)).weights
    shifted = np.roll(np.roll(C, 1, axis=0), 1, axis=1)
    assert np.array_equal(C, shifted)


def test_rewire_p0_is_identity():
    params = RingEnsembleParams(n=30, d=4, c=0.5, p=0.0)
    C = build_ring(params)
    out = rewire(C, params, split_rng(0))
    assert np.array_equal(out.weights, C.weights)


def test_rewire_invariants_p1():
    params = RingEnsembleParams(n=100, d=4, c=0.5, p=1.0)
    C = rewire(build_ring(params), params, split_rng(99))
    w = C.weights
    assert np.abs(w.sum(axis=0) - 1.0).max() <= 1e-12
    assert np.allclose(np.diag(w), 0.5)
    off = w[~np.eye(100, dtype=bool)]
    assert set(np.round(np.unique(off), 15)) <= {0.0, 0.125}
    # in-degree stays exactly d
    assert np.all((w > 0).sum(axis=0) - 1 == 4)


def test_rewire_deterministic():
    params = RingEnsembleParams(n=100, d=4, c=0.5, p=0.1)
    ring = build_ring(params)
    a = rewire(ring, params, split_rng(7, 0))
    b = rewire(ring, params, split_rng(7, 0))
    c = rewire(ring, params, split_rng(8, 0))
    assert np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.weights, c.weights)


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(6, 40),
    half_d=st.integers(1, 2),
    c=st.floats(0.0, 1.0),
    p=st.floats(0.0, 1.0),
    seed=st.integers(0, 2**32 - 1),
)
def test_rewire_column_sums_property(n, half_d, c, p, seed):
    params = RingEnsembleParams(n=n, d=2 * half_d, c=c, p=p, seed=seed)
    C = rewire(build_ring(params), params, split_rng(seed))
    w = C.weights
    assert np.abs(w.sum(axis=0) - 1.0).max() <= 1e-12
    assert np.allclose(np.diag(w), 1.0 - c)
    off = w[~np.eye(n, dtype=bool)]
    expected = {0.0} if c == 0 else {0.0, c / (2 * half_d)}
    assert set(np.unique(off)) <= expected


def test_rewire_source_distribution():
    # At p=1 every edge is redrawn.  Avoiding duplicate sources means slots
    # still held by original neighbors are disfavored, so the offsets
    # +-1, +-2 carry a clear deficit; all other circular offsets are
    # exchangeable and must share one probability, and the construction is
    # rotation covariant so cells within an offset are identically
    # distributed.  All bounds are multinomial z-scores at a fixed seed.
    n, d, reps = 100, 4, 1000
    params = RingEnsembleParams(n=n, d=d, c=0.5, p=1.0)
    ring = build_ring(params)
    counts = np.zeros((n, n))
    for r in range(reps):
        counts += rewire(ring, params, split_rng(1000, r)).weights > 0
    idx = np.arange(n)
    by_offset = np.array(
        [counts[(idx + off) % n, idx].sum() for off in range(n)]
    )
    far = [off for off in range(3, n - 2)]
    p_hat = by_offset[far].mean() / (reps * n)
    sigma_off = np.sqrt(reps * n * p_hat * (1 - p_hat))
    z_far = np.abs(by_offset[far] - reps * n * p_hat) / sigma_off
    assert z_far.max() <= 4.5
    # Original-neighbor slots are blocked for redraws that happen while
    # those neighbors are still sources, so later-processed offsets carry
    # progressively stronger deficits (edges are redrawn in offset order
    # 1, 2, n-2, n-1); the first-processed slot frees up early and ends
    # near the shared level.
    level = reps * n * p_hat
    assert by_offset[n - 1] < by_offset[n - 2] < by_offset[2] < 0.85 * level
    assert by_offset[1] > 0.9 * level
    # rotation covariance: within an offset, per-target counts are uniform
    for off in (1, 3, 50):
        cells = counts[(idx + off) % n, idx]
        p_cell = cells.mean() / reps
        sigma_cell = np.sqrt(reps * p_cell * (1 - p_cell))
        assert np.abs(cells - reps * p_cell).max() <= 4.75 * sigma_cell


def test_check_zero_mode_cases():
    eye = ConnectivityMatrix.from_array(np.eye(3))
    rep = check_zero_mode(eye, tol=1e-10)
    assert rep.has_zero_mode and rep.residual == 0.0

    zeros = ConnectivityMatrix.from_array(np.zeros((3, 3)))
    rep = check_zero_mode(zeros)
    assert not rep.has_zero_mode
    assert rep.residual == 1.0


def test_matrix_roundtrip(tmp_path):
    params = RingEnsembleParams(n=4, d=2, c=0.5)
    C = build_ring(params)
    path = tmp_path / "ring.mat"
    write_matrix(C, path)
    back = read_matrix(path)
    assert np.array_equal(back.weights, C.weights)


def test_matrix_roundtrip_random(tmp_path, rng):
    C = ConnectivityMatrix.from_array(rng.normal(size=(7, 7)) * 1e3)
    path = tmp_path / "m.mat"
    write_matrix(C, path)
    assert np.array_equal(read_matrix(path).weights, C.weights)


def test_read_matrix_dimension_mismatch(tmp_path):
    path = tmp_path / "bad.mat"
    path.write_text("linsync-matrix 1\n4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n")
    with pytest.raises(MatrixFormatError):
        read_matrix(path)


def test_read_matrix_rejects_nan(tmp_path):
    path = tmp_path / "nan.mat"
    path.write_text("linsync-matrix 1\n2\n1 0\nNaN 1\n")
    with pytest.raises(MatrixFormatError) as err:
        read_matrix(path)
    assert "line 4" in str(err.value)


def test_read_matrix_bad_header(tmp_path):
    path = tmp_path / "h.mat"
    path.write_text("something else\n2\n1 0\n0 1\n")
    with pytest.raises(MatrixFormatError) as err:
        read_matrix(path)
    assert "line 1" in str(err.value)


def test_read_matrix_non_numeric(tmp_path):
    path = tmp_path / "t.mat"
    path.write_text("linsync-matrix 1\n2\n1 zebra\n0 1\n")
    with pytest.raises(MatrixFormatError) as err:
        read_matrix(path)
    assert "line 3" in str(err.value)
