import numpy as np
import pytest
from scipy.linalg import expm

from linsync import (
    ConnectivityMatrix,
    DynamicsParams,
    SimulationConfig,
    empirical_sigma2,
    sigma2,
    simulate_ou_exact,
    simulate_var,
)
from linsync.errors import SimulationRefusedError
from linsync.simulate import ou_transition

from conftest import random_valid_network


def quadrature_innovation_covariance(C, params, dt, steps=4000):
    """Composite-Simpson oracle for integral_0^dt e^{-M^T s} e^{-M s} ds."""
    n = C.n
    M = params.theta * (np.eye(n) - C.weights)
    s = np.linspace(0.0, dt, steps + 1)
    vals = np.empty((steps + 1, n, n))
    for k, sk in enumerate(s):
        E = expm(-M * sk)
        vals[k] = E.T @ E
    weights = np.ones(steps + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    h = dt / steps
    return params.zeta**2 * h / 3.0 * np.einsum("k,kij->ij", weights, vals)


def test_ou_transition_matches_quadrature(rng):
    C = random_valid_network(rng, 4)
    params = DynamicsParams.continuous(theta=1.3, zeta=0.8)
    for dt in (0.25, 1.0):
        A, Q = ou_transition(C, params, dt)
        M = params.theta * (np.eye(4) - C.weights)
        assert np.abs(A - expm(-M * dt)).max() <= 1e-12
        oracle = quadrature_innovation_covariance(C, params, dt)
        assert np.abs(Q - oracle).max() <= 1e-9
        assert np.abs(Q - Q.T).max() == 0.0


def test_ou_transition_large_dt(rng):
    # Long intervals overflow a single block exponential; the doubling path
    # must satisfy the exact composition Q(2s) = Q(s) + A(s)^T Q(s) A(s)
    # and the scalar closed form zeta^2 (1 - e^{-2 M dt}) / (2 M).
    C1 = ConnectivityMatrix.from_array(np.array([[0.3]]))
    params = DynamicsParams.continuous(theta=1.2, zeta=0.9)
    for dt in (5.0, 100.0):
        _, Q = ou_transition(C1, params, dt)
        M = 1.2 * 0.7
        want = 0.81 * (1 - np.exp(-2 * M * dt)) / (2 * M)
        assert Q[0, 0] == pytest.approx(want, rel=1e-13)
    C = random_valid_network(rng, 5)
    A20, Q20 = ou_transition(C, params, 20.0)
    A40, Q40 = ou_transition(C, params, 40.0)
    comp = Q20 + A20.T @ Q20 @ A20
    scale = np.abs(Q40).max()
    assert np.abs(Q40 - comp).max() <= 1e-11 * scale
    assert np.abs(A40 - A20 @ A20).max() <= 1e-11
    assert np.linalg.eigvalsh(Q40).min() >= -1e-12 * scale


def test_ou_transition_scalar_case():
    # One node, theta = 2: A = exp(-0 * dt) = 1 with C = [[1]], Q = zeta^2 dt.
    C = ConnectivityMatrix.from_array(np.array([[1.0]]))
    A, Q = ou_transition(C, DynamicsParams.continuous(theta=2.0, zeta=3.0), 0.7)
    assert A[0, 0] == pytest.approx(1.0)
    assert Q[0, 0] == pytest.approx(9.0 * 0.7, rel=1e-12)


def test_simulation_deterministic(rng):
    C = random_valid_network(rng, 5)
    cfg = SimulationConfig(DynamicsParams.continuous(), samples=50, seed=11)
    a = simulate_ou_exact(C, cfg)
    b = simulate_ou_exact(C, cfg)
    c = simulate_ou_exact(C, SimulationConfig(DynamicsParams.continuous(), 50, seed=12))
    assert np.array_equal(a.data, b.data)
    assert not np.array_equal(a.data, c.data)


def test_ou_empirical_matches_analytic(rng):
    C = random_valid_network(rng, 5, rho_cap=0.8)
    params = DynamicsParams.continuous()
    want = sigma2(C, params).sigma2
    batch = simulate_ou_exact(
        C, SimulationConfig(params, samples=200_000, seed=3, dt=1.0)
    )
    est = empirical_sigma2(batch)
    # Samples are autocorrelated, so allow a generous multiple of the
    # naive standard error.
    assert abs(est.sigma2 - want) <= 12 * est.residual
    assert abs(est.sigma2 - want) <= 0.05 * want


def test_var_empirical_matches_analytic(rng):
    C = random_valid_network(rng, 5, rho_cap=0.8)
    params = DynamicsParams.discrete()
    want = sigma2(C, params).sigma2
    batch = simulate_var(C, SimulationConfig(params, samples=200_000, seed=4))
    est = empirical_sigma2(batch)
    assert abs(est.sigma2 - want) <= 12 * est.residual
    assert abs(est.sigma2 - want) <= 0.05 * want


def test_simulators_refuse_divergent_dynamics(rng):
    C = random_valid_network(rng, 6)
    bad = ConnectivityMatrix.from_array(C.weights * 1.5)
    with pytest.raises(SimulationRefusedError):
        simulate_ou_exact(bad, SimulationConfig(DynamicsParams.continuous(), 10))
    with pytest.raises(SimulationRefusedError):
        simulate_var(bad, SimulationConfig(DynamicsParams.discrete(), 10))


def test_discrete_only_divergence(rng):
    # Real eigenvalue below -1 diverges in discrete time but not continuous.
    w = np.diag([0.2, -1.3, 0.5])
    C = ConnectivityMatrix.from_array(w)
    simulate_ou_exact(C, SimulationConfig(DynamicsParams.continuous(), 5, burn_in=0))
    with pytest.raises(SimulationRefusedError):
        simulate_var(C, SimulationConfig(DynamicsParams.discrete(), 5))


def test_kind_mismatch_rejected(rng):
    C = random_valid_network(rng, 4)
    with pytest.raises(ValueError):
        simulate_ou_exact(C, SimulationConfig(DynamicsParams.discrete(), 5))
    with pytest.raises(ValueError):
        simulate_var(C, SimulationConfig(DynamicsParams.continuous(), 5))


def test_config_validation():
    params = DynamicsParams.discrete()
    with pytest.raises(ValueError):
        SimulationConfig(params, samples=0)
    with pytest.raises(ValueError):
        SimulationConfig(params, samples=5, dt=0.0)
    with pytest.raises(ValueError):
        SimulationConfig(params, samples=5, burn_in=-1)


def test_initial_state_and_burn_in(rng):
    C = random_valid_network(rng, 4)
    x0 = np.array([100.0, -100.0, 50.0, -50.0])
    cfg = SimulationConfig(
        DynamicsParams.discrete(), samples=1, seed=0, burn_in=0, initial_state=x0
    )
    batch = simulate_var(C, cfg)
    # One step from a far-from-sync start still carries the transient.
    want = x0 @ C.weights
    assert np.abs(batch.data[0] - want).max() <= 10.0  # unit noise on top
    with pytest.raises(ValueError):
        simulate_var(
            C,
            SimulationConfig(
                DynamicsParams.discrete(), 1, initial_state=np.zeros(3)
            ),
        )


def test_timeseries_csv(tmp_path, rng):
    C = random_valid_network(rng, 3)
    cfg = SimulationConfig(DynamicsParams.continuous(), samples=4, seed=5, dt=0.5)
    batch = simulate_ou_exact(C, cfg)
    path = tmp_path / "ts.csv"
    batch.write_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "t,x1,x2,x3"
    assert len(lines) == 5
    row = [float(x) for x in lines[2].split(",")]
    assert row[0] == pytest.approx(0.5)
    assert np.allclose(row[1:], batch.data[1])


def test_empirical_sigma2_direct():
    # Hand-checkable batch: deviations (+1, -1) give sigma2 = 1 per sample.
    data = np.array([[1.0, -1.0], [2.0, 0.0], [0.0, 2.0]])
    cfg = SimulationConfig(DynamicsParams.discrete(), samples=3)
    est = empirical_sigma2(
        type("B", (), {"data": data, "config": cfg})()
    )
    assert est.sigma2 == pytest.approx(1.0)
    assert est.residual == 0.0
