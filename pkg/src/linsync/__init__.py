"""Analytic synchronizability of weighted directed networks.

Computes the steady-state distance from synchronization of linear
noise-driven dynamics (continuous and discrete time) directly from the
coupling matrix, decomposes it into process-motif contributions, and
validates it against exact stochastic simulation and eigenvalue closed
forms.
"""

from .netgen import (
    ConnectivityMatrix,
    RingEnsembleParams,
    ZeroModeReport,
    build_ring,
    check_zero_mode,
    read_matrix,
    rewire,
    split_rng,
    write_matrix,
)
from .spectral import (
    SpectralSummary,
    classify,
    eigenvalues,
    kemeny_constant,
    sigma2_symmetric_continuous,
    sigma2_symmetric_discrete,
)
from .synccore import (
    DynamicsParams,
    ProjectedCovariance,
    SyncEstimate,
    centering_apply,
    omega_u_fixed_point,
    omega_u_series,
    omega_unprojected,
    sigma2,
)
from .motifs import (
    MotifLedger,
    WalkCountCache,
    build_walk_cache,
    dual_walk_count,
    motif_sigma2_full,
    sigma2_low_order,
    walk_count,
)
from .simulate import (
    SimulationConfig,
    TimeSeriesBatch,
    empirical_sigma2,
    simulate_ou_exact,
    simulate_var,
)

__version__ = "0.1.0"
