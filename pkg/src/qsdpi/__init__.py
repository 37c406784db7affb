"""qsdpi: contraction coefficients, channel orders and divergences for
quantum channels, with Weyl-covariant and truncated-Fock Gaussian tooling."""

from .channels import (
    DensityMatrix,
    QuantumChannel,
    build_channel,
    complementary_channel,
    compose,
    depolarizing,
    dephasing_z,
    dephrasure,
    erasure,
    identity_channel,
    replacer,
    tensor,
    tensor_power,
)
from .contraction import (
    EtaEstimate,
    closed_form_eta,
    domination_factor,
    estimate_eta,
    eta_bounds,
    hypercontractivity_window,
    moe_lower_bound,
    petz_recovery,
    sdpi_from_pq,
    spectral_gap,
)
from .divergences import (
    DivergenceValue,
    chi2_divergence,
    eps_hat,
    eps_tilde,
    f_divergence,
    relative_entropy,
    sandwiched_renyi,
    von_neumann_entropy,
)
from .orders import (
    OrderVerdict,
    approx_orders_from_diamond,
    check_complete_ln,
    check_degradable,
    check_regularized_ln,
    falsify_less_noisy,
)
from .capacities import capacity_bounds, coherent_information, holevo_chi, q1
from .convex_opt import diamond_norm, min_degrading_eps
from .gaussian import (
    GaussianChannelSpec,
    build_gaussian_channel,
    eta_closed_form,
    eta_lower_sweep,
    g_function,
    g_inequality_check,
    thermal_state,
)
from .functional import (
    SemigroupGenerator,
    compare_dirichlet,
    depolarizing_sdpi_constant,
    dirichlet_form,
    discrete_dirichlet_form,
    ent2,
    estimate_lsi,
    lsi_depolarizing,
)
from .weyl import (
    PmfZnZn,
    check_ln_mixture,
    degradation_witness,
    gamma0,
    omega_delta,
    weyl_eigenvalues,
)

__version__ = "0.1.0"
