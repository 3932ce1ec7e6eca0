"""Fixed-design kernel regression on lattices with dependent errors."""

from lattice_smooth._core import (  # noqa: F401
    EstimationProblem,
    FieldSample,
    GeneratorSpec,
    KernelSpec,
    MarginalSpec,
    MixingProfile,
    bandwidth_value,
    beta_of_q,
    bias_at,
    c_k_coefficient,
    check_condition,
    cli_main,
    covariance_absolute_sum,
    d_k_coefficient,
    empirical_marginal,
    estimate,
    exact_squared_sum_moment,
    expected_estimate,
    field_variance,
    fit_slope,
    gaussian_innovation,
    gaussian_marginal,
    generate,
    iid_generator,
    kernel_eval,
    lex_compare,
    linear_generator,
    lp_norm,
    luxemburg_norm,
    md_generator,
    mixing_profile,
    norm_equivalence_diag,
    pedestal_kernel,
    point_mass,
    psi_eval,
    quantile_q,
    rademacher_innovation,
    rate_parameters_admissible,
    rio_bound,
    run_bias_study,
    run_rate_study,
    run_variance_study,
    serfling_bound,
    sup_deviation,
    theoretical_covariance,
    uniform_innovation,
    uniform_kernel,
    uniform_marginal,
    v_set_contains,
    verify_a1,
    weight,
    weight_sum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
