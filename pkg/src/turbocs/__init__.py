"""turbocs: iterative recovery algorithms for discrete compressed sensing.

The library recovers s-sparse signals with entries from a finite symbol
set from underdetermined noisy linear measurements y = A x + n.  Seven
iterative algorithms share one estimation/denoising skeleton and differ in
the linear front-end and in how reliability information is tracked; all
runs count floating-point operations per iteration, and a benchmark driver
produces reproducible SER-versus-noise, SER-versus-sparsity, and
SER-versus-FLOPs sweeps as CSV.

Quick start::

    import numpy as np
    from turbocs import Prior, RecoveryConfig, make_instance, recover, ser

    rng = np.random.default_rng(7)
    prior = Prior.ternary(L=258, s=12)
    inst = make_instance(K=129, L=258, prior=prior, sigma_n_sq=10**-1.7, rng=rng)
    result = recover(inst, RecoveryConfig(algorithm="IKS"))
    print(ser(result.x_hat_quantized, inst.x_true))
"""

from .algorithms import (
    ALGORITHMS,
    IterationTrace,
    RecoveryConfig,
    RecoveryResult,
    brute_force_oracle,
    recover,
    run_amp,
    run_iht,
    run_iks,
    run_ims,
    run_isf,
    run_ist,
    run_tms,
    soft_feedback_step,
)
from .bench import ResultRow, SweepConfig, flops_trace, parse_config, run_sweep
from .denoiser import (
    VAR_FLOOR,
    SoftOutput,
    hard_threshold_keep_s,
    soft_stats,
    soft_threshold_keep_s,
    soft_value,
    soft_variance,
    unbias,
    unbias_elementwise,
)
from .estimators import (
    LinearEstimator,
    alpha_max,
    error_var_individual,
    krylov_error_coeffs,
    krylov_first_order,
    krylov_zeroth_order,
    lambda_max_estimate,
    lambda_max_statistical,
    matched_filter,
    mf_variance,
    mmse,
    variance_au,
    variance_ua,
)
from .exceptions import (
    ConfigurationError,
    DegenerateMatrixError,
    DimensionMismatchError,
    NoInformationError,
    StabilityError,
    TurboCSError,
)
from .model import (
    Prior,
    ProblemInstance,
    gen_sensing_matrix,
    gen_signal,
    inv_noise_db_to_sigma_sq,
    make_instance,
    observe,
    quantize_final,
    ser,
)
from .numerics import (
    EXP_FLOPS,
    FlopCounter,
    charge,
    counter_scope,
    flop_scope,
    mat_mat,
    mat_vec,
    solve_spd,
)

__version__ = "0.1.0"
