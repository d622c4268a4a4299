"""Element-wise denoising: soft values, posterior variances, unbiasing,
and the hard/soft thresholding rules.

The soft value of an estimate x_tilde = x + e with e ~ N(0, sigma_e_sq) is
the posterior mean under the finite atomic prior,

    T(x_tilde) = sum_j v_j w_j / sum_j w_j,
    w_j = p_j * exp(-(x_tilde - v_j)^2 / (2 sigma_e_sq)),

and the per-element variance is the posterior second central moment, which
also equals sigma_e_sq * T'(x_tilde).  Weights are evaluated in the log
domain with the maximum exponent subtracted, so the functions stay finite
for arbitrarily small sigma_e_sq.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import NoInformationError
from .numerics import EXP_FLOPS, charge

# lower clamp applied to every variance the library produces
VAR_FLOOR = 1e-15


@dataclass(frozen=True)
class SoftOutput:
    """Biased soft values with their per-element and average variances."""

    x_hat_b: np.ndarray
    var_per_element: np.ndarray
    var_avg: float


def soft_stats(x_tilde, sigma_e_sq, prior):
    """Posterior mean and variance of every element of ``x_tilde``.

    ``sigma_e_sq`` may be a scalar or a per-element vector of estimation
    variances (all > 0).  For symmetric priors the evaluation is
    canonicalized to |x_tilde|, making T exactly odd and the variance
    exactly even.
    """
    x_tilde = np.asarray(x_tilde, dtype=np.float64)
    sig = np.asarray(sigma_e_sq, dtype=np.float64)
    if np.any(sig <= 0):
        raise ValueError("sigma_e_sq must be > 0")

    values = prior.values
    probs = prior.probs
    if prior.symmetric:
        sign = np.sign(x_tilde)
        x_eval = np.abs(x_tilde)
    else:
        x_eval = x_tilde

    inv2s = 1.0 / (2.0 * sig)
    if inv2s.ndim == 1:
        inv2s = inv2s[:, None]
    d = x_eval[:, None] - values[None, :]
    logw = np.log(probs)[None, :] - d * d * inv2s
    logw = logw - logw.max(axis=1, keepdims=True)
    w = np.exp(logw)
    den = w.sum(axis=1)
    mean = (w @ values) / den
    second = (w @ (values**2)) / den
    var = np.maximum(second - mean * mean, VAR_FLOOR)
    if prior.symmetric:
        mean = sign * mean

    # per element: 4 ops/atom for the exponent, EXP_FLOPS for exp, 1 for the
    # max shift, 5 ops/atom for the weighted sums, ~5 for mean/variance
    charge(x_tilde.size * ((10 + EXP_FLOPS) * len(values) + 5))
    return SoftOutput(
        x_hat_b=mean, var_per_element=var, var_avg=float(np.mean(var))
    )


def soft_value(x_tilde, sigma_e_sq, prior):
    """Posterior mean T(x_tilde) for a single value."""
    out = soft_stats(np.array([x_tilde], dtype=np.float64), sigma_e_sq, prior)
    return float(out.x_hat_b[0])


def soft_variance(x_tilde, sigma_e_sq, prior):
    """Posterior variance of a single value; equals sigma_e_sq * T'."""
    out = soft_stats(np.array([x_tilde], dtype=np.float64), sigma_e_sq, prior)
    return float(out.var_per_element[0])


def unbias(x_hat_b, x_tilde, var_b, var_prior_side):
    """Remove the bias of an MMSE output (extrinsic-value computation).

    Given biased values with variance ``var_b`` obtained from an input with
    variance ``var_prior_side``, returns the unbiased vector and variance

        var = (1/var_b - 1/var_prior_side)^-1,
        x   = var * (x_hat_b/var_b - x_tilde/var_prior_side).

    Requires 0 < var_b < var_prior_side; otherwise the output carries no
    information beyond its input and :class:`NoInformationError` is raised
    (callers fall back to the biased quantities).
    """
    if not var_b > 0:
        raise ValueError("var_b must be > 0")
    if var_b >= var_prior_side:
        raise NoInformationError(
            f"biased variance {var_b} not smaller than input variance {var_prior_side}"
        )
    x_hat_b = np.asarray(x_hat_b, dtype=np.float64)
    x_tilde = np.asarray(x_tilde, dtype=np.float64)
    inv_b = 1.0 / var_b
    inv_p = 1.0 / var_prior_side
    var = 1.0 / (inv_b - inv_p)
    x = var * (x_hat_b * inv_b - x_tilde * inv_p)
    charge(4 * x_hat_b.size + 4)
    return x, var


def unbias_elementwise(x_hat_b, x_tilde, var_b, var_prior_side):
    """Per-element unbiasing with per-element no-information fallback.

    Elements where ``var_b[l] >= var_prior_side[l]`` keep their biased value
    and variance; all others are unbiased as in :func:`unbias`.  Returns
    ``(x_hat, var)`` with ``var`` floored at :data:`VAR_FLOOR`.
    """
    x_hat_b = np.asarray(x_hat_b, dtype=np.float64)
    x_tilde = np.asarray(x_tilde, dtype=np.float64)
    var_b = np.asarray(var_b, dtype=np.float64)
    var_e = np.asarray(var_prior_side, dtype=np.float64)
    x = x_hat_b.copy()
    var = var_b.copy()
    good = var_b < var_e
    if np.any(good):
        inv_b = 1.0 / var_b[good]
        inv_e = 1.0 / var_e[good]
        v = 1.0 / (inv_b - inv_e)
        var[good] = v
        x[good] = v * (x_hat_b[good] * inv_b - x_tilde[good] * inv_e)
    charge(7 * x_hat_b.size)
    return x, np.maximum(var, VAR_FLOOR)


def hard_threshold_keep_s(x_tilde, s):
    """Zero all but the s largest-magnitude entries (ties: lowest index)."""
    x_tilde = np.asarray(x_tilde, dtype=np.float64)
    if s > x_tilde.size:
        raise ValueError(f"s={s} exceeds vector length {x_tilde.size}")
    out = np.zeros_like(x_tilde)
    keep = np.argsort(-np.abs(x_tilde), kind="stable")[:s]
    out[keep] = x_tilde[keep]
    return out


def soft_threshold_keep_s(x_tilde, s):
    """Shrink by the (s+1)-th largest magnitude, leaving at most s nonzeros.

    With tau = |x|_(s+1), returns sign(x) * max(|x| - tau, 0) element-wise.
    The threshold adapts to the current vector, guaranteeing at most s
    survivors.
    """
    x_tilde = np.asarray(x_tilde, dtype=np.float64)
    if s >= x_tilde.size:
        raise ValueError(f"s={s} must be smaller than vector length {x_tilde.size}")
    mags = np.abs(x_tilde)
    tau = np.sort(mags)[::-1][s]
    charge(x_tilde.size)
    return np.sign(x_tilde) * np.maximum(mags - tau, 0.0)
