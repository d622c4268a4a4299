"""Linear estimation front-ends for the recovery loops.

Provides the matched filter, the exact linear MMSE estimator (scalar or
per-element signal variances) with diagonal bias removal, the two orders of
series (Krylov-space) approximation of the MMSE matrix, and the associated
error-variance formulas.

The MMSE matrix for signal variance phi and noise variance sigma_n_sq is

    H_B = phi A^T (A phi A^T + sigma_n_sq I)^-1,

which is biased: the diagonal of H_B A is below one.  The unbiased version
rescales each row by c_l = 1 / (H_B A)_{l,l}.  The series approximation
writes (Q + I)^-1 as I - Q + Q^2 -+ ... with
Q = alpha sigma_s_sq A A^T + (alpha sigma_n_sq - 1) I, stable for
alpha < 2 / (sigma_s_sq lambda_max(A A^T) + sigma_n_sq).
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateMatrixError, StabilityError
from .numerics import charge, mat_mat, solve_spd


@dataclass(frozen=True)
class LinearEstimator:
    """Immutable linear front-end.

    ``h`` is the matrix applied in the estimation step (already unbiased
    for the mmse/krylov kinds).  ``h_biased`` and ``k_diag`` (the diagonal
    of H_B A) are kept for the MMSE-family kinds; ``mu_s``/``mu_n`` are the
    precomputed error-variance trace coefficients of the krylov kinds.
    """

    kind: str
    h: np.ndarray
    h_biased: np.ndarray = None
    k_diag: np.ndarray = None
    mu_s: float = None
    mu_n: float = None


def matched_filter(A):
    """Matched filter H = C A^T with c_l = 1/||a_l||^2 (a_l: l-th column).

    The diagonal of H A is one by construction; for unit-norm columns the
    filter reduces to A^T.
    """
    A = np.asarray(A, dtype=np.float64)
    K, L = A.shape
    col_sq = np.einsum("kl,kl->l", A, A)
    if np.any(col_sq == 0.0):
        raise DegenerateMatrixError("matched_filter: zero column in A")
    h = A.T / col_sq[:, None]
    charge(2 * K * L + L + L * K)
    return LinearEstimator(kind="matched-filter", h=h)


def mf_variance(sigma_s_sq, sigma_n_sq, K, L):
    """Estimation variance of the matched filter on a normalized i.i.d.
    Gaussian sensing matrix: (L/K) sigma_s_sq + sigma_n_sq."""
    charge(3)
    return (L / K) * sigma_s_sq + sigma_n_sq


def mmse(A, sigma_n_sq, sigma_s):
    """Unbiased linear MMSE estimator for y = A x + n.

    ``sigma_s`` may be a scalar signal variance or a length-L vector of
    per-element variances.  Builds the biased matrix via an SPD solve of
    the K-by-K system, records k_diag = diag(H_B A), and rescales rows so
    that diag(H A) is exactly one.
    """
    A = np.asarray(A, dtype=np.float64)
    K, L = A.shape
    if sigma_n_sq <= 0:
        raise ValueError("mmse requires sigma_n_sq > 0")
    s_vec = np.broadcast_to(np.asarray(sigma_s, dtype=np.float64), (L,))
    if np.any(s_vec <= 0):
        raise ValueError("mmse requires signal variances > 0")

    a_phi = A * s_vec[None, :]
    charge(K * L)
    g = mat_mat(a_phi, A.T)
    g[np.diag_indices_from(g)] += sigma_n_sq
    charge(K)
    x = solve_spd(g, A)  # x = (A phi A^T + sigma_n_sq I)^-1 A
    h_biased = s_vec[:, None] * x.T
    charge(L * K)
    k_diag = np.einsum("lk,kl->l", h_biased, A)
    charge(2 * L * K)
    if np.any(k_diag <= 0):
        raise DegenerateMatrixError("mmse: nonpositive diagonal in H_B A")
    h = h_biased / k_diag[:, None]
    charge(L + L * K)
    return LinearEstimator(kind="mmse", h=h, h_biased=h_biased, k_diag=k_diag)


def error_var_individual(k_diag, sigma_s_sq):
    """Per-element error variances of the MMSE solution.

    Returns ``(biased, unbiased)`` with biased_l = sigma_s_sq (1 - k_l) and
    unbiased_l = sigma_s_sq (1 - k_l)/k_l.  ``sigma_s_sq`` may be a scalar
    or a per-element vector.
    """
    k_diag = np.asarray(k_diag, dtype=np.float64)
    if np.any(k_diag <= 0):
        raise ValueError("k_diag entries must be > 0")
    biased = sigma_s_sq * (1.0 - k_diag)
    unbiased = biased / k_diag
    charge(3 * k_diag.size)
    return biased, unbiased


def variance_ua(k_diag, sigma_s_sq):
    """Average unbiased error variance, unbias-then-average order.

    Equals sigma_s_sq (1/M_H - 1) with M_H the harmonic mean of k_diag,
    i.e. the mean of the per-element unbiased variances.
    """
    k_diag = np.asarray(k_diag, dtype=np.float64)
    if np.any(k_diag <= 0) or np.any(k_diag > 1.0):
        raise ValueError("k_diag entries must lie in (0, 1]")
    inv_mh = float(np.mean(1.0 / k_diag))
    charge(2 * k_diag.size + 2)
    return sigma_s_sq * (inv_mh - 1.0)


def variance_au(k_diag, sigma_s_sq):
    """Average unbiased error variance, average-then-unbias order.

    Equals sigma_s_sq (1/M_A - 1) with M_A the arithmetic mean of k_diag.
    Never exceeds :func:`variance_ua` (arithmetic mean >= harmonic mean).
    """
    k_diag = np.asarray(k_diag, dtype=np.float64)
    if np.any(k_diag <= 0) or np.any(k_diag > 1.0):
        raise ValueError("k_diag entries must lie in (0, 1]")
    m_a = float(np.mean(k_diag))
    charge(k_diag.size + 3)
    return sigma_s_sq * (1.0 / m_a - 1.0)


def lambda_max_estimate(A):
    """Upper bound on lambda_max(A A^T): the largest absolute row sum of
    A A^T (infinity norm of a symmetric matrix bounds its spectral radius).
    """
    A = np.asarray(A, dtype=np.float64)
    g = mat_mat(A, A.T)
    charge(g.shape[0] * g.shape[0])
    return float(np.max(np.sum(np.abs(g), axis=1)))


def lambda_max_statistical(K, L):
    """Asymptotic largest eigenvalue of A A^T for a column-normalized
    i.i.d. Gaussian K-by-L sensing matrix: (1 + sqrt(L/K))^2 (the upper
    spectral edge; finite-size fluctuations stay within a few percent for
    the sizes used here)."""
    return (1.0 + np.sqrt(L / K)) ** 2


def alpha_max(lambda_max, sigma_s_sq, sigma_n_sq):
    """Stability limit 2 / (sigma_s_sq * lambda_max + sigma_n_sq) for the
    series-expansion step size."""
    charge(3)
    return 2.0 / (sigma_s_sq * lambda_max + sigma_n_sq)


def krylov_zeroth_order(A, sigma_s_sq, sigma_n_sq, alpha, lambda_max=None):
    """Zeroth-order series approximation H_B = alpha sigma_s_sq A^T.

    After unbiasing this is exactly the matched filter; the biased matrix
    and k_diag are retained for comparison against higher orders.
    """
    A = np.asarray(A, dtype=np.float64)
    _check_alpha(A, sigma_s_sq, sigma_n_sq, alpha, lambda_max)
    K, L = A.shape
    h_biased = alpha * sigma_s_sq * A.T
    charge(2 * L * K + 1)
    k_diag = np.einsum("lk,kl->l", h_biased, A)
    charge(2 * L * K)
    if np.any(k_diag <= 0):
        raise DegenerateMatrixError("krylov0: zero column in A")
    h = h_biased / k_diag[:, None]
    charge(L + L * K)
    mu_s, mu_n = krylov_error_coeffs(h, A)
    return LinearEstimator(
        kind="krylov0", h=h, h_biased=h_biased, k_diag=k_diag, mu_s=mu_s, mu_n=mu_n
    )


def krylov_first_order(A, sigma_s_sq, sigma_n_sq, alpha, lambda_max=None):
    """First-order series approximation of the MMSE matrix.

    Builds H_B = gamma A^T (I - beta A A^T) with
    beta = sigma_s_sq / (2/alpha - sigma_n_sq) and
    gamma = alpha sigma_s_sq (2 - alpha sigma_n_sq), unbiases it, and
    precomputes the error-variance coefficients (mu_s, mu_n) of the
    unbiased matrix.  ``alpha`` must lie inside the stability region; the
    bound is checked against ``lambda_max`` when given, else against
    :func:`lambda_max_estimate`.
    """
    A = np.asarray(A, dtype=np.float64)
    _check_alpha(A, sigma_s_sq, sigma_n_sq, alpha, lambda_max)
    K, L = A.shape
    beta = sigma_s_sq / (2.0 / alpha - sigma_n_sq)
    gamma = alpha * sigma_s_sq * (2.0 - alpha * sigma_n_sq)
    charge(7)
    g = mat_mat(A, A.T)
    w = -beta * g
    w[np.diag_indices_from(w)] += 1.0
    charge(K * K + K)
    h_biased = gamma * mat_mat(w, A).T
    charge(L * K)
    k_diag = np.einsum("lk,kl->l", h_biased, A)
    charge(2 * L * K)
    if np.any(k_diag <= 0):
        raise DegenerateMatrixError("krylov1: nonpositive diagonal in H_B A")
    h = h_biased / k_diag[:, None]
    charge(L + L * K)
    mu_s, mu_n = krylov_error_coeffs(h, A)
    return LinearEstimator(
        kind="krylov1", h=h, h_biased=h_biased, k_diag=k_diag, mu_s=mu_s, mu_n=mu_n
    )


def krylov_error_coeffs(h, A):
    """Trace coefficients (mu_s, mu_n) of the estimation-error covariance.

    For a fixed estimator H applied to y = A x + n the error covariance is
    sigma_s_sq M_S + sigma_n_sq M_N with M_S = (HA - I)(HA - I)^T and
    M_N = H H^T; only mu_s = trace(M_S)/L and mu_n = trace(M_N)/L are
    retained, so the average error variance is
    sigma_s_sq mu_s + sigma_n_sq mu_n.
    """
    h = np.asarray(h, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    L = h.shape[0]
    ha = mat_mat(h, A)
    fro_ha = float(np.sum(ha * ha))
    tr_ha = float(np.trace(ha))
    fro_h = float(np.sum(h * h))
    # ||HA - I||_F^2 >= 0; the expanded form can round below zero when HA
    # is numerically the identity
    mu_s = max((fro_ha - 2.0 * tr_ha + L) / L, 0.0)
    mu_n = fro_h / L
    charge(2 * L * L + L + 2 * h.size + 6)
    return mu_s, mu_n


def _check_alpha(A, sigma_s_sq, sigma_n_sq, alpha, lambda_max):
    if lambda_max is None:
        lambda_max = lambda_max_estimate(A)
    limit = alpha_max(lambda_max, sigma_s_sq, sigma_n_sq)
    if not 0.0 < alpha < limit:
        raise StabilityError(
            f"alpha={alpha} outside the stable region (0, {limit})"
        )
