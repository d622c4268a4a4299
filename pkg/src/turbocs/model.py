"""Problem generation and scoring for discrete compressed sensing.

A problem instance is one draw of the linear model y = A x + n with a
sparse signal x whose entries come from a finite symbol set.  The sensing
matrix has i.i.d. Gaussian entries with columns normalized to unit l2 norm;
the noise is i.i.d. zero-mean Gaussian.  Recovery quality is scored as the
symbol error rate of the quantized estimate against the true signal.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, DimensionMismatchError

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class Prior:
    """Finite atomic signal prior: symbol values with probabilities.

    ``atoms`` maps each symbol value to its marginal probability.  Exactly
    one atom must be the zero symbol with probability (L - s)/L; the
    remaining (nonzero) atoms carry total probability s/L.

    Attributes:
        atoms: tuple of (value, probability) pairs.
        s: number of nonzero entries per signal (known sparsity).
        L: signal dimension.
    """

    atoms: tuple
    s: int
    L: int
    symmetric: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.L < 1 or not 0 <= self.s <= self.L:
            raise ConfigurationError(f"invalid sparsity s={self.s} for L={self.L}")
        values = np.array([v for v, _ in self.atoms], dtype=np.float64)
        probs = np.array([p for _, p in self.atoms], dtype=np.float64)
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > _PROB_TOL:
            raise ConfigurationError("atom probabilities must be >= 0 and sum to 1")
        zero_mask = values == 0.0
        if zero_mask.sum() != 1:
            raise ConfigurationError("prior must contain exactly one zero atom")
        p_zero = probs[zero_mask][0]
        if abs(p_zero - (self.L - self.s) / self.L) > _PROB_TOL:
            raise ConfigurationError("zero atom probability must equal (L - s)/L")
        if abs(probs[~zero_mask].sum() - self.s / self.L) > _PROB_TOL:
            raise ConfigurationError("nonzero atom probabilities must sum to s/L")
        # symmetric iff for every (v, p) the atom (-v, p) is also present
        pairs = {(float(v), float(p)) for v, p in self.atoms}
        sym = all((-v, p) in pairs for v, p in pairs)
        object.__setattr__(self, "symmetric", sym)
        object.__setattr__(self, "atoms", tuple((float(v), float(p)) for v, p in self.atoms))

    @classmethod
    def ternary(cls, L, s):
        """Symbols {-1, 0, +1} with P(+-1) = s/(2L) each and P(0) = (L-s)/L."""
        return cls(
            atoms=((-1.0, s / (2 * L)), (0.0, (L - s) / L), (1.0, s / (2 * L))),
            s=s,
            L=L,
        )

    @property
    def values(self):
        return np.array([v for v, _ in self.atoms])

    @property
    def probs(self):
        return np.array([p for _, p in self.atoms])

    @property
    def nonzero_values(self):
        return np.array([v for v, _ in self.atoms if v != 0.0])

    @property
    def nonzero_probs(self):
        return np.array([p for v, p in self.atoms if v != 0.0])

    @property
    def mean(self):
        return float(self.values @ self.probs)

    @property
    def variance(self):
        """Prior variance E[x^2] - (E[x])^2 (= s/L for unit ternary symbols)."""
        return float((self.values**2) @ self.probs) - self.mean**2


@dataclass(frozen=True)
class ProblemInstance:
    """One draw of y = A x + n together with the generating prior."""

    A: np.ndarray
    x_true: np.ndarray
    y: np.ndarray
    sigma_n_sq: float
    prior: Prior

    def __post_init__(self):
        K, L = self.A.shape
        if self.x_true.shape != (L,) or self.y.shape != (K,):
            raise DimensionMismatchError("instance vectors inconsistent with A")
        if np.count_nonzero(self.x_true) != self.prior.s:
            raise ConfigurationError("x_true must have exactly s nonzero entries")
        norms = np.linalg.norm(self.A, axis=0)
        if np.max(np.abs(norms - 1.0)) > 1e-12:
            raise ConfigurationError("columns of A must have unit l2 norm")

    @property
    def K(self):
        return self.A.shape[0]

    @property
    def L(self):
        return self.A.shape[1]


def gen_sensing_matrix(K, L, rng):
    """K-by-L i.i.d. standard Gaussian matrix with unit-norm columns.

    Only underdetermined systems are supported (K < L).
    """
    if not 1 <= K < L:
        raise ConfigurationError(f"need 1 <= K < L, got K={K}, L={L}")
    a = rng.standard_normal((K, L))
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0.0):
        raise ConfigurationError("degenerate draw: zero column")
    return a / norms


def gen_signal(prior, rng):
    """Sparse signal with exactly ``prior.s`` nonzero symbols.

    The support is drawn uniformly without replacement; symbols on the
    support are drawn from the nonzero atoms with renormalized
    probabilities.
    """
    x = np.zeros(prior.L)
    if prior.s == 0:
        return x
    support = rng.choice(prior.L, size=prior.s, replace=False)
    p = prior.nonzero_probs
    x[support] = rng.choice(prior.nonzero_values, size=prior.s, p=p / p.sum())
    return x


def observe(A, x, sigma_n_sq, rng):
    """Noisy observation y = A x + n with n ~ N(0, sigma_n_sq I)."""
    A = np.asarray(A)
    x = np.asarray(x)
    if A.shape[1] != x.shape[0]:
        raise DimensionMismatchError(f"observe: shapes {A.shape} and {x.shape}")
    if sigma_n_sq < 0:
        raise ConfigurationError("noise variance must be >= 0")
    y = A @ x
    if sigma_n_sq > 0:
        y = y + np.sqrt(sigma_n_sq) * rng.standard_normal(A.shape[0])
    return y


def make_instance(K, L, prior, sigma_n_sq, rng):
    """Draw a full problem instance (matrix, signal, observation)."""
    A = gen_sensing_matrix(K, L, rng)
    x = gen_signal(prior, rng)
    y = observe(A, x, sigma_n_sq, rng)
    return ProblemInstance(A=A, x_true=x, y=y, sigma_n_sq=sigma_n_sq, prior=prior)


def quantize_final(x_hat, prior):
    """Quantize to the symbol set, keeping the fixed sparsity.

    Exactly the s largest-magnitude entries are kept (ties broken toward the
    lowest index); each kept entry is mapped to the nearest nonzero symbol
    (ties toward the smaller value); everything else becomes 0.
    """
    x_hat = np.asarray(x_hat, dtype=np.float64)
    out = np.zeros_like(x_hat)
    if prior.s == 0:
        return out
    # stable sort on -|x| keeps the lowest index first among ties
    keep = np.argsort(-np.abs(x_hat), kind="stable")[: prior.s]
    symbols = np.sort(prior.nonzero_values)
    # argmin returns the first (smallest) symbol on distance ties
    nearest = np.argmin(np.abs(x_hat[keep][:, None] - symbols[None, :]), axis=1)
    out[keep] = symbols[nearest]
    return out


def ser(x_hat_q, x_true):
    """Symbol error rate: fraction of positions where the vectors differ."""
    x_hat_q = np.asarray(x_hat_q)
    x_true = np.asarray(x_true)
    if x_hat_q.shape != x_true.shape:
        raise DimensionMismatchError("ser: length mismatch")
    return float(np.mean(x_hat_q != x_true))


def inv_noise_db_to_sigma_sq(db):
    """Convert the inverse noise level 10*log10(1/sigma_n^2) to sigma_n^2."""
    return 10.0 ** (-db / 10.0)
