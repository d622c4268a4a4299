"""Dense real matrix/vector kernels with FLOP instrumentation.

Every kernel charges its scalar floating-point operation count to the
innermost active counting scope (see :func:`flop_scope`).  The cost model:
add, subtract, multiply, divide and square root count 1 FLOP each; a
transcendental evaluation (exp) counts :data:`EXP_FLOPS`.  Matrix products
count one multiply plus one add per accumulated term, i.e. 2*m*n for an
m-by-n matrix applied to a vector.

Counting scopes are per-thread.  Code executed outside any scope runs
uncounted; this is how one-off setup work (building a fixed estimation
matrix, generating problem data) stays out of per-iteration FLOP figures.
"""

import threading
from contextlib import contextmanager

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .exceptions import DegenerateMatrixError, DimensionMismatchError

# cost of one transcendental evaluation (exp) in the documented FLOP model
EXP_FLOPS = 10

_tls = threading.local()


def _stack():
    stack = getattr(_tls, "stack", None)
    if stack is None:
        stack = []
        _tls.stack = stack
    return stack


class FlopCounter:
    """Accumulator for scalar floating-point operations.

    The count is a non-negative integer, non-decreasing while a scope is
    active, and resettable between runs.
    """

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def add(self, n):
        self.count += int(n)

    def reset(self):
        self.count = 0

    def __repr__(self):
        return f"FlopCounter(count={self.count})"


def charge(n):
    """Charge ``n`` FLOPs to the innermost active scope (no-op outside)."""
    stack = _stack()
    if stack:
        stack[-1].count += int(n)


@contextmanager
def flop_scope():
    """Context manager opening a fresh counting scope.

    Yields the scope's :class:`FlopCounter`.  On exit the accumulated count
    is charged to the enclosing scope, so nested scopes are additive.
    """
    counter = FlopCounter()
    _stack().append(counter)
    try:
        yield counter
    finally:
        _stack().pop()
        charge(counter.count)


def counter_scope(f):
    """Run the zero-argument callable ``f`` under a fresh counter.

    Returns ``(result, flops)`` where ``flops`` is the number of operations
    charged while ``f`` ran (including nested scopes).
    """
    with flop_scope() as counter:
        result = f()
    return result, counter.count


def mat_vec(m, v):
    """Counted matrix-vector product ``m @ v``.

    Charges 2*rows*cols (one multiply and one add per entry, counting the
    initial accumulation as an add).
    """
    m = np.asarray(m)
    v = np.asarray(v)
    if m.ndim != 2 or v.ndim != 1 or m.shape[1] != v.shape[0]:
        raise DimensionMismatchError(
            f"mat_vec: incompatible shapes {m.shape} and {v.shape}"
        )
    charge(2 * m.shape[0] * m.shape[1])
    return m @ v


def mat_mat(ma, mb):
    """Counted matrix-matrix product ``ma @ mb``; charges 2*m*k*n."""
    ma = np.asarray(ma)
    mb = np.asarray(mb)
    if ma.ndim != 2 or mb.ndim != 2 or ma.shape[1] != mb.shape[0]:
        raise DimensionMismatchError(
            f"mat_mat: incompatible shapes {ma.shape} and {mb.shape}"
        )
    charge(2 * ma.shape[0] * ma.shape[1] * mb.shape[1])
    return ma @ mb


def solve_spd(m, b):
    """Solve ``m @ x = b`` for symmetric positive definite ``m``.

    Uses a Cholesky factorization; the inverse is never materialized.
    Charges rows**3/3 + 2*rows**2*cols(b), rounded to an integer
    (factorization plus two triangular solves).

    ``m`` must be square and symmetric within 1e-10 (absolute, relative to
    its largest entry).  A non-positive-definite pivot raises
    :class:`DegenerateMatrixError`.
    """
    m = np.asarray(m, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"solve_spd: matrix not square {m.shape}")
    b2 = b[:, None] if b.ndim == 1 else b
    if b2.ndim != 2 or b2.shape[0] != m.shape[0]:
        raise DimensionMismatchError(
            f"solve_spd: rhs shape {b.shape} incompatible with {m.shape}"
        )
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > 1e-10 * scale:
        raise DimensionMismatchError("solve_spd: matrix not symmetric within 1e-10")
    try:
        factor = cho_factor(m, lower=True, check_finite=False)
    except np.linalg.LinAlgError as err:
        raise DegenerateMatrixError(f"solve_spd: {err}") from err
    x = cho_solve(factor, b2, check_finite=False)
    n = m.shape[0]
    charge(round(n**3 / 3 + 2 * n * n * b2.shape[1]))
    return x[:, 0] if b.ndim == 1 else x
