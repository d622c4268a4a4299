"""Shared test configuration.

BLAS thread pools are capped at one thread: the matrices in this suite are
small (K <= 258) and thread fan-out costs far more than it saves here.
"""

from threadpoolctl import threadpool_limits

threadpool_limits(1)
