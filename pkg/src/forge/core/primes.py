"""Prime search for the Vandermonde moduli."""

from __future__ import annotations

from sympy import isprime, nextprime

from ..errors import ParameterError


def find_prime_in_range(lo: int, hi: int) -> int:
    """Smallest prime ``p`` with ``lo < p < hi``.

    Raises ParameterError when the open interval holds no prime.
    """
    if lo < 1:
        raise ParameterError(f"lower end must be >= 1, got {lo}")
    p = int(nextprime(lo))
    if p >= hi:
        raise ParameterError(f"no prime in the open interval ({lo}, {hi})")
    return p


def vandermonde_prime(rows_needed: int) -> int:
    """Smallest prime in ``(m, 3m)``, the interval used for every gadget."""
    return find_prime_in_range(rows_needed, 3 * rows_needed)


__all__ = ["find_prime_in_range", "vandermonde_prime", "isprime"]
