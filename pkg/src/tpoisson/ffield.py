"""Prime-field scalars and binomial-type coefficients mod p.

Scalars are plain Python ints reduced into ``range(p)``.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .errors import ConfigurationError

__all__ = [
    "is_prime",
    "check_prime",
    "binom_mod_p",
    "dp_power_coeff",
    "inv_mod",
    "solve_power",
    "power_orbit_min",
]


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    """Validate an odd prime characteristic and return it."""
    if not isinstance(p, int) or isinstance(p, bool):
        raise ConfigurationError(f"characteristic must be an int, got {p!r}")
    if not is_prime(p) or p < 3:
        raise ConfigurationError(f"characteristic must be an odd prime, got {p}")
    return p


def binom_mod_p(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem; zero when k < 0 or k > n."""
    check_prime(p)
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _lucas(n, k, p)


@lru_cache(maxsize=1 << 16)
def _lucas(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    result = 1
    while n or k:
        n_i, k_i = n % p, k % p
        if k_i > n_i:
            return 0
        result = result * comb(n_i, k_i) % p
        n //= p
        k //= p
    return result


def dp_power_coeff(a: int, k: int, p: int) -> int:
    """Coefficient of x^{(ak)} in (x^{(a)})^{(k)}, i.e. (ak)!/(k! (a!)^k) mod p.

    Uses the division-free form prod_{j=1..k} C(ja - 1, a - 1).
    """
    check_prime(p)
    if a < 1 or k < 0:
        raise ValueError("need a >= 1 and k >= 0")
    result = 1
    for j in range(1, k + 1):
        result = result * _lucas(j * a - 1, a - 1, p) % p
        if not result:
            break
    return result


def inv_mod(a: int, p: int) -> int:
    a %= p
    if not a:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, -1, p)


def solve_power(c: int, e: int, p: int) -> int | None:
    """Smallest lambda in F_p^* with lambda**e == c, or None."""
    c %= p
    for lam in range(1, p):
        if pow(lam, e, p) == c:
            return lam
    return None


def power_orbit_min(c: int, e: int, p: int) -> tuple[int, int]:
    """Return (lambda, v) with v = lambda**e * c minimal over lambda in F_p^*."""
    c %= p
    best = None
    for lam in range(1, p):
        v = pow(lam, e, p) * c % p
        if best is None or v < best[1]:
            best = (lam, v)
    return best
