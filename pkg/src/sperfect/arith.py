"""Integer arithmetic: primality, factorization, divisor data and sieves.

Every divisor computation works on |n|; callers carry the sign of n
themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cache
from itertools import product

import numpy as np

from .errors import DomainError, ResourceError

__all__ = [
    "Factorization",
    "DivisorProfile",
    "is_prime",
    "factorize",
    "divisors",
    "divisor_profile",
    "sigma",
    "tau",
    "nu2",
    "odd_part",
    "is_square",
    "is_abundant",
    "is_prime_power",
    "sigma_sieve",
    "sigma_range",
    "primes_up_to",
]

MAX_FACTOR_INPUT = 1 << 63
TRIAL_LIMIT = 10**6
DEFAULT_SIEVE_MEMORY = 1 << 30

# Deterministic for every n < 3.3e24, which covers the 64-bit range.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    @property
    def is_prime_power(self) -> bool:
        return len(self.factors) == 1


@dataclass(frozen=True)
class DivisorProfile:
    """n together with its intermediate divisors 1 < d < |n| and σ, τ, ν₂."""

    n: int
    intermediate_divisors: tuple[int, ...]
    tau: int
    sigma: int
    nu2: int

    @property
    def k(self) -> int:
        return len(self.intermediate_divisors)


def primes_up_to(limit: int) -> list[int]:
    if limit < 2:
        return []
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mark[p]:
            mark[p * p :: p] = False
    return np.flatnonzero(mark).tolist()


@cache
def _trial_primes() -> tuple[int, ...]:
    return tuple(primes_up_to(TRIAL_LIMIT))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite n (Pollard rho, Brent's cycle)."""
    # Fixed seeds keep factorization deterministic; c is bumped on failure.
    for c in range(1, n):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    root = math.isqrt(n)
    if root * root == n:
        _split(root, out)
        _split(root, out)
        return
    f = _brent(n)
    _split(f, out)
    _split(n // f, out)


def factorize(n: int) -> Factorization:
    m = abs(n)
    if m <= 1:
        raise DomainError(f"factorize needs |n| > 1, got {n}")
    if m >= MAX_FACTOR_INPUT:
        raise DomainError(f"factorize supports |n| < 2^63, got {n}")
    found: dict[int, int] = {}
    rest = m
    for p in _trial_primes():
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            found[p] = e
    if rest > 1:
        if rest < TRIAL_LIMIT * TRIAL_LIMIT or is_prime(rest):
            found[rest] = found.get(rest, 0) + 1
        else:
            _split(rest, found)
    return Factorization(n, tuple(sorted(found.items())))


def divisors(n: int) -> list[int]:
    """All positive divisors of |n|, ascending."""
    if abs(n) == 1:
        return [1]
    fac = factorize(n)
    powers = [[p**e for e in range(k + 1)] for p, k in fac.factors]
    out = []
    for combo in product(*powers):
        d = 1
        for x in combo:
            d *= x
        out.append(d)
    out.sort()
    return out


def divisor_profile(n: int) -> DivisorProfile:
    if abs(n) <= 1:
        raise DomainError(f"divisor_profile needs |n| > 1, got {n}")
    ds = divisors(n)
    return DivisorProfile(
        n=n,
        intermediate_divisors=tuple(ds[1:-1]),
        tau=len(ds),
        sigma=sum(ds),
        nu2=nu2(abs(n)),
    )


def _check_positive(n: int, name: str) -> None:
    if n <= 0:
        raise DomainError(f"{name} needs n >= 1, got {n}")


def sigma(n: int) -> int:
    _check_positive(n, "sigma")
    if n == 1:
        return 1
    out = 1
    for p, e in factorize(n).factors:
        out *= (p ** (e + 1) - 1) // (p - 1)
    return out


def tau(n: int) -> int:
    _check_positive(n, "tau")
    if n == 1:
        return 1
    return math.prod(e + 1 for _, e in factorize(n).factors)


def nu2(n: int) -> int:
    _check_positive(n, "nu2")
    return (n & -n).bit_length() - 1


def odd_part(n: int) -> int:
    _check_positive(n, "odd_part")
    return n >> nu2(n)


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def is_abundant(n: int) -> bool:
    # σ(n) >= 2n, so perfect numbers count as abundant.
    return sigma(n) >= 2 * n


def is_prime_power(n: int) -> bool:
    n = abs(n)
    return n > 1 and factorize(n).is_prime_power


def sigma_range(a: int, b: int) -> np.ndarray:
    """σ(n) for a <= n <= b as an int64 array (segmented divisor-pair sieve)."""
    if a < 1 or b < a:
        raise DomainError(f"sigma_range needs 1 <= a <= b, got [{a}, {b}]")
    sig = np.zeros(b - a + 1, dtype=np.int64)
    for d in range(1, math.isqrt(b) + 1):
        # multiples m = d*q of d in [a, b] with q >= d
        start = max(d * d, -(-a // d) * d)
        if start > b:
            continue
        idx = np.arange(start - a, b - a + 1, d)
        cof = (idx + a) // d
        sig[idx] += d + np.where(cof != d, cof, 0)
    return sig


def sigma_sieve(N: int, memory_cap_bytes: int = DEFAULT_SIEVE_MEMORY) -> np.ndarray:
    """σ(n) for 0 <= n <= N as an int64 array; entry 0 is a placeholder 0."""
    if N < 1:
        raise DomainError(f"sigma_sieve needs N >= 1, got {N}")
    need = (N + 1) * 8
    if need > memory_cap_bytes:
        raise ResourceError(f"sigma_sieve({N}) needs {need} bytes, cap is {memory_cap_bytes}")
    return np.concatenate(([0], sigma_range(1, N)))
