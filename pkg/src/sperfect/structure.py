"""Closed-form predicates, explicit constructions and witness lifts.

Covers the {0,m}, {-1,m} and {-1,1} families: power-of-two signed digit
representations with digits in {-1, m}, the 2^k p constructions, and the
transforms that carry a presentation of n to one of a multiple of n.
Every constructor returns a witness that has been checked with ``verify``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

from .arith import divisor_profile, factorize, is_prime, is_square, nu2, odd_part
from .errors import DomainError, StructuralError
from .presentation import (
    CoefficientSet,
    Kind,
    PresentationWitness,
    SearchConfig,
    is_sperfect,
    solve,
    verify,
)

log = logging.getLogger(__name__)

PLUS_MINUS_ONE = CoefficientSet([-1, 1])


def _minus_one_m(m: int) -> CoefficientSet:
    return CoefficientSet([-1, m])


def _zero_m(m: int) -> CoefficientSet:
    return CoefficientSet([0, m])


def _require(witness: PresentationWitness, s: CoefficientSet) -> None:
    if witness.kind is not Kind.FIRST:
        raise StructuralError("expected a first-kind witness")
    if not verify(witness, s):
        raise StructuralError(f"witness for {witness.n} does not verify under {s}")


def _checked(witness: PresentationWitness) -> PresentationWitness:
    if not verify(witness, witness.s):
        raise StructuralError(f"construction produced a non-verifying witness for {witness.n}")
    return witness


def _odd_modulus(m: int) -> int:
    """(m+1) / 2^beta with beta = nu2(m+1)."""
    return odd_part(m + 1)


def _pow2_is_one(alpha: int, m: int) -> bool:
    mod = _odd_modulus(m)
    return pow(2, alpha, mod) == 1 % mod


# -- arbitrary n: an ad hoc coefficient set ---------------------------------

def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _balance(x: list[int], ds: list[int]) -> None:
    """Shrink a solution of sum(x*d) = c along kernel moves of coordinate pairs.

    Only pairs touching a nonzero coordinate are tried; each accepted move
    strictly decreases (max |x_i|, sum |x_i|) over the pair, so the loop ends.
    """
    def key(a, b):
        return max(abs(a), abs(b)), abs(a) + abs(b)

    improved = True
    while improved:
        improved = False
        live = [i for i, v in enumerate(x) if v]
        for i in live:
            for j in range(len(x)):
                if j == i:
                    continue
                g = math.gcd(ds[i], ds[j])
                a, b = ds[i] // g, ds[j] // g
                xi, xj = x[i], x[j]
                # x_i + t*b, x_j - t*a keeps the weighted sum fixed.
                cands = {0}
                for num, den in ((-xi, b), (xj, a), (xj - xi, a + b), (-xi - xj, b - a)):
                    if den:
                        cands.update((num // den, -(-num // den)))
                best = min(cands, key=lambda t: key(xi + t * b, xj - t * a))
                if key(xi + best * b, xj - best * a) < key(xi, xj):
                    x[i], x[j] = xi + best * b, xj - best * a
                    improved = True


def adhoc_coefficient_set(n: int) -> tuple[CoefficientSet, PresentationWitness]:
    """Some S with at most tau(n)-2 elements under which n is S-perfect.

    Solves sum(x_j d_j) = n - 1 over the intermediate divisors by iterated
    extended gcd (their gcd is 1 once n has two prime factors), then takes
    S to be the set of values used.
    """
    if abs(n) <= 1:
        raise DomainError(f"need |n| > 1, got {n}")
    fac = factorize(n)
    if fac.is_prime_power:
        raise DomainError(f"{n} is a prime power; no coefficient set exists")
    divs = list(divisor_profile(n).intermediate_divisors)
    primes = [p for p, _ in fac.factors]
    order = primes + [d for d in divs if d not in primes]
    ds = order
    x = [0] * len(ds)
    g = 0
    for j, d in enumerate(ds):
        if g == 0:
            g, x[j] = d, 1
            continue
        g, a, b = _ext_gcd(g, d)
        x = [a * v for v in x]
        x[j] = b
    assert g == 1
    x = [v * (n - 1) for v in x]
    _balance(x, ds)
    coeffs = dict(zip(ds, x))
    s = CoefficientSet(x)
    return s, _checked(PresentationWitness.from_map(n, Kind.FIRST, s, coeffs))


# -- {0, m} ------------------------------------------------------------------

def seed_0m(m: int) -> tuple[int, PresentationWitness]:
    """n = (m+1)(m^2+m+1) with weight m on m+1 and m^2+m+1, zero elsewhere."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    n = (m + 1) * (m * m + m + 1)
    coeffs = {d: 0 for d in divisor_profile(n).intermediate_divisors}
    coeffs[m + 1] = m
    coeffs[m * m + m + 1] = m
    return n, _checked(PresentationWitness.from_map(n, Kind.FIRST, _zero_m(m), coeffs))


def scale_0m(witness: PresentationWitness, m: int) -> PresentationWitness:
    """Witness for (m+1)n from one for n: weight m on n itself, 0 on new divisors."""
    s = _zero_m(m)
    _require(witness, s)
    n = witness.n
    if n < 0:
        raise DomainError("scale_0m expects positive n")
    new_n = (m + 1) * n
    coeffs = {d: 0 for d in divisor_profile(new_n).intermediate_divisors}
    coeffs.update(witness.coefficient_map())
    coeffs[n] = m
    return _checked(PresentationWitness.from_map(new_n, Kind.FIRST, s, coeffs))


# -- signed binary digits in {-1, m} ----------------------------------------

@dataclass(frozen=True)
class PowerTwoRepresentation:
    """target = sum(lambdas[i] * 2^(s+i)) with every digit in {-1, m}."""

    target: int
    s: int
    t: int
    m: int
    lambdas: tuple[int, ...]

    def value(self) -> int:
        return sum(lam << (self.s + i) for i, lam in enumerate(self.lambdas))

    def is_valid(self) -> bool:
        return (
            0 <= self.s <= self.t
            and len(self.lambdas) == self.t - self.s + 1
            and all(lam in (-1, self.m) for lam in self.lambdas)
            and self.value() == self.target
        )


@dataclass(frozen=True)
class TwoKpForm:
    k: int
    p: int
    m: int
    alpha: Optional[int] = None

    def __post_init__(self):
        if self.m < 1 or self.k < 0:
            raise DomainError("need m >= 1 and k >= 0")
        if self.p % 2 == 0 or not is_prime(self.p):
            raise DomainError(f"{self.p} is not an odd prime")

    @property
    def beta(self) -> int:
        return nu2(self.m + 1)

    @property
    def n(self) -> int:
        return self.p << self.k

    @classmethod
    def of(cls, n: int, m: int) -> "TwoKpForm":
        k = nu2(n)
        return cls(k, n >> k, m)


def _lemma2_bounds(s: int, t: int, m: int) -> tuple[int, int]:
    if not 0 <= s <= t:
        raise DomainError(f"need 0 <= s <= t, got s={s}, t={t}")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    span = (1 << s) * ((1 << (t - s + 1)) - 1)
    return span, (1 << s) * (m + 1)


def lemma2_representable(target: int, s: int, t: int, m: int) -> bool:
    span, mod = _lemma2_bounds(s, t, m)
    return (target + span) % mod == 0 and -span <= target <= m * span


def lemma2_witness(target: int, s: int, t: int, m: int) -> PowerTwoRepresentation:
    # Each digit is -1 + (m+1)*bit, so target = -span + 2^s (m+1) q with the
    # bits of q marking positions that carry m.
    span, mod = _lemma2_bounds(s, t, m)
    if not lemma2_representable(target, s, t, m):
        raise DomainError(f"{target} is not representable over [{s}, {t}] with digits {{-1, {m}}}")
    q = (target + span) // mod
    lambdas = tuple(m if (q >> b) & 1 else -1 for b in range(t - s + 1))
    return PowerTwoRepresentation(target, s, t, m, lambdas)


def corollary1_extend(rep: PowerTwoRepresentation, alpha: int) -> PowerTwoRepresentation:
    """Same target over [s, t+alpha]; needs t >= s+beta-1 and 2^alpha = 1 mod (m+1)/2^beta."""
    if not rep.is_valid():
        raise StructuralError("input representation does not evaluate to its target")
    beta = nu2(rep.m + 1)
    if alpha < 0 or rep.t < rep.s + beta - 1 or not _pow2_is_one(alpha, rep.m):
        raise DomainError(f"cannot extend by alpha={alpha} (m={rep.m}, s={rep.s}, t={rep.t})")
    return lemma2_witness(rep.target, rep.s, rep.t + alpha, rep.m)


# -- {-1, m} on numbers 2^k p ------------------------------------------------

def thrm1_congruence_check(m: int, k: int, alpha: int, p: int) -> bool:
    """Whether 2^alpha = 1 mod (m+1)/2^beta, necessary for 2^k p and 2^(k+alpha) p both in P(-1,m)."""
    TwoKpForm(k, p, m, alpha)
    return _pow2_is_one(alpha, m)


def _split_2kp(witness: PresentationWitness, form: TwoKpForm):
    cmap = witness.coefficient_map()
    powers = [cmap[1 << j] for j in range(1, form.k + 1)]
    multiples = [cmap[form.p << j] for j in range(form.k)]
    return powers, multiples


def _assemble_2kp(k: int, p: int, m: int, powers, multiples) -> PresentationWitness:
    coeffs = {1 << (j + 1): lam for j, lam in enumerate(powers)}
    coeffs.update({p << j: lam for j, lam in enumerate(multiples)})
    return _checked(PresentationWitness.from_map(p << k, Kind.FIRST, _minus_one_m(m), coeffs))


def thrm1_lift(witness: PresentationWitness, alpha: int, m: Optional[int] = None) -> PresentationWitness:
    """Witness for 2^(k+alpha) p from one for 2^k p under {-1, m}."""
    if m is None:
        m = witness.s.max_elem
    s = _minus_one_m(m)
    _require(witness, s)
    form = TwoKpForm.of(witness.n, m)
    k, p = form.k, form.p
    if k < 1 or k < form.beta:
        raise DomainError(f"need k >= max(1, beta) = {max(1, form.beta)}, got k={k}")
    if alpha < 1 or not _pow2_is_one(alpha, m):
        raise DomainError(f"2^{alpha} is not 1 mod {_odd_modulus(m)}")
    powers, multiples = _split_2kp(witness, form)

    pure = sum(lam << (j + 1) for j, lam in enumerate(powers))
    extended = corollary1_extend(PowerTwoRepresentation(pure, 1, k, m, tuple(powers)), alpha)

    a = sum(lam << j for j, lam in enumerate(multiples)) + sum(1 << j for j in range(k, k + alpha))
    rebuilt = lemma2_witness(a, 0, k + alpha - 1, m)
    return _assemble_2kp(k + alpha, p, m, extended.lambdas, rebuilt.lambdas)


def thrm2_alpha(m: int) -> int:
    """Smallest alpha > beta with 2^alpha = 1 mod (m+1)/2^beta."""
    beta = nu2(m + 1)
    alpha = beta + 1
    while not _pow2_is_one(alpha, m):
        alpha += 1
    return alpha


def thrm2_residue(m: int, alpha: int) -> int:
    return (2 * ((1 << (alpha + 1)) - 1) - 1) % (2 * (m + 1))


def thrm2_primes(m: int, alpha: Optional[int] = None, count: int = 5) -> list[int]:
    """The first ``count`` primes in the residue class the construction needs."""
    if alpha is None:
        alpha = thrm2_alpha(m)
    mod = 2 * (m + 1)
    p = thrm2_residue(m, alpha)
    out = []
    while len(out) < count:
        if p > 2 and is_prime(p):
            out.append(p)
        p += mod
    return out


def thrm2_construct(m: int, alpha: int, p: int) -> tuple[int, PresentationWitness]:
    """Smallest admissible k >= alpha and a {-1,m}-witness for 2^k p."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    beta = nu2(m + 1)
    if alpha <= beta or not _pow2_is_one(alpha, m):
        raise DomainError(f"alpha={alpha} must exceed beta={beta} with 2^alpha = 1 mod {_odd_modulus(m)}")
    mod = 2 * (m + 1)
    if p % 2 == 0 or not is_prime(p) or p % mod != thrm2_residue(m, alpha):
        raise DomainError(f"p={p} must be a prime = {thrm2_residue(m, alpha)} mod {mod}")
    big_n = (1 << (alpha + 1)) - 1
    k = alpha
    while pow(2, k, mod) != pow(2, alpha, mod) or big_n * p - 1 > 2 * m * ((1 << k) - 1):
        k += 1
    powers = lemma2_witness(big_n * p - 1, 1, k, m).lambdas
    multiples = lemma2_witness((1 << k) - big_n, 0, k - 1, m).lambdas
    return k, _assemble_2kp(k, p, m, powers, multiples)


# -- {-1, 1} -----------------------------------------------------------------

def lemma3_representable(n: int) -> bool:
    return n % 4 == 3


def lemma3_witness(n: int) -> PowerTwoRepresentation:
    """Digits l_1..l_k in {-1,1} with 1 + sum(l_j 2^j) = n, k minimal."""
    if not lemma3_representable(n):
        raise DomainError(f"{n} is not 3 mod 4")
    k = 1
    while not -2 * ((1 << k) - 1) <= n - 1 <= 2 * ((1 << k) - 1):
        k += 1
    return lemma2_witness(n - 1, 1, k, 1)


def odd_prime_seed(p: int) -> PresentationWitness:
    """A {-1,1}-witness for 2^k p, p an odd prime, via the digits of p or 3p."""
    if p % 2 == 0 or not is_prime(p):
        raise DomainError(f"{p} is not an odd prime")
    rep = lemma3_witness(p if p % 4 == 3 else 3 * p)
    k = rep.t
    sign = 1 if p % 4 == 3 else -1
    multiples = [sign] + [1] * (k - 1)
    return _assemble_2kp(k, p, 1, rep.lambdas, multiples)


def _sign(n: int) -> int:
    return 1 if n > 0 else -1


def lemma4_step(base: PresentationWitness, current: PresentationWitness, p: int) -> PresentationWitness:
    """One induction step under {-1,1}.

    Case (1), p does not divide base.n = n: current is for n p^k (k >= 0) and
    the result is for n p^(k+1).  Case (2), base.n = n p exactly: current is
    for n p^k (k >= 1) and the result is for n p^(k+2).  Either way the new
    sum is current - n p^k + p^(k+1) * base.
    """
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    _require(base, PLUS_MINUS_ONE)
    _require(current, PLUS_MINUS_ONE)
    if base.n % p:
        n, step = base.n, 1
    elif (base.n // p) % p:
        n, step = base.n // p, 2
    else:
        raise DomainError(f"p^2 divides {base.n}")
    ratio, rem = divmod(current.n, n)
    k = 0
    while rem == 0 and ratio % p == 0:
        ratio //= p
        k += 1
    if rem or ratio != 1 or (step == 2 and k < 1):
        raise DomainError(f"{current.n} is not {n} times a power of {p}")
    coeffs = current.coefficient_map()
    coeffs[abs(current.n)] = -_sign(n)
    pk1 = p ** (k + 1)
    coeffs[pk1] = 1
    for e, mu in base.coefficient_map().items():
        coeffs[e * pk1] = mu
    out_n = n * p ** (k + step)
    return _checked(PresentationWitness.from_map(out_n, Kind.FIRST, PLUS_MINUS_ONE, coeffs))


def lemma4_lift(base: PresentationWitness, p: int, exponent: int) -> PresentationWitness:
    """Iterate lemma4_step from base up to n p^exponent.

    With p not dividing base.n = n any exponent >= 1 is reachable; with
    base.n = n p only odd exponents are.
    """
    if base.n % p:
        if exponent < 1:
            raise DomainError("exponent must be >= 1")
        have = 0
    else:
        if exponent < 1 or exponent % 2 == 0:
            raise DomainError("from n*p only odd exponents are reachable")
        have = 1
    current = base
    while have < exponent:
        current = lemma4_step(base, current, p)
        have += 1 if base.n % p else 2
    return current


def lemma5_double(witness: PresentationWitness, config: Optional[SearchConfig] = None) -> PresentationWitness:
    """A {-1,1}-witness for 2n from one for n."""
    _require(witness, PLUS_MINUS_ONE)
    n = witness.n
    if n % 2:
        return lemma4_step(witness, witness, 2)
    # 2n = presentation(n) + n; each divisor 2d of 2n that does not divide n
    # splits l*d into -l*d + l*(2d).
    coeffs = {}
    for d, lam in witness.coefficient_map().items():
        if n % (2 * d) == 0:
            coeffs[d] = lam
        else:
            coeffs[d] = -lam
            coeffs[2 * d] = lam
    coeffs[abs(n)] = _sign(n)
    try:
        out = PresentationWitness.from_map(2 * n, Kind.FIRST, PLUS_MINUS_ONE, coeffs)
        if verify(out, PLUS_MINUS_ONE):
            return out
    except StructuralError:
        pass
    log.warning("doubling transform failed for n=%d; falling back to the solver", n)
    res = solve(2 * n, PLUS_MINUS_ONE, Kind.FIRST, config)
    if not res.is_perfect:
        raise StructuralError(f"could not produce a witness for {2 * n}")
    return res.witness


def square_obstruction(n: int) -> bool:
    """True iff the odd part of n is a square, i.e. sigma(n) is odd."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    return is_square(odd_part(n))


def minimal_k_scan(d: int, kmax: int, config: Optional[SearchConfig] = None) -> list[bool]:
    """out[k] is whether 2^k d is {-1,1}-perfect, for 0 <= k <= kmax (exact solver)."""
    if d < 1 or d % 2 == 0 or is_square(d):
        raise DomainError(f"d={d} must be odd and not a square")
    return [is_sperfect(d << k, PLUS_MINUS_ONE, Kind.FIRST, config) if (d << k) > 1 else False
            for k in range(kmax + 1)]
