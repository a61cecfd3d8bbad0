"""S-presentations: witnesses, verification and the exact decision procedure.

A first-kind presentation of n under S is ``1 + sum(l_j * d_j) == n`` over the
intermediate divisors 1 < d_j < |n|, every l_j drawn from S.  The second kind
replaces the leading 1 by a coefficient l_0 in S.

The solver first normalizes the problem.  Writing every coefficient as
``min(S) + g*u`` with ``g`` the gcd of the gaps of S, and dividing the
divisors by their common gcd G, a presentation exists iff some choice of
``u_j`` in ``U = {(x - min S) / g}`` hits a nonnegative residual target R.
Reachability of R is decided with a layered bitset (Python ints as bitsets),
or by a budgeted depth-first search when the layers would not fit in memory.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Optional

from .arith import DivisorProfile, divisor_profile
from .errors import DomainError, SearchExhausted, StructuralError

__all__ = [
    "Kind",
    "Status",
    "CoefficientSet",
    "PresentationWitness",
    "SearchConfig",
    "SolveStats",
    "SolveOutcome",
    "verify",
    "solve",
    "is_sperfect",
]

ELEMENT_BOUND = 1 << 31


class Kind(str, enum.Enum):
    FIRST = "first"
    SECOND = "second"


class Status(str, enum.Enum):
    PERFECT = "perfect"
    NOT_PERFECT = "not_perfect"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True, init=False)
class CoefficientSet:
    """A finite nonempty set S of integer weights, stored sorted."""

    elements: tuple[int, ...]

    def __init__(self, elements: Iterable[int]):
        elems = tuple(sorted({int(x) for x in elements}))
        if not elems:
            raise DomainError("coefficient set must be nonempty")
        if any(abs(x) >= ELEMENT_BOUND for x in elems):
            raise DomainError("coefficient magnitudes must be below 2^31")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def parse(cls, text: str) -> "CoefficientSet":
        """Parse ``"a,b,c"``; duplicates and empty fields are rejected."""
        parts = [p.strip() for p in text.split(",")]
        if not text.strip() or any(not p for p in parts):
            raise DomainError(f"malformed coefficient set {text!r}")
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise DomainError(f"malformed coefficient set {text!r}") from None
        if len(set(values)) != len(values):
            raise DomainError(f"duplicate element in coefficient set {text!r}")
        return cls(values)

    @property
    def min_elem(self) -> int:
        return self.elements[0]

    @property
    def max_elem(self) -> int:
        return self.elements[-1]

    @property
    def gap_gcd(self) -> int:
        """gcd of differences from the minimum; 0 for a singleton."""
        return reduce(math.gcd, (x - self.min_elem for x in self.elements), 0)

    def union(self, other: "CoefficientSet") -> "CoefficientSet":
        return CoefficientSet(self.elements + other.elements)

    def intersection(self, other: "CoefficientSet") -> Optional["CoefficientSet"]:
        common = set(self.elements) & set(other.elements)
        return CoefficientSet(common) if common else None

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"


@dataclass(frozen=True)
class PresentationWitness:
    """A concrete presentation; coefficients align with ``divisors``."""

    n: int
    kind: Kind
    s: CoefficientSet
    divisors: tuple[int, ...]
    coefficients: tuple[int, ...]
    lambda0: Optional[int] = None

    def total(self) -> int:
        base = 1 if self.kind is Kind.FIRST else self.lambda0
        return base + sum(c * d for c, d in zip(self.coefficients, self.divisors))

    def coefficient_map(self) -> dict[int, int]:
        return dict(zip(self.divisors, self.coefficients))

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "kind": self.kind.value,
            "set": list(self.s.elements),
            "divisors": list(self.divisors),
            "coefficients": list(self.coefficients),
        }
        if self.kind is Kind.SECOND:
            out["lambda0"] = self.lambda0
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict) -> "PresentationWitness":
        try:
            kind = Kind(data["kind"])
            return cls(
                n=int(data["n"]),
                kind=kind,
                s=CoefficientSet(data["set"]),
                divisors=tuple(int(d) for d in data["divisors"]),
                coefficients=tuple(int(c) for c in data["coefficients"]),
                lambda0=int(data["lambda0"]) if kind is Kind.SECOND else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"bad witness record: {exc}") from None

    @classmethod
    def from_map(cls, n: int, kind, s: CoefficientSet, coeffs: dict[int, int],
                 lambda0: Optional[int] = None) -> "PresentationWitness":
        """Align a {divisor: coefficient} map against the divisors of n."""
        divs = divisor_profile(n).intermediate_divisors
        if set(coeffs) != set(divs):
            raise StructuralError(f"coefficient map does not cover the divisors of {n}")
        return cls(n, Kind(kind), s, divs, tuple(coeffs[d] for d in divs), lambda0)


@dataclass(frozen=True)
class SearchConfig:
    memory_cap_bytes: int = 1 << 30
    node_budget: int = 10**9
    canonicalize: bool = True

    def __post_init__(self):
        if self.memory_cap_bytes <= 0 or self.node_budget <= 0:
            raise DomainError("search caps must be positive")


@dataclass
class SolveStats:
    method: str = "precheck"
    layers: int = 0
    nodes: int = 0
    memory_bytes: int = 0


@dataclass
class SolveOutcome:
    status: Status
    witness: Optional[PresentationWitness] = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def is_perfect(self) -> bool:
        return self.status is Status.PERFECT


def verify(witness: PresentationWitness, s: CoefficientSet) -> bool:
    """True iff every coefficient lies in s and the defining equation holds."""
    divs = divisor_profile(witness.n).intermediate_divisors
    if tuple(witness.divisors) != divs or len(witness.coefficients) != len(divs):
        raise StructuralError(
            f"witness for {witness.n} has {len(witness.coefficients)} coefficients, "
            f"expected {len(divs)}"
        )
    if witness.kind is Kind.SECOND:
        if witness.lambda0 is None:
            raise StructuralError("second-kind witness lacks lambda0")
        if witness.lambda0 not in s:
            return False
    if any(c not in s for c in witness.coefficients):
        return False
    return witness.total() == witness.n


def _layers(weights, choices, target):
    """Suffix reachability: layers[j] has bit r set iff r is reachable with weights[j:]."""
    mask = (1 << (target + 1)) - 1
    layer = 1
    layers = [layer]
    for w in reversed(weights):
        acc = 0
        for u in choices:
            shift = u * w
            if shift > target:
                break
            acc |= layer << shift
        layer = acc & mask
        layers.append(layer)
    layers.reverse()
    return layers


def _backtrack(layers, weights, choices, target):
    out = []
    rem = target
    for j, w in enumerate(weights):
        nxt = layers[j + 1]
        for u in choices:
            r = rem - u * w
            if r < 0:
                break
            if (nxt >> r) & 1:
                out.append(u)
                rem = r
                break
        else:  # pragma: no cover - layers guarantee a choice exists
            raise AssertionError("inconsistent reachability layers")
    return out


class _Budget(Exception):
    pass


def _dfs(weights, choices, target, order, budget, stats):
    """Depth-first search with interval pruning over the given divisor order."""
    umax = choices[-1]
    ws = [weights[i] for i in order]
    suffix = [0] * (len(ws) + 1)
    for i in range(len(ws) - 1, -1, -1):
        suffix[i] = suffix[i + 1] + ws[i]
    picked = [0] * len(ws)

    def go(i, rem):
        stats.nodes += 1
        if stats.nodes > budget:
            raise _Budget
        if i == len(ws):
            return rem == 0
        if rem < 0 or rem > umax * suffix[i]:
            return False
        w = ws[i]
        for u in choices:
            r = rem - u * w
            if r < 0:
                break
            picked[i] = u
            if go(i + 1, r):
                return True
        return False

    if not go(0, target):
        return None
    out = [0] * len(ws)
    for pos, idx in enumerate(order):
        out[idx] = picked[pos]
    return out


def solve(n: int, s: CoefficientSet, kind=Kind.FIRST, config: Optional[SearchConfig] = None,
          profile: Optional[DivisorProfile] = None) -> SolveOutcome:
    """Decide whether n has an S-presentation of the given kind.

    NOT_PERFECT is returned only after exact coverage (a congruence or interval
    obstruction, a complete bitset DP, or an exhausted complete DFS).  When the
    DFS budget runs out the outcome is EXHAUSTED.  Witnesses are the
    lexicographically smallest coefficient vector (divisors ascending, with
    lambda0 first for the second kind) unless ``config.canonicalize`` is off.
    """
    if abs(n) <= 1:
        raise DomainError(f"solve needs |n| > 1, got {n}")
    kind = Kind(kind)
    config = config or SearchConfig()
    if profile is None:
        profile = divisor_profile(n)
    elif abs(profile.n) != abs(n):
        raise StructuralError(f"profile for {profile.n} passed for n={n}")
    divs = profile.intermediate_divisors
    if kind is Kind.FIRST:
        weights, base = list(divs), 1
    else:
        weights, base = [1, *divs], 0

    stats = SolveStats()
    smin = s.min_elem
    total = sum(weights)
    residual = n - base - smin * total
    if residual < 0 or residual > (s.max_elem - smin) * total:
        return SolveOutcome(Status.NOT_PERFECT, stats=stats)

    g = s.gap_gcd
    wg = reduce(math.gcd, weights, 0)
    modulus = g * wg
    if modulus == 0:
        # Singleton S or no weights: the only candidate is all-min(S).
        if residual != 0:
            return SolveOutcome(Status.NOT_PERFECT, stats=stats)
        picks = [0] * len(weights)
    else:
        if residual % modulus:
            return SolveOutcome(Status.NOT_PERFECT, stats=stats)
        choices = [(x - smin) // g for x in s.elements]
        red_weights = [w // wg for w in weights]
        target = residual // modulus
        layer_bytes = target // 8 + 1
        need = (len(red_weights) + 1) * layer_bytes
        if need <= config.memory_cap_bytes:
            stats.method = "dp"
            layers = _layers(red_weights, choices, target)
            stats.layers = len(red_weights)
            stats.memory_bytes = sum((x.bit_length() + 7) // 8 for x in layers)
            if not (layers[0] >> target) & 1:
                return SolveOutcome(Status.NOT_PERFECT, stats=stats)
            picks = _backtrack(layers, red_weights, choices, target)
        else:
            stats.method = "dfs"
            order = list(range(len(red_weights)))
            if not config.canonicalize:
                order.sort(key=lambda i: -red_weights[i])
            try:
                picks = _dfs(red_weights, choices, target, order, config.node_budget, stats)
            except _Budget:
                return SolveOutcome(Status.EXHAUSTED, stats=stats)
            if picks is None:
                return SolveOutcome(Status.NOT_PERFECT, stats=stats)

    coeffs = [smin + g * u for u in picks]
    lambda0 = None
    if kind is Kind.SECOND:
        lambda0, coeffs = coeffs[0], coeffs[1:]
    witness = PresentationWitness(n, kind, s, divs, tuple(coeffs), lambda0)
    return SolveOutcome(Status.PERFECT, witness, stats)


def is_sperfect(n: int, s: CoefficientSet, kind=Kind.FIRST,
                config: Optional[SearchConfig] = None) -> bool:
    out = solve(n, s, kind, config)
    if out.status is Status.EXHAUSTED:
        raise SearchExhausted(n)
    return out.is_perfect
