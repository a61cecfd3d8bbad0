"""Empirical campaigns: abundance counts, the two {-1,1} conjectures, and
crosschecks of the 2^k p results against the exact solver.

Reports keep densities as exact (count, N) pairs; ``to_dict`` emits the JSON
shape ``{experiment, N, counts, lists, config}`` and ``from_dict`` inverts it.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .arith import DEFAULT_SIEVE_MEMORY, is_square, primes_up_to, sigma_sieve
from .errors import SearchExhausted
from .presentation import CoefficientSet, Kind, SearchConfig, Status, solve, verify
from .sequences import EnumerationJob, enumerate_members
from .structure import (
    PLUS_MINUS_ONE,
    thrm1_congruence_check,
    thrm2_alpha,
    thrm2_construct,
    thrm2_primes,
)


def _config_echo(config: Optional[SearchConfig]) -> dict:
    return asdict(config or SearchConfig())


@dataclass
class DensityReport:
    N: int
    abundant_count: int
    strict_abundant_count: int
    sperfect_count: Optional[int] = None
    set: Optional[list[int]] = None
    kind: Optional[str] = None

    @property
    def abundant_density(self) -> Fraction:
        return Fraction(self.abundant_count, self.N)

    @property
    def sperfect_density(self) -> Optional[Fraction]:
        if self.sperfect_count is None:
            return None
        return Fraction(self.sperfect_count, self.N)

    def to_dict(self, config=None) -> dict:
        counts = {"abundant": self.abundant_count, "strict_abundant": self.strict_abundant_count}
        if self.sperfect_count is not None:
            counts["sperfect"] = self.sperfect_count
        return {
            "experiment": "abundant_density",
            "N": self.N,
            "counts": counts,
            "lists": {},
            "config": {"set": self.set, "kind": self.kind, **({"search": _config_echo(config)} if config else {})},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DensityReport":
        c = data["counts"]
        return cls(data["N"], c["abundant"], c["strict_abundant"], c.get("sperfect"),
                   data["config"].get("set"), data["config"].get("kind"))


def abundant_density(N: int, memory_cap_bytes: int = DEFAULT_SIEVE_MEMORY) -> DensityReport:
    """Exact counts of n <= N with sigma(n) >= 2n, and with sigma(n) > 2n."""
    sig = sigma_sieve(N, memory_cap_bytes)[1:]
    twice = 2 * np.arange(1, N + 1, dtype=np.int64)
    return DensityReport(N, int((sig >= twice).sum()), int((sig > twice).sum()))


@dataclass
class Conjecture1Report:
    density: DensityReport
    difference: list[int]
    difference_count: int
    non_abundant_members: list[int]

    def to_dict(self, config=None) -> dict:
        d = self.density
        return {
            "experiment": "conjecture1",
            "N": d.N,
            "counts": {
                "abundant": d.abundant_count,
                "strict_abundant": d.strict_abundant_count,
                "sperfect": d.sperfect_count,
                "difference": self.difference_count,
            },
            "lists": {"difference": self.difference, "non_abundant_members": self.non_abundant_members},
            "config": {"set": d.set, "kind": d.kind, "search": _config_echo(config)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Conjecture1Report":
        c = data["counts"]
        density = DensityReport(data["N"], c["abundant"], c["strict_abundant"], c["sperfect"],
                                data["config"]["set"], data["config"]["kind"])
        return cls(density, data["lists"]["difference"], c["difference"],
                   data["lists"]["non_abundant_members"])


def conjecture1_report(N: int, config: Optional[SearchConfig] = None, workers: int = 1,
                       limit: int = 20, sieve_cap: int = DEFAULT_SIEVE_MEMORY) -> Conjecture1Report:
    """Abundant numbers versus P(-1,1) up to N, as a set difference.

    ``difference`` holds the first ``limit`` abundant numbers that are not
    {-1,1}-perfect.  A member that is not abundant would contradict the
    parity argument and is listed separately.  ``config`` bounds the solver;
    the sigma sieve has its own cap.
    """
    config = config or SearchConfig()
    sig = sigma_sieve(N, sieve_cap)
    job = EnumerationJob(PLUS_MINUS_ONE, Kind.FIRST, 2, max(N, 2), config, workers=workers)
    found = {n for n, _ in enumerate_members(job)} if N >= 2 else set()
    abundant = [n for n in range(1, N + 1) if sig[n] >= 2 * n]
    diff = [n for n in abundant if n not in found]
    density = abundant_density(N, sieve_cap)
    density.sperfect_count = len(found)
    density.set = [-1, 1]
    density.kind = Kind.FIRST.value
    return Conjecture1Report(
        density,
        diff[:limit],
        len(diff),
        sorted(n for n in found if sig[n] < 2 * n),
    )


@dataclass
class ConjectureScanResult:
    N: int
    violations: list[int]
    checked_count: int
    squares: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self, config=None) -> dict:
        return {
            "experiment": "conjecture2",
            "N": self.N,
            "counts": {"checked": self.checked_count, "violations": len(self.violations),
                       "odd_abundant_squares": len(self.squares)},
            "lists": {"violations": self.violations, "odd_abundant_squares": [list(x) for x in self.squares]},
            "config": {"set": [-1, 1], "kind": Kind.FIRST.value, "search": _config_echo(config)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConjectureScanResult":
        lists = data["lists"]
        return cls(data["N"], lists["violations"], data["counts"]["checked"],
                   [tuple(x) for x in lists["odd_abundant_squares"]])


def conjecture2_scan(N: int, config: Optional[SearchConfig] = None,
                     sieve_cap: int = DEFAULT_SIEVE_MEMORY) -> ConjectureScanResult:
    """Test every odd abundant nonsquare n <= N for {-1,1}-perfection.

    Odd abundant squares are excluded from the implication but still solved,
    and their outcomes recorded in ``squares``.
    """
    config = config or SearchConfig()
    sig = sigma_sieve(N, sieve_cap)
    violations, squares, checked = [], [], 0
    for n in range(3, N + 1, 2):
        if sig[n] < 2 * n:
            continue
        res = solve(n, PLUS_MINUS_ONE, Kind.FIRST, config)
        if res.status is Status.EXHAUSTED:
            raise SearchExhausted(n)
        if is_square(n):
            squares.append((n, res.status.value))
            continue
        checked += 1
        if not res.is_perfect:
            violations.append(n)
    return ConjectureScanResult(N, violations, checked, squares)


@dataclass
class CrosscheckReport:
    params: dict
    double_memberships: list[dict]
    constructions: list[dict]

    @property
    def congruence_violations(self) -> list[dict]:
        return [x for x in self.double_memberships if not x["congruence_holds"]]

    @property
    def construction_failures(self) -> list[dict]:
        return [x for x in self.constructions if not (x["verified"] and x["solver_confirmed"])]

    @property
    def ok(self) -> bool:
        return not self.congruence_violations and not self.construction_failures

    def to_dict(self, config=None) -> dict:
        return {
            "experiment": "theorem_crosscheck",
            "N": None,
            "counts": {
                "double_memberships": len(self.double_memberships),
                "congruence_violations": len(self.congruence_violations),
                "constructions": len(self.constructions),
                "construction_failures": len(self.construction_failures),
            },
            "lists": {"double_memberships": self.double_memberships, "constructions": self.constructions},
            "config": {**self.params, "search": _config_echo(config)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CrosscheckReport":
        params = {k: v for k, v in data["config"].items() if k != "search"}
        return cls(params, data["lists"]["double_memberships"], data["lists"]["constructions"])


def theorem_crosscheck(m_values=range(1, 7), k_max: int = 12, p_max: int = 200,
                       config: Optional[SearchConfig] = None, construct_count: int = 5) -> CrosscheckReport:
    """Check both 2^k p results against exact membership data.

    (a) For each m and odd prime p < p_max, every pair 1 <= k < k' <= k_max
    with 2^k p and 2^k' p both in P(-1,m) must satisfy the congruence on
    alpha = k' - k.  (b) For the first ``construct_count`` eligible primes per
    m, the explicit construction must verify and the solver must agree.
    """
    config = config or SearchConfig()
    m_values = list(m_values)
    doubles, constructions = [], []
    for m in m_values:
        s = CoefficientSet([-1, m])
        for p in primes_up_to(p_max - 1)[1:]:
            member_ks = []
            for k in range(1, k_max + 1):
                res = solve(p << k, s, Kind.FIRST, config)
                if res.status is Status.EXHAUSTED:
                    raise SearchExhausted(p << k)
                if res.is_perfect:
                    member_ks.append(k)
            for i, k in enumerate(member_ks):
                for k2 in member_ks[i + 1:]:
                    doubles.append({
                        "m": m, "p": p, "k": k, "alpha": k2 - k,
                        "congruence_holds": thrm1_congruence_check(m, k, k2 - k, p),
                    })
        alpha = thrm2_alpha(m)
        for p in thrm2_primes(m, alpha, construct_count):
            k, w = thrm2_construct(m, alpha, p)
            res = solve(w.n, s, Kind.FIRST, config)
            constructions.append({
                "m": m, "alpha": alpha, "p": p, "k": k, "n": w.n,
                "verified": verify(w, s), "solver_confirmed": res.is_perfect,
            })
    params = {"m_values": m_values, "k_max": k_max, "p_max": p_max, "construct_count": construct_count}
    return CrosscheckReport(params, doubles, constructions)


def report_json(report, config=None) -> str:
    return json.dumps(report.to_dict(config), sort_keys=True, indent=2)


def report_csv(report) -> str:
    """Flatten a report's first non-empty list into a CSV table."""
    lists = report.to_dict()["lists"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for name, rows in lists.items():
        if not rows:
            continue
        if isinstance(rows[0], dict):
            keys = list(rows[0])
            writer.writerow(keys)
            writer.writerows([r[k] for k in keys] for r in rows)
        else:
            writer.writerow([name])
            writer.writerows(r if isinstance(r, (list, tuple)) else [r] for r in rows)
        break
    return buf.getvalue()
