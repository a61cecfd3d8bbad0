"""Ordered enumeration of P(S) over a range, golden lists and a resumable cache.

Cache files are UTF-8 text::

    #sperfect-cache v1
    #job,<kind>,<set>,<lo>
    n,kind,set,coefficients
    ...
    #scanned,<last n checked>

``set`` and ``coefficients`` are ``;``-separated integers; second-kind rows
put lambda0 first in ``coefficients``.  ``#scanned`` lines are checkpoints
written after each chunk.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from .arith import divisor_profile, sigma_range
from .errors import CacheFormatError, DomainError, EnumerationError
from .presentation import (
    CoefficientSet,
    Kind,
    PresentationWitness,
    SearchConfig,
    Status,
    solve,
    verify,
)

log = logging.getLogger(__name__)

CACHE_HEADER = "#sperfect-cache v1"
CHUNK = 1 << 14


@dataclass
class EnumerationJob:
    s: CoefficientSet
    kind: Kind = Kind.FIRST
    lo: int = 2
    hi: int = 1000
    config: SearchConfig = field(default_factory=SearchConfig)
    cache_path: Optional[Path] = None
    workers: int = 1

    def __post_init__(self):
        self.kind = Kind(self.kind)
        if self.lo < 2 or self.hi < self.lo:
            raise DomainError(f"need 2 <= lo <= hi, got [{self.lo}, {self.hi}]")
        if self.cache_path is not None:
            self.cache_path = Path(self.cache_path)


@dataclass(frozen=True)
class GoldenList:
    name: str
    s: CoefficientSet
    kind: Kind
    prefix: tuple[int, ...]


def _golden(name, elems, prefix, kind=Kind.FIRST):
    return GoldenList(name, CoefficientSet(elems), kind, tuple(prefix))


# Initial terms of P(S) for small S.
GOLDEN = {
    g.name: g
    for g in (
        _golden("perfect", [1], [6, 28, 496, 8128]),
        _golden("semiperfect", [0, 1], [6, 12, 18, 20, 24, 28, 30, 36, 40, 42, 48, 54, 56, 60, 66],
                Kind.SECOND),
        _golden("2-hyperperfect", [2], [21, 2133, 19521, 176661]),
        _golden("3-hyperperfect", [3], [325]),
        _golden("0,2", [0, 2], [21, 63, 147, 171, 189, 225]),
        _golden("-1,2", [-1, 2], [21, 28, 52, 84, 112, 156, 189, 208, 228]),
        _golden("-1,1", [-1, 1], [6, 12, 24, 28, 30, 40, 42, 48, 54, 56, 60, 66, 70, 78, 80]),
        _golden("1,2", [1, 2], [6, 10, 21, 28, 44, 45, 50, 52, 99, 105, 117, 135, 136]),
        _golden("1,3", [1, 3], [6, 14, 15, 28, 44, 76, 110, 135, 152, 182, 184, 190, 231]),
        _golden("2,3", [2, 3], [21, 175, 325, 333]),
    )
}


def fast_reject(n: int, sig: int, s: CoefficientSet, kind: Kind) -> Optional[str]:
    """A reason n certainly is not in P(S), using only sigma(n); None if undecided.

    Reasons: ``prime``, ``interval``, ``congruence``, ``square`` (the odd part
    of n is a square, so sigma(n) is odd, which rules out S = {-1, 1}).
    """
    if sig == n + 1 and kind is Kind.FIRST:
        return "prime"
    inner = sig - 1 - n
    if kind is Kind.FIRST:
        residual = n - 1 - s.min_elem * inner
        total = inner
    else:
        residual = n - s.min_elem * (1 + inner)
        total = 1 + inner
    if residual < 0 or residual > (s.max_elem - s.min_elem) * total:
        return "interval"
    g = s.gap_gcd
    if (residual != 0) if g == 0 else (residual % g != 0):
        return "congruence"
    if kind is Kind.FIRST and s.elements == (-1, 1) and sig % 2:
        return "square"
    return None


def _prime_witness(n: int, s: CoefficientSet) -> PresentationWitness:
    return PresentationWitness(n, Kind.SECOND, s, (), (), n)


def _scan(s: CoefficientSet, kind: Kind, config: SearchConfig, a: int, b: int):
    """Members in [a, b] as (n, witness) pairs, ascending."""
    out = []
    sig = sigma_range(a, b)
    for n in range(a, b + 1):
        sn = int(sig[n - a])
        if fast_reject(n, sn, s, kind):
            continue
        if sn == n + 1:
            # second kind, prime n: the only coefficient is lambda0 = n
            if n in s:
                out.append((n, _prime_witness(n, s)))
            continue
        res = solve(n, s, kind, config, divisor_profile(n))
        if res.status is Status.EXHAUSTED:
            raise EnumerationError(n)
        if res.is_perfect:
            out.append((n, res.witness))
    return out


def _scan_args(args):
    return _scan(*args)


def _chunks(lo: int, hi: int, size: int = CHUNK):
    a = lo
    while a <= hi:
        b = min(hi, a + size - 1)
        yield a, b
        a = b + 1


def _scan_chunks(job: EnumerationJob, lo: int) -> Iterator[tuple[int, list]]:
    """(chunk end, members) in ascending chunk order; parallel when workers > 1."""
    bounds = list(_chunks(lo, job.hi))
    if job.workers <= 1 or len(bounds) == 1:
        for a, b in bounds:
            yield b, _scan(job.s, job.kind, job.config, a, b)
        return
    with ProcessPoolExecutor(max_workers=job.workers) as pool:
        args = [(job.s, job.kind, job.config, a, b) for a, b in bounds]
        # map preserves submission order, which restores ascending n
        for (_, b), members in zip(bounds, pool.map(_scan_args, args)):
            yield b, members


# -- cache -------------------------------------------------------------------

def _fmt_ints(xs) -> str:
    return ";".join(str(x) for x in xs)


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(";")] if text else []


def format_row(witness: PresentationWitness) -> str:
    coeffs = list(witness.coefficients)
    if witness.kind is Kind.SECOND:
        coeffs = [witness.lambda0, *coeffs]
    return f"{witness.n},{witness.kind.value},{_fmt_ints(witness.s)},{_fmt_ints(coeffs)}"


def _job_line(job: EnumerationJob) -> str:
    return f"#job,{job.kind.value},{_fmt_ints(job.s)},{job.lo}"


@dataclass
class ResumeState:
    members: list = field(default_factory=list)
    next_n: int = 2
    lo: Optional[int] = None


def cache_resume(path, job: EnumerationJob) -> ResumeState:
    """Read a cache file written for ``job``; every stored witness is re-verified."""
    path = Path(path)
    state = ResumeState(next_n=job.lo)
    if not path.exists() or path.stat().st_size == 0:
        return state
    with path.open(encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if lines[0] != CACHE_HEADER:
        raise CacheFormatError(path, 1, f"expected header {CACHE_HEADER!r}")
    last = None
    scanned = None
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if parts[0] == "#job":
            if len(parts) != 4 or parts[1] != job.kind.value or parts[2] != _fmt_ints(job.s):
                raise CacheFormatError(path, line_no, "cache belongs to a different set or kind")
            try:
                state.lo = int(parts[3])
            except ValueError:
                raise CacheFormatError(path, line_no, "bad job range") from None
            if state.lo > job.lo:
                raise CacheFormatError(path, line_no, f"cache starts at {state.lo}, job at {job.lo}")
            continue
        if parts[0] == "#scanned":
            try:
                scanned = int(parts[1])
            except (IndexError, ValueError):
                raise CacheFormatError(path, line_no, "bad checkpoint") from None
            continue
        if state.lo is None:
            raise CacheFormatError(path, line_no, "member row before #job line")
        try:
            if len(parts) != 4:
                raise ValueError("expected 4 fields")
            n = int(parts[0])
            kind = Kind(parts[1])
            coeffs = _parse_ints(parts[3])
        except ValueError as exc:
            raise CacheFormatError(path, line_no, f"malformed row: {exc}") from None
        if kind is not job.kind or parts[2] != _fmt_ints(job.s):
            raise CacheFormatError(path, line_no, "row set or kind does not match the job")
        if last is not None and n <= last:
            raise CacheFormatError(path, line_no, "rows are not strictly increasing")
        divs = divisor_profile(n).intermediate_divisors
        lambda0 = None
        if kind is Kind.SECOND:
            if not coeffs:
                raise CacheFormatError(path, line_no, "second-kind row lacks lambda0")
            lambda0, coeffs = coeffs[0], coeffs[1:]
        if len(coeffs) != len(divs):
            raise CacheFormatError(path, line_no, "coefficient count does not match divisors")
        w = PresentationWitness(n, kind, job.s, divs, tuple(coeffs), lambda0)
        if not verify(w, job.s):
            raise CacheFormatError(path, line_no, f"stored witness for {n} does not verify")
        state.members.append((n, w))
        last = n
    done = max(x for x in (scanned, last, job.lo - 1) if x is not None)
    state.next_n = max(done + 1, job.lo)
    return state


class _CacheWriter:
    def __init__(self, path: Path, job: EnumerationJob):
        fresh = not path.exists() or path.stat().st_size == 0
        path.parent.mkdir(parents=True, exist_ok=True)
        self.fh = path.open("a", encoding="utf-8")
        if fresh:
            self.fh.write(CACHE_HEADER + "\n" + _job_line(job) + "\n")

    def member(self, witness):
        self.fh.write(format_row(witness) + "\n")

    def checkpoint(self, n):
        self.fh.write(f"#scanned,{n}\n")
        self.fh.flush()

    def close(self):
        self.fh.close()


def cache_write(path, job: EnumerationJob, members, scanned_to: int) -> None:
    """Write a complete cache file for ``job`` covering [job.lo, scanned_to]."""
    path = Path(path)
    if path.exists():
        path.unlink()
    writer = _CacheWriter(path, job)
    try:
        for _, w in members:
            writer.member(w)
        writer.checkpoint(scanned_to)
    finally:
        writer.close()


# -- enumeration -------------------------------------------------------------

def enumerate_members(job: EnumerationJob) -> Iterator[tuple[int, PresentationWitness]]:
    """Yield (n, witness) for every n in P(S) within [job.lo, job.hi], ascending.

    Raises EnumerationError if the solver is exhausted on some n; members are
    never silently dropped.
    """
    start = job.lo
    writer = None
    if job.cache_path is not None:
        state = cache_resume(job.cache_path, job)
        for n, w in state.members:
            if job.lo <= n <= job.hi:
                yield n, w
        start = state.next_n
        if start <= job.hi:
            writer = _CacheWriter(job.cache_path, job)
    if start > job.hi:
        return
    try:
        for end, members in _scan_chunks(job, start):
            for n, w in members:
                if writer:
                    writer.member(w)
                yield n, w
            if writer:
                writer.checkpoint(end)
    finally:
        if writer:
            writer.close()


def members(s, kind=Kind.FIRST, hi=1000, lo=2, config=None) -> list[int]:
    job = EnumerationJob(CoefficientSet(s), Kind(kind), lo, hi, config or SearchConfig())
    return [n for n, _ in enumerate_members(job)]


@dataclass
class GoldenReport:
    name: str
    matched: bool
    expected: tuple[int, ...]
    found: tuple[int, ...]
    first_divergence: Optional[tuple[int, Optional[int], Optional[int]]] = None


def crosscheck_golden(golden: GoldenList, config: Optional[SearchConfig] = None,
                      workers: int = 1) -> GoldenReport:
    """Enumerate up to max(prefix) and report the first index where the lists differ."""
    job = EnumerationJob(golden.s, golden.kind, 2, max(golden.prefix),
                         config or SearchConfig(), workers=workers)
    found = tuple(n for n, _ in enumerate_members(job))
    divergence = None
    for i in range(max(len(found), len(golden.prefix))):
        want = golden.prefix[i] if i < len(golden.prefix) else None
        got = found[i] if i < len(found) else None
        if want != got:
            divergence = (i, want, got)
            break
    return GoldenReport(golden.name, divergence is None, golden.prefix, found, divergence)


def default_cache_path(s: CoefficientSet, kind: Kind, lo: int) -> Optional[Path]:
    root = os.environ.get("SPERFECT_CACHE_DIR")
    if not root:
        return None
    tag = "_".join(str(x) for x in s).replace("-", "m")
    return Path(root) / f"sperfect_{Kind(kind).value}_{tag}_from{lo}.csv"
