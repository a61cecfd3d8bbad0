import itertools

import numpy as np
import pytest

# criterion label -> (passed, detail), filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def naive_divisors(n):
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def all_weighted_sums(divs, s):
    """Every value of sum(l_j * d_j), l_j in s, by enumerating all |s|^k vectors."""
    sums = np.zeros(1, dtype=np.int64)
    weights = np.array(sorted(s), dtype=np.int64)
    for d in divs:
        sums = (sums[:, None] + weights * d).ravel()
    return sums


def brute_force_member(n, divs, s, kind):
    sums = all_weighted_sums(divs, s)
    if kind == "first":
        return bool((sums == n - 1).any())
    return any(bool((sums == n - l0).any()) for l0 in s)


def brute_force_vectors(divs, s):
    return itertools.product(sorted(s), repeat=len(divs))


def small_sets(pool=(-2, -1, 0, 1, 2, 3), max_size=3):
    for r in range(1, max_size + 1):
        yield from itertools.combinations(pool, r)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS, key=lambda x: int(x.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}")


@pytest.fixture
def record_criterion():
    def record(label, ok, detail=""):
        ACCEPTANCE_RESULTS[label] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}")
        assert ok, f"criterion {label} failed: {detail}"
    return record
