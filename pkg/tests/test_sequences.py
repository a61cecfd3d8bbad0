import pytest

from sperfect.arith import divisor_profile, sigma_sieve
from sperfect.errors import CacheFormatError, DomainError, EnumerationError
from sperfect.presentation import CoefficientSet, Kind, SearchConfig, solve, verify
from sperfect.sequences import (
    CACHE_HEADER,
    GOLDEN,
    EnumerationJob,
    GoldenList,
    cache_resume,
    cache_write,
    crosscheck_golden,
    default_cache_path,
    enumerate_members,
    fast_reject,
    members,
)

from conftest import brute_force_member

S = CoefficientSet
EXAMPLE_SETS = [(g.s, g.kind) for g in GOLDEN.values()]


def run(s, hi, kind=Kind.FIRST, lo=2, **kw):
    return [n for n, _ in enumerate_members(EnumerationJob(S(s), kind, lo, hi, **kw))]


def test_enumerate_examples():
    assert run([0, 2], 250) == [21, 63, 147, 171, 189, 225]
    assert run([2, 3], 400) == [21, 175, 325, 333]
    assert run([1], 10000) == [6, 28, 496, 8128]


def test_enumerate_subrange_and_witnesses():
    out = list(enumerate_members(EnumerationJob(S([-1, 1]), Kind.FIRST, 50, 80)))
    assert [n for n, _ in out] == [54, 56, 60, 66, 70, 78, 80]
    assert all(verify(w, S([-1, 1])) and w.n == n for n, w in out)


def test_job_validation():
    with pytest.raises(DomainError):
        EnumerationJob(S([1]), Kind.FIRST, 1, 10)
    with pytest.raises(DomainError):
        EnumerationJob(S([1]), Kind.FIRST, 10, 9)


def test_enumerate_second_kind_primes():
    assert run([0, 1, 5, 7], 12, Kind.SECOND)[:3] == [5, 6, 7]


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden_crosscheck(name):
    report = crosscheck_golden(GOLDEN[name])
    assert report.matched, report.first_divergence


def test_golden_crosscheck_reports_divergence():
    wrong = GoldenList("wrong", S([-1, 1]), Kind.FIRST, (6, 12, 18, 24))
    report = crosscheck_golden(wrong)
    assert not report.matched
    assert report.first_divergence == (2, 18, 24)


def test_stream_complete_against_brute_force():
    for s, kind in EXAMPLE_SETS:
        got = set(run(s.elements, 2000, kind))
        for n in range(2, 2001):
            prof = divisor_profile(n)
            if prof.tau > 12:
                assert (n in got) == solve(n, s, kind, profile=prof).is_perfect
                continue
            assert (n in got) == brute_force_member(n, prof.intermediate_divisors, set(s), kind.value), (n, s)


def test_fast_rejects_never_reject_members():
    sig = sigma_sieve(10**4)
    for s, kind in EXAMPLE_SETS:
        for n in range(2, 10**4 + 1):
            if fast_reject(n, int(sig[n]), s, kind) is not None:
                prof = divisor_profile(n)
                assert not solve(n, s, kind, profile=prof).is_perfect, (n, s, kind)


def test_fast_reject_reasons():
    pm = S([-1, 1])
    assert fast_reject(7, 8, pm, Kind.FIRST) == "prime"
    assert fast_reject(18, 39, pm, Kind.FIRST) == "congruence"
    assert fast_reject(10, 18, S([1]), Kind.FIRST) == "interval"
    assert fast_reject(12, 28, S([0, 2]), Kind.FIRST) == "congruence"
    assert fast_reject(12, 28, pm, Kind.FIRST) is None


def test_enumeration_error_on_exhaustion():
    cfg = SearchConfig(memory_cap_bytes=1, node_budget=2)
    with pytest.raises(EnumerationError) as exc:
        run([-1, 1], 100, config=cfg)
    assert exc.value.n == 6


def test_parallel_matches_sequential():
    seq = run([-1, 1], 40000)
    par = run([-1, 1], 40000, workers=2)
    assert seq == par


def test_members_helper():
    assert members([1, 2], hi=136) == list(GOLDEN["1,2"].prefix)


# -- cache -------------------------------------------------------------------

def test_cache_resume_identical_to_fresh(tmp_path):
    path = tmp_path / "c.csv"
    fresh = list(enumerate_members(EnumerationJob(S([-1, 1]), Kind.FIRST, 2, 200)))
    first = list(enumerate_members(EnumerationJob(S([-1, 1]), Kind.FIRST, 2, 100, cache_path=path)))
    assert first == [x for x in fresh if x[0] <= 100]
    resumed = list(enumerate_members(EnumerationJob(S([-1, 1]), Kind.FIRST, 2, 200, cache_path=path)))
    assert resumed == fresh
    text = path.read_text(encoding="utf-8").splitlines()
    assert text[0] == CACHE_HEADER
    assert "#scanned,200" in text
    # a third run reads everything from the cache
    state = cache_resume(path, EnumerationJob(S([-1, 1]), Kind.FIRST, 2, 200))
    assert state.next_n == 201 and [n for n, _ in state.members] == [n for n, _ in fresh]


def test_cache_empty_file_means_full_run(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("")
    out = run([0, 2], 250, cache_path=path)
    assert out == [21, 63, 147, 171, 189, 225]


def test_cache_row_format(tmp_path):
    path = tmp_path / "c.csv"
    run([0, 1], 20, Kind.SECOND, cache_path=path)
    rows = [r for r in path.read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "6,second,0;1,1;1;1"


def test_cache_second_kind_round_trip(tmp_path):
    path = tmp_path / "c.csv"
    job = EnumerationJob(S([0, 1]), Kind.SECOND, 2, 70)
    got = list(enumerate_members(job))
    cache_write(path, job, got, 70)
    state = cache_resume(path, job)
    assert state.members == got and state.next_n == 71


@pytest.mark.parametrize("mutate, line", [
    (lambda rows: rows.__setitem__(2, "6,first,-1;1,1;x"), 3),
    (lambda rows: rows.__setitem__(2, "6,first,-1;1,1;1;1"), 3),
    (lambda rows: rows.__setitem__(2, "6,first,-1;1,-1;-1"), 3),
    (lambda rows: rows.__setitem__(0, "#not-a-cache"), 1),
    (lambda rows: rows.__setitem__(1, "#job,first,0;2,2"), 2),
    (lambda rows: rows.insert(3, "6,first,-1;1,1;1"), 4),
])
def test_cache_corruption_names_line(tmp_path, mutate, line):
    path = tmp_path / "c.csv"
    job = EnumerationJob(S([-1, 1]), Kind.FIRST, 2, 30)
    run([-1, 1], 30, cache_path=path)
    rows = path.read_text().splitlines()
    mutate(rows)
    path.write_text("\n".join(rows) + "\n")
    with pytest.raises(CacheFormatError) as exc:
        cache_resume(path, job)
    assert exc.value.line_no == line
    assert f":{line}:" in str(exc.value)


def test_cache_rejects_later_start(tmp_path):
    path = tmp_path / "c.csv"
    run([-1, 1], 100, lo=50, cache_path=path)
    with pytest.raises(CacheFormatError):
        cache_resume(path, EnumerationJob(S([-1, 1]), Kind.FIRST, 2, 100))
    # an earlier-started cache serves a later-starting job
    out = run([-1, 1], 100, lo=60, cache_path=path)
    assert out == [n for n in run([-1, 1], 100) if n >= 60]


def test_default_cache_path(monkeypatch, tmp_path):
    monkeypatch.delenv("SPERFECT_CACHE_DIR", raising=False)
    assert default_cache_path(S([-1, 1]), Kind.FIRST, 2) is None
    monkeypatch.setenv("SPERFECT_CACHE_DIR", str(tmp_path))
    p = default_cache_path(S([-1, 1]), Kind.FIRST, 2)
    assert p.parent == tmp_path and p.name == "sperfect_first_m1_1_from2.csv"
