"""
Exact joint distributions of statistics and equidistribution checks.

A :class:`Distribution` maps statistic tuples to exact counts over all of
S_n or I_n.  Set-valued ``Rmin`` keys are stored as sorted tuples.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from . import combinatorics as cb
from .errors import DomainError

__all__ = [
    "Distribution", "CheckReport", "joint_distribution",
    "check_equidistribution", "check_claim", "CLAIMS", "check_conjecture_op2",
    "tbij_extend_distinct", "tbij_extend_repeated", "tbij_roundtrip_verify",
    "DOMAINS", "normalize_domain",
]

DOMAINS = {
    "perm": "permutations", "permutations": "permutations", "S": "permutations",
    "invseq": "inversion_sequences", "inversion_sequences": "inversion_sequences",
    "I": "inversion_sequences",
}


def normalize_domain(domain: str) -> str:
    try:
        return DOMAINS[domain]
    except KeyError:
        raise DomainError(f"unknown domain {domain!r}") from None


def _stat_table(domain: str) -> dict:
    return cb.PERM_STATS if domain == "permutations" else cb.INVSEQ_STATS


def _words(domain: str, n: int):
    return cb.perm_words(n) if domain == "permutations" else cb.invseq_words(n)


@dataclass(frozen=True)
class Distribution:
    stats: tuple[str, ...]
    counts: dict
    n: int
    domain: str

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def project(self, stats: Sequence[str]) -> "Distribution":
        """Marginal distribution on a subset (or reordering) of the statistics."""
        idx = []
        for s in stats:
            if s not in self.stats:
                raise DomainError(f"{s!r} is not part of {self.stats}")
            idx.append(self.stats.index(s))
        out: Counter = Counter()
        for key, c in self.counts.items():
            out[tuple(key[i] for i in idx)] += c
        return Distribution(tuple(stats), dict(out), self.n, self.domain)

    def rows(self) -> list[tuple[tuple, int]]:
        return sorted(self.counts.items())

    def difference(self, other: "Distribution") -> list[tuple[tuple, int, int]]:
        """All keys whose counts differ, as ``(key, count_self, count_other)``."""
        keys = sorted(set(self.counts) | set(other.counts))
        return [(k, self.counts.get(k, 0), other.counts.get(k, 0))
                for k in keys if self.counts.get(k, 0) != other.counts.get(k, 0)]


@dataclass
class CheckReport:
    claim: str
    status: str
    params: dict = field(default_factory=dict)
    witness: dict | None = None
    elapsed: float = 0.0
    detail: str = ""

    def __post_init__(self):
        if self.status not in ("pass", "fail"):
            raise ValueError(f"status must be 'pass' or 'fail', not {self.status!r}")
        if self.status == "fail" and self.witness is None:
            raise ValueError("a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self, timings: bool = True) -> dict:
        out = {"id": self.claim, "params": self.params, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out["detail"] = self.detail
        if timings:
            out["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return out


def _key(value):
    return tuple(sorted(value)) if isinstance(value, frozenset) else value


def _words_with_prefix(domain: str, n: int, prefix: tuple):
    k = len(prefix)
    if domain == "permutations":
        rest = [v for v in range(1, n + 1) if v not in prefix]
        return (prefix + w for w in itertools.permutations(rest))
    return (prefix + w for w in itertools.product(*(range(i) for i in range(k + 1, n + 1))))


def _count_prefix(domain: str, stats: tuple, n: int, prefix: tuple) -> Counter:
    table = _stat_table(domain)
    funcs = [table[s] for s in stats]
    counts: Counter = Counter()
    for w in _words_with_prefix(domain, n, prefix):
        counts[tuple(_key(f(w)) for f in funcs)] += 1
    return counts


def _partitions(domain: str, n: int) -> list[tuple]:
    if domain == "permutations":
        return [(v,) for v in range(1, n + 1)]
    return [(0, v) for v in range(2)] if n >= 2 else [(0,)]


def joint_distribution(stats: Sequence[str], n: int, domain: str = "perm",
                       bound: int = cb.DEFAULT_BOUND, workers: int = 1) -> Distribution:
    """Exact joint distribution of ``stats`` over S_n or I_n.

    With ``workers > 1`` the enumeration is split by leading entries and
    the partial counts are merged; the result does not depend on the merge
    order.
    """
    domain = normalize_domain(domain)
    stats = tuple(stats)
    table = _stat_table(domain)
    for s in stats:
        if s not in table:
            raise DomainError(f"unknown statistic {s!r} for {domain}")
    cb.check_bound(n, bound)
    if workers > 1:
        return _parallel_distribution(stats, n, domain, workers)
    return _cached_distribution(stats, n, domain)


@lru_cache(maxsize=256)
def _cached_distribution(stats: tuple, n: int, domain: str) -> Distribution:
    table = _stat_table(domain)
    funcs = [table[s] for s in stats]
    counts: Counter = Counter()
    for w in _words(domain, n):
        counts[tuple(_key(f(w)) for f in funcs)] += 1
    return Distribution(stats, dict(counts), n, domain)


def _parallel_distribution(stats, n, domain, workers) -> Distribution:
    parts = _partitions(domain, n)
    total: Counter = Counter()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_count_prefix, domain, stats, n, p) for p in parts]
        for f in futures:
            total.update(f.result())
    return Distribution(stats, dict(total), n, domain)


def check_equidistribution(stats_a: Sequence[str], stats_b: Sequence[str], n_max: int,
                           domains: tuple[str, str] = ("perm", "perm"),
                           n_min: int = 1, claim: str | None = None,
                           bound: int = cb.DEFAULT_BOUND) -> CheckReport:
    """Compare two joint distributions exactly for every ``n_min <= n <= n_max``."""
    if len(stats_a) != len(stats_b):
        raise DomainError(f"arity mismatch: {tuple(stats_a)} vs {tuple(stats_b)}")
    dom_a, dom_b = (normalize_domain(d) for d in domains)
    claim = claim or f"{','.join(stats_a)}~{','.join(stats_b)}"
    params = {"stats_a": list(stats_a), "stats_b": list(stats_b),
              "domains": [dom_a, dom_b], "n_range": [n_min, n_max]}
    start = time.perf_counter()
    for n in range(n_min, n_max + 1):
        da = joint_distribution(stats_a, n, dom_a, bound)
        db = joint_distribution(stats_b, n, dom_b, bound)
        diff = da.difference(db)
        if diff:
            key, ca, cb_ = diff[0]
            return CheckReport(claim, "fail", params,
                               {"n": n, "tuple": list(key), "count_a": ca, "count_b": cb_},
                               time.perf_counter() - start)
    return CheckReport(claim, "pass", params, None, time.perf_counter() - start)


# named equidistribution claims: each chain is checked against its first entry
_P, _I = "permutations", "inversion_sequences"
CLAIMS: dict[str, list[tuple[tuple[str, ...], str]]] = {
    "thm1": [(("des", "ides", "rmax", "lmin"), _P), (("des", "ides", "lmin", "rmax"), _P),
             (("ides", "des", "rmax", "lmin"), _P)],
    "adr": [(("des", "ides", "rmax"), _P), (("ides", "des", "lmin"), _P),
            (("des", "ides", "lmin"), _P), (("ides", "des", "rmax"), _P)],
    "asczeromax": [(("des", "lmax", "lmin", "rmax"), _P), (("ides", "lmax", "lmin", "rmax"), _P)],
    "iasc_swap": [(("des", "iasc", "rmax", "lmax"), _P), (("iasc", "des", "lmax", "lmin"), _P)],
    "bv": [(("des", "ides", "lmin", "lmax", "rmax"), _P), (("asc", "dist", "max", "zero", "rmin"), _I)],
    "tbij": [(("asc", "zero", "max", "Rmin"), _I), (("dist", "zero", "max", "Rmin"), _I)],
}


def check_claim(name: str, n_max: int, bound: int = cb.DEFAULT_BOUND) -> list[CheckReport]:
    """Check every member of a named chain against the first member."""
    try:
        chain = CLAIMS[name]
    except KeyError:
        raise DomainError(f"unknown claim {name!r}; choose from {', '.join(sorted(CLAIMS))}") from None
    (base, dom), rest = chain[0], chain[1:]
    return [check_equidistribution(base, other, n_max, (dom, odom),
                                   claim=f"{name}:{','.join(base)}~{','.join(other)}",
                                   bound=bound)
            for other, odom in rest]


OP2_STATS = ("asc", "rep", "zero", "max", "rmin")


def check_conjecture_op2(n_max: int, bound: int = cb.DEFAULT_BOUND,
                         workers: int = 1) -> CheckReport:
    """Exhaustive scan for the quintuple (asc,rep,zero,max,rmin) ~ (asc,rep,zero,rmin,max).

    The swapped distribution is derived from the first by permuting key
    coordinates.  A failure lists every differing tuple of the first
    failing length.
    """
    params = {"stats_a": list(OP2_STATS), "stats_b": ["asc", "rep", "zero", "rmin", "max"],
              "domain": "inversion_sequences", "n_range": [1, n_max]}
    cb.check_bound(n_max, bound)
    start = time.perf_counter()
    for n in range(1, n_max + 1):
        da = joint_distribution(OP2_STATS, n, "invseq", bound, workers)
        swapped = {(a, r, z, mn, mx): c for (a, r, z, mx, mn), c in da.counts.items()}
        db = Distribution(da.stats, swapped, n, da.domain)
        diff = da.difference(db)
        if diff:
            witness = {"n": n, "differences": [
                {"tuple": list(k), "count_a": a, "count_b": b} for k, a, b in diff]}
            return CheckReport("OP2", "fail", params, witness, time.perf_counter() - start,
                               "counterexample to the quintuple equidistribution")
    return CheckReport("OP2", "pass", params, None, time.perf_counter() - start)


# --- one-step extensions on inversion sequences -------------------------------

def _entries(s) -> tuple[int, ...]:
    if isinstance(s, cb.InversionSequence):
        return s.entries
    return cb.InversionSequence(tuple(s)).entries


def tbij_extend_distinct(s, j: int) -> cb.InversionSequence:
    """Extend ``s`` by a new last entry ``j`` that occurs exactly once.

    Entries right of position ``j`` move one step right and those ``>= j``
    are increased by one; the entries smaller than ``j`` beyond position
    ``j + 1`` then rotate one slot left into the gap, and ``j`` fills the
    last position.  Requires ``last(s) < j <= len(s)``.
    """
    w = _entries(s)
    m = len(w)
    if not (w and w[-1] < j <= m):
        raise DomainError(f"need last(s) < j <= len(s); got s={w}, j={j}")
    new: list = list(w[:j]) + [None] + [y + 1 if y >= j else y for y in w[j:]]
    hole = j
    for idx in range(j + 1, m + 1):
        if new[idx] < j:
            new[hole] = new[idx]
            hole = idx
    if hole != m:
        raise AssertionError(f"rotation ended at position {hole + 1}, not at the end")
    new[hole] = j
    return cb.InversionSequence(tuple(new))


def tbij_extend_repeated(s, j: int) -> cb.InversionSequence:
    """Extend ``s`` by a last entry ``j`` that already occurs.

    If ``s`` ends with ``j``, append ``j``.  If it ends with ``L > j``:
    with ``l`` the first position holding ``L``, ``m = l - 1 - L`` and ``k``
    the length of the terminal run of ``L``, shift the entries from position
    ``j + m + 1`` on by ``k`` places (adding ``k`` to those ``>= j + m``),
    insert ``k`` copies of ``j`` at position ``j + m + 1``, drop ``k - 1``
    trailing copies of ``L + k`` and turn every other ``L + k`` into ``j``.
    Requires ``1 <= j <= len(s) - 1`` and ``last(s) >= j``.
    """
    w = _entries(s)
    m = len(w)
    if not (1 <= j <= m - 1):
        raise DomainError(f"need 1 <= j <= len(s)-1; got len(s)={m}, j={j}")
    big = w[-1]
    if big == j:
        return cb.InversionSequence(w + (j,))
    if big < j:
        raise DomainError(f"need last(s) >= j; got s={w}, j={j}")
    ell = w.index(big) + 1
    gap = ell - 1 - big
    k = 0
    while k < m and w[m - 1 - k] == big:
        k += 1
    cut = j + gap
    ext = list(w[:cut]) + [j] * k + [y + k if y >= cut else y for y in w[cut:]]
    for _ in range(k - 1):
        if ext[-1] != big + k:
            raise DomainError(f"construction undefined for s={w}, j={j}: "
                              f"trailing entry {ext[-1]} != {big + k}")
        ext.pop()
    out = tuple(j if y == big + k else y for y in ext)
    try:
        return cb.InversionSequence(out)
    except DomainError as exc:
        raise DomainError(f"construction for s={w}, j={j} left I_n: {out}") from exc


def _extension_failures(s: tuple, j: int, t: tuple | None, distinct: bool) -> list[str]:
    if t is None:
        return ["construction undefined"]
    problems = []
    rs, rt = cb.rmin_set(s), cb.rmin_set(t)
    if len(t) != len(s) + 1:
        problems.append("length")
    if t[-1] != j:
        problems.append("last entry")
    once = t.count(j) == 1
    if distinct and not once:
        problems.append("last entry repeated")
    if not distinct and once:
        problems.append("last entry not repeated")
    if cb.zero(t) != cb.zero(s):
        problems.append("zero")
    if distinct:
        expected_max = cb.maxcount(s) + (1 if j == len(s) else 0)
        if cb.maxcount(t) != expected_max:
            problems.append("max")
        if cb.dist(t) != cb.dist(s) + 1:
            problems.append("dist")
        if rt != rs | {j}:
            problems.append("Rmin")
    else:
        if cb.maxcount(t) != cb.maxcount(s):
            problems.append("max")
        if cb.dist(t) != cb.dist(s):
            problems.append("dist")
        if rt != frozenset(a for a in rs if a <= j) | {j}:
            problems.append("Rmin")
    return problems


def tbij_roundtrip_verify(n_max: int, bound: int = cb.DEFAULT_BOUND,
                          max_witnesses: int = 20,
                          extend_distinct: Callable = None,
                          extend_repeated: Callable = None) -> CheckReport:
    """Exhaustively audit both one-step extensions for target lengths ``2..n_max``.

    Checks, for every admissible ``(s, j)`` with ``len(s) = n - 1``: the
    stated statistic changes, injectivity of each map, disjointness of the
    two images, and that together they exhaust the sequences of length
    ``n`` whose last entry is non-zero.  The two maps can be replaced
    (used to exercise the witness format).
    """
    extend_distinct = extend_distinct or tbij_extend_distinct
    extend_repeated = extend_repeated or tbij_extend_repeated
    cb.check_bound(n_max, bound)
    start = time.perf_counter()
    problems: list[dict] = []
    counts = {}

    def note(entry):
        if len(problems) < max_witnesses:
            problems.append(entry)

    nbad = 0
    for n in range(2, n_max + 1):
        images: dict[tuple, list] = {}
        for s in cb.invseq_words(n - 1):
            for j in range(s[-1] + 1, n):
                t = tuple(extend_distinct(s, j))
                issues = _extension_failures(s, j, t, True)
                if issues:
                    nbad += 1
                    note({"n": n, "map": "distinct", "s": list(s), "j": j,
                          "image": list(t), "violations": issues})
                images.setdefault(t, []).append(("distinct", s, j))
            for j in range(1, min(s[-1], n - 2) + 1):
                try:
                    t = tuple(extend_repeated(s, j))
                except DomainError:
                    t = None
                issues = _extension_failures(s, j, t, False)
                if issues:
                    nbad += 1
                    note({"n": n, "map": "repeated", "s": list(s), "j": j,
                          "image": None if t is None else list(t), "violations": issues})
                if t is not None:
                    images.setdefault(t, []).append(("repeated", s, j))
        for t, pre in images.items():
            if len(pre) > 1:
                nbad += 1
                note({"n": n, "collision": list(t),
                      "preimages": [{"map": m, "s": list(s), "j": j} for m, s, j in pre]})
        targets = {t for t in cb.invseq_words(n) if t[-1] != 0}
        missing = sorted(targets - set(images))
        nbad += len(missing)
        for t in missing[:3]:
            note({"n": n, "not_covered": list(t)})
        counts[n] = {"pairs": sum(len(v) for v in images.values()),
                     "targets": len(targets), "missing": len(missing)}
    params = {"n_range": [2, n_max], "counts": {str(k): v for k, v in counts.items()}}
    elapsed = time.perf_counter() - start
    if nbad:
        return CheckReport("tbij_roundtrip", "fail", params,
                           {"violations": nbad, "examples": problems}, elapsed)
    return CheckReport("tbij_roundtrip", "pass", params, None, elapsed)
