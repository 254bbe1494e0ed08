"""
Permutations, inversion sequences and their Euler-Stirling statistics.

Positions are 1-based in every public definition: ``values[0]`` is the
entry at position 1.  Inversion sequences satisfy ``0 <= s_i <= i - 1``.

>>> perm_stats(Permutation((3, 1, 2)))["lmin"]
2
>>> invseq_stats(InversionSequence((0, 0, 2, 1, 4, 3)))["Rmin"]
frozenset({0, 1, 3})
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import DomainError, EnumerationBoundError

__all__ = [
    "Permutation", "InversionSequence", "StatVector",
    "PERM_STATS", "INVSEQ_STATS", "DEFAULT_BOUND",
    "perm_stats", "perm_transform", "invseq_stats", "invseq_complement",
    "enumerate_perms", "enumerate_invseqs", "check_bound",
    "des", "ides", "iasc", "lmax", "lmin", "rmax",
    "asc", "dist", "rep", "zero", "maxcount", "rmin", "rmin_set", "last",
    "czero", "ealz", "cmax", "ealm",
]

DEFAULT_BOUND = 10

# statistic name -> value (int), plus "Rmin" -> frozenset for inversion sequences
StatVector = dict


@dataclass(frozen=True)
class Permutation:
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(self.values)
        object.__setattr__(self, "values", values)
        if sorted(values) != list(range(1, len(values) + 1)):
            raise DomainError(f"not a permutation of 1..{len(values)}: {values}")

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class InversionSequence:
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        for i, s in enumerate(entries):
            if not 0 <= s <= i:
                raise DomainError(
                    f"entry {s} at position {i + 1} violates 0 <= s_i <= i-1")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


# --- permutation statistics on raw words -----------------------------------

def des(p: Sequence[int]) -> int:
    return sum(1 for a, b in zip(p, p[1:]) if a > b)


def _inverse(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, v in enumerate(p, start=1):
        inv[v - 1] = i
    return tuple(inv)


def ides(p: Sequence[int]) -> int:
    return des(_inverse(p))


def iasc(p: Sequence[int]) -> int:
    return len(p) - 1 - ides(p)


def lmax(p: Sequence[int]) -> int:
    count, best = 0, 0
    for v in p:
        if v > best:
            count, best = count + 1, v
    return count


def lmin(p: Sequence[int]) -> int:
    count, best = 0, len(p) + 1
    for v in p:
        if v < best:
            count, best = count + 1, v
    return count


def rmax(p: Sequence[int]) -> int:
    count, best = 0, 0
    for v in reversed(p):
        if v > best:
            count, best = count + 1, v
    return count


# --- inversion-sequence statistics on raw words ----------------------------

def asc(s: Sequence[int]) -> int:
    return sum(1 for a, b in zip(s, s[1:]) if a < b)


def dist(s: Sequence[int]) -> int:
    """Number of distinct non-zero entries (s_1 = 0 is always present)."""
    return len(set(s)) - 1


def rep(s: Sequence[int]) -> int:
    return len(s) - 1 - dist(s)


def zero(s: Sequence[int]) -> int:
    return sum(1 for v in s if v == 0)


def maxcount(s: Sequence[int]) -> int:
    """Number of maximal entries, i.e. positions with s_i = i - 1."""
    return sum(1 for i, v in enumerate(s) if v == i)


def rmin_set(s: Sequence[int]) -> frozenset:
    out = []
    best = None
    for v in reversed(s):
        if best is None or v < best:
            out.append(v)
            best = v
    return frozenset(out)


def rmin(s: Sequence[int]) -> int:
    return len(rmin_set(s))


def last(s: Sequence[int]) -> int:
    return s[-1]


def czero(s: Sequence[int]) -> int:
    k = 0
    while k < len(s) and s[k] == 0:
        k += 1
    return k


def ealz(s: Sequence[int]) -> int:
    # 0 when s ends with a zero
    if s[-1] == 0:
        return 0
    last_zero = max(i for i, v in enumerate(s) if v == 0)
    return s[last_zero + 1]


def cmax(s: Sequence[int]) -> int:
    k = 1
    while k < len(s) and s[k] > s[k - 1]:
        k += 1
    return k


def ealm(s: Sequence[int]) -> int:
    p = cmax(s)
    return s[p] if p < len(s) else 0


PERM_STATS = {
    "des": des, "ides": ides, "iasc": iasc,
    "lmax": lmax, "lmin": lmin, "rmax": rmax,
}

INVSEQ_STATS = {
    "asc": asc, "dist": dist, "rep": rep, "zero": zero, "max": maxcount,
    "rmin": rmin, "last": last, "czero": czero, "ealz": ealz,
    "cmax": cmax, "ealm": ealm, "Rmin": rmin_set,
}


def perm_stats(p: Permutation) -> StatVector:
    """All permutation statistics of ``p``."""
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    if p.n == 0:
        raise DomainError("statistics of the empty permutation are undefined")
    w = p.values
    return {name: f(w) for name, f in PERM_STATS.items()}


def perm_transform(p: Permutation, kind: str) -> Permutation:
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    w, n = p.values, p.n
    if kind == "inverse":
        return Permutation(_inverse(w))
    if kind == "reverse":
        return Permutation(w[::-1])
    if kind == "complement":
        return Permutation(tuple(n + 1 - v for v in w))
    raise DomainError(f"unknown transform {kind!r}")


def invseq_stats(s: InversionSequence) -> StatVector:
    """All inversion-sequence statistics of ``s``, including the set ``Rmin``."""
    if not isinstance(s, InversionSequence):
        s = InversionSequence(tuple(s))
    if s.n == 0:
        raise DomainError("statistics of the empty sequence are undefined")
    w = s.entries
    return {name: f(w) for name, f in INVSEQ_STATS.items()}


def invseq_complement(s: InversionSequence) -> InversionSequence:
    if not isinstance(s, InversionSequence):
        s = InversionSequence(tuple(s))
    return InversionSequence(tuple(i - v for i, v in enumerate(s.entries)))


def check_bound(n: int, bound: int = DEFAULT_BOUND) -> None:
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > bound:
        raise EnumerationBoundError(
            f"n={n} exceeds the enumeration bound {bound}")


def perm_words(n: int) -> Iterator[tuple[int, ...]]:
    """Raw one-line words of S_n in lexicographic order (no validation)."""
    return itertools.permutations(range(1, n + 1))


def invseq_words(n: int) -> Iterator[tuple[int, ...]]:
    """Raw words of I_n in lexicographic order (no validation)."""
    return itertools.product(*(range(i) for i in range(1, n + 1)))


def enumerate_perms(n: int, bound: int = DEFAULT_BOUND) -> Iterator[Permutation]:
    check_bound(n, bound)
    for w in perm_words(n):
        yield Permutation(w)


def enumerate_invseqs(n: int, bound: int = DEFAULT_BOUND) -> Iterator[InversionSequence]:
    check_bound(n, bound)
    for w in invseq_words(n):
        yield InversionSequence(w)
