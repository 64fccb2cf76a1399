"""Combinatorics on finite words.

Words are plain ``str`` values whose characters are the symbols of the
output alphabet. Everything here is a pure function.
"""
from __future__ import annotations

from math import gcd
from typing import Iterable


def lcp(u: str, v: str) -> str:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return u[:i]


def lcs(u: str, v: str) -> str:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[-1 - i] == v[-1 - i]:
        i += 1
    return u[len(u) - i:]


def lcp_all(words: Iterable[str]) -> str:
    it = iter(words)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("lcp of an empty collection") from None
    for w in it:
        acc = lcp(acc, w)
    return acc


def lcs_all(words: Iterable[str]) -> str:
    it = iter(words)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("lcs of an empty collection") from None
    for w in it:
        acc = lcs(acc, w)
    return acc


def dist_p(u: str, v: str) -> int:
    """Prefix distance: ``|u| + |v| - 2|lcp(u, v)|``."""
    return len(u) + len(v) - 2 * len(lcp(u, v))


def lcf(u: str, v: str) -> str:
    """A longest common factor of ``u`` and ``v``.

    Among the maximal ones, the factor starting earliest in ``u`` is
    returned. Quadratic dynamic programme over pairs of prefixes.
    """
    best, best_end = 0, 0
    prev = [0] * (len(v) + 1)
    for i in range(1, len(u) + 1):
        cur = [0] * (len(v) + 1)
        ui = u[i - 1]
        for j in range(1, len(v) + 1):
            if ui == v[j - 1]:
                n = prev[j - 1] + 1
                cur[j] = n
                if n > best:
                    best, best_end = n, i
        prev = cur
    return u[best_end - best:best_end]


def dist_f(u: str, v: str) -> int:
    """Factor distance: ``|u| + |v| - 2|lcf(u, v)|``."""
    return len(u) + len(v) - 2 * len(lcf(u, v))


def primitive_root(u: str) -> str:
    if not u:
        raise ValueError("primitive root of the empty word is undefined")
    n = len(u)
    for d in range(1, n + 1):
        if n % d == 0 and u[:d] * (n // d) == u:
            return u[:d]
    raise AssertionError("unreachable")


def is_primitive(u: str) -> bool:
    return bool(u) and primitive_root(u) == u


def smallest_period(u: str) -> int:
    # KMP failure function: the border length gives the smallest period.
    n = len(u)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and u[i] != u[k]:
            k = fail[k - 1]
        if u[i] == u[k]:
            k += 1
        fail[i] = k
    return n - fail[-1] if n else 0


def primitive_period(u: str) -> str:
    """The primitive word ``y`` with ``u`` in ``y+ z`` and ``z`` a prefix of ``y``.

    >>> primitive_period("abcab")
    'abc'
    """
    if not u:
        raise ValueError("primitive period of the empty word is undefined")
    return u[:smallest_period(u)]


def conjugacy_witness(u: str, v: str) -> tuple[str, str] | None:
    """Return ``(t1, t2)`` with ``u = t1 t2`` and ``v = t2 t1``, shortest ``t1`` first."""
    if len(u) != len(v):
        return None
    for i in range(len(u) + 1):
        t1, t2 = u[:i], u[i:]
        if t2 + t1 == v:
            return t1, t2
    return None


def are_conjugate(u: str, v: str) -> bool:
    return conjugacy_witness(u, v) is not None


def rotations(u: str) -> list[str]:
    """Distinct rotations of ``u`` in rotation order, starting with ``u`` itself."""
    seen: list[str] = []
    for i in range(max(len(u), 1)):
        r = u[i:] + u[:i]
        if r not in seen:
            seen.append(r)
    return seen


def least_rotation(u: str) -> str:
    return min(rotations(u))


def fine_wilf_bound(u: str, v: str) -> int:
    if not u or not v:
        raise ValueError("Fine-Wilf bound needs two nonempty words")
    return len(u) + len(v) - gcd(len(u), len(v))


def is_factor(y: str, u: str) -> bool:
    return y in u


def mirror(u: str) -> str:
    return u[::-1]
