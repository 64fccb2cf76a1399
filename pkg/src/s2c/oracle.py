"""Brute-force reference checks used to validate the real algorithms."""
from __future__ import annotations

from dataclasses import dataclass

from .machine import Machine, eval_machine, trim, words_upto
from .words import dist_p, lcp


@dataclass(frozen=True)
class EquivVerdict:
    equivalent: bool
    max_len: int
    word: str | None = None
    left: tuple = ()
    right: tuple = ()

    def to_json(self) -> dict:
        return {"equivalent": self.equivalent, "max_len": self.max_len, "word": self.word,
                "outputs": [list(self.left), list(self.right)] if self.word is not None else None}


def oracle_equiv(m1: Machine, m2: Machine, max_len: int) -> EquivVerdict:
    """Compare both machines on every input word up to ``max_len``."""
    alphabet = set(m1.input_alphabet) | set(m2.input_alphabet)
    for u in words_upto(alphabet, max_len):
        o1, o2 = eval_machine(m1, u), eval_machine(m2, u)
        if o1 != o2:
            return EquivVerdict(False, max_len, u, tuple(sorted(o1)), tuple(sorted(o2)))
    return EquivVerdict(True, max_len)


def _simple_cycles(m: Machine, p: str, q: str):
    """Output pairs of the simple cycles through ``(p, q)`` in the self-product.

    Pairs are yielded lazily, each once.
    """
    found = set()
    stack = [((p, q), "", "", frozenset([(p, q)]))]
    while stack:
        (r, s), y1, y2, seen = stack.pop()
        for a in m.input_alphabet:
            for t1 in m.step(r, a):
                for t2 in m.step(s, a):
                    nxt = (t1.dst, t2.dst)
                    z1, z2 = y1 + t1.out.right, y2 + t2.out.right
                    if nxt == (p, q):
                        if (z1, z2) not in found:
                            found.add((z1, z2))
                            yield z1, z2
                    elif nxt not in seen:
                        stack.append((nxt, z1, z2, seen | {nxt}))


def brute_force_twinning(m: Machine, L: int, j_max: int = 6) -> bool:
    """Pump every synchronised pair of lassos and compare prefix distances with ``L``.

    Stems are runs of the self-product of length at most ``|Q|^2``; loops are
    its simple cycles. Besides the pump counts ``0..j_max`` one large count
    is tried, past the point where any divergence must have exceeded ``L``.
    """
    m = trim(m)
    n2 = max(len(m.states) ** 2, 1)
    def pumps_ok(p, q, u, v):
        for y1, y2 in _simple_cycles(m, p, q):
            big = L + 1 + 2 * (len(u) + len(v)) + 4 * max(len(y1), len(y2))
            for j in list(range(j_max + 1)) + [big]:
                if dist_p(u + y1 * j, v + y2 * j) > L:
                    return False
        return True

    stems = set()
    frontier = set()
    for p, cp in m.init.items():
        for q, cq in m.init.items():
            frontier.add((p, q, cp.right, cq.right))
    for _ in range(n2 + 1):
        nxt = set()
        for p, q, u, v in frontier:
            k = len(lcp(u, v))
            key = (p, q, u[k:], v[k:])
            if key in stems:
                continue
            stems.add(key)
            if not pumps_ok(*key):
                return False
            for a in m.input_alphabet:
                for t1 in m.step(p, a):
                    for t2 in m.step(q, a):
                        nxt.add((t1.dst, t2.dst, u[k:] + t1.out.right, v[k:] + t2.out.right))
        frontier = nxt
    return True
