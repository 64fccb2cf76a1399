"""Independent brute-force oracles used by the tests.

Nothing here imports the package's algorithms; everything is computed
from definitions with the dumbest loop that works.
"""
from itertools import product
from math import gcd


def words(alphabet, max_len):
    for n in range(max_len + 1):
        for tup in product(sorted(alphabet), repeat=n):
            yield "".join(tup)


def prefixes(u):
    return [u[:i] for i in range(len(u) + 1)]


def suffixes(u):
    return [u[i:] for i in range(len(u) + 1)]


def factors(u):
    return {u[i:j] for i in range(len(u) + 1) for j in range(i, len(u) + 1)}


def lcp(u, v):
    return max((p for p in prefixes(u) if v.startswith(p)), key=len)


def lcs(u, v):
    return max((s for s in suffixes(u) if v.endswith(s)), key=len)


def lcf_len(u, v):
    return max(len(f) for f in factors(u) & factors(v))


def dist_p(u, v):
    return len(u) + len(v) - 2 * len(lcp(u, v))


def dist_f(u, v):
    return len(u) + len(v) - 2 * lcf_len(u, v)


def primitive_root(u):
    for d in range(1, len(u) + 1):
        if len(u) % d == 0 and u[:d] * (len(u) // d) == u:
            return u[:d]


def is_primitive(u):
    return bool(u) and primitive_root(u) == u


def primitive_period(u):
    # shortest y (necessarily primitive) such that u is a prefix of y^infinity
    for p in range(1, len(u) + 1):
        y = u[:p]
        if (y * (len(u) // p + 1)).startswith(u):
            return y


def conjugate(u, v):
    return len(u) == len(v) and any(u[i:] + u[:i] == v for i in range(max(len(u), 1)))


def apply(c, w):
    left, right = c
    return left + w + right


def concat(c1, c2):
    return (c1[0] + c2[0], c2[1] + c1[1])


def fine_wilf(u, v):
    return len(u) + len(v) - gcd(len(u), len(v))


def run_outputs(transitions, init, final, u):
    """Every output of every accepting run, by explicit path enumeration.

    ``transitions`` is a list of ``(src, symbol, (left, right), dst)``;
    ``init`` and ``final`` map states to ``(left, right)`` pairs.
    """
    outs = set()

    def walk(q, i, ctx):
        if i == len(u):
            if q in final:
                outs.add(apply(concat(final[q], ctx), ""))
            return
        for src, a, c, dst in transitions:
            if src == q and a == u[i]:
                walk(dst, i + 1, concat(c, ctx))

    for q, c in init.items():
        walk(q, 0, c)
    return outs


def machine_outputs(m, u):
    """``run_outputs`` on a package Machine, reading only its raw fields."""
    trs = [(t.src, t.symbol, (t.out.left, t.out.right), t.dst) for t in m.transitions]
    init = {q: (c.left, c.right) for q, c in m.init.items()}
    final = {q: (c.left, c.right) for q, c in m.final.items()}
    return run_outputs(trs, init, final, u)
