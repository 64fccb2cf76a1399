"""Named example machines and a seeded generator of small random ones."""
from __future__ import annotations

import random

from .context import EMPTY, Context
from .machine import Machine, check_functional_bounded, is_unambiguous, trim

C = Context


def _m(inputs, outputs, states, init, final, transitions) -> Machine:
    return Machine(tuple(inputs), tuple(outputs), tuple(states), init, final,
                   tuple((s, a, C(l, r), d) for s, a, l, r, d in transitions))


def t_mirror() -> Machine:
    """Reverses its input."""
    return _m("ab", "ab", ["q"], {"q": EMPTY}, {"q": EMPTY},
              [("q", "a", "a", "", "q"), ("q", "b", "b", "", "q")])


def t_partition() -> Machine:
    """Sorts the letters: u -> a^|u|_a b^|u|_b."""
    return _m("ab", "ab", ["q"], {"q": EMPTY}, {"q": EMPTY},
              [("q", "a", "a", "", "q"), ("q", "b", "", "b", "q")])


def t1() -> Machine:
    """a^n b -> a^(2n+2) and a^n c -> b a^(2n) b."""
    return _m("abc", "ab", ["q0", "q1", "q2", "q3", "q4"], {"q0": EMPTY},
              {"q3": EMPTY, "q4": EMPTY}, [
                  ("q0", "a", "a", "a", "q1"),
                  ("q1", "a", "a", "a", "q1"),
                  ("q1", "b", "a", "a", "q3"),
                  ("q0", "a", "", "ba", "q2"),
                  ("q2", "a", "", "aa", "q2"),
                  ("q2", "c", "", "ab", "q4"),
              ])


def t2() -> Machine:
    """a^n b -> (ab)^(n-1) c (de)^(n-1) and a^n c -> b (ab)^(n-1) c (de)^(n-1) d."""
    return _m("abc", "abcde", ["q0", "q1", "q2", "q3", "q4"], {"q0": EMPTY},
              {"q3": EMPTY, "q4": EMPTY}, [
                  ("q0", "a", "", "c", "q1"),
                  ("q1", "a", "ab", "de", "q1"),
                  ("q1", "b", "", "", "q3"),
                  ("q0", "a", "b", "cd", "q2"),
                  ("q2", "a", "ba", "ed", "q2"),
                  ("q2", "c", "", "", "q4"),
              ])


def d1() -> Machine:
    """Sequential machine equivalent to t1."""
    return _m("abc", "ab", ["q0", "q1", "q2", "q3"], {"q0": EMPTY},
              {"q2": EMPTY, "q3": EMPTY}, [
                  ("q0", "a", "", "", "q1"),
                  ("q1", "a", "", "aa", "q1"),
                  ("q1", "b", "aa", "aa", "q2"),
                  ("q1", "c", "ba", "ab", "q3"),
              ])


def d2() -> Machine:
    """Sequential machine equivalent to t2."""
    return _m("abc", "abcde", ["q0", "q1", "q2", "q3"], {"q0": EMPTY},
              {"q2": EMPTY, "q3": EMPTY}, [
                  ("q0", "a", "", "c", "q1"),
                  ("q1", "a", "ab", "de", "q1"),
                  ("q1", "b", "", "", "q2"),
                  ("q1", "c", "b", "d", "q3"),
              ])


def diverging() -> Machine:
    """a^n b -> a^n, a^n c -> b^n: functional but not sequentializable."""
    return _m("abc", "ab", ["q0", "q1", "q2", "q3", "q4"], {"q0": EMPTY},
              {"q3": EMPTY, "q4": EMPTY}, [
                  ("q0", "a", "", "a", "q1"),
                  ("q1", "a", "", "a", "q1"),
                  ("q1", "b", "", "", "q3"),
                  ("q0", "a", "", "b", "q2"),
                  ("q2", "a", "", "b", "q2"),
                  ("q2", "c", "", "", "q4"),
              ])


def strongly_aligned() -> Machine:
    """Commuting first loop followed by a loop that wraps (c, d) around the output.

    a^n b^m -> c^(m-1) a^n d^(m-1) for n, m >= 1.
    """
    return _m("ab", "acd", ["q0", "q1", "q2", "q5", "q6"], {"q0": EMPTY},
              {"q1": EMPTY, "q2": EMPTY, "q5": EMPTY, "q6": EMPTY}, [
                  ("q0", "a", "", "a", "q1"),
                  ("q1", "a", "", "a", "q1"),
                  ("q0", "a", "a", "", "q2"),
                  ("q2", "a", "a", "", "q2"),
                  ("q1", "b", "", "", "q5"),
                  ("q5", "b", "c", "d", "q5"),
                  ("q2", "b", "", "", "q6"),
                  ("q6", "b", "c", "d", "q6"),
              ])


CORPUS = {
    "t_mirror": t_mirror,
    "t_partition": t_partition,
    "t1": t1,
    "t2": t2,
    "d1": d1,
    "d2": d2,
    "diverging": diverging,
    "strongly_aligned": strongly_aligned,
}

DETERMINISABLE = ("t_mirror", "t_partition", "t1", "t2", "d1", "d2", "strongly_aligned")


def corpus() -> dict:
    return {name: make() for name, make in CORPUS.items()}


def random_machine(rng: random.Random, n_states: int = 4, inputs: str = "ab",
                   outputs: str = "ab", max_out: int = 2, density: float = 0.35,
                   s2s: bool = False) -> Machine:
    """One raw random machine (not filtered, possibly untrimmed)."""
    states = [f"q{i}" for i in range(n_states)]

    def word():
        return "".join(rng.choice(outputs) for _ in range(rng.randint(0, max_out)))

    def ctx():
        return C("", word()) if s2s else C(word(), word())

    init = {"q0": ctx() if rng.random() < 0.3 else EMPTY}
    if rng.random() < 0.25 and n_states > 1:
        init[rng.choice(states[1:])] = ctx()
    final = {q: ctx() if rng.random() < 0.3 else EMPTY
             for q in states if rng.random() < 0.45}
    if not final:
        final[rng.choice(states)] = EMPTY
    trs = []
    for q in states:
        for a in inputs:
            for r in states:
                if rng.random() < density:
                    out = ctx()
                    trs.append((q, a, out.left, out.right, r))
    return _m(inputs, outputs, states, init, final, trs)


def random_branching_machine(rng: random.Random, n_states: int = 4, inputs: str = "abc",
                             outputs: str = "ab", max_out: int = 2, s2s: bool = False) -> Machine:
    """A machine shaped like t1/t2: the initial state branches on one letter into
    looping states that are told apart by a later letter.

    Such machines are unambiguous more often than uniform random ones, and
    the branches make the sequentiality question non-trivial.
    """
    states = [f"q{i}" for i in range(n_states)]

    def word():
        return "".join(rng.choice(outputs) for _ in range(rng.randint(0, max_out)))

    def ctx():
        return C("", word()) if s2s else C(word(), word())

    first = inputs[0]
    branches = states[1:-1] if n_states > 2 else states[1:]
    sink = states[-1]
    trs = []
    for q in branches:
        trs.append(("q0", first, *_lr(ctx()), q))
        for a in inputs[:2]:
            if rng.random() < 0.7:
                trs.append((q, a, *_lr(ctx()), q))
    exits = list(inputs[1:])
    rng.shuffle(exits)
    final = {}
    for i, q in enumerate(branches):
        if i < len(exits) and q != sink:
            trs.append((q, exits[i], *_lr(ctx()), sink))
        elif rng.random() < 0.5:
            final[q] = ctx()
    final[sink] = ctx() if rng.random() < 0.3 else EMPTY
    for _ in range(rng.randint(0, 2)):
        trs.append((rng.choice(states), rng.choice(inputs), *_lr(ctx()), rng.choice(states)))
    init = {"q0": ctx() if rng.random() < 0.3 else EMPTY}
    return _m(inputs, outputs, states, init, final, trs)


def _lr(c: Context) -> tuple:
    return c.left, c.right


def random_functional_machines(seed: int, count: int, max_states: int = 4,
                               s2s: bool = False, check_len: int = 6) -> list:
    """``count`` trimmed, unambiguous, nonempty machines from a fixed seed.

    Half of the draws use the uniform generator, half the branching one.
    Unambiguity is a cheap exact sufficient condition for functionality; the
    bounded functionality check is run on top as a sanity guard.
    """
    rng = random.Random(seed)
    found = []
    while len(found) < count:
        n = rng.randint(1, max_states)
        if rng.random() < 0.5:
            inputs = "ab" if rng.random() < 0.7 else "abc"
            raw = random_machine(rng, n_states=n, inputs=inputs, s2s=s2s,
                                 density=rng.choice((0.25, 0.35, 0.45)))
        else:
            raw = random_branching_machine(rng, n_states=max(n, 3), s2s=s2s)
        m = trim(raw)
        if not m.states or not m.transitions:
            continue
        if not is_unambiguous(m):
            continue
        if not check_functional_bounded(m, check_len).functional:
            continue
        found.append(m)
    return found
