"""String-to-context transducers, runs and the Delta operators.

A machine carries partial initial and final context assignments and a set
of context-labelled transitions. The output of a run ``t_1 ... t_k`` is
``c_k ... c_1``: the last transition is the outermost context.

Delta maps (partial maps from states to contexts) are plain ``dict``
objects. Whenever several candidates compete for the same state we apply
one deterministic ``choose`` rule: smallest source state id first, then the
lexicographically smallest context.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, NamedTuple

from .context import EMPTY, Context

DeltaMap = dict  # state -> Context


class Transition(NamedTuple):
    src: str
    symbol: str
    out: Context
    dst: str


@dataclass(frozen=True)
class Machine:
    input_alphabet: tuple
    output_alphabet: tuple
    states: tuple
    init: Mapping[str, Context]
    final: Mapping[str, Context]
    transitions: tuple = ()

    def __post_init__(self):
        # Canonical field order so that equality ignores declaration order.
        object.__setattr__(self, "input_alphabet", tuple(sorted(set(self.input_alphabet))))
        object.__setattr__(self, "output_alphabet", tuple(sorted(set(self.output_alphabet))))
        object.__setattr__(self, "states", tuple(sorted(set(self.states))))
        object.__setattr__(self, "init", dict(sorted(self.init.items())))
        object.__setattr__(self, "final", dict(sorted(self.final.items())))
        trs = {Transition(*t) for t in self.transitions}
        object.__setattr__(
            self, "transitions",
            tuple(sorted(trs, key=lambda t: (t.src, t.symbol, t.dst, t.out))),
        )

    __hash__ = None

    @cached_property
    def index(self) -> dict:
        idx: dict = {}
        for t in self.transitions:
            idx.setdefault((t.src, t.symbol), []).append(t)
        return idx

    def step(self, q: str, a: str) -> list:
        return self.index.get((q, a), [])

    @cached_property
    def max_context(self) -> int:
        """M_T: the largest context size over transitions, init and final."""
        sizes = [len(t.out) for t in self.transitions]
        sizes += [len(c) for c in self.init.values()]
        sizes += [len(c) for c in self.final.values()]
        return max(sizes, default=0)

    @property
    def is_s2s(self) -> bool:
        return all(not c.left for c in self._all_contexts())

    @property
    def is_sequential(self) -> bool:
        if len(self.init) != 1:
            return False
        return all(len(ts) <= 1 for ts in self.index.values())

    def _all_contexts(self) -> Iterator[Context]:
        yield from self.init.values()
        yield from self.final.values()
        for t in self.transitions:
            yield t.out

    def with_init(self, delta: Mapping[str, Context]) -> "Machine":
        """T_Delta: the same machine with its initial function replaced."""
        return Machine(self.input_alphabet, self.output_alphabet, self.states,
                       dict(delta), self.final, self.transitions)

    def eval(self, u: str) -> set:
        return eval_machine(self, u)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "note"
    message: str


def validate(m: Machine) -> list:
    diags = []
    states = set(m.states)
    ins, outs = set(m.input_alphabet), set(m.output_alphabet)

    for a in m.input_alphabet:
        if len(a) != 1:
            diags.append(Diagnostic("error", f"input symbol {a!r} is not a single character"))
    for b in m.output_alphabet:
        if len(b) != 1:
            diags.append(Diagnostic("error", f"output symbol {b!r} is not a single character"))

    def check_ctx(c: Context, where: str):
        bad = sorted(set(c.left + c.right) - outs)
        if bad:
            diags.append(Diagnostic("error", f"{where}: undeclared output symbols {bad}"))

    for kind, fn in (("init", m.init), ("final", m.final)):
        for q, c in fn.items():
            if q not in states:
                diags.append(Diagnostic("error", f"{kind}: unknown state {q!r}"))
            check_ctx(c, f"{kind}[{q}]")
    for t in m.transitions:
        where = f"transition {t.src} -{t.symbol}-> {t.dst}"
        if t.src not in states:
            diags.append(Diagnostic("error", f"{where}: unknown source state {t.src!r}"))
        if t.dst not in states:
            diags.append(Diagnostic("error", f"{where}: unknown target state {t.dst!r}"))
        if t.symbol not in ins:
            diags.append(Diagnostic("error", f"{where}: undeclared input symbol {t.symbol!r}"))
        check_ctx(t.out, where)
    if m.is_s2s:
        diags.append(Diagnostic("note", "machine is S2S (every left component is empty)"))
    return diags


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diags)


# ------------------------------------------------------------------ trimming

def _closure(seeds: Iterable[str], succ: Mapping[str, set]) -> set:
    seen = set(seeds)
    todo = list(seen)
    while todo:
        q = todo.pop()
        for r in succ.get(q, ()):
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


def useful_states(m: Machine) -> set:
    fwd: dict = {}
    bwd: dict = {}
    for t in m.transitions:
        fwd.setdefault(t.src, set()).add(t.dst)
        bwd.setdefault(t.dst, set()).add(t.src)
    return _closure(m.init, fwd) & _closure(m.final, bwd)


def is_trimmed(m: Machine) -> bool:
    return useful_states(m) == set(m.states)


def trim(m: Machine) -> Machine:
    keep = useful_states(m)
    return Machine(
        m.input_alphabet, m.output_alphabet, tuple(keep),
        {q: c for q, c in m.init.items() if q in keep},
        {q: c for q, c in m.final.items() if q in keep},
        tuple(t for t in m.transitions if t.src in keep and t.dst in keep),
    )


# ---------------------------------------------------------------- evaluation

def configurations(m: Machine, u: str, start: Mapping[str, Context] | None = None) -> set:
    """All (state, accumulated context) pairs reachable by reading ``u``."""
    frontier = set((start if start is not None else m.init).items())
    for a in u:
        frontier = {(t.dst, t.out * c) for q, c in frontier for t in m.step(q, a)}
        if not frontier:
            break
    return frontier


def eval_machine(m: Machine, u: str) -> set:
    return {m.final[q].apply(c.apply()) for q, c in configurations(m, u) if q in m.final}


def words_upto(alphabet: Iterable[str], max_len: int) -> Iterator[str]:
    """All words over ``alphabet`` by increasing length, lexicographic within a length."""
    letters = sorted(alphabet)
    for n in range(max_len + 1):
        for tup in product(letters, repeat=n):
            yield "".join(tup)


def choose(candidates: Iterable[tuple]) -> dict:
    """Resolve ``(target, source, context)`` candidates into a Delta map."""
    best: dict = {}
    for tgt, src, ctx in candidates:
        key = (src, ctx)
        if tgt not in best or key < best[tgt]:
            best[tgt] = key
    return {q: best[q][1] for q in sorted(best)}


def delta_candidates(m: Machine, delta: Mapping[str, Context], a: str) -> list:
    return [(t.dst, q, t.out * c) for q, c in delta.items() for t in m.step(q, a)]


def delta_step(m: Machine, delta: Mapping[str, Context], a: str) -> dict:
    """Delta . a"""
    return choose(delta_candidates(m, delta, a))


def delta_word(m: Machine, delta: Mapping[str, Context], u: str) -> dict:
    for a in u:
        delta = delta_step(m, delta, a)
    return delta


# ---------------------------------------------------------------------- runs

@dataclass(frozen=True, order=True)
class Track:
    """One run: a start state and the transitions taken from it."""
    start: str
    steps: tuple = ()

    @property
    def end(self) -> str:
        return self.steps[-1].dst if self.steps else self.start

    @property
    def states(self) -> tuple:
        return (self.start,) + tuple(t.dst for t in self.steps)

    @property
    def word(self) -> str:
        return "".join(t.symbol for t in self.steps)

    @cached_property
    def out(self) -> Context:
        c = EMPTY
        for t in self.steps:
            c = t.out * c
        return c

    def slice(self, i: int, j: int | None = None) -> "Track":
        return Track(self.states[i], self.steps[i:j])

    def extend(self, t: Transition) -> "Track":
        return Track(self.start, self.steps + (t,))

    def then(self, other: "Track") -> "Track":
        if other.start != self.end:
            raise ValueError("tracks do not meet")
        return Track(self.start, self.steps + other.steps)

    def __repr__(self) -> str:
        return "-".join(self.states) if self.steps else self.start


@dataclass(frozen=True)
class RunBundle:
    """k synchronised runs on one input word, kept sorted by end state."""
    word: str
    tracks: tuple

    def __post_init__(self):
        for tr in self.tracks:
            if tr.word != self.word:
                raise ValueError("track does not read the bundle word")
        object.__setattr__(self, "tracks", tuple(sorted(self.tracks, key=lambda t: t.end)))

    @classmethod
    def identity(cls, states: Iterable[str]) -> "RunBundle":
        return cls("", tuple(Track(q) for q in sorted(set(states))))

    def __len__(self) -> int:
        return len(self.word)

    @property
    def k(self) -> int:
        return len(self.tracks)

    @property
    def starts(self) -> tuple:
        return tuple(t.start for t in self.tracks)

    @property
    def ends(self) -> tuple:
        return tuple(t.end for t in self.tracks)

    def tuple_at(self, i: int) -> tuple:
        return tuple(t.states[i] for t in self.tracks)

    def outs(self) -> tuple:
        return tuple(t.out for t in self.tracks)

    def slice(self, i: int, j: int | None = None) -> "RunBundle":
        """Factor of the bundle between two input positions.

        Tracks that coincide on the factor are merged into one.
        """
        j = len(self.word) if j is None else j
        parts = dict.fromkeys(t.slice(i, j) for t in self.tracks)
        return RunBundle(self.word[i:j], tuple(parts))

    def join(self, other: "RunBundle") -> "RunBundle":
        """Continue every track of ``other`` from the track of ``self`` ending at its start."""
        by_end = {t.end: t for t in self.tracks}
        return RunBundle(self.word + other.word,
                         tuple(by_end[t.start].then(t) for t in other.tracks))

    def first_loop(self) -> tuple | None:
        """Positions ``(i, j)`` of the first loop: smallest ``j`` with an earlier equal tuple."""
        seen = {}
        for j in range(len(self.word) + 1):
            tup = self.tuple_at(j)
            if tup in seen:
                return seen[tup], j
            seen[tup] = j
        return None

    def key(self) -> tuple:
        return (self.word, self.tracks)


def bundle_step(m: Machine, h: RunBundle, a: str) -> RunBundle:
    """H . a: extend every track by every a-transition, keeping one track per end state.

    When tracks converge, the one coming from the smaller predecessor end
    state wins, then the one whose new transition has the smaller context.
    """
    best: dict = {}
    for tr in h.tracks:
        for t in m.step(tr.end, a):
            key = (tr.end, t.out)
            if t.dst not in best or key < best[t.dst][0]:
                best[t.dst] = (key, tr.extend(t))
    return RunBundle(h.word + a, tuple(v[1] for v in best.values()))


def delta_act_run(delta: Mapping[str, Context], h: RunBundle) -> dict:
    """Delta . H"""
    cands = []
    for tr in h.tracks:
        if tr.start not in delta:
            raise ValueError(f"track start {tr.start!r} outside the domain of Delta")
        cands.append((tr.end, tr.start, tr.out * delta[tr.start]))
    return choose(cands)


# --------------------------------------------------------------- projections

def project_right(m: Machine) -> Machine:
    return Machine(
        m.input_alphabet, m.output_alphabet, m.states,
        {q: c.right_only() for q, c in m.init.items()},
        {q: c.right_only() for q, c in m.final.items()},
        tuple(t._replace(out=t.out.right_only()) for t in m.transitions),
    )


def project_left(m: Machine) -> Machine:
    """Left S2S: mirrored left components become right-only outputs."""
    return Machine(
        m.input_alphabet, m.output_alphabet, m.states,
        {q: c.mirrored() for q, c in m.init.items()},
        {q: c.mirrored() for q, c in m.final.items()},
        tuple(t._replace(out=t.out.mirrored()) for t in m.transitions),
    )


# ------------------------------------------------------------------- product

PRODUCT_SEP = "⊗"


@dataclass(frozen=True)
class ProductMachine:
    """k-th power of a machine: states are k-tuples, outputs are tuples of contexts."""
    base: Machine
    k: int
    states: tuple
    init: dict
    final: dict
    transitions: tuple

    @staticmethod
    def name(qs: tuple) -> str:
        return PRODUCT_SEP.join(qs)

    def loops_at(self, qs: tuple, a: str) -> list:
        return [t for t in self.transitions if t[0] == qs and t[1] == a and t[3] == qs]


def power(m: Machine, k: int) -> ProductMachine:
    n = len(m.states)
    if not 1 <= k <= max(n, 1):
        raise ValueError(f"power must lie in 1..{n}, got {k}")
    tuples = tuple(product(m.states, repeat=k))
    init = {qs: tuple(m.init[q] for q in qs) for qs in tuples if all(q in m.init for q in qs)}
    final = {qs: tuple(m.final[q] for q in qs) for qs in tuples if all(q in m.final for q in qs)}
    trs = []
    for qs in tuples:
        for a in m.input_alphabet:
            for combo in product(*(m.step(q, a) for q in qs)):
                trs.append((qs, a, tuple(t.out for t in combo), tuple(t.dst for t in combo)))
    return ProductMachine(m, k, tuples, init, final, tuple(trs))


# ------------------------------------------------------- functionality checks

@dataclass(frozen=True)
class FunctionalVerdict:
    functional: bool
    max_len: int
    word: str | None = None
    outputs: tuple = field(default=())


def check_functional_bounded(m: Machine, max_len: int) -> FunctionalVerdict:
    for u in words_upto(m.input_alphabet, max_len):
        outs = eval_machine(m, u)
        if len(outs) >= 2:
            return FunctionalVerdict(False, max_len, u, tuple(sorted(outs)))
    return FunctionalVerdict(True, max_len)


def is_unambiguous(m: Machine) -> bool:
    """Exact check that no input has two distinct accepting runs."""
    start = {(p, q, p != q) for p in m.init for q in m.init}
    seen = set(start)
    todo = deque(start)
    while todo:
        p, q, diverged = todo.popleft()
        if diverged and p in m.final and q in m.final:
            return False
        for a in m.input_alphabet:
            for t1 in m.step(p, a):
                for t2 in m.step(q, a):
                    nxt = (t1.dst, t2.dst, diverged or t1 != t2)
                    if nxt not in seen:
                        seen.add(nxt)
                        todo.append(nxt)
    return True
