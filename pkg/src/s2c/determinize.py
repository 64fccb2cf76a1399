"""Determinisation of string-to-context transducers.

States of the sequential machine are triples ``(tag, Delta, H)``:

* ``start``: no productive loop seen yet, ``Delta`` is the initial function;
* ``com`` (with a primitive word ``x``): only x-commuting loops seen so far,
  outputs are held back as powers of ``x``;
* ``noncom``: a non-commuting loop was seen, from then on the construction
  behaves like the classical subset construction with delays.

``H`` is a bundle of runs from ``dom(Delta)`` on the input read since
``Delta`` was fixed. Each step extends ``H`` and then removes loops one at a
time (``simplify``), releasing output through ``extend_with_loop``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .context import EMPTY, Context, strip_lcc
from .loops import (
    Aligned,
    Commuting,
    Lasso,
    NonProductive,
    NotClassifiable,
    StronglyAligned,
    StronglyCommuting,
    check_tp_after_split,
    class_to_json,
    classify_first_stage,
    classify_second_stage,
)
from .machine import Machine, RunBundle, bundle_step, choose, delta_act_run, trim

START, COM, NONCOM = "start", "com", "noncom"


def _delta_key(delta: Mapping[str, Context]) -> tuple:
    return tuple(sorted(delta.items()))


@dataclass(frozen=True)
class DetState:
    tag: str
    x: str | None
    delta: dict = field(compare=False)
    history: RunBundle = field(compare=False)

    @property
    def key(self) -> tuple:
        return (self.tag, self.x, _delta_key(self.delta), self.history.key())

    def __eq__(self, other):
        return isinstance(other, DetState) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def effective_delta(self) -> dict:
        """Delta . H"""
        return delta_act_run(self.delta, self.history)

    def with_history(self, h: RunBundle) -> "DetState":
        return DetState(self.tag, self.x, self.delta, h)

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "x": self.x,
            "delta": {q: c.to_json() for q, c in sorted(self.delta.items())},
            "history": {"word": self.history.word,
                        "tracks": [repr(t) for t in self.history.tracks]},
        }


class CtpViolation(Exception):
    """The machine has no sequential equivalent; carries the offending evidence."""

    def __init__(self, reason: str, lasso: Lasso | None = None, detail: dict | None = None):
        super().__init__(reason)
        self.reason = reason
        self.lasso = lasso
        self.detail = detail or {}

    def to_json(self) -> dict:
        return {
            "error": "ctp-violation",
            "reason": self.reason,
            "lasso": self.lasso.to_json() if self.lasso is not None else None,
            "detail": self.detail,
        }


class InconclusiveCap(Exception):
    """The state budget ran out before the construction closed."""

    def __init__(self, cap: int):
        super().__init__(f"state count exceeded the safety cap of {cap}")
        self.cap = cap

    def to_json(self) -> dict:
        return {"error": "inconclusive-cap", "cap": self.cap}


class Determinizer:
    """Holds the machine and the memo tables used by the construction."""

    def __init__(self, m: Machine):
        self.m = m
        self.n = len(m.states)
        self.M = m.max_context
        self._tp_cache: dict = {}

    # ----------------------------------------------------- loop extension

    def extend_with_loop(self, p: DetState, h2: RunBundle) -> tuple:
        """Remove the loop ``h2`` from the end of ``p``'s history.

        Returns the new state and the context released by the loop.
        """
        if p.tag == NONCOM:
            raise ValueError("extend_with_loop is not defined on noncom states")
        lasso = Lasso(p.delta, p.history, h2)
        if p.tag == START:
            cls = classify_first_stage(lasso)
        else:
            cls = classify_second_stage(lasso, p.x)

        if isinstance(cls, NonProductive):
            return p, EMPTY
        if isinstance(cls, NotClassifiable):
            raise CtpViolation(cls.reason, lasso, {"stage": "first" if p.tag == START else "second"})
        if isinstance(cls, Commuting):
            return DetState(COM, cls.x, cls.split, RunBundle.identity(cls.split)), \
                Context("", cls.x * cls.pow)
        if isinstance(cls, Aligned):
            self._check_tp(cls.split, lasso, cls)
            return DetState(NONCOM, None, cls.split, RunBundle.identity(cls.split)), \
                cls.f * Context("", cls.w)
        if isinstance(cls, StronglyCommuting):
            return p, Context("", p.x * cls.k)
        if isinstance(cls, StronglyAligned):
            self._check_tp(cls.extract, lasso, cls)
            return DetState(NONCOM, None, cls.extract, RunBundle.identity(cls.extract)), \
                cls.g * cls.f
        raise AssertionError(f"unexpected classification {cls!r}")

    def _check_tp(self, delta: dict, lasso: Lasso, cls) -> None:
        key = _delta_key(delta)
        if key not in self._tp_cache:
            self._tp_cache[key] = check_tp_after_split(self.m, delta)
        left, right = self._tp_cache[key]
        if not (left.holds and right.holds):
            raise CtpViolation("projection fails the twinning property after the split", lasso, {
                "classification": class_to_json(cls),
                "left": left.to_json(),
                "right": right.to_json(),
            })

    # ------------------------------------------------------- simplification

    def simplify(self, p: DetState) -> tuple:
        """Bring a pre-state back into the state space; returns ``(state, context)``."""
        if p.tag == NONCOM:
            stripped, c = strip_lcc(p.effective_delta)
            return DetState(NONCOM, None, stripped, RunBundle.identity(stripped)), c
        ij = p.history.first_loop()
        if ij is None:
            return p, EMPTY
        i, j = ij
        h = p.history
        h1, h2, h3 = h.slice(0, i), h.slice(i, j), h.slice(j)
        r, c = self.extend_with_loop(p.with_history(h1), h2)
        s, d = self.simplify(r.with_history(r.history.join(h3)))
        return s, d * c

    # -------------------------------------------------------------- bounds

    def check_bounds(self, q: DetState) -> None:
        n, M = self.n, self.M
        small = M * n ** n
        ctx_bound = small if q.tag != NONCOM else 4 * M * n ** (n + 2)
        problems = []
        if q.x is not None and len(q.x) > small:
            problems.append(f"|x| = {len(q.x)} > {small}")
        if len(q.history.word) >= max(n ** n, 1) and q.tag != NONCOM:
            problems.append(f"|word(H)| = {len(q.history.word)} >= {n ** n}")
        big = [len(c) for c in q.delta.values() if len(c) > ctx_bound]
        if big:
            problems.append(f"context of size {max(big)} > {ctx_bound}")
        if problems:
            raise CtpViolation("state exceeds the boundedness limits", None,
                               {"state": q.to_json(), "problems": problems})

    # ------------------------------------------------------------ the loop

    def initial_state(self) -> DetState:
        return DetState(START, None, dict(self.m.init), RunBundle.identity(self.m.init))

    def step(self, q: DetState, a: str) -> tuple | None:
        h = bundle_step(self.m, q.history, a)
        if not h.tracks:
            return None
        return self.simplify(q.with_history(h))

    def final_output(self, q: DetState) -> Context | None:
        eff = q.effective_delta
        cands = [("out", p, self.m.final[p] * c) for p, c in eff.items() if p in self.m.final]
        if not cands:
            return None
        return choose(cands)["out"]


@dataclass
class SequentialS2c:
    machine: Machine
    states: dict            # name -> DetState
    initial: str

    @property
    def is_sequential(self) -> bool:
        return self.machine.is_sequential

    def run(self, u: str) -> list:
        """The states visited and outputs released while reading ``u``."""
        name, c = self.initial, EMPTY
        trace = [(name, c)]
        for a in u:
            ts = self.machine.step(name, a)
            if not ts:
                return trace
            t = ts[0]
            name, c = t.dst, t.out * c
            trace.append((name, c))
        return trace


def build_sequential(m: Machine, safety_cap: int | None = None) -> SequentialS2c:
    """Construct a sequential S2C equivalent to the functional trimmed machine ``m``.

    Raises ``CtpViolation`` when the machine has no sequential equivalent and
    ``InconclusiveCap`` when more than ``safety_cap`` states get built.
    """
    n = len(m.states)
    cap = safety_cap if safety_cap is not None else 10 * max(n, 1) ** max(n, 1)
    det = Determinizer(m)
    init = det.initial_state()
    names = {init: "s0"}
    states = {"s0": init}
    transitions = []
    todo = deque([init])
    while todo:
        q = todo.popleft()
        for a in m.input_alphabet:
            nxt = det.step(q, a)
            if nxt is None:
                continue
            r, c = nxt
            if r not in names:
                det.check_bounds(r)
                if len(names) >= cap:
                    raise InconclusiveCap(cap)
                names[r] = f"s{len(names)}"
                states[names[r]] = r
                todo.append(r)
            transitions.append((names[q], a, c, names[r]))
    final = {}
    for q, name in names.items():
        out = det.final_output(q)
        if out is not None:
            final[name] = out
    machine = Machine(m.input_alphabet, m.output_alphabet, tuple(states),
                      {"s0": EMPTY} if m.init else {}, final, tuple(transitions))
    trimmed = trim(machine)
    return SequentialS2c(trimmed, {s: states[s] for s in trimmed.states}, "s0")
