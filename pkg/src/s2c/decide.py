"""Sequentiality decision by searching for short two-loop counter-examples.

A functional trimmed machine has a sequential equivalent iff no pair of
synchronised runs with stems and loops of input length at most ``|Q|^2``
exhibits one of four shapes:

1. a productive lasso that is neither commuting nor aligned;
2. an x-commuting lasso followed by a productive lasso that is neither
   strongly x-commuting nor strongly aligned;
3. an aligned lasso whose ``split_nc`` map yields a left or right S2S
   without the twinning property;
4. an x-commuting lasso followed by a strongly aligned lasso whose
   ``extract_nc`` map yields a left or right S2S without the twinning
   property.

Instead of guessing a counter-example we enumerate all of them, merging
runs that agree on their end states and outputs (classification only
depends on those). Shapes are searched in the order 1, 3, 2, 4.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .context import Context
from .loops import (
    Aligned,
    Commuting,
    Lasso,
    NotClassifiable,
    StronglyAligned,
    check_tp_after_split,
    class_to_json,
    classify_first,
    classify_second,
    tp_delay_bound,
)
from .machine import Machine, RunBundle, Track, eval_machine, words_upto
from .words import dist_f, dist_p

SHAPE_ORDER = (1, 3, 2, 4)


@dataclass
class DecisionReport:
    sequentializable: bool
    counterexample: dict | None = None
    stats: dict = field(default_factory=dict)
    lassos: tuple = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {"sequentializable": self.sequentializable,
                "counterexample": self.counterexample,
                "stats": self.stats}


# ---------------------------------------------------------------- run search

def _bundles(m: Machine, starts: list, summary, closing=None) -> list:
    """Synchronised track tuples from ``starts`` that never revisit a state tuple.

    Tuples with the same end states, the same ``summary`` and the same set
    of visited tuples are merged. When ``closing`` is given the result is the
    set of simple cycles through ``closing`` (nonempty, returning to it);
    otherwise it is every loop-free run, including the empty ones.
    """
    seen = set()
    out = []
    todo = []
    for st in starts:
        tracks = tuple(Track(q) for q in st)
        key = (st, summary(tracks), frozenset([st]))
        if key not in seen:
            seen.add(key)
            todo.append((tracks, key[2]))
            if closing is None:
                out.append(tracks)
    while todo:
        tracks, visited = todo.pop()
        for a in m.input_alphabet:
            for combo in _product([m.step(t.end, a) for t in tracks]):
                nxt = tuple(t.extend(s) for t, s in zip(tracks, combo))
                ends = tuple(t.end for t in nxt)
                if closing is not None and ends == closing:
                    key = (ends, summary(nxt), None)
                    if key not in seen:
                        seen.add(key)
                        out.append(nxt)
                    continue
                if ends in visited:
                    continue
                vis = visited | {ends}
                key = (ends, summary(nxt), vis)
                if key in seen:
                    continue
                seen.add(key)
                todo.append((nxt, vis))
                if closing is None:
                    out.append(nxt)
    out.sort(key=lambda ts: (len(ts[0].steps), ts[0].word, ts))
    return out


def _product(options):
    from itertools import product
    return product(*options)


class Search:
    """Counter-example search for one machine."""

    def __init__(self, m: Machine):
        self.m = m
        self._loops: dict = {}
        self._stems: dict = {}
        self._tp: dict = {}
        self._first: dict = {}
        self._second: dict = {}
        self.stats = {"first_lassos": 0, "second_lassos": 0, "tp_checks": 0}

    # anchors are tuples of pairwise distinct states of length 1 or 2
    def loops_at(self, anchor: tuple) -> list:
        if anchor not in self._loops:
            self._loops[anchor] = _bundles(
                self.m, [anchor], lambda ts: tuple(t.out for t in ts), closing=anchor)
        return self._loops[anchor]

    def stems(self, dom: tuple) -> list:
        """Loop-free stems of one or two tracks from ``dom`` to distinct anchors.

        Stems are merged on their output contexts, which determine the
        lasso profile for any base map over ``dom``.
        """
        if dom not in self._stems:
            starts = [(p,) for p in dom] + [(p, q) for p in dom for q in dom]
            found = _bundles(self.m, starts, lambda ts: tuple(t.out for t in ts))
            out, seen = [], set()
            for tracks in found:
                tracks = tuple(sorted(tracks, key=lambda t: t.end))
                ends = tuple(t.end for t in tracks)
                key = (tuple(t.start for t in tracks), ends, tuple(t.out for t in tracks))
                if len(set(ends)) == len(ends) and key not in seen:
                    seen.add(key)
                    out.append(tracks)
            self._stems[dom] = out
        return self._stems[dom]

    def tp(self, delta: Mapping[str, Context]) -> tuple:
        key = tuple(sorted(delta.items()))
        if key not in self._tp:
            self.stats["tp_checks"] += 1
            self._tp[key] = check_tp_after_split(self.m, delta)
        return self._tp[key]

    def lassos(self, base):
        for stem in self.stems(tuple(sorted(base))):
            anchor = tuple(t.end for t in stem)
            for loop in self.loops_at(anchor):
                yield Lasso(base, RunBundle(stem[0].word, stem), RunBundle(loop[0].word, loop))

    # ------------------------------------------------------------------ run

    def run(self) -> DecisionReport:
        m = self.m
        if not m.init:
            return DecisionReport(True, stats=self.stats)
        shape3 = None
        commuting = {}
        for lasso in self.lassos(dict(m.init)):
            self.stats["first_lassos"] += 1
            profile = lasso.first_profile()
            key = tuple(profile)
            if key not in self._first:
                self._first[key] = classify_first(profile)
            cls = self._first[key]
            if isinstance(cls, NotClassifiable):
                return self._report(1, cls, lasso)
            if isinstance(cls, Aligned) and shape3 is None:
                left, right = self.tp(cls.split)
                if not (left.holds and right.holds):
                    shape3 = (cls, lasso, left, right)
            if isinstance(cls, Commuting):
                commuting.setdefault((cls.x, tuple(sorted(cls.split.items()))), (cls, lasso))
        if shape3 is not None:
            return self._report(3, *shape3)

        shape4 = None
        for cls1, lasso1 in commuting.values():
            x, delta = cls1.x, cls1.split
            for lasso2 in self.lassos(delta):
                self.stats["second_lassos"] += 1
                profile = lasso2.second_profile()
                key = (x, tuple(profile))
                if key not in self._second:
                    self._second[key] = classify_second(profile, x)
                cls = self._second[key]
                if isinstance(cls, NotClassifiable):
                    return self._report(2, cls, lasso2, first=(cls1, lasso1))
                if isinstance(cls, StronglyAligned) and shape4 is None:
                    left, right = self.tp(cls.extract)
                    if not (left.holds and right.holds):
                        shape4 = (cls, lasso2, left, right)
                        shape4_first = (cls1, lasso1)
        if shape4 is not None:
            return self._report(4, *shape4, first=shape4_first)
        return DecisionReport(True, stats=self.stats)

    def _report(self, shape, cls, lasso, left=None, right=None, first=None) -> DecisionReport:
        ce = {"shape": shape, "lasso": lasso.to_json(), "classification": class_to_json(cls)}
        lassos = (lasso,)
        if first is not None:
            ce["first_lasso"] = first[1].to_json()
            ce["first_classification"] = class_to_json(first[0])
            lassos = (first[1], lasso)
        if left is not None:
            ce["left_tp"] = left.to_json()
            ce["right_tp"] = right.to_json()
        return DecisionReport(False, ce, self.stats, lassos)


def decide_sequentiality(m: Machine) -> DecisionReport:
    """Decide whether the functional trimmed machine ``m`` has a sequential equivalent."""
    return Search(m).run()


def reverify_counterexample(m: Machine, report: DecisionReport) -> bool:
    """Re-run the failing sub-check of a negative report from its lassos alone."""
    if report.sequentializable:
        return False
    shape = report.counterexample["shape"]
    if shape in (1, 3):
        (lasso,) = report.lassos
        cls = classify_first(lasso.first_profile())
        if shape == 1:
            return isinstance(cls, NotClassifiable)
        if not isinstance(cls, Aligned):
            return False
        left, right = check_tp_after_split(m, cls.split)
        return not (left.holds and right.holds)
    first, second = report.lassos
    cls1 = classify_first(first.first_profile())
    if not isinstance(cls1, Commuting) or dict(second.base) != cls1.split:
        return False
    cls = classify_second(second.second_profile(), cls1.x)
    if shape == 2:
        return isinstance(cls, NotClassifiable)
    if not isinstance(cls, StronglyAligned):
        return False
    left, right = check_tp_after_split(m, cls.extract)
    return not (left.holds and right.holds)


# ----------------------------------------------------- bounded predicates

def clip_constant(m: Machine) -> int:
    n = len(m.states)
    return m.max_context * (10 * n ** (n + 2) + 3)


@dataclass(frozen=True)
class BoundedVerdict:
    holds: bool
    bound: int
    counterexample: dict | None = None

    def to_json(self) -> dict:
        return {"holds": self.holds, "bound": self.bound, "counterexample": self.counterexample}


def check_clip_bounded(m: Machine, K: int | None = None, max_len: int = 6) -> BoundedVerdict:
    """Sample the contextual Lipschitz property on all domain words up to ``max_len``."""
    K = clip_constant(m) if K is None else K
    dom = []
    for u in words_upto(m.input_alphabet, max_len):
        outs = eval_machine(m, u)
        if outs:
            dom.append((u, min(outs)))
    for i, (u, fu) in enumerate(dom):
        for v, fv in dom[i + 1:]:
            if dist_f(fu, fv) > K * dist_p(u, v):
                return BoundedVerdict(False, K, {"u": u, "v": v, "f(u)": fu, "f(v)": fv,
                                                 "dist_f": dist_f(fu, fv), "dist_p": dist_p(u, v)})
    return BoundedVerdict(True, K)


def _lasso_runs(m: Machine, u: str, v: str) -> list:
    out = []
    for p, c in m.init.items():
        stems = [Track(p)]
        for a in u:
            stems = [s.extend(t) for s in stems for t in m.step(s.end, a)]
        for s in stems:
            loops = [Track(s.end)]
            for a in v:
                loops = [lp.extend(t) for lp in loops for t in m.step(lp.end, a)]
            for lp in loops:
                if lp.end == s.end:
                    out.append(((s.out * c).apply(), lp.out, s, lp))
    return out


def check_ctp_bounded(m: Machine, L: int | None = None, pump_max: int = 5,
                      len_max: int = 3) -> BoundedVerdict:
    """Sample the contextual twinning property on synchronised lasso pairs."""
    L = tp_delay_bound(m) if L is None else L
    for u in words_upto(m.input_alphabet, len_max):
        for v in words_upto(m.input_alphabet, len_max):
            if not v:
                continue
            runs = _lasso_runs(m, u, v)
            for i, (W1, e1, s1, l1) in enumerate(runs):
                for W2, e2, s2, l2 in runs[i + 1:]:
                    for j in range(pump_max + 1):
                        d = dist_f((e1 ** j).apply(W1), (e2 ** j).apply(W2))
                        if d > L:
                            return BoundedVerdict(False, L, {
                                "stem_word": u, "loop_word": v, "pumps": j, "dist_f": d,
                                "runs": [[repr(s1), repr(l1)], [repr(s2), repr(l2)]]})
    return BoundedVerdict(True, L)
