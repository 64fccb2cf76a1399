"""Lassos and their combinatorial classification.

A lasso is a stem (runs from the domain of some Delta map to an anchor
tuple) followed by a loop around the anchor. Pumping the loop ``alpha``
times turns the output of track ``j`` into ``e_j^alpha d_j c_j``. The
classifiers below look for witnesses explaining how those pumped outputs
evolve:

* first stage (stems start in the initial function): the lasso is either
  ``x``-commuting, or non-commuting and aligned w.r.t. a context ``f`` and a
  core word ``w``;
* second stage (stems start in a ``split_c`` map): the lasso is either
  strongly ``x``-commuting, or strongly aligned.

Infinite families of equations are checked on a small horizon of pump
counts (``0..3``, ``{0..3}^2`` for two-parameter families and ``1..4``
for the strongly commuting equation). Word equations with at most two power
blocks per side that hold for four consecutive counts hold for all of them. Candidate witnesses are drawn from rotations of the loop output
components, shortest first.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping

from .context import Context
from .machine import Machine, RunBundle, Track, project_left, project_right, trim
from .words import lcp, primitive_root, rotations

HORIZON = (0, 1, 2, 3)
POSITIVE_HORIZON = (1, 2, 3, 4)


# --------------------------------------------------------------------- lassos

@dataclass(frozen=True)
class Lasso:
    base: Mapping[str, Context]
    stem: RunBundle
    loop: RunBundle

    def __post_init__(self):
        if self.stem.ends != self.loop.starts or self.loop.starts != self.loop.ends:
            raise ValueError("loop must start and end at the stem's anchor tuple")
        for t in self.stem.tracks:
            if t.start not in self.base:
                raise ValueError(f"stem starts outside the base map at {t.start!r}")

    @property
    def anchors(self) -> tuple:
        return self.stem.ends

    @property
    def k(self) -> int:
        return self.stem.k

    def parts(self) -> list:
        """Per track ``(anchor, c, d, e)``: base context, stem output, loop output."""
        return [(s.end, self.base[s.start], s.out, lp.out)
                for s, lp in zip(self.stem.tracks, self.loop.tracks)]

    def first_profile(self) -> list:
        return [(q, (d * c).apply(), e) for q, c, d, e in self.parts()]

    def second_profile(self) -> list:
        return [(q, d * c, e) for q, c, d, e in self.parts()]

    def productive(self) -> bool:
        return any(len(lp.out) for lp in self.loop.tracks)

    def to_json(self) -> dict:
        return {
            "stem_word": self.stem.word,
            "loop_word": self.loop.word,
            "tracks": [
                {"start": s.start, "anchor": s.end, "base": c.to_json(),
                 "stem_out": s.out.to_json(), "loop_out": lp.out.to_json()}
                for s, lp, c in zip(self.stem.tracks, self.loop.tracks,
                                    (self.base[s.start] for s in self.stem.tracks))
            ],
        }


def _runs_on(m: Machine, start: str, u: str) -> list:
    tracks = [Track(start)]
    for a in u:
        tracks = [tr.extend(t) for tr in tracks for t in m.step(tr.end, a)]
    return tracks


def enumerate_lassos(m: Machine, delta: Mapping[str, Context], k: int,
                     stem_max: int, loop_max: int) -> Iterator[Lasso]:
    """Every lasso of ``T_delta^k`` with bounded stem and loop lengths.

    The anchor tuple has pairwise distinct states. Enumeration is by stem
    word, then loop word (both by length then lexicographically), then by
    transition order. Stems of length zero are allowed; loops are nonempty.
    """
    from .machine import words_upto

    if k < 1 or k > max(len(m.states), 1):
        raise ValueError("k out of range")
    if loop_max < 1:
        return
    loop_words = [v for v in words_upto(m.input_alphabet, loop_max) if v]
    for u in words_upto(m.input_alphabet, stem_max):
        stems = [tr for q in delta for tr in _runs_on(m, q, u)]
        by_end: dict = {}
        for tr in stems:
            by_end.setdefault(tr.end, []).append(tr)
        for ends in _combinations(sorted(by_end), k):
            for stem_tracks in product(*(by_end[q] for q in ends)):
                stem = RunBundle(u, stem_tracks)
                for v in loop_words:
                    loops = [[lp for lp in _runs_on(m, q, v) if lp.end == q] for q in ends]
                    for loop_tracks in product(*loops):
                        yield Lasso(dict(delta), stem, RunBundle(v, loop_tracks))


def _combinations(items, k):
    from itertools import combinations
    return combinations(items, k)


# ------------------------------------------------------------ classifications

@dataclass(frozen=True)
class NonProductive:
    kind = "non-productive"


@dataclass(frozen=True)
class Commuting:
    x: str
    pow: int
    split: dict = field(hash=False)
    kind = "commuting"


@dataclass(frozen=True)
class Aligned:
    f: Context
    w: str
    split: dict = field(hash=False)
    kind = "aligned"


@dataclass(frozen=True)
class StronglyCommuting:
    x: str
    k: int
    kind = "strongly-commuting"


@dataclass(frozen=True)
class StronglyAligned:
    g: Context          # the per-loop context
    f: Context          # the fixed inner context around x^beta
    x: str
    extract: dict = field(hash=False)
    kind = "strongly-aligned"


@dataclass(frozen=True)
class NotClassifiable:
    reason: str
    kind = "not-classifiable"


def class_to_json(cls) -> dict:
    out: dict = {"kind": cls.kind}
    for name in ("x", "pow", "k", "w", "reason"):
        if hasattr(cls, name) and not callable(getattr(cls, name)):
            out[name] = getattr(cls, name)
    for name in ("f", "g"):
        if hasattr(cls, name):
            out[name] = getattr(cls, name).to_json()
    for name in ("split", "extract"):
        if hasattr(cls, name):
            out[name] = {q: c.to_json() for q, c in getattr(cls, name).items()}
    return out


# ------------------------------------------------------------- first stage

def _pump(e: Context, w: str, alpha: int) -> str:
    return (e ** alpha).apply(w)


def x_candidates(es) -> list:
    """Rotations of primitive roots of the nonempty loop output components."""
    cands = set()
    for e in es:
        for comp in (e.left, e.right):
            if comp:
                cands.update(rotations(primitive_root(comp)))
    return sorted(cands, key=lambda s: (len(s), s))


def commuting_splits(W: str, e: Context, x: str, p: int) -> list:
    """All ``(A, B)`` with ``A + B == W`` and ``e^alpha[W] == A x^(alpha p) B`` on the horizon."""
    pumped = [(_pump(e, W, a), x * (a * p)) for a in HORIZON[1:]]
    out = []
    for s in range(len(W) + 1):
        A, B = W[:s], W[s:]
        if all(word == A + xs + B for word, xs in pumped):
            out.append((A, B))
    return out


def _canonical_split(splits) -> tuple:
    # Balanced splits first, then the one with the shorter left part.
    return min(splits, key=lambda ab: (max(len(ab[0]), len(ab[1])), len(ab[0])))


def find_commuting(profile: list) -> Commuting | None:
    es = [e for _, _, e in profile]
    m = len(es[0])
    for x in x_candidates(es):
        if m % len(x):
            continue
        p = m // len(x)
        split = {}
        for q, W, e in profile:
            splits = commuting_splits(W, e, x, p)
            if not splits:
                break
            split[q] = Context(*_canonical_split(splits))
        else:
            return Commuting(x, p, split)
    return None


def track_is_commuting(W: str, e: Context) -> bool:
    if not len(e):
        return False
    return find_commuting([(None, W, e)]) is not None


def aligned_pieces(W: str, e: Context, f: Context) -> dict:
    """Map each core ``w`` to the first ``(G, H)`` with ``W == G w H`` and
    ``e^alpha[W] == G f^alpha[w] H`` on the horizon.

    When ``e`` and ``f`` have the same lateral length the equation splits
    into ``e.left G == G f.left`` and ``H e.right == f.right H``, which are
    solved separately. Otherwise every factorisation is tried.
    """
    found: dict = {}
    n = len(W)
    if e.lateral == f.lateral:
        # alpha = 1 already forces every larger alpha by induction.
        gs = [g for g in range(n + 1) if e.left + W[:g] == W[:g] + f.left]
        hs = [h for h in range(n + 1) if W[n - h:] + e.right == f.right + W[n - h:]]
        for gl in gs:
            for hl in hs:
                if gl + hl <= n:
                    found.setdefault(W[gl:n - hl], (W[:gl], W[n - hl:]))
        return found
    pumped = [(a, _pump(e, W, a)) for a in HORIZON[1:]]
    for gl in range(n + 1):
        for hl in range(n - gl + 1):
            G, w, H = W[:gl], W[gl:n - hl], W[n - hl:]
            if w in found:
                continue
            if all(word == G + (f ** a).apply(w) + H for a, word in pumped):
                found[w] = (G, H)
    return found


def _context_candidates(e: Context) -> list:
    rest = sorted({Context(l, r) for l in rotations(e.left) for r in rotations(e.right)} - {e})
    return [e] + rest


def find_aligned(profile: list) -> Aligned | None:
    first = profile[0][2]
    for f in _context_candidates(first):
        pieces = []
        for q, W, e in profile:
            found = aligned_pieces(W, e, f)
            if not found:
                break
            pieces.append((q, found))
        else:
            common = set(pieces[0][1])
            for _, found in pieces[1:]:
                common &= set(found)
            if common:
                w = min(common, key=lambda s: (-len(s), s))
                split = {q: Context(*found[w]) for q, found in pieces}
                return Aligned(f, w, split)
    return None


def classify_first(profile: list):
    """Classify a profile ``[(anchor, W_j, e_j)]`` with ``W_j = d_j c_j[eps]``."""
    lengths = {len(e) for _, _, e in profile}
    if lengths == {0}:
        return NonProductive()
    if len(lengths) > 1:
        return NotClassifiable("loop outputs have different lengths")
    com = find_commuting(profile)
    if com is not None:
        return com
    if any(track_is_commuting(W, e) for _, W, e in profile):
        return NotClassifiable("some track commutes on its own but the lasso does not")
    if len({e.lateral for _, _, e in profile}) > 1:
        return NotClassifiable("non-commuting loops are not strongly balanced")
    al = find_aligned(profile)
    if al is not None:
        return al
    return NotClassifiable("neither commuting nor aligned")


def classify_first_stage(lasso: Lasso):
    return classify_first(lasso.first_profile())


# ------------------------------------------------------------ second stage

def strongly_commutes(D: Context, e: Context, x: str, k: int) -> bool:
    return all((e * D).apply(x * b) == D.apply(x * (b + k)) for b in POSITIVE_HORIZON)


def inner_pieces(D: Context, e: Context, g: Context, x: str) -> dict:
    """Map each inner context ``f`` to the first ``h`` with
    ``e^alpha D[x^beta] == h g^alpha f[x^beta]`` on the two-parameter horizon.

    ``D[x^beta]`` is first written as ``u x^beta v`` for all beta; then
    ``h = (u1, v2)`` and ``f = (u2, v1)`` for splits ``u = u1 u2`` and
    ``v = v1 v2``. With equal lateral lengths for ``e`` and ``g`` the
    admissible ``u1`` and ``v2`` solve ``e.left u1 == u1 g.left`` and
    ``v2 e.right == g.right v2`` independently.
    """
    found: dict = {}
    W1 = D.apply(x)
    same_shape = e.lateral == g.lateral
    for s in range(len(D) + 1):
        u, v = W1[:s], W1[s + len(x):]
        if not all(u + x * b + v == D.apply(x * b) for b in HORIZON):
            continue
        if same_shape:
            iis = [i for i in range(len(u) + 1) if e.left + u[:i] == u[:i] + g.left]
            jjs = [j for j in range(len(v) + 1) if v[j:] + e.right == g.right + v[j:]]
        else:
            iis, jjs = range(len(u) + 1), range(len(v) + 1)
        for i, j in product(iis, jjs):
            h = Context(u[:i], v[j:])
            f = Context(u[i:], v[:j])
            if f in found:
                continue
            if all((e ** a * D).apply(x * b) == (h * g ** a * f).apply(x * b)
                   for a, b in product(HORIZON, HORIZON)):
                found[f] = h
    return found


def find_strongly_aligned(profile: list, x: str) -> StronglyAligned | None:
    first = profile[0][2]
    for g in _context_candidates(first):
        pieces = []
        for q, D, e in profile:
            found = inner_pieces(D, e, g, x)
            if not found:
                break
            pieces.append((q, found))
        else:
            common = set(pieces[0][1])
            for _, found in pieces[1:]:
                common &= set(found)
            if common:
                f = min(common, key=lambda c: (-len(c), c))
                return StronglyAligned(g, f, x, {q: found[f] for q, found in pieces})
    return None


def classify_second(profile: list, x: str):
    """Classify a profile ``[(anchor, D_j, e_j)]`` with ``D_j = d_j c_j`` after an x-commuting loop."""
    lengths = {len(e) for _, _, e in profile}
    if lengths == {0}:
        return NonProductive()
    if len(lengths) > 1:
        return NotClassifiable("loop outputs have different lengths")
    m = lengths.pop()
    if m % len(x) == 0 and all(strongly_commutes(D, e, x, m // len(x)) for _, D, e in profile):
        return StronglyCommuting(x, m // len(x))
    sa = find_strongly_aligned(profile, x)
    if sa is not None:
        return sa
    return NotClassifiable("neither strongly commuting nor strongly aligned")


def classify_second_stage(lasso: Lasso, x: str):
    return classify_second(lasso.second_profile(), x)


# --------------------------------------------------------------- verifiers

def verify_commuting(profile: list, c: Commuting, alphas=range(6)) -> bool:
    return all(_pump(e, W, a) == c.split[q].apply(c.x * (a * c.pow))
               for q, W, e in profile for a in alphas)


def verify_aligned(profile: list, al: Aligned, alphas=range(6)) -> bool:
    return all(_pump(e, W, a) == al.split[q].apply((al.f ** a).apply(al.w))
               for q, W, e in profile for a in alphas)


def verify_strongly_commuting(profile: list, sc: StronglyCommuting, betas=range(1, 6)) -> bool:
    return all(strongly_commutes(D, e, sc.x, sc.k) for _, D, e in profile) if betas else True


def verify_strongly_aligned(profile: list, sa: StronglyAligned, grid=range(6)) -> bool:
    return all((e ** a * D).apply(sa.x * b) == (sa.extract[q] * sa.g ** a * sa.f).apply(sa.x * b)
               for q, D, e in profile for a in grid for b in grid)


def is_commuting_weak(W: str, e: Context, x: str, f: Context, imax: int = 5) -> bool:
    """Definitional check: for each ``0 < i <= imax`` some ``k`` gives ``e^i[W] == f[x^k]``."""
    for i in range(1, imax + 1):
        mid = f.inverse_apply(_pump(e, W, i))
        if mid is None or len(mid) % len(x) or x * (len(mid) // len(x)) != mid:
            return False
    return True


# ------------------------------------------------------------ twinning check

@dataclass(frozen=True)
class TwinningVerdict:
    holds: bool
    delay_bound: int
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"holds": self.holds, "delay_bound": self.delay_bound, "witness": self.witness}


def tp_delay_bound(m: Machine) -> int:
    return 2 * len(m.states) ** 2 * m.max_context


def _reduce(u: str, v: str) -> tuple:
    n = len(lcp(u, v))
    return u[n:], v[n:]


def _product_sccs(m: Machine) -> dict:
    """Map each state pair of the self-product to (component id, component is cyclic)."""
    succ = {}
    for t1 in m.transitions:
        for t2 in m.transitions:
            if t1.symbol == t2.symbol:
                succ.setdefault((t1.src, t2.src), set()).add((t1.dst, t2.dst))
    nodes = [(p, q) for p in m.states for q in m.states]
    index, low, stack, on, comp = {}, {}, [], set(), {}
    counter = [0]

    def visit(root):
        # iterative Tarjan
        work = [(root, iter(sorted(succ.get(root, ()))))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            w = next(it, None)
            if w is not None:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(sorted(succ.get(w, ())))))
                elif w in on:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                members = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    members.append(w)
                    if w == v:
                        break
                cyclic = len(members) > 1 or v in succ.get(v, ())
                for w in members:
                    comp[w] = (index[v], cyclic)

    for v in nodes:
        if v not in index:
            visit(v)
    return comp


def check_twinning_s2s(m: Machine) -> TwinningVerdict:
    """Classical twinning property of an S2S, checked exactly on the self-product.

    Delays (reduced pairs of pending outputs) are propagated from the
    initial pairs. Inside a cyclic strongly connected component every
    state pair must receive a single delay per entry point: two different
    delays reached from the same entry mean that some cycle changes the
    delay, which is exactly a failure of the property. Leaving a component
    starts a fresh entry. Only right components of contexts are read, so
    ``m`` should be an S2S; it is trimmed first.

    ``delay_bound`` is the classical bound on delays when the property
    holds; it is reported and also used as a safety net.
    """
    bound = tp_delay_bound(m)
    m = trim(m)
    comp = _product_sccs(m)
    seen = {}
    parent = {}
    todo = deque()

    def enter(pair, delay, via):
        cid, cyclic = comp[pair]
        tag = (cid, pair, delay) if cyclic else (cid, None, delay)
        key = (tag, pair)
        seen[key] = delay
        parent[key] = via
        todo.append(key)

    for p, cp in m.init.items():
        for q, cq in m.init.items():
            key_delay = _reduce(cp.right, cq.right)
            cid, cyclic = comp[(p, q)]
            tag = (cid, (p, q), key_delay) if cyclic else (cid, None, key_delay)
            if ((tag, (p, q))) not in seen:
                enter((p, q), key_delay, None)
    while todo:
        key = todo.popleft()
        tag, (p, q) = key
        u, v = seen[key]
        for a in m.input_alphabet:
            for t1 in m.step(p, a):
                for t2 in m.step(q, a):
                    pair = (t1.dst, t2.dst)
                    delay = _reduce(u + t1.out.right, v + t2.out.right)
                    if comp[pair][0] == tag[0] and comp[pair][1]:
                        nkey = (tag, pair)
                        if nkey in seen:
                            if seen[nkey] != delay:
                                return TwinningVerdict(False, bound, _conflict(
                                    seen, parent, nkey, (key, a), delay))
                            continue
                        seen[nkey] = delay
                        parent[nkey] = (key, a)
                        todo.append(nkey)
                    else:
                        cid, cyclic = comp[pair]
                        ntag = (cid, pair, delay) if cyclic else (cid, None, delay)
                        nkey = (ntag, pair)
                        if nkey in seen:
                            continue
                        seen[nkey] = delay
                        parent[nkey] = (key, a)
                        todo.append(nkey)
                    if sum(map(len, delay)) > bound:
                        return TwinningVerdict(False, bound, _trace(seen, parent, nkey, delay))
    return TwinningVerdict(True, bound)


def _path(parent: dict, key) -> tuple:
    word, pairs = [], [key[1]]
    cur = key
    while parent[cur] is not None:
        cur, a = parent[cur]
        word.append(a)
        pairs.append(cur[1])
    return "".join(reversed(word)), [list(p) for p in reversed(pairs)]


def _trace(seen: dict, parent: dict, key, delay) -> dict:
    word, states = _path(parent, key)
    return {"word": word, "states": states, "delay": list(delay)}


def _conflict(seen: dict, parent: dict, key, via, delay) -> dict:
    """Two runs reaching the same state pair with different delays."""
    word1, states1 = _path(parent, key)
    prev, a = via
    word2, states2 = _path(parent, prev)
    return {"word": word1, "states": states1, "delay": list(seen[key]),
            "other_word": word2 + a, "other_states": states2 + [list(key[1])],
            "other_delay": list(delay)}


def check_tp_after_split(m: Machine, delta: Mapping[str, Context]) -> tuple:
    md = m.with_init(delta)
    return check_twinning_s2s(project_left(md)), check_twinning_s2s(project_right(md))
