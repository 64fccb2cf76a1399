"""Contexts: pairs of words wrapped around a payload.

``c[w]`` is ``c.left + w + c.right``. Concatenation nests the second
context inside the first, so ``(c1 * c2)[w] == c1[c2[w]]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .words import lcp_all, lcs_all, mirror


@dataclass(frozen=True, order=True)
class Context:
    left: str = ""
    right: str = ""

    def __len__(self) -> int:
        return len(self.left) + len(self.right)

    def __repr__(self) -> str:
        return f"({self.left!r}, {self.right!r})"

    @property
    def lateral(self) -> tuple[int, int]:
        """Lateralized length ``(|left|, |right|)``."""
        return len(self.left), len(self.right)

    def apply(self, w: str = "") -> str:
        return self.left + w + self.right

    __call__ = apply

    def __mul__(self, other: "Context") -> "Context":
        return Context(self.left + other.left, other.right + self.right)

    def __pow__(self, n: int) -> "Context":
        if n < 0:
            raise ValueError("negative context power")
        return Context(self.left * n, self.right * n)

    def inverse_apply(self, u: str) -> str | None:
        if len(u) < len(self) or not u.startswith(self.left) or not u.endswith(self.right):
            return None
        return u[len(self.left):len(u) - len(self.right)]

    def mirrored(self) -> "Context":
        """Right-only context carrying the mirror image of the left component."""
        return Context("", mirror(self.left))

    def right_only(self) -> "Context":
        return Context("", self.right)

    def to_json(self) -> dict:
        return {"left": self.left, "right": self.right}


EMPTY = Context()


def apply(c: Context, w: str) -> str:
    return c.apply(w)


def concat(c1: Context, c2: Context) -> Context:
    return c1 * c2


def inverse_apply(c: Context, u: str) -> str | None:
    return c.inverse_apply(u)


def lcc(contexts: Iterable[Context]) -> Context:
    """Longest common context: lcs of the lefts, lcp of the rights."""
    cs = list(contexts)
    if not cs:
        raise ValueError("longest common context of an empty set")
    return Context(lcs_all(c.left for c in cs), lcp_all(c.right for c in cs))


def strip_lcc(entries: Mapping[Hashable, Context] | Iterable[tuple[Hashable, Context]]):
    """Factor the longest common context out of a family of contexts.

    Returns ``(stripped, c)`` where ``stripped[q] * c`` is the original
    context of ``q``.
    """
    items = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
    c = lcc(ctx for _, ctx in items)
    stripped = {
        q: Context(ctx.left[:len(ctx.left) - len(c.left)], ctx.right[len(c.right):])
        for q, ctx in items
    }
    return stripped, c
