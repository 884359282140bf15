"""Majority vote on the free group with two generators.

Words are strings over ``a b A B`` where upper case is the inverse letter.
Patterns assign 0/1 to every reduced word of length at most ``r``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional

LETTERS = "abAB"
_INV = {"a": "A", "A": "a", "b": "B", "B": "b"}
VOTERS = ("a", "b", "A")
ENUM_BUDGET = 25


class BudgetExceeded(ValueError):
    pass


def inverse(w: str) -> str:
    return "".join(_INV[c] for c in reversed(w))


def reduce_word(w: str) -> str:
    out: list[str] = []
    for c in w:
        if c not in _INV:
            raise ValueError(f"bad letter {c!r}")
        if out and out[-1] == _INV[c]:
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def mul(u: str, v: str) -> str:
    return reduce_word(u + v)


def _key(w: str):
    return (len(w), [LETTERS.index(c) for c in w])


def ball(radius: int) -> list[str]:
    """Reduced words of length ``<= radius`` in canonical order."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    words = [""]
    layer = [""]
    for _ in range(radius):
        layer = [w + c for w in layer for c in LETTERS if not (w and w[-1] == _INV[c])]
        words.extend(layer)
    return sorted(words, key=_key)


@dataclass
class BallPattern:
    radius: int
    values: dict

    def __post_init__(self):
        expect = set(ball(self.radius))
        if set(self.values) != expect:
            raise ValueError("pattern must assign every word of the ball")

    def __getitem__(self, w: str) -> int:
        return self.values[reduce_word(w)]


def majority(x: int, y: int, z: int) -> int:
    return 1 if x + y + z >= 2 else 0


def majority_step(pattern: BallPattern) -> BallPattern:
    """``(Mx)_w = maj(x_wa, x_wb, x_wA)`` on the ball one smaller."""
    if pattern.radius < 1:
        raise ValueError("need radius >= 1")
    vals = {w: majority(*(pattern[mul(w, g)] for g in VOTERS)) for w in ball(pattern.radius - 1)}
    return BallPattern(pattern.radius - 1, vals)


def exact_event_probability(cells: Iterable[str], predicate: Callable[[Mapping[str, int]], bool]) -> Fraction:
    """Probability of ``predicate`` under i.i.d. fair bits on ``cells``."""
    cells = sorted({reduce_word(c) for c in cells}, key=_key)
    if len(cells) > ENUM_BUDGET:
        raise BudgetExceeded(f"{len(cells)} cells exceed the enumeration budget of {ENUM_BUDGET}")
    hits = 0
    for bits in itertools.product((0, 1), repeat=len(cells)):
        if predicate(dict(zip(cells, bits))):
            hits += 1
    return Fraction(hits, 2 ** len(cells))


def image_value(x: Mapping[str, int], w: str) -> int:
    return majority(*(x[mul(w, g)] for g in VOTERS))


def event_a(x: Mapping[str, int]) -> bool:
    """A: the cells at ``a`` and ``a^-1`` disagree."""
    return x["a"] != x["A"]


def event_m_inv_a(x: Mapping[str, int]) -> bool:
    """M^-1 A: the image disagrees at ``a`` and ``a^-1``."""
    return image_value(x, "a") != image_value(x, "A")


# cells the image at a and a^-1 depends on
M_INV_A_CELLS = ("", "AA", "Ab", "aa", "ab")


def _split_events(x: Mapping[str, int]) -> tuple[bool, bool]:
    left = x[""] != x["AA"] and x[""] != x["Ab"]
    right = x[""] != x["aa"] and x[""] != x["ab"]
    return left, right


def event_readings() -> dict[str, Fraction]:
    """Exact probabilities of M^-1 A and of the ways of combining the two
    one-sided disagreement events it is built from."""
    cells = M_INV_A_CELLS
    return {
        "A": exact_event_probability(("a", "A"), event_a),
        "M^-1 A": exact_event_probability(cells, event_m_inv_a),
        "symmetric difference": exact_event_probability(cells, lambda x: _split_events(x)[0] != _split_events(x)[1]),
        "union": exact_event_probability(cells, lambda x: any(_split_events(x))),
        "intersection": exact_event_probability(cells, lambda x: all(_split_events(x))),
    }


def _children(w: str) -> list[str]:
    return [mul(w, g) for g in VOTERS]


def preimage_on_tree(target: BallPattern, window: Optional[Iterable[str]] = None) -> BallPattern:
    """A radius ``r+1`` pattern whose majority image matches ``target`` on ``window``.

    Voting edges ``w -> wa, wb, wA`` live on the Cayley tree.  Rooting the tree
    at the identity, every word owns the voters that extend it by one letter:
    all three for the root, and at least two otherwise, enough to carry the
    vote.  Distinct words own disjoint voters, so copying each target value
    onto the owned voters never conflicts.  Everything else is 0.
    """
    r = target.radius
    window = ball(r) if window is None else sorted({reduce_word(w) for w in window}, key=_key)
    x = {w: 0 for w in ball(r + 1)}
    for w in window:
        if len(w) > r:
            raise ValueError(f"{w!r} lies outside the target ball")
        for c in _children(w):
            if len(c) > len(w):
                x[c] = target.values[w]
    return BallPattern(r + 1, x)
