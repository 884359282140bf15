"""The group-valued automaton over a fixed directed tiling.

At each active cell the group element is replaced by ``γ_n + γ_{succ(n)}``;
every other cell is left alone.  The tiling itself never changes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .tiles import Grid


class CyclicDependency(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group on ``{0, .., order-1}`` with identity 0 and multiplication table ``op``."""

    op: np.ndarray
    name: str = ""

    def __post_init__(self):
        op = np.asarray(self.op, dtype=np.int64)
        n = op.shape[0]
        if op.shape != (n, n) or op.min() < 0 or op.max() >= n:
            raise ValueError("group table must be a square table over 0..order-1")
        object.__setattr__(self, "op", op)
        if not (np.array_equal(op[0], np.arange(n)) and np.array_equal(op[:, 0], np.arange(n))):
            raise ValueError("element 0 is not the identity")
        inv = np.argmax(op == 0, axis=1)
        if not np.all(op[np.arange(n), inv] == 0):
            raise ValueError("some element has no inverse")
        object.__setattr__(self, "inverse", inv)

    @property
    def order(self) -> int:
        return self.op.shape[0]

    @property
    def identity(self) -> int:
        return 0

    def is_associative(self) -> bool:
        return bool(np.array_equal(_assoc_lhs(self.op), _assoc_rhs(self.op)))

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.op, self.op.T))

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.op, other.op)

    def __hash__(self):
        return hash(self.op.tobytes())


def _assoc_lhs(op):
    # (a*b)*c indexed [a, b, c]
    return op[op[:, :, None], np.arange(op.shape[0])[None, None, :]]


def _assoc_rhs(op):
    # a*(b*c) indexed [a, b, c]
    n = op.shape[0]
    return op[np.arange(n)[:, None, None], op[None, :, :]]


def cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise ValueError("order must be >= 1")
    a = np.arange(m)
    return FiniteGroup((a[:, None] + a[None, :]) % m, f"Zm:{m}" if m != 2 else "Z2")


def product(*groups: FiniteGroup) -> FiniteGroup:
    """Direct product; elements are mixed-radix numbers, first factor most significant."""
    if not groups:
        return cyclic(1)
    orders = [g.order for g in groups]
    elems = list(itertools.product(*[range(k) for k in orders]))

    def encode(t):
        v = 0
        for x, k in zip(t, orders):
            v = v * k + x
        return v

    op = np.empty((len(elems), len(elems)), dtype=np.int64)
    for i, s in enumerate(elems):
        for j, t in enumerate(elems):
            op[i, j] = encode(tuple(int(g.op[x, y]) for g, x, y in zip(groups, s, t)))
    return FiniteGroup(op, "product:[" + ",".join(g.name for g in groups) + "]")


def parse_group(spec: str) -> FiniteGroup:
    """``Z2``, ``Zm:<m>`` or ``product:[Z2,Zm:3]``."""
    spec = spec.strip()
    if spec == "Z2":
        return cyclic(2)
    if spec.startswith("Zm:"):
        return cyclic(int(spec[3:]))
    if spec.startswith("product:[") and spec.endswith("]"):
        inner = spec[len("product:["):-1]
        parts, depth, cur = [], 0, ""
        for ch in inner:
            if ch == "," and depth == 0:
                parts.append(cur)
                cur = ""
                continue
            depth += ch == "["
            depth -= ch == "]"
            cur += ch
        if cur:
            parts.append(cur)
        return product(*[parse_group(p) for p in parts])
    raise ValueError(f"unknown group {spec!r}")


@dataclass
class Configuration:
    grid: Grid
    group: FiniteGroup
    gamma: np.ndarray
    phase: int = 0
    m: int = 1

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=np.int64)
        if self.gamma.shape != self.grid.cells.shape:
            raise ValueError("gamma must have the grid's shape")
        if self.gamma.size and (self.gamma.min() < 0 or self.gamma.max() >= self.group.order):
            raise ValueError("gamma entry outside the group")
        if not (self.m >= 1 and 0 <= self.phase < self.m):
            raise ValueError("phase must lie in [0, m)")


def _apply(group: FiniteGroup, gamma: np.ndarray, succ: np.ndarray) -> np.ndarray:
    flat = gamma.reshape(-1)
    out = kernels.step_batch(group.op, flat[None, :], succ)[0]
    return out.reshape(gamma.shape)


def step(config: Configuration) -> Configuration:
    _, succ = config.grid.successors()
    return replace(config, gamma=_apply(config.group, config.gamma, succ))


def step_sliced(config: Configuration, m: Optional[int] = None) -> Configuration:
    """Update only on phase 0; the phase counter runs modulo ``m``."""
    m = config.m if m is None else m
    if m < 1 or not 0 <= config.phase < m:
        raise ValueError("need m >= 1 and 0 <= phase < m")
    gamma = config.gamma
    if config.phase == 0:
        _, succ = config.grid.successors()
        gamma = _apply(config.group, gamma, succ)
    return replace(config, gamma=gamma, phase=(config.phase + 1) % m, m=m)


def iterate(config: Configuration, times: int, sliced: bool = False) -> Configuration:
    for _ in range(times):
        config = step_sliced(config) if sliced else step(config)
    return config


def _cells(window: Iterable) -> list[tuple[int, int]]:
    return [(int(x), int(y)) for x, y in window]


def preimage(target: Configuration, window: Iterable) -> Configuration:
    """A configuration whose image agrees with ``target`` on ``window``.

    Cells are solved starting from the end of each path inside the window:
    ``x_n = y_n - x_{succ(n)}``.  Outside the window γ is the identity.
    """
    grid, group = target.grid, target.group
    h, w = grid.cells.shape
    cells = _cells(window)
    for x, y in cells:
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError(f"window cell {(x, y)} outside the grid")
    _, succ = grid.successors()
    in_f = {y * w + x for x, y in cells}
    flat_t = target.gamma.reshape(-1)
    out = np.zeros(h * w, dtype=np.int64)
    depth: dict[int, int] = {}

    def remaining(i: int) -> int:
        # length of the in-window path after i, iteratively with cycle detection
        chain = []
        on_chain = set()
        j = i
        while j not in depth:
            s = succ[j]
            if s < 0 or s not in in_f:
                depth[j] = 0
                break
            if j in on_chain:
                raise CyclicDependency("cyclic dependency")
            chain.append(j)
            on_chain.add(j)
            j = s
        d = depth[j]
        for k in reversed(chain):
            if k in depth:
                d = depth[k]
                continue
            d += 1
            depth[k] = d
        return depth[i]

    for i in in_f:
        remaining(i)
    for i in sorted(in_f, key=lambda i: (depth[i], i)):
        s = succ[i]
        if s >= 0 and s in in_f:
            out[i] = group.op[flat_t[i], group.inverse[out[s]]]
        else:
            out[i] = flat_t[i]
    return replace(target, gamma=out.reshape(h, w), phase=0)


def dependency_set(grid: Grid, window: Iterable, horizon: int) -> list[tuple[int, int]]:
    """Cells reachable from the window in at most ``horizon - 1`` active steps."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    h, w = grid.cells.shape
    _, succ = grid.successors()
    seen = {y * w + x for x, y in _cells(window)}
    frontier = set(seen)
    for _ in range(horizon - 1):
        nxt = {int(succ[i]) for i in frontier if succ[i] >= 0} - seen
        if not nxt:
            break
        seen |= nxt
        frontier = nxt
    return sorted(((i % w, i // w) for i in seen), key=lambda c: (c[1], c[0]))


@dataclass
class SpaceTimeWord:
    window: list
    horizon: int
    tiles: tuple
    entries: list = field(default_factory=list)

    def key(self) -> tuple:
        return (self.tiles, tuple(tuple(e) for e in self.entries))


def trajectory_word(config: Configuration, window: Iterable, horizon: int, sliced: bool = False) -> SpaceTimeWord:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    cells = _cells(window)
    ys = [y for _, y in cells]
    xs = [x for x, _ in cells]
    tiles = tuple(int(t) for t in config.grid.cells[ys, xs])
    entries = []
    for t in range(horizon):
        if t:
            config = step_sliced(config) if sliced else step(config)
        entries.append(tuple(int(g) for g in config.gamma[ys, xs]))
    return SpaceTimeWord(cells, horizon, tiles, entries)
