"""Hilbert space-filling paths and the 12-tile Hilbert substitution system.

Coordinates are ``(x, y)`` with ``y`` increasing northwards.  A level-``n``
path visits every cell of ``[0, 2**n)**2`` exactly once.

Substitution configurations are integer arrays indexed ``[y, x]`` whose entries
are indices into :data:`ALPHABET` (``-1`` marks an unknown cell).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np

Cell = tuple[int, int]

VARIANTS = ("a", "b", "c", "d")
SIDES = ("N", "E", "S", "W")
STEP = {"N": (0, 1), "E": (1, 0), "S": (0, -1), "W": (-1, 0)}
_SIDE_OF = {v: k for k, v in STEP.items()}

# P_1^a; the other three variants are fixed by `_resolve_variants`.
_BASIC_A: tuple[Cell, ...] = ((0, 0), (0, 1), (1, 1), (1, 0))
# Children of P_{n+1}^a in walking order.
_RULE_A = "baac"


class DerivationError(ValueError):
    pass


def _dihedral() -> list:
    maps = []
    for turns in range(4):
        for flip in (False, True):
            def g(c: Cell, turns=turns, flip=flip) -> Cell:
                x, y = c
                if flip:
                    x, y = y, x
                for _ in range(turns):
                    x, y = 1 - y, x
                return (x, y)
            maps.append(g)
    return maps


def _expand(basic, rules, v, n):
    if n == 1:
        return list(basic[v])
    h = 2 ** (n - 1)
    out = []
    for (qx, qy), child in zip(basic[v], rules[v]):
        out.extend((qx * h + x, qy * h + y) for x, y in _expand(basic, rules, child, n - 1))
    return out


def _is_unit_path(cells: Sequence[Cell]) -> bool:
    return all(abs(p[0] - q[0]) + abs(p[1] - q[1]) == 1 for p, q in zip(cells, cells[1:]))


@lru_cache(maxsize=None)
def _resolve_variants() -> tuple[dict, dict]:
    """Name the dihedral images of P_1^a so every recursion is a connected path.

    Each of b, c, d is some image g(P_1^a); its recursion is g applied to the
    recursion of a.  Exactly one naming keeps all four concatenations
    connected at levels 2 and 3.
    """
    images = {}
    for g in _dihedral():
        images.setdefault(tuple(g(c) for c in _BASIC_A), g)
    others = [p for p in images if p != _BASIC_A]
    found = []
    for b, c, d in itertools.permutations(others, 3):
        basic = {"a": _BASIC_A, "b": b, "c": c, "d": d}
        name_of = {p: k for k, p in basic.items()}
        rules = {}
        for v, p in basic.items():
            g = images[p]
            try:
                rules[v] = "".join(name_of[tuple(g(c) for c in basic[w])] for w in _RULE_A)
            except KeyError:
                break
        else:
            if all(_is_unit_path(_expand(basic, rules, v, n)) for v in VARIANTS for n in (2, 3)):
                found.append((basic, rules))
    if len(found) != 1:
        raise RuntimeError(f"variant naming is not unique ({len(found)} candidates)")
    return found[0]


def basic_path(variant: str) -> list[Cell]:
    """The 4-cell path through the unit 2x2 square for ``variant``."""
    basic, _ = _resolve_variants()
    if variant not in basic:
        raise ValueError(f"unknown Hilbert variant {variant!r}")
    return list(basic[variant])


def recursion(variant: str) -> str:
    """Variants of the four quarter paths of P_{n+1}^variant, in walking order."""
    return _resolve_variants()[1][variant]


def quadrant_children(variant: str) -> dict[Cell, str]:
    """Map quadrant ``(qx, qy)`` in {0,1}^2 to the child variant placed there."""
    return dict(zip(basic_path(variant), recursion(variant)))


@lru_cache(maxsize=32)
def _hilbert_path(variant: str, level: int) -> tuple[Cell, ...]:
    basic, rules = _resolve_variants()
    return tuple(_expand(basic, rules, variant, level))


def hilbert_path(variant: str, level: int) -> list[Cell]:
    if level < 1:
        raise ValueError("level must be >= 1")
    if variant not in VARIANTS:
        raise ValueError(f"unknown Hilbert variant {variant!r}")
    return list(_hilbert_path(variant, level))


# --- substitution system ---------------------------------------------------

class SubstTile(NamedTuple):
    variant: str
    entry: str
    exit: str


def _side(frm: Cell, to: Cell) -> str:
    return _SIDE_OF[(to[0] - frm[0], to[1] - frm[1])]


def _shape(cells: Sequence[Cell]) -> str:
    mx = min(c[0] for c in cells)
    my = min(c[1] for c in cells)
    rel = tuple((x - mx, y - my) for x, y in cells)
    basic, _ = _resolve_variants()
    for v, p in basic.items():
        if rel == p:
            return v
    raise AssertionError("block is not a basic path")


def group_path(cells: Sequence[Cell]) -> list[tuple[Cell, Optional[SubstTile]]]:
    """Group a Hilbert path into its aligned 2x2 blocks.

    Returns ``(block_coordinate, tile)`` per block.  Blocks at the ends of the
    path lack an entry or exit side and get ``tile=None``.
    """
    out = []
    for i in range(0, len(cells), 4):
        blk = cells[i:i + 4]
        pos = (blk[0][0] // 2, blk[0][1] // 2)
        if i == 0 or i + 4 >= len(cells):
            out.append((pos, None))
            continue
        out.append((pos, SubstTile(_shape(blk), _side(blk[0], cells[i - 1]), _side(blk[3], cells[i + 4]))))
    return out


@lru_cache(maxsize=None)
def _alphabet() -> tuple[SubstTile, ...]:
    tiles = set()
    for v in VARIANTS:
        for n in range(2, 6):
            tiles.update(t for _, t in group_path(_hilbert_path(v, n)) if t is not None)
    return tuple(sorted(tiles))


def alphabet() -> tuple[SubstTile, ...]:
    """Tiles realised by grouping Hilbert paths into 2x2 blocks (12 of them)."""
    return _alphabet()


ALPHABET_SIZE = 12


def tile_index(tile: SubstTile) -> int:
    try:
        return _alphabet().index(tile)
    except ValueError:
        raise ValueError(f"{tile!r} is not in the substitution alphabet") from None


@lru_cache(maxsize=None)
def _rho_table() -> np.ndarray:
    tiles = _alphabet()
    table = np.empty((len(tiles), 2, 2), dtype=np.int64)
    for k, t in enumerate(tiles):
        level2 = _hilbert_path(t.variant, 2)
        blocks = [level2[i:i + 4] for i in range(0, 16, 4)]
        for i, (blk, child) in enumerate(zip(blocks, recursion(t.variant))):
            entry = t.entry if i == 0 else _side(blk[0], blocks[i - 1][3])
            exit_ = t.exit if i == 3 else _side(blk[3], blocks[i + 1][0])
            qx, qy = blk[0][0] // 2, blk[0][1] // 2
            table[k, qy, qx] = tile_index(SubstTile(child, entry, exit_))
    table.setflags(write=False)
    return table


def substitute(tile) -> np.ndarray:
    """The 2x2 block (indexed ``[y, x]``) that ``tile`` expands to."""
    k = tile if isinstance(tile, (int, np.integer)) else tile_index(tile)
    if not 0 <= k < len(_alphabet()):
        raise ValueError(f"unknown tile index {k}")
    return _rho_table()[k].copy()


def substitute_config(config: np.ndarray, times: int = 1) -> np.ndarray:
    """Apply the substitution to every cell of a configuration."""
    out = np.asarray(config)
    table = _rho_table()
    for _ in range(times):
        h, w = out.shape
        out = table[out].transpose(0, 2, 1, 3).reshape(2 * h, 2 * w)
    return out


def rho_power(tile, n: int) -> np.ndarray:
    k = tile if isinstance(tile, (int, np.integer)) else tile_index(tile)
    return substitute_config(np.array([[k]]), n)


def admissible_blocks(level: int, window: tuple[int, int]) -> set[tuple[tuple[int, ...], ...]]:
    """All ``w x h`` sub-configurations of rho^level(s) over every tile s.

    Blocks are returned as tuples of rows (``[y][x]``) of tile indices.
    """
    w, h = window
    side = 2 ** level
    if w < 1 or h < 1 or w > side or h > side:
        raise ValueError(f"window {w}x{h} does not fit in {side}x{side}")
    out = set()
    for k in range(len(_alphabet())):
        big = rho_power(k, level)
        for y in range(side - h + 1):
            for x in range(side - w + 1):
                out.add(tuple(map(tuple, big[y:y + h, x:x + w].tolist())))
    return out


def _links_consistent(config: np.ndarray) -> bool:
    """Every entry/exit side that points at a known neighbour is answered."""
    tiles = _alphabet()
    h, w = config.shape
    for y in range(h):
        for x in range(w):
            k = config[y, x]
            if k < 0:
                continue
            t = tiles[k]
            for side, back in ((t.exit, "entry"), (t.entry, "exit")):
                dx, dy = STEP[side]
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h and config[ny, nx] >= 0:
                    other = tiles[config[ny, nx]]
                    if _side((nx, ny), (x, y)) != getattr(other, back):
                        return False
    return True


def _compatible(a: int, b: int, side: str) -> bool:
    """Can tile ``b`` sit on ``side`` of tile ``a``?"""
    tiles = _alphabet()
    ta, tb = tiles[a], tiles[b]
    opp = {"N": "S", "S": "N", "E": "W", "W": "E"}[side]
    if (ta.exit == side) != (tb.entry == opp):
        return False
    if (ta.entry == side) != (tb.exit == opp):
        return False
    return True


def _try_shift(config: np.ndarray, sx: int, sy: int) -> Optional[np.ndarray]:
    table = _rho_table()
    ntiles = table.shape[0]
    h, w = config.shape
    bw = (w + sx + 1) // 2
    bh = (h + sy + 1) // 2
    doms: dict[tuple[int, int], set[int]] = {}
    for by in range(bh):
        for bx in range(bw):
            cands = set()
            seen = False
            for k in range(ntiles):
                ok = True
                for qy in range(2):
                    for qx in range(2):
                        x, y = 2 * bx + qx - sx, 2 * by + qy - sy
                        if 0 <= x < w and 0 <= y < h and config[y, x] >= 0:
                            seen = True
                            if config[y, x] != table[k, qy, qx]:
                                ok = False
                if ok:
                    cands.add(k)
            if seen:
                if not cands:
                    return None
                doms[(bx, by)] = cands
    # arc consistency over the entry/exit links, then a backtracking search
    changed = True
    while changed:
        changed = False
        for (bx, by), dom in doms.items():
            for side, (dx, dy) in STEP.items():
                other = doms.get((bx + dx, by + dy))
                if other is None:
                    continue
                keep = {a for a in dom if any(_compatible(a, b, side) for b in other)}
                if not keep:
                    return None
                if keep != dom:
                    dom.intersection_update(keep)
                    changed = True
    order = sorted(doms, key=lambda c: (c[1], c[0]))
    pick: dict[tuple[int, int], int] = {}

    def search(i: int) -> bool:
        if i == len(order):
            return True
        c = order[i]
        for k in sorted(doms[c]):
            if all(_compatible(k, pick[(c[0] + dx, c[1] + dy)], side)
                   for side, (dx, dy) in STEP.items() if (c[0] + dx, c[1] + dy) in pick):
                pick[c] = k
                if search(i + 1):
                    return True
                del pick[c]
        return False

    if not search(0):
        return None
    pre = np.full((bh, bw), -1, dtype=np.int64)
    for (bx, by), k in pick.items():
        pre[by, bx] = k
    return pre


def derivation_shifts(config: np.ndarray) -> list[tuple[tuple[int, int], np.ndarray]]:
    """Every shift class in {0,1}^2 under which the 2x2 grouping inverts rho."""
    config = np.asarray(config, dtype=np.int64)
    out = []
    for sy in range(2):
        for sx in range(2):
            pre = _try_shift(config, sx, sy)
            if pre is not None:
                out.append(((sx, sy), pre))
    return out


def derive(config: np.ndarray) -> tuple[tuple[int, int], np.ndarray]:
    """Recover the unique shift and the rho-preimage of a configuration.

    Cell ``(x, y)`` of the input is cell ``(x + sx, y + sy)`` of
    ``substitute_config(preimage)``.
    """
    config = np.asarray(config, dtype=np.int64)
    if not _links_consistent(config):
        raise DerivationError("not admissible")
    found = derivation_shifts(config)
    if not found:
        raise DerivationError("not admissible")
    if len(found) > 1:
        raise DerivationError("derivation not unique")
    return found[0]


# --- square filling --------------------------------------------------------

def check_square_fill(path: Sequence[Cell], n: int) -> Optional[tuple[int, int]]:
    """Smallest ``(i, j)`` (1-based, ``j = i + 4**n``) such that the cells
    ``p_i .. p_{j-1}`` are exactly an axis-aligned ``2**n x 2**n`` square."""
    size = 4 ** n
    if len(path) < size:
        return None
    pts = np.asarray(path, dtype=np.int64).reshape(-1, 2)
    xs = np.lib.stride_tricks.sliding_window_view(pts[:, 0], size)
    ys = np.lib.stride_tricks.sliding_window_view(pts[:, 1], size)
    side = 2 ** n - 1
    hit = (xs.max(axis=1) - xs.min(axis=1) == side) & (ys.max(axis=1) - ys.min(axis=1) == side)
    for i in np.flatnonzero(hit):
        if len(set(map(tuple, pts[i:i + size].tolist()))) == size:
            return (int(i) + 1, int(i) + 1 + size)
    return None


def is_path(cells: Sequence[Cell]) -> bool:
    """Distinct cells joined by unit steps."""
    return len(set(cells)) == len(cells) and _is_unit_path(cells)


def fill_starts(path: Sequence[Cell], n: int) -> np.ndarray:
    """``out[i]`` is true when the 0-based segment ``path[i : i + 4**n]`` fills a square."""
    size = 4 ** n
    pts = np.asarray(path, dtype=np.int64).reshape(-1, 2)
    if len(pts) < size:
        return np.zeros(0, dtype=bool)
    xs = np.lib.stride_tricks.sliding_window_view(pts[:, 0], size)
    ys = np.lib.stride_tricks.sliding_window_view(pts[:, 1], size)
    side = 2 ** n - 1
    out = (xs.max(axis=1) - xs.min(axis=1) == side) & (ys.max(axis=1) - ys.min(axis=1) == side)
    # a box of the right size holding 4**n cells is filled iff the cells are distinct
    for i in np.flatnonzero(out):
        out[i] = len(set(map(tuple, pts[i:i + size].tolist()))) == size
    return out


def square_fill_counterexamples(path: Sequence[Cell], n: int) -> list[tuple[int, int]]:
    """Every sub-path ``path[s:e]`` with ``e - s >= 2 * 4**n`` that contains no
    square-filling segment of ``4**n`` cells (0-based, ``e`` exclusive)."""
    size = 4 ** n
    ok = fill_starts(path, n).astype(np.int64)
    prefix = np.concatenate([[0], np.cumsum(ok)])
    bad = []
    total = len(path)
    for s in range(total):
        for e in range(s + 2 * size, total + 1):
            # segment starts s .. e - size
            if prefix[e - size + 1] - prefix[s] == 0:
                bad.append((s, e))
    return bad
