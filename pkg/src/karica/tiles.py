"""Directed tile sets: the constraint-free arrow set and Kari's Hilbert tiles.

Grids are numpy arrays indexed ``[y, x]`` with row 0 at the south edge, so
``N`` is ``+y``.  A cell is *valid* when the tile set's local rules hold on its
neighbourhood; the direction of each tile points to the cell's successor.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .hilbert import hilbert_path, quadrant_children

DIRS = ("N", "E", "S", "W")
DVEC = {"N": (0, 1), "E": (1, 0), "S": (0, -1), "W": (-1, 0)}
OPP = {"N": "S", "S": "N", "E": "W", "W": "E"}
ORIENTS = ("NE", "NW", "SE", "SW")
LABELS = ("a", "b", "c", "d")
BASICS = ("blank_cross", "bold_cross", "blank_arm", "bold_arm", "mixed_arm")

_QUAD = {"NE": (1, 1), "NW": (0, 1), "SE": (1, 0), "SW": (0, 0)}
_QUAD_NAME = {v: k for k, v in _QUAD.items()}
_OPP_ORIENT = {"NE": "SW", "SW": "NE", "NW": "SE", "SE": "NW"}


class DirectedTileSet:
    """Finite tile alphabet with a forward direction per tile."""

    name = "abstract"
    radius = 0

    def __init__(self, vectors: np.ndarray, symbols: Sequence[str]):
        self.vectors = np.asarray(vectors, dtype=np.int64)
        self.symbols = tuple(symbols)
        self.dimension = self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.vectors)

    def direction(self, tile: int) -> tuple:
        return tuple(int(v) for v in self.vectors[tile])

    def vectors2d(self) -> np.ndarray:
        if self.dimension > 2:
            raise ValueError("grids are two-dimensional")
        out = np.zeros((len(self), 2), dtype=np.int64)
        out[:, :self.dimension] = self.vectors
        return out

    def valid_mask(self, cells: np.ndarray, topology: str = "window") -> np.ndarray:
        raise NotImplementedError


class TableTileSet(DirectedTileSet):
    """Tile set whose validity depends only on the tile at the cell (radius 0)."""

    def __init__(self, name: str, vectors, symbols, valid=None):
        super().__init__(vectors, symbols)
        self.name = name
        self.valid = np.ones(len(self), dtype=bool) if valid is None else np.asarray(valid, dtype=bool)

    def valid_mask(self, cells, topology="window"):
        return self.valid[np.asarray(cells)]


def simple_tileset(d: int = 2) -> TableTileSet:
    """``d`` arrow tiles pointing along ``+e_1 .. +e_d``, no adjacency rules."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    symbols = {1: ["→"], 2: ["→", "↑"]}.get(d) or [f"+e{i + 1}" for i in range(d)]
    return TableTileSet(f"simple{d}", np.eye(d, dtype=np.int64), symbols)


def stop_tileset() -> TableTileSet:
    """The two arrows plus an inert tile that is never valid.

    Handy for building finite chains: a path runs into the stop tile and ends.
    """
    return TableTileSet("simple2stop", [[1, 0], [0, 1], [1, 0]], ["→", "↑", "■"], [True, True, False])


# --- Kari tiles -------------------------------------------------------------

class KariTile(NamedTuple):
    basic: str
    arm_direction: str = ""
    cross_orientation: str = ""
    principal_orientation: str = ""
    # (upper, lower) for horizontal arms, (left, right) for vertical ones
    side_orientations: tuple = ()
    # crosses: (label,); arms: (principal, side0, side1)
    hilbert_labels: tuple = ()
    side_kind: str = ""
    # (NW, NE, SE, SW)
    corner_parity: tuple = (0, 0, 1, 1)
    h_parity: int = 0
    v_parity: int = 0
    direction_label: str = "N"

    @property
    def is_cross(self) -> bool:
        return self.basic.endswith("cross")

    @property
    def is_vertical_arm(self) -> bool:
        return self.arm_direction in ("N", "S")

    @property
    def is_horizontal_arm(self) -> bool:
        return self.arm_direction in ("E", "W")


def arm_sides(facing: str) -> tuple[str, str]:
    """Sides carrying the two side arrows, in ``side_orientations`` order."""
    return ("N", "S") if facing in ("E", "W") else ("W", "E")


def toward_line_sides(facing: str) -> list[tuple[str, str]]:
    """Side orientations allowed on blank and bold arms."""
    if facing in ("E", "W"):
        return [("S" + x, "N" + x) for x in "EW"]
    return [(y + "E", y + "W") for y in "NS"]


def away_sides(facing: str) -> tuple[str, str]:
    """Side orientations of a mixed arm: the two children flanking the arm."""
    if facing in ("E", "W"):
        return ("N" + facing, "S" + facing)
    return (facing + "W", facing + "E")


_MIXED_QUADS = {"E": ((1, 1), (1, 0)), "W": ((0, 1), (0, 0)), "N": ((0, 1), (1, 1)), "S": ((0, 0), (1, 0))}


def mixed_side_labels(label: str, facing: str) -> tuple[str, str]:
    kids = quadrant_children(label)
    return tuple(kids[q] for q in _MIXED_QUADS[facing])


def corner_bits(t: int) -> tuple:
    return (t, t, 1 - t, 1 - t)


@lru_cache(maxsize=None)
def enumerate_kari_tiles() -> tuple[KariTile, ...]:
    """Every Kari tile, in canonical sorted order (the order defines tile ids)."""
    tiles = []
    nonblank_hv = ((0, 1), (1, 0), (1, 1))
    for t, direc in itertools.product((0, 1), DIRS):
        cb = corner_bits(t)
        for o, lab in itertools.product(ORIENTS, LABELS):
            tiles.append(KariTile("blank_cross", "", o, "", (), (lab,), "", cb, 0, 0, direc))
            for h, v in nonblank_hv:
                tiles.append(KariTile("bold_cross", "", o, "", (), (lab,), "", cb, h, v, direc))
        for facing, po, pl in itertools.product(DIRS, ORIENTS, LABELS):
            for h, v in nonblank_hv:
                for basic, kind in (("blank_arm", "blank"), ("bold_arm", "bold")):
                    for sides in toward_line_sides(facing):
                        for s0, s1 in itertools.product(LABELS, LABELS):
                            tiles.append(KariTile(basic, facing, "", po, sides, (pl, s0, s1), kind, cb, h, v, direc))
                for kind in ("blank", "bold"):
                    tiles.append(KariTile("mixed_arm", facing, "", po, away_sides(facing),
                                          (pl,) + mixed_side_labels(pl, facing), kind, cb, h, v, direc))
    return tuple(sorted(tiles))


_ROT_DIR = {"N": "S", "S": "N", "E": "W", "W": "E"}
_ROT_LABEL = {"a": "d", "d": "a", "b": "c", "c": "b"}


def rotate180(tile: KariTile) -> KariTile:
    """Half-turn image of a tile (Hilbert labels a<->d, b<->c follow the paths)."""
    rot_o = lambda o: _ROT_DIR[o[0]] + _ROT_DIR[o[1]]
    labels = tuple(_ROT_LABEL[x] for x in tile.hilbert_labels)
    sides = tuple(rot_o(o) for o in tile.side_orientations)
    if tile.arm_direction:
        # the upper/left side becomes the lower/right one
        sides = sides[::-1]
        labels = (labels[0], labels[2], labels[1])
    t = tile.corner_parity[0]
    return tile._replace(
        arm_direction=_ROT_DIR.get(tile.arm_direction, ""),
        cross_orientation=rot_o(tile.cross_orientation) if tile.cross_orientation else "",
        principal_orientation=rot_o(tile.principal_orientation) if tile.principal_orientation else "",
        side_orientations=sides,
        hilbert_labels=labels,
        corner_parity=corner_bits(1 - t),
        direction_label=_ROT_DIR[tile.direction_label],
    )


def emitted_arrows(tile: KariTile) -> dict[str, tuple]:
    """Per side: ``(kind, orientation, label, is_head)`` with kind 0 blank, 1 bold."""
    if tile.is_cross:
        kind = 0 if tile.basic == "blank_cross" else 1
        return {s: (kind, tile.cross_orientation, tile.hilbert_labels[0], 1) for s in DIRS}
    d = tile.arm_direction
    po, (pl, l0, l1) = tile.principal_orientation, tile.hilbert_labels
    sk = 0 if tile.side_kind == "blank" else 1
    s0, s1 = arm_sides(d)
    return {
        d: (1, po, pl, 1),
        OPP[d]: (1, po, pl, 0),
        s0: (sk, tile.side_orientations[0], l0, 0),
        s1: (sk, tile.side_orientations[1], l1, 0),
    }


def _edge_code(kind, orient, label, head) -> int:
    return ((kind * 4 + ORIENTS.index(orient)) * 4 + LABELS.index(label)) * 2 + head


def rule6_masks(tile: KariTile, variant: str = "b") -> tuple[int, int]:
    """Direction bitmasks this tile licenses for a blank cross to its SE / NW.

    Returns ``(as_nw_neighbour, as_se_neighbour)``; bit ``i`` stands for ``DIRS[i]``.
    """
    bit = {d: 1 << i for i, d in enumerate(DIRS)}
    nw = se = 0
    lab = tile.hilbert_labels
    bold = tile.basic == "bold_cross"
    if (bold and lab[0] == "b") or (tile.is_vertical_arm and lab[2] in "ad"):
        nw |= bit["N"]
    if (bold and lab[0] == "d") or (tile.is_horizontal_arm and lab[2] in "bc"):
        nw |= bit["W"]
    if (bold and lab[0] == "c") or (tile.is_vertical_arm and lab[1] in "ad"):
        se |= bit["S"]
    if variant == "b":
        if (bold and lab[0] == "a") or (tile.is_horizontal_arm and lab[1] in "bc"):
            se |= bit["E"]
    elif variant == "a":
        if (bold and lab[0] == "a") or (tile.is_horizontal_arm and lab[2] in "bc"):
            se |= bit["W"]
    else:
        raise ValueError(f"unknown rule-6 variant {variant!r}")
    return nw, se


def _shifted(cells: np.ndarray, topology: str):
    """Moore-neighbour views of ``cells`` over its last two axes."""
    mode = "wrap" if topology == "torus" else "edge"
    pad = [(0, 0)] * (cells.ndim - 2) + [(1, 1), (1, 1)]
    p = np.pad(cells, pad, mode=mode)
    v = lambda dy, dx: p[..., 1 + dy:p.shape[-2] - 1 + dy, 1 + dx:p.shape[-1] - 1 + dx]
    return {
        "C": v(0, 0), "N": v(1, 0), "S": v(-1, 0), "E": v(0, 1), "W": v(0, -1),
        "NE": v(1, 1), "NW": v(1, -1), "SE": v(-1, 1), "SW": v(-1, -1),
    }


class KariTileSet(DirectedTileSet):
    """Kari's directed tiles with rules 1-6 on the Moore window."""

    radius = 1

    def __init__(self, rule6_variant: str = "b"):
        tiles = enumerate_kari_tiles()
        super().__init__([DVEC[t.direction_label] for t in tiles], [str(i) for i in range(len(tiles))])
        self.name = "kari"
        self.rule6_variant = rule6_variant
        self.tiles = tiles
        self._index = {t: i for i, t in enumerate(tiles)}
        n = len(tiles)
        self.code = np.empty((n, 4), dtype=np.int64)
        self.corners = np.empty((n, 4), dtype=np.int8)
        self.hpar = np.empty(n, dtype=np.int8)
        self.vpar = np.empty(n, dtype=np.int8)
        self.blank = np.zeros(n, dtype=bool)
        self.dir = np.empty(n, dtype=np.int8)
        self.nw_mask = np.empty(n, dtype=np.int8)
        self.se_mask = np.empty(n, dtype=np.int8)
        for i, t in enumerate(tiles):
            em = emitted_arrows(t)
            self.code[i] = [_edge_code(*em[s]) for s in DIRS]
            self.corners[i] = t.corner_parity
            self.hpar[i], self.vpar[i] = t.h_parity, t.v_parity
            self.blank[i] = t.basic == "blank_cross"
            self.dir[i] = DIRS.index(t.direction_label)
            self.nw_mask[i], self.se_mask[i] = rule6_masks(t, rule6_variant)

    def tile_id(self, tile: KariTile) -> int:
        try:
            return self._index[tile]
        except KeyError:
            raise ValueError(f"not a Kari tile: {tile!r}") from None

    def __getitem__(self, i: int) -> KariTile:
        return self.tiles[int(i)]

    def rule_masks(self, cells: np.ndarray, topology: str = "window") -> dict[str, np.ndarray]:
        """Per-rule validity over the last two axes of ``cells``."""
        cells = np.asarray(cells)
        nb = _shifted(cells, topology)
        c = nb["C"]
        code, cb, hp, vp = self.code, self.corners, self.hpar, self.vpar
        n_, e_, s_, w_ = range(4)
        arrows = ((code[c, n_] ^ code[nb["N"], s_]) == 1) & ((code[c, s_] ^ code[nb["S"], n_]) == 1)
        arrows &= ((code[c, e_] ^ code[nb["E"], w_]) == 1) & ((code[c, w_] ^ code[nb["W"], e_]) == 1)
        # corner bits (NW, NE, SE, SW) = 0..3; each vertex is shared by four tiles
        NW, NE, SE, SW = range(4)
        corner = np.ones(c.shape, dtype=bool)
        for mine, others in (
            (NW, (("W", NE), ("N", SW), ("NW", SE))),
            (NE, (("E", NW), ("N", SE), ("NE", SW))),
            (SE, (("E", SW), ("S", NE), ("SE", NW))),
            (SW, (("W", SE), ("S", NW), ("SW", NE))),
        ):
            ref = cb[c, mine]
            for key, k in others:
                corner &= cb[nb[key], k] == ref
        parity = (hp[c] != hp[nb["E"]]) & (hp[c] != hp[nb["W"]]) & (hp[c] == hp[nb["N"]]) & (hp[c] == hp[nb["S"]])
        parity &= (vp[c] != vp[nb["N"]]) & (vp[c] != vp[nb["S"]]) & (vp[c] == vp[nb["E"]]) & (vp[c] == vp[nb["W"]])
        d = self.dir[c]
        allowed = self.nw_mask[nb["NW"]] | self.se_mask[nb["SE"]]
        ok_blank = ((allowed >> d) & 1).astype(bool)
        pointed = np.zeros(c.shape, dtype=bool)
        agree = np.ones(c.shape, dtype=bool)
        for key in DIRS:
            other = nb[key]
            # a blank cross on side `key` points here iff its direction is OPP[key]
            hit = self.blank[other] & (self.dir[other] == DIRS.index(OPP[key]))
            pointed |= hit
            agree &= ~hit | (self.dir[other] == d)
        ok_other = np.where(pointed, agree, d == 0)
        direction = np.where(self.blank[c], ok_blank, ok_other)
        out = {"arrows": arrows, "corner_parity": corner, "parity": parity, "direction": direction}
        if topology != "torus":
            for m in out.values():
                m[..., 0, :] = m[..., -1, :] = False
                m[..., :, 0] = m[..., :, -1] = False
        return out

    def valid_mask(self, cells, topology="window"):
        m = self.rule_masks(cells, topology)
        return m["arrows"] & m["corner_parity"] & m["parity"] & m["direction"]


@lru_cache(maxsize=4)
def kari_tileset(rule6_variant: str = "b") -> KariTileSet:
    return KariTileSet(rule6_variant)


# --- grids ------------------------------------------------------------------

@dataclass
class Grid:
    tileset: DirectedTileSet
    cells: np.ndarray
    topology: str = "window"
    origin: tuple = (0, 0)

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=np.int64)
        if self.cells.ndim != 2:
            raise ValueError("grid cells must be a 2-d array")
        if self.topology not in ("window", "torus"):
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.cells.size and (self.cells.min() < 0 or self.cells.max() >= len(self.tileset)):
            raise ValueError("tile id out of range")

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def valid_mask(self) -> np.ndarray:
        return self.tileset.valid_mask(self.cells, self.topology)

    def successors(self):
        """``(active, succ)``: flat successor index per cell, -1 where inactive.

        A cell is active when it is valid and its successor lies on the grid
        (always true on a torus).
        """
        h, w = self.cells.shape
        vec = self.tileset.vectors2d()[self.cells]
        ys, xs = np.mgrid[0:h, 0:w]
        sx, sy = xs + vec[..., 0], ys + vec[..., 1]
        if self.topology == "torus":
            sx, sy = sx % w, sy % h
            inside = np.ones((h, w), dtype=bool)
        else:
            inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
        active = self.valid_mask() & inside
        succ = np.where(active, sy * w + sx, -1).ravel()
        return active, succ

    def with_cells(self, cells) -> "Grid":
        return Grid(self.tileset, np.array(cells), self.topology, self.origin)


def uniform_grid(tileset: DirectedTileSet, tile: int, width: int, height: int, topology="window") -> Grid:
    return Grid(tileset, np.full((height, width), tile, dtype=np.int64), topology)


def chain_grid(length: int) -> Grid:
    """A row of ``length`` east arrows that runs into a stop tile.

    The chain sits inside a frame of stop tiles, so its only valid path has
    exactly ``length`` cells and never reaches the window boundary.
    """
    ts = stop_tileset()
    cells = np.full((3, length + 3), 2, dtype=np.int64)
    cells[1, 1:length + 1] = 0
    return Grid(ts, cells)


def valid_at(grid: Grid, cell) -> bool:
    """Validity of one cell, read from its neighbourhood only."""
    x, y = cell
    h, w = grid.cells.shape
    if not (0 <= x < w and 0 <= y < h):
        raise ValueError(f"cell {cell} outside the grid")
    r = grid.tileset.radius
    if r == 0:
        return bool(grid.tileset.valid_mask(grid.cells[y:y + 1, x:x + 1])[0, 0])
    if grid.topology == "torus":
        ys = np.arange(y - r, y + r + 1) % h
        xs = np.arange(x - r, x + r + 1) % w
        win = grid.cells[np.ix_(ys, xs)]
        # embed in a window one cell larger so the centre is interior
        big = np.pad(win, 1, mode="edge")
        return bool(grid.tileset.valid_mask(big)[r + 1, r + 1])
    if x < r or y < r or x >= w - r or y >= h - r:
        return False
    win = grid.cells[y - r:y + r + 1, x - r:x + r + 1]
    return bool(grid.tileset.valid_mask(win)[r, r])


# --- B_XY(n) ------------------------------------------------------------------

def _layout(n: int, orient: str, label: str, ox: int, oy: int, out: dict):
    if n == 0:
        out[(ox, oy)] = ("blank_cross", orient, label)
        return
    h = 2 ** (n - 1)
    cx, cy = ox + 2 * h - 1, oy + 2 * h - 1
    out[(cx, cy)] = ("bold_cross", orient, label)
    for (qx, qy), child in quadrant_children(label).items():
        _layout(n - 1, _QUAD_NAME[(qx, qy)], child, ox + qx * 2 * h, oy + qy * 2 * h, out)
    for d in DIRS:
        dx, dy = DVEC[d]
        for k in range(1, 2 * h):
            basic = "mixed_arm" if k == h else ("blank_arm" if k % 2 else "bold_arm")
            out[(cx + k * dx, cy + k * dy)] = (basic, d, orient, label)


def _bxy_cells(n: int, orient: str, label: str):
    """Tile fields (without directions and parities) and the blank-cross path."""
    lay: dict = {}
    _layout(n, orient, label, 0, 0, lay)
    side = 2 ** (n + 1) - 1
    assert len(lay) == side * side

    def head_toward(p, side_name):
        """Arrow that the neighbour on ``side_name`` of ``p`` points into ``p``."""
        q = (p[0] + DVEC[side_name][0], p[1] + DVEC[side_name][1])
        f = lay[q]
        if f[0].endswith("cross"):
            return (0 if f[0] == "blank_cross" else 1), f[1], f[2]
        if f[1] == OPP[side_name]:
            return 1, f[2], f[3]
        raise AssertionError(f"no arrow head enters {p} from {side_name}")

    fields = {}
    for p, f in lay.items():
        if f[0].endswith("cross"):
            fields[p] = dict(basic=f[0], cross_orientation=f[1], hilbert_labels=(f[2],))
            continue
        basic, d, po, pl = f
        s0, s1 = arm_sides(d)
        k0, o0, l0 = head_toward(p, s0)
        k1, o1, l1 = head_toward(p, s1)
        assert k0 == k1
        fields[p] = dict(basic=basic, arm_direction=d, principal_orientation=po,
                         side_orientations=(o0, o1), hilbert_labels=(pl, l0, l1),
                         side_kind="bold" if k0 else "blank")
    crosses = [(2 * i, 2 * j) for i, j in hilbert_path(label, n)] if n else [(0, 0)]
    return side, fields, crosses


_EXIT = {"a": "E", "b": "N", "c": "S", "d": "W"}


def _assemble(side, fields, crosses, exit_dir, x0=0, y0=0, rule6_variant="b") -> Grid:
    ts = kari_tileset(rule6_variant)
    direction = {}
    for p, q in zip(crosses, crosses[1:]):
        d = {(2, 0): "E", (-2, 0): "W", (0, 2): "N", (0, -2): "S"}[(q[0] - p[0], q[1] - p[1])]
        direction[p] = d
        direction[((p[0] + q[0]) // 2, (p[1] + q[1]) // 2)] = d
    direction[crosses[-1]] = exit_dir
    cells = np.empty((side, side), dtype=np.int64)
    for (x, y), f in fields.items():
        tile = KariTile(
            corner_parity=corner_bits((y + y0) % 2),
            h_parity=(x + x0) % 2,
            v_parity=(y + y0) % 2,
            direction_label=direction.get((x, y), "N"),
            **f,
        )
        cells[y, x] = ts.tile_id(tile)
    return Grid(ts, cells)


def _parent_label(child: str, quadrant: str) -> str:
    q = _QUAD[quadrant]
    for y in LABELS:
        if quadrant_children(y)[q] == child:
            return y
    raise AssertionError("quadrant map is not a permutation")


def build_bxy(n: int, orientation: str = "NE", label: str = "a", margin: int = 0,
              rule6_variant: str = "b") -> Grid:
    """The hierarchical configuration B_XY(n) with centre label ``label``.

    With ``margin=1`` the block is cut out of a larger block that contains it
    as a grandchild near its centre, so every cell of B_XY(n) (including its
    own border, entry and exit) sees a genuine neighbourhood.
    """
    if n < 0:
        raise ValueError("level must be >= 0")
    if orientation not in ORIENTS or label not in LABELS:
        raise ValueError("bad orientation or label")
    if margin not in (0, 1):
        raise ValueError("margin must be 0 or 1")
    if margin == 0:
        side, fields, crosses = _bxy_cells(n, orientation, label)
        return _assemble(side, fields, crosses, _EXIT[label], rule6_variant=rule6_variant)
    parent = _parent_label(label, orientation)
    far = _OPP_ORIENT[orientation]
    grand = _parent_label(parent, far)
    side, fields, crosses = _bxy_cells(n + 2, "NE", grand)
    # B(n) sits in quadrant `orientation` of the parent, which sits in `far`
    pq, bq = _QUAD[far], _QUAD[orientation]
    px, py = pq[0] * 2 ** (n + 2), pq[1] * 2 ** (n + 2)
    bx, by = px + bq[0] * 2 ** (n + 1), py + bq[1] * 2 ** (n + 1)
    big = _assemble(side, fields, crosses, _EXIT[grand], rule6_variant=rule6_variant)
    s = 2 ** (n + 1) - 1
    sub = big.cells[by - 1:by + s + 1, bx - 1:bx + s + 1]
    return Grid(big.tileset, sub.copy(), origin=(1, 1))


def bxy_entry(grid: Grid, n: int, label: str) -> tuple[int, int]:
    """Cell of the first blank cross on the Hilbert path of a built B_XY(n)."""
    x, y = hilbert_path(label, n)[0] if n else (0, 0)
    ox, oy = grid.origin
    return (ox + 2 * x, oy + 2 * y)


def blank_cross_cells(grid: Grid) -> list[tuple[int, int]]:
    ts = grid.tileset
    if not isinstance(ts, KariTileSet):
        return []
    ys, xs = np.nonzero(ts.blank[grid.cells])
    return list(zip(xs.tolist(), ys.tolist()))


# --- paths -------------------------------------------------------------------

@dataclass
class PathTrace:
    cells: list = field(default_factory=list)
    termination: str = "max_length"

    def __len__(self) -> int:
        return len(self.cells)


def trace_path(grid: Grid, start, max_length: int = 10 ** 6, valid: Optional[np.ndarray] = None) -> PathTrace:
    """Follow forward directions from ``start`` through valid cells."""
    h, w = grid.cells.shape
    x, y = start
    if not (0 <= x < w and 0 <= y < h):
        raise ValueError(f"start {start} outside the grid")
    if valid is None:
        valid = grid.valid_mask()
    vec = grid.tileset.vectors2d()
    seen = set()
    out = []
    while True:
        if len(out) >= max_length:
            return PathTrace(out, "max_length")
        if (x, y) in seen:
            return PathTrace(out, "cycle_detected")
        if not valid[y, x]:
            return PathTrace(out, "hit_invalid")
        seen.add((x, y))
        out.append((x, y))
        dx, dy = vec[grid.cells[y, x]]
        x, y = x + int(dx), y + int(dy)
        if grid.topology == "torus":
            x, y = x % w, y % h
        elif not (0 <= x < w and 0 <= y < h):
            return PathTrace(out, "left_window")


@dataclass
class Component:
    cells: list
    escapes_window: bool

    @property
    def classification(self) -> str:
        return "escapes_window" if self.escapes_window else "finite"


def path_components(grid: Grid) -> list[Component]:
    """Weak components of the graph with edges ``n -> n + d(n)`` for valid ``n``.

    A component escapes the window when its path reaches the boundary: it has
    an edge leaving the grid, or an edge endpoint on a boundary cell.
    """
    h, w = grid.cells.shape
    n = h * w
    valid = grid.valid_mask().ravel()
    vec = grid.tileset.vectors2d()[grid.cells].reshape(-1, 2)
    idx = np.arange(n)
    xs, ys = idx % w, idx // w
    sx, sy = xs + vec[:, 0], ys + vec[:, 1]
    if grid.topology == "torus":
        sx, sy = sx % w, sy % h
    inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    src = idx[valid & inside]
    dst = (sy * w + sx)[valid & inside]
    graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(n, n))
    ncomp, lab = connected_components(graph, directed=True, connection="weak")
    on_path = np.zeros(n, dtype=bool)
    on_path[src] = on_path[dst] = True
    leaves = valid & ~inside
    border = np.zeros((h, w), dtype=bool)
    if grid.topology != "torus":
        border[0, :] = border[-1, :] = border[:, 0] = border[:, -1] = True
    hit = leaves | (on_path & border.ravel())
    escaping = np.zeros(ncomp, dtype=bool)
    escaping[lab[hit]] = True
    order = np.argsort(lab, kind="stable")
    bounds = np.searchsorted(lab[order], np.arange(ncomp + 1))
    comps = []
    for k in range(ncomp):
        members = order[bounds[k]:bounds[k + 1]]
        comps.append(Component([(int(i % w), int(i // w)) for i in members], bool(escaping[k])))
    return comps


def count_escaping(grid: Grid) -> int:
    return sum(c.escapes_window for c in path_components(grid))
