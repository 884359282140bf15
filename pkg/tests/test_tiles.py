from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from karica import hilbert, tiles as T


def test_counts(kari):
    c = Counter(t.basic for t in kari.tiles)
    # 4 orientations x 4 labels x 2 corner choices x 4 directions
    assert c["blank_cross"] == 128
    assert c["bold_cross"] == 128 * 3
    assert len(kari) == sum(c.values()) == 101888


def test_tile_order_is_canonical(kari):
    assert list(kari.tiles) == sorted(kari.tiles)
    assert kari.tile_id(kari.tiles[1234]) == 1234


def test_intra_tile_constraints(kari):
    for t in kari.tiles:
        if t.basic == "blank_cross":
            assert t.h_parity == t.v_parity == 0
        else:
            assert t.h_parity or t.v_parity
        nw, ne, se, sw = t.corner_parity
        assert nw == ne and se == sw and nw != se
        if t.basic in ("blank_arm", "bold_arm"):
            assert t.side_orientations in T.toward_line_sides(t.arm_direction)
        if t.basic == "mixed_arm":
            assert t.side_orientations == T.away_sides(t.arm_direction)
            assert t.hilbert_labels[1:] == T.mixed_side_labels(t.hilbert_labels[0], t.arm_direction)


def test_bold_arm_side_options_horizontal():
    assert T.toward_line_sides("E") == [("SE", "NE"), ("SW", "NW")]
    assert T.toward_line_sides("N") == [("NE", "NW"), ("SE", "SW")]


def test_mixed_labels_for_a():
    # P^a: SW=b, NW=a, NE=a, SE=c
    assert T.mixed_side_labels("a", "E") == ("a", "c")
    assert T.mixed_side_labels("a", "W") == ("a", "b")
    assert T.mixed_side_labels("a", "N") == ("a", "a")
    assert T.mixed_side_labels("a", "S") == ("b", "c")


def test_closed_under_half_turn(kari):
    s = set(kari.tiles)
    assert all(T.rotate180(t) in s for t in kari.tiles[::97])
    t = kari.tiles[5000]
    assert T.rotate180(T.rotate180(t)) == t


def test_simple_tileset():
    s = T.simple_tileset(2)
    assert len(s) == 2 and s.symbols == ("→", "↑")
    assert s.valid_mask(np.zeros((3, 3), dtype=int)).all()
    one = T.simple_tileset(1)
    assert len(one) == 1 and one.direction(0) == (1,)


def _blank(kari):
    return next(i for i, t in enumerate(kari.tiles) if t.basic == "blank_cross")


def test_uniform_blank_cross_invalid(kari):
    g = T.uniform_grid(kari, _blank(kari), 6, 6)
    assert not g.valid_mask().any()
    assert not any(T.valid_at(g, (x, y)) for x in range(6) for y in range(6))


def test_uniform_blank_cross_components(kari):
    comps = T.path_components(T.uniform_grid(kari, _blank(kari), 3, 3))
    assert len(comps) == 9
    assert all(c.classification == "finite" and len(c.cells) == 1 for c in comps)


def test_bxy0_is_blank_cross(kari):
    g = T.build_bxy(0, "NE", "a")
    assert g.cells.shape == (1, 1)
    t = kari[g.cells[0, 0]]
    assert t.basic == "blank_cross" and t.cross_orientation == "NE"


def test_bxy1_center_valid():
    g = T.build_bxy(1, "SW", "b")
    assert g.cells.shape == (3, 3)
    assert T.valid_at(g, (1, 1))
    assert not T.valid_at(g, (0, 0))


def test_bxy2_layout(kari):
    g = T.build_bxy(2, "NW", "a")
    assert g.cells.shape == (7, 7)
    kinds = np.vectorize(lambda i: kari[i].basic)(g.cells)
    assert kinds[3, 3] == "bold_cross"
    assert kari[g.cells[3, 3]].cross_orientation == "NW"
    for x, y in [(1, 1), (5, 1), (1, 5), (5, 5)]:
        assert kinds[y, x] == "bold_cross"
    orient = {(x, y): kari[g.cells[y, x]].cross_orientation for x, y in [(1, 1), (5, 1), (1, 5), (5, 5)]}
    assert orient == {(1, 1): "SW", (5, 1): "SE", (1, 5): "NW", (5, 5): "NE"}
    assert (kinds[::2, ::2] == "blank_cross").all()
    assert kinds[3, 5] == "mixed_arm" and kinds[3, 4] == "blank_arm" and kinds[3, 6] == "blank_arm"
    # bold arms first appear at level 3, two cells out from the centre
    g3 = T.build_bxy(3, "NE", "a")
    assert kari[g3.cells[7, 9]].basic == "bold_arm"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bxy_interior_valid(n):
    for o in T.ORIENTS:
        for lab in T.LABELS:
            g = T.build_bxy(n, o, lab)
            assert g.valid_mask()[1:-1, 1:-1].all()


def test_rule6_literal_reading_breaks_bxy2():
    g = T.build_bxy(2, "NE", "a", rule6_variant="a")
    assert not g.valid_mask()[1:-1, 1:-1].all()


def test_trace_bxy2_follows_hilbert_order(kari):
    g = T.build_bxy(2, "NE", "c", margin=1)
    tr = T.trace_path(g, T.bxy_entry(g, 2, "c"))
    crosses = [c for c in tr.cells if kari.blank[g.cells[c[1], c[0]]]]
    expect = [(1 + 2 * x, 1 + 2 * y) for x, y in hilbert.hilbert_path("c", 2)]
    assert crosses == expect
    assert tr.termination == "hit_invalid"


def test_trace_simple_line_and_torus():
    s = T.simple_tileset(2)
    g = T.uniform_grid(s, 0, 5, 1)
    tr = T.trace_path(g, (0, 0))
    assert tr.cells == [(i, 0) for i in range(5)] and tr.termination == "left_window"
    tr = T.trace_path(T.uniform_grid(s, 0, 5, 1, topology="torus"), (0, 0))
    assert len(tr) == 5 and tr.termination == "cycle_detected"
    assert T.trace_path(g, (0, 0), max_length=2).termination == "max_length"


def test_components_simple_rows():
    comps = T.path_components(T.uniform_grid(T.simple_tileset(2), 0, 3, 3))
    assert len(comps) == 3
    assert all(c.classification == "escapes_window" for c in comps)


def test_components_bxy_single_chain(kari):
    g = T.build_bxy(3, "SE", "d", margin=1)
    blanks = set(T.blank_cross_cells(g))
    holding = [c for c in T.path_components(g) if blanks & set(c.cells)]
    assert len(holding) == 1 and blanks <= set(holding[0].cells)


def _union_find_count(grid):
    h, w = grid.cells.shape
    parent = list(range(h * w))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    valid = grid.valid_mask()
    vec = grid.tileset.vectors2d()
    for y in range(h):
        for x in range(w):
            if valid[y, x]:
                dx, dy = vec[grid.cells[y, x]]
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h:
                    parent[find(y * w + x)] = find(ny * w + nx)
    return len({find(i) for i in range(h * w)})


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_components_match_union_find(w, h, seed):
    rng = np.random.default_rng(seed)
    g = T.Grid(T.stop_tileset(), rng.integers(0, 3, (h, w)))
    assert len(T.path_components(g)) == _union_find_count(g)


def test_validity_is_local(kari):
    g = T.build_bxy(2, "NE", "b")
    base = T.valid_at(g, (3, 3))
    rng = np.random.default_rng(0)
    cells = g.cells.copy()
    far = [(x, y) for x in range(7) for y in range(7) if max(abs(x - 3), abs(y - 3)) > 1]
    for x, y in far:
        cells[y, x] = rng.integers(len(kari))
    assert T.valid_at(g.with_cells(cells), (3, 3)) == base


def test_valid_at_torus_matches_mask(kari):
    g = T.build_bxy(1, "NE", "a")
    tor = T.Grid(kari, g.cells, topology="torus")
    mask = tor.valid_mask()
    assert all(T.valid_at(tor, (x, y)) == mask[y, x] for x in range(3) for y in range(3))


def test_random_kari_windows_have_no_cycles(kari):
    rng = np.random.default_rng(7)
    for _ in range(200):
        g = T.Grid(kari, rng.integers(0, len(kari), (16, 16)))
        valid = g.valid_mask()
        for y, x in zip(*np.nonzero(valid)):
            assert T.trace_path(g, (x, y), valid=valid).termination != "cycle_detected"


def test_grid_rejects_bad_ids(kari):
    with pytest.raises(ValueError):
        T.Grid(kari, [[len(kari)]])
    with pytest.raises(ValueError):
        T.Grid(kari, [[0]], topology="sphere")
