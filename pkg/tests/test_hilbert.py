import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from karica import hilbert as h


def test_basic_path_a_matches_definition():
    assert h.basic_path("a") == [(0, 0), (0, 1), (1, 1), (1, 0)]


@pytest.mark.parametrize("v", h.VARIANTS)
def test_basic_paths_fill_unit_square(v):
    p = h.basic_path(v)
    assert sorted(p) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert h.is_path(p)


def test_variant_naming_is_the_unique_connected_one():
    # brute force over all namings, independently of the resolver
    rots = []
    for turns, flip in itertools.product(range(4), (False, True)):
        def g(c, turns=turns, flip=flip):
            x, y = (c[1], c[0]) if flip else c
            for _ in range(turns):
                x, y = 1 - y, x
            return (x, y)
        rots.append(g)
    a = h.basic_path("a")
    images = {tuple(g(c) for c in a): g for g in rots}
    good = []
    for b, c, d in itertools.permutations([p for p in images if p != tuple(a)], 3):
        basic = {"a": tuple(a), "b": b, "c": c, "d": d}
        name = {p: k for k, p in basic.items()}
        try:
            rules = {v: "".join(name[tuple(images[basic[v]](q) for q in basic[w])] for w in "baac") for v in basic}
        except KeyError:
            continue
        if all(h._is_unit_path(h._expand(basic, rules, v, n)) for v in basic for n in (2, 3)):
            good.append((b, c, d))
    assert len(good) == 1
    assert good[0] == tuple(tuple(h.basic_path(v)) for v in "bcd")


def test_recursion_of_a():
    assert h.recursion("a") == "baac"


def test_level1_equals_basic():
    for v in h.VARIANTS:
        assert h.hilbert_path(v, 1) == h.basic_path(v)


def test_level2_endpoints_a():
    # SW quarter walks P^b from (0,0); SE quarter walks P^c and ends at (3,0)
    p = h.hilbert_path("a", 2)
    assert p[0] == (0, 0) and p[-1] == (3, 0)
    assert len(set(p)) == 16 and h.is_path(p)


@pytest.mark.parametrize("n", range(1, 7))
def test_hilbert_bijective(n):
    for v in h.VARIANTS:
        p = h.hilbert_path(v, n)
        assert len(p) == 4 ** n
        assert set(p) == {(x, y) for x in range(2 ** n) for y in range(2 ** n)}
        assert h.is_path(p)


def test_bad_level_and_variant():
    with pytest.raises(ValueError):
        h.hilbert_path("a", 0)
    with pytest.raises(ValueError):
        h.hilbert_path("e", 2)
    with pytest.raises(ValueError):
        h.basic_path("x")


def test_alphabet_has_12_tiles():
    tiles = h.alphabet()
    assert len(tiles) == 12
    assert all(t.entry != t.exit for t in tiles)


def test_substitute_closure_and_variants():
    for k in range(12):
        blk = h.substitute(k)
        assert blk.shape == (2, 2)
        assert blk.min() >= 0 and blk.max() < 12
    # the tile carrying variant a expands to b, a, a, c along the path
    k = next(i for i, t in enumerate(h.alphabet()) if t.variant == "a")
    blk = h.substitute(k)
    seq = [h.alphabet()[blk[y, x]].variant for x, y in h.basic_path("a")]
    assert seq == ["b", "a", "a", "c"]


def test_substitute_matches_level_n_grouping():
    # group P^v_4 into 2x2 blocks, then check rho on the level-3 grouping
    for v in h.VARIANTS:
        fine = {pos: t for pos, t in h.group_path(h.hilbert_path(v, 4)) if t}
        coarse = {pos: t for pos, t in h.group_path(h.hilbert_path(v, 3)) if t}
        for (bx, by), t in coarse.items():
            blk = h.substitute(t)
            for qy, qx in itertools.product(range(2), range(2)):
                cell = (2 * bx + qx, 2 * by + qy)
                if cell in fine:
                    assert h.alphabet()[blk[qy, qx]] == fine[cell]


def test_substitute_rejects_unknown():
    with pytest.raises(ValueError):
        h.substitute(12)
    with pytest.raises(ValueError):
        h.substitute(h.SubstTile("a", "N", "N"))


@pytest.mark.parametrize("k", range(12))
def test_derive_roundtrip(k):
    shift, pre = h.derive(h.substitute(k))
    assert shift == (0, 0)
    assert pre.tolist() == [[k]]


def test_derive_4x4_subblocks_of_rho2():
    for s in range(12):
        big = h.rho_power(s, 2)
        (sx, sy), pre = h.derive(big)
        assert (sx, sy) == (0, 0)
        assert np.array_equal(h.substitute_config(pre), big)


def test_derive_shifted_block_reproduces_input():
    big = h.rho_power(5, 4)
    blk = big[3:9, 1:8]
    (sx, sy), pre = h.derive(blk)
    assert (sx, sy) == (1, 1)
    img = h.substitute_config(np.where(pre >= 0, pre, 0))
    assert np.array_equal(img[sy:sy + blk.shape[0], sx:sx + blk.shape[1]], blk)


def test_derive_scrambled_block_not_admissible():
    seen = h.admissible_blocks(3, (2, 2))
    # find a 2x2 block absent from every rho^3(s)
    for cand in itertools.product(range(12), repeat=4):
        blk = (cand[:2], cand[2:])
        if blk not in seen:
            break
    with pytest.raises(h.DerivationError, match="not admissible"):
        h.derive(np.array(blk))


def test_admissible_blocks_small_cases():
    assert len(h.admissible_blocks(1, (2, 2))) == 12
    assert {b[0][0] for b in h.admissible_blocks(2, (1, 1))} == set(range(12))
    assert h.admissible_blocks(2, (2, 2)) <= h.admissible_blocks(3, (2, 2))
    with pytest.raises(ValueError):
        h.admissible_blocks(1, (3, 1))


def test_check_square_fill_examples():
    i, j = h.check_square_fill(h.hilbert_path("a", 2), 1)
    assert j - i == 4 and i <= 5
    assert h.check_square_fill([(k, 0) for k in range(8)], 1) is None
    for n in range(1, 4):
        assert h.check_square_fill(h.hilbert_path("a", n), n) == (1, 1 + 4 ** n)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(h.VARIANTS), st.integers(1, 2), st.data())
def test_square_fill_random_subpaths(v, n, data):
    path = h.hilbert_path(v, 4)
    size = 2 * 4 ** n
    s = data.draw(st.integers(0, len(path) - size))
    e = data.draw(st.integers(s + size, len(path)))
    hit = h.check_square_fill(path[s:e], n)
    assert hit is not None
    i, j = hit
    seg = path[s + i - 1:s + j - 1]
    xs, ys = zip(*seg)
    assert max(xs) - min(xs) == max(ys) - min(ys) == 2 ** n - 1
    assert len(set(seg)) == 4 ** n
