"""Word counting, entropy-rate fits and Monte Carlo experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .automaton import FiniteGroup, dependency_set
from .tiles import DirectedTileSet, Grid, path_components

DEFAULT_BUDGET = 2 ** 24


class BudgetExceeded(ValueError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"budget exceeded: need {required} assignments, budget is {budget}")
        self.required = required
        self.budget = budget


class Refusal(ValueError):
    pass


@dataclass
class WordSet:
    window: list
    horizon: int
    mode: str
    counts: dict = field(default_factory=dict)
    samples: int = 0
    dependency: list = field(default_factory=list)

    @property
    def distinct(self) -> int:
        return len(self.counts)

    def log_count(self) -> float:
        return math.log(self.distinct)


@dataclass
class EntropyEstimate:
    horizons: list
    values: list
    slope: float
    last_difference: float
    per_step: Optional[float] = None
    note: str = ""


# --- counter-based sampling -------------------------------------------------

def uniform_floats(seed: int, first: int, count: int, width: int) -> np.ndarray:
    """``count`` rows of ``width`` uniforms in ``[0, 1)``.

    Row ``i`` depends only on ``(seed, first + i)``: each row owns a fixed
    stretch of a Philox counter stream, so batching never changes results.
    """
    blocks = -(-width // 4)
    bitgen = np.random.Philox(key=seed, counter=first * blocks)
    raw = bitgen.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :width]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 2 ** 53)


def _scale(u: np.ndarray, high: int) -> np.ndarray:
    return np.minimum((u * high).astype(np.int64), high - 1)


def uniform_draws(seed: int, first: int, count: int, width: int, high: int) -> np.ndarray:
    """Integer version of :func:`uniform_floats` over ``[0, high)``."""
    return _scale(uniform_floats(seed, first, count, width), high)


# --- exact and sampled word sets --------------------------------------------

def _update_steps(horizon: int, m: int) -> int:
    """Number of real updates among the first ``horizon - 1`` sliced steps from phase 0."""
    return len(range(0, horizon - 1, m))


def _local_system(grid: Grid, window: Sequence, horizon: int, m: int):
    cells = [(int(x), int(y)) for x, y in window]
    dep = dependency_set(grid, cells, _update_steps(horizon, m) + 1)
    w = grid.width
    _, succ = grid.successors()
    pos = {y * w + x: k for k, (x, y) in enumerate(dep)}
    zero = len(dep)
    local = np.full(zero + 1, -1, dtype=np.int64)
    for flat, k in pos.items():
        s = succ[flat]
        if s >= 0:
            local[k] = pos.get(int(s), zero)
    fidx = np.array([pos[y * w + x] for x, y in cells], dtype=np.int64)
    return cells, dep, local, fidx


def _words(op: np.ndarray, gamma: np.ndarray, local: np.ndarray, fidx: np.ndarray, horizon: int, m: int) -> np.ndarray:
    """Trajectory words ``(B, horizon * |F|)`` of a batch of local states."""
    out = np.empty((gamma.shape[0], horizon, len(fidx)), dtype=np.int64)
    g = gamma
    for t in range(horizon):
        if t and (t - 1) % m == 0:
            g = kernels.step_batch(op, g, local)
        out[:, t] = g[:, fidx]
    return out.reshape(gamma.shape[0], -1)


def _tally(counts: dict, words: np.ndarray):
    rows, mult = np.unique(words, axis=0, return_counts=True)
    for r, c in zip(rows, mult):
        key = tuple(r.tolist())
        counts[key] = counts.get(key, 0) + int(c)


def count_words_exact(grid: Grid, group: FiniteGroup, window: Iterable, horizon: int,
                      budget: int = DEFAULT_BUDGET, m: int = 1, chunk: int = 1 << 16) -> WordSet:
    """All space-time words of the window, enumerating γ on the dependency set."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    cells, dep, local, fidx = _local_system(grid, window, horizon, m)
    k, d = group.order, len(dep)
    total = k ** d
    if total > budget:
        raise BudgetExceeded(total, budget)
    counts: dict = {}
    powers = k ** np.arange(d - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        gamma = np.zeros((len(idx), d + 1), dtype=np.int64)
        gamma[:, :d] = (idx[:, None] // powers[None, :]) % k
        _tally(counts, _words(group.op, gamma, local, fidx, horizon, m))
    return WordSet(cells, horizon, "exact", counts, total, dep)


def count_words_sampled(grid: Grid, group: FiniteGroup, window: Iterable, horizon: int,
                        samples: int, seed: int, m: int = 1, chunk: int = 1 << 14) -> WordSet:
    """Distinct words seen over ``samples`` uniform γ on the dependency set."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    cells, dep, local, fidx = _local_system(grid, window, horizon, m)
    d = len(dep)
    counts: dict = {}
    for start in range(0, samples, chunk):
        n = min(chunk, samples - start)
        gamma = np.zeros((n, d + 1), dtype=np.int64)
        gamma[:, :d] = uniform_draws(seed, start, n, d, group.order)
        _tally(counts, _words(group.op, gamma, local, fidx, horizon, m))
    return WordSet(cells, horizon, "sampled", counts, samples, dep)


# --- rates ----------------------------------------------------------------

def entropy_rate(values: Sequence[float], horizons: Optional[Sequence[int]] = None, note: str = "") -> EntropyEstimate:
    """Least-squares slope of ``values`` against the horizon."""
    values = [float(v) for v in values]
    if len(values) < 3:
        raise ValueError("need at least 3 horizons")
    hs = list(range(1, len(values) + 1)) if horizons is None else [int(h) for h in horizons]
    if len(hs) != len(values):
        raise ValueError("horizons and values differ in length")
    x = np.asarray(hs, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    last = (y[-1] - y[-2]) / (x[-1] - x[-2])
    return EntropyEstimate(hs, values, slope, float(last), note=note)


def exact_rate(grid: Grid, group: FiniteGroup, window, horizons: Sequence[int], m: int = 1,
               budget: int = DEFAULT_BUDGET) -> EntropyEstimate:
    logs = [count_words_exact(grid, group, window, n, budget=budget, m=m).log_count() for n in horizons]
    return entropy_rate(logs, horizons)


# --- periodicity ------------------------------------------------------------

def periodicity_check(grid: Grid, group: FiniteGroup, bound: int = 256,
                      windows: Optional[list] = None, budget: int = 2 ** 20) -> list:
    """Smallest ``p <= bound`` with ``T^p`` the identity on each window.

    Every initial state of the window's forward closure is simulated.  Returns
    one entry per window: the period, or ``None`` when it exceeds ``bound``.
    """
    comps = path_components(grid)
    if any(c.escapes_window for c in comps):
        raise Refusal("grid has a path that reaches the window boundary")
    valid = grid.valid_mask()
    if windows is None:
        windows = [c.cells for c in comps if any(valid[y, x] for x, y in c.cells)]
    w = grid.width
    _, succ = grid.successors()
    out = []
    for win in windows:
        closure = set(y * w + x for x, y in win)
        frontier = set(closure)
        while frontier:
            frontier = {int(succ[i]) for i in frontier if succ[i] >= 0} - closure
            closure |= frontier
        dep = sorted(closure)
        pos = {c: k for k, c in enumerate(dep)}
        local = np.array([pos[int(succ[c])] if succ[c] >= 0 else -1 for c in dep], dtype=np.int64)
        fidx = np.array([pos[y * w + x] for x, y in win], dtype=np.int64)
        k, d = group.order, len(dep)
        if k ** d > budget:
            raise BudgetExceeded(k ** d, budget)
        idx = np.arange(k ** d, dtype=np.int64)
        powers = k ** np.arange(d - 1, -1, -1, dtype=np.int64)
        g0 = (idx[:, None] // powers[None, :]) % k
        g = g0
        period = None
        for p in range(1, bound + 1):
            g = kernels.step_batch(group.op, g, local)
            if np.array_equal(g[:, fidx], g0[:, fidx]):
                period = p
                break
        out.append(period)
    return out


# --- Monte Carlo ------------------------------------------------------------

def _batch_successors(tileset: DirectedTileSet, cells: np.ndarray):
    """Flat successor indices for a batch of window-topology grids ``(B, H, W)``."""
    b, h, w = cells.shape
    valid = tileset.valid_mask(cells)
    vec = tileset.vectors2d()[cells]
    ys, xs = np.mgrid[0:h, 0:w]
    sx, sy = xs + vec[..., 0], ys + vec[..., 1]
    inside = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    base = (np.arange(b) * h * w)[:, None, None]
    succ = np.where(valid & inside, base + sy * w + sx, -1)
    return valid, succ.reshape(-1)


def plugin_entropy(words: np.ndarray) -> float:
    _, counts = np.unique(words, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def measure_entropy_estimate(tileset: DirectedTileSet, group: FiniteGroup, window=(1, 1), horizon: int = 8,
                             samples: int = 10 ** 5, seed: int = 1, chunk: int = 4096) -> EntropyEstimate:
    """Plug-in entropies of words under the uniform Bernoulli measure.

    Tiles and group elements are i.i.d. uniform per cell on a square large
    enough to hold the window's forward cone.  ``values[k-1]`` is the plug-in
    entropy of length-``k`` words; the slope over ``k`` is the rate estimate and
    ``per_step`` is ``H_n / n``.
    """
    ww, wh = window
    radius = horizon + 1 + max(ww, wh)
    side = 2 * radius + 1
    ncell = side * side
    fy, fx = np.mgrid[radius:radius + wh, radius:radius + ww]
    fidx = (fy * side + fx).ravel()
    words = np.empty((samples, horizon + 1, len(fidx)), dtype=np.int64)
    for start in range(0, samples, chunk):
        n = min(chunk, samples - start)
        u = uniform_floats(seed, start, n, 2 * ncell)
        tiles = _scale(u[:, :ncell], len(tileset))
        gam = _scale(u[:, ncell:], group.order)
        cells = tiles.reshape(n, side, side)
        _, succ = _batch_successors(tileset, cells)
        g = gam.reshape(1, -1)
        base = (np.arange(n) * ncell)[:, None]
        flat_f = (base + fidx[None, :]).ravel()
        words[start:start + n, 0] = tiles[:, fidx]
        for t in range(horizon):
            if t:
                g = kernels.step_batch(group.op, g, succ)
            words[start:start + n, t + 1] = g[0, flat_f].reshape(n, -1)
    values = [plugin_entropy(words[:, :k + 1].reshape(samples, -1)) for k in range(1, horizon + 1)]
    est = entropy_rate(values, list(range(1, horizon + 1)),
                       note=f"plug-in over {samples} samples; support size not checked")
    est.per_step = values[-1] / horizon
    return est


@dataclass
class SurvivalTable:
    rows: list = field(default_factory=list)

    def probability(self, window: int, threshold: int) -> float:
        for r in self.rows:
            if r["window"] == window and r["L"] == threshold:
                return r["probability"]
        raise KeyError((window, threshold))


def valid_path_survival(tileset: DirectedTileSet, window_sizes: Sequence[int], thresholds: Sequence[int],
                        samples: int, seed: int, chunk: int = 256) -> SurvivalTable:
    """Probability that a uniform random tiling has a valid path of ``>= L`` cells
    starting in the central quarter of the window."""
    thresholds = sorted(int(t) for t in thresholds)
    cap = max(thresholds)
    table = SurvivalTable()
    for size in window_sizes:
        q0, q1 = size // 4, size - size // 4
        hits = np.zeros(len(thresholds), dtype=np.int64)
        for start in range(0, samples, chunk):
            n = min(chunk, samples - start)
            cells = uniform_draws(seed, start, n, size * size, len(tileset)).reshape(n, size, size)
            valid, succ = _batch_successors(tileset, cells)
            lengths = kernels.path_lengths(succ, valid.reshape(-1), cap).reshape(n, size, size)
            best = lengths[:, q0:q1, q0:q1].reshape(n, -1).max(axis=1)
            hits += (best[:, None] >= np.asarray(thresholds)[None, :]).sum(axis=0)
        for L, h in zip(thresholds, hits):
            table.rows.append({"L": L, "window": size, "probability": float(h) / samples,
                               "samples": samples, "seed": seed})
    return table


def report_constants() -> dict:
    """Fill fraction and the bound on disjoint forward-infinite valid paths."""
    eps = Fraction(4 ** 1, 4 ** (1 + 3))
    return {"epsilon": eps, "M": math.ceil(1 / eps), "refined": 4}
