"""Command-line entry point.

Exit status: 0 on success, 1 on malformed input, 2 when a request is refused
(budget exceeded, invalid configuration, non-admissible block, ...).
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import automaton, entropy, freegroup, hilbert, tiles
from .io import (FormatError, config_from_dict, config_to_dict, dumps, grid_from_dict, grid_to_dict, loads,
                 path_to_csv, pattern_from_dict, pattern_to_dict, rows_to_csv, tileset_by_name)


class Malformed(Exception):
    pass


class Refused(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise Malformed(message)


def _pair(text: str, sep: str) -> tuple[int, int]:
    try:
        a, b = text.split(sep)
        return int(a), int(b)
    except ValueError:
        raise Malformed(f"expected two integers separated by {sep!r}, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise Malformed(f"expected comma-separated integers, got {text!r}") from None


def _window_cells(args) -> list[tuple[int, int]]:
    w, h = _pair(args.window, "x")
    x0, y0 = _pair(args.at, ",")
    return [(x0 + i, y0 + j) for j in range(h) for i in range(w)]


def _read_json(args):
    if not args.input:
        raise Malformed("--input is required")
    text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
    return loads(text)


def _spec(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output") and v is not None}


def _emit(args, text: str):
    if getattr(args, "output", None):
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict):
    payload = dict(payload)
    payload["command"] = _spec(args)
    _emit(args, dumps(payload))


def _group(args):
    try:
        return automaton.parse_group(args.group)
    except ValueError as e:
        raise Malformed(str(e)) from None


# --- hilbert ------------------------------------------------------------------

def cmd_hilbert_path(args):
    try:
        cells = hilbert.hilbert_path(args.variant, args.level)
    except ValueError as e:
        raise Refused(str(e)) from None
    if args.format == "csv":
        _emit(args, path_to_csv(cells))
    else:
        _emit_json(args, {"path": [list(c) for c in cells]})


def _parse_tile(text: str) -> int:
    if text.isdigit():
        return int(text)
    parts = text.split(",")
    if len(parts) != 3:
        raise Malformed(f"tile must be an index or variant,entry,exit: {text!r}")
    try:
        return hilbert.tile_index(hilbert.SubstTile(*parts))
    except ValueError as e:
        raise Refused(str(e)) from None


def _alphabet_json():
    return [list(t) for t in hilbert.alphabet()]


def cmd_hilbert_substitute(args):
    k = _parse_tile(args.tile)
    if not 0 <= k < hilbert.ALPHABET_SIZE:
        raise Refused(f"unknown tile index {k}")
    block = hilbert.rho_power(k, args.times)
    _emit_json(args, {"alphabet": _alphabet_json(), "block": block[::-1].tolist()})


def cmd_hilbert_derive(args):
    obj = _read_json(args)
    rows = obj.get("block") if isinstance(obj, dict) else None
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise Malformed("expected {\"block\": [[tile, ...], ...]} with the north row first")
    try:
        block = np.asarray(rows, dtype=np.int64)[::-1]
    except (ValueError, TypeError):
        raise Malformed("block rows must be equal-length integer lists") from None
    if block.ndim != 2 or block.max() >= hilbert.ALPHABET_SIZE or block.min() < -1:
        raise Malformed("block entries must be tile indices (or -1 for unknown)")
    try:
        shift, pre = hilbert.derive(block)
    except hilbert.DerivationError as e:
        raise Refused(str(e)) from None
    _emit_json(args, {"shift": list(shift), "preimage": pre[::-1].tolist()})


def cmd_hilbert_lemma5(args):
    path = hilbert.hilbert_path(args.variant, args.level)
    bad = hilbert.square_fill_counterexamples(path, args.n)
    _emit_json(args, {"subpaths_min_length": 2 * 4 ** args.n, "counterexamples": [list(b) for b in bad]})
    if bad:
        raise Refused(f"{len(bad)} counterexamples")


# --- tiles ---------------------------------------------------------------------

def _grid_arg(args):
    try:
        return grid_from_dict(_read_json(args), args.rule6_variant)
    except FormatError as e:
        raise Malformed(str(e)) from None


def cmd_tiles_enumerate(args):
    ts = tiles.kari_tileset(args.rule6_variant)
    counts = {}
    for t in ts.tiles:
        counts[t.basic] = counts.get(t.basic, 0) + 1
    payload = {"count": len(ts), "by_basic": counts}
    if not args.summary:
        payload["tiles"] = [list(t._asdict().values()) for t in ts.tiles]
        payload["fields"] = list(tiles.KariTile._fields)
    _emit_json(args, payload)


def cmd_tiles_validate(args):
    grid = _grid_arg(args)
    valid = grid.valid_mask()
    _emit_json(args, {"valid": valid[::-1].astype(int).tolist(), "valid_count": int(valid.sum()),
                      "cells": int(valid.size)})


def cmd_tiles_bxy(args):
    grid = tiles.build_bxy(args.level, args.orientation, args.label, args.margin, args.rule6_variant)
    _emit(args, dumps(grid_to_dict(grid)))


def cmd_tiles_trace(args):
    grid = _grid_arg(args)
    start = _pair(args.start, ",")
    if not (0 <= start[0] < grid.width and 0 <= start[1] < grid.height):
        raise Refused(f"start {start} outside the grid")
    tr = tiles.trace_path(grid, start, args.max_length)
    _emit_json(args, {"cells": [list(c) for c in tr.cells], "termination": tr.termination})


def cmd_tiles_components(args):
    grid = _grid_arg(args)
    comps = tiles.path_components(grid)
    _emit_json(args, {
        "components": [{"cells": [list(c) for c in k.cells], "classification": k.classification} for k in comps],
        "escaping": sum(k.escapes_window for k in comps),
    })


# --- ca ---------------------------------------------------------------------------

def _config_arg(args):
    try:
        return config_from_dict(_read_json(args), args.rule6_variant)
    except FormatError as e:
        raise Malformed(str(e)) from None


def cmd_ca_step(args):
    cfg = _config_arg(args)
    lines = []
    for _ in range(args.steps):
        cfg = automaton.step_sliced(cfg) if args.sliced else automaton.step(cfg)
        lines.append(dumps(config_to_dict(cfg)).replace("\n", "") + "\n")
    _emit(args, "".join(lines) if args.stream else dumps(config_to_dict(cfg)))


def cmd_ca_preimage(args):
    cfg = _config_arg(args)
    try:
        pre = automaton.preimage(cfg, _window_cells(args))
    except automaton.CyclicDependency as e:
        raise Refused(str(e)) from None
    except ValueError as e:
        raise Malformed(str(e)) from None
    _emit(args, dumps(config_to_dict(pre)))


def cmd_ca_word(args):
    cfg = _config_arg(args)
    word = automaton.trajectory_word(cfg, _window_cells(args), args.horizon, sliced=args.sliced)
    _emit_json(args, {"window": [list(c) for c in word.window], "tiles": list(word.tiles),
                      "entries": [list(e) for e in word.entries]})


# --- entropy ----------------------------------------------------------------------

def _budget_guard(fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except (entropy.BudgetExceeded, entropy.Refusal) as e:
        raise Refused(str(e)) from None


def _horizons(args) -> list[int]:
    return _ints(args.horizons) if args.horizons else [args.horizon]


def cmd_entropy_exact(args):
    grid, group = _grid_arg(args), _group(args)
    rows = []
    for n in _horizons(args):
        ws = _budget_guard(entropy.count_words_exact, grid, group, _window_cells(args), n, budget=args.budget, m=args.m)
        rows.append({"horizon": n, "distinct": ws.distinct, "log_count": ws.log_count(), "dependency": len(ws.dependency)})
    _emit_json(args, {"rows": rows})


def cmd_entropy_sampled(args):
    grid, group = _grid_arg(args), _group(args)
    rows = []
    for n in _horizons(args):
        ws = entropy.count_words_sampled(grid, group, _window_cells(args), n, args.samples, args.seed, m=args.m)
        rows.append({"horizon": n, "distinct": ws.distinct, "log_count": ws.log_count(), "samples": args.samples})
    _emit_json(args, {"rows": rows})


def cmd_entropy_rate(args):
    try:
        values = [float(v) for v in args.values.split(",")]
    except ValueError:
        raise Malformed("--values must be comma-separated numbers") from None
    horizons = _ints(args.horizons) if args.horizons else None
    try:
        est = entropy.entropy_rate(values, horizons)
    except ValueError as e:
        raise Refused(str(e)) from None
    _emit_json(args, {"slope": est.slope, "last_difference": est.last_difference,
                      "horizons": est.horizons, "values": est.values})


def cmd_entropy_periodicity(args):
    grid, group = _grid_arg(args), _group(args)
    periods = _budget_guard(entropy.periodicity_check, grid, group, args.bound, budget=args.budget)
    _emit_json(args, {"periods": [p if p is not None else "exceeds bound" for p in periods]})


def cmd_entropy_measure(args):
    ts = _tileset_arg(args)
    est = entropy.measure_entropy_estimate(ts, _group(args), _pair(args.window, "x"), args.horizon,
                                           args.samples, args.seed)
    _emit_json(args, {"slope": est.slope, "per_step": est.per_step, "values": est.values,
                      "slope_over_log2": est.slope / math.log(2), "note": est.note})


def _tileset_arg(args):
    try:
        return tileset_by_name(args.tileset, args.rule6_variant)
    except FormatError as e:
        raise Malformed(str(e)) from None


def cmd_entropy_survival(args):
    ts = _tileset_arg(args)
    table = entropy.valid_path_survival(ts, _ints(args.windows), _ints(args.thresholds), args.samples, args.seed)
    if args.format == "csv":
        _emit(args, rows_to_csv(table.rows))
    else:
        _emit_json(args, {"rows": table.rows})


def cmd_entropy_constants(args):
    c = entropy.report_constants()
    _emit(args, dumps({"epsilon": str(c["epsilon"]), "M": c["M"], "refined": c["refined"]}))


# --- freegroup ----------------------------------------------------------------------

def cmd_freegroup_prob(args):
    readings = freegroup.event_readings()
    if args.event != "all":
        key = {"A": "A", "MinvA": "M^-1 A"}[args.event]
        readings = {key: readings[key]}
    _emit_json(args, {"probabilities": {k: f"{v.numerator}/{v.denominator}" for k, v in readings.items()}})


def cmd_freegroup_preimage(args):
    try:
        target = pattern_from_dict(_read_json(args))
    except FormatError as e:
        raise Malformed(str(e)) from None
    window = args.words.split(",") if args.words else None
    try:
        x = freegroup.preimage_on_tree(target, window)
    except ValueError as e:
        raise Refused(str(e)) from None
    _emit(args, dumps(pattern_to_dict(x)))


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="karica", description="Hilbert tiles, group automata and entropy experiments.")
    top = p.add_subparsers(dest="area", required=True, parser_class=_Parser)

    def leaf(sub, name, func, io=True, **kw):
        q = sub.add_parser(name, **kw)
        q.set_defaults(func=func)
        q.add_argument("--output")
        q.add_argument("--rule6-variant", choices=("a", "b"), default="b")
        if io:
            q.add_argument("--input")
        return q

    h = top.add_parser("hilbert").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = leaf(h, "path", cmd_hilbert_path, io=False)
    q.add_argument("--variant", required=True, choices=hilbert.VARIANTS)
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--format", choices=("csv", "json"), default="csv")
    q = leaf(h, "substitute", cmd_hilbert_substitute, io=False)
    q.add_argument("--tile", required=True)
    q.add_argument("--times", type=int, default=1)
    leaf(h, "derive", cmd_hilbert_derive)
    q = leaf(h, "lemma5", cmd_hilbert_lemma5, io=False)
    q.add_argument("--variant", choices=hilbert.VARIANTS, default="a")
    q.add_argument("--level", type=int, default=4)
    q.add_argument("--n", type=int, default=1)

    t = top.add_parser("tiles").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = leaf(t, "enumerate", cmd_tiles_enumerate, io=False)
    q.add_argument("--summary", action="store_true")
    leaf(t, "validate", cmd_tiles_validate)
    q = leaf(t, "bxy", cmd_tiles_bxy, io=False)
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--orientation", choices=tiles.ORIENTS, default="NE")
    q.add_argument("--label", choices=tiles.LABELS, default="a")
    q.add_argument("--margin", type=int, choices=(0, 1), default=0)
    q = leaf(t, "trace", cmd_tiles_trace)
    q.add_argument("--start", required=True, help="x,y")
    q.add_argument("--max-length", type=int, default=10 ** 6)
    leaf(t, "components", cmd_tiles_components)

    c = top.add_parser("ca").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = leaf(c, "step", cmd_ca_step)
    q.add_argument("--steps", type=int, default=1)
    q.add_argument("--sliced", action="store_true")
    q.add_argument("--stream", action="store_true", help="emit every step as JSON lines")
    for name, fn in (("preimage", cmd_ca_preimage), ("word", cmd_ca_word)):
        q = leaf(c, name, fn)
        q.add_argument("--window", default="1x1", help="WxH")
        q.add_argument("--at", default="0,0", help="lower-left cell x,y")
        if name == "word":
            q.add_argument("--horizon", type=int, default=1)
            q.add_argument("--sliced", action="store_true")

    e = top.add_parser("entropy").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name, fn in (("exact", cmd_entropy_exact), ("sampled", cmd_entropy_sampled)):
        q = leaf(e, name, fn)
        q.add_argument("--group", default="Z2")
        q.add_argument("--window", default="1x1")
        q.add_argument("--at", default="0,0")
        q.add_argument("--horizon", type=int, default=1)
        q.add_argument("--horizons", help="comma-separated list; overrides --horizon")
        q.add_argument("--m", type=int, default=1, help="slicing modulus")
        if name == "exact":
            q.add_argument("--budget", type=int, default=entropy.DEFAULT_BUDGET)
        else:
            q.add_argument("--samples", type=int, required=True)
            q.add_argument("--seed", type=int, required=True)
    q = leaf(e, "rate", cmd_entropy_rate, io=False)
    q.add_argument("--values", required=True)
    q.add_argument("--horizons")
    q = leaf(e, "periodicity", cmd_entropy_periodicity)
    q.add_argument("--group", default="Z2")
    q.add_argument("--bound", type=int, default=256)
    q.add_argument("--budget", type=int, default=2 ** 20)
    q = leaf(e, "measure", cmd_entropy_measure, io=False)
    q.add_argument("--tileset", default="simple2")
    q.add_argument("--group", default="Z2")
    q.add_argument("--window", default="1x1")
    q.add_argument("--horizon", type=int, default=8)
    q.add_argument("--samples", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q = leaf(e, "survival", cmd_entropy_survival, io=False)
    q.add_argument("--tileset", default="kari")
    q.add_argument("--windows", default="16,32,64")
    q.add_argument("--thresholds", default="1,2,4,8,16,32")
    q.add_argument("--samples", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--format", choices=("csv", "json"), default="csv")
    leaf(e, "constants", cmd_entropy_constants, io=False)

    f = top.add_parser("freegroup").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = leaf(f, "prob", cmd_freegroup_prob, io=False)
    q.add_argument("--event", choices=("A", "MinvA", "all"), default="all")
    q = leaf(f, "preimage", cmd_freegroup_preimage)
    q.add_argument("--words", help="comma-separated window words (default: whole ball)")
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except Malformed as e:
        print(f"error: malformed input: {e}", file=sys.stderr)
        return 1
    except (FileNotFoundError, IsADirectoryError) as e:
        print(f"error: malformed input: {e}", file=sys.stderr)
        return 1
    except Refused as e:
        print(f"error: refused: {e}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
