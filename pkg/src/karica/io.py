"""JSON and CSV formats.

Grids serialise row-major with the north row first; in memory row 0 is south.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np

from .automaton import Configuration, parse_group
from .freegroup import BallPattern
from .tiles import DirectedTileSet, Grid, kari_tileset, simple_tileset, stop_tileset


class FormatError(ValueError):
    pass


def tileset_by_name(name: str, rule6_variant: str = "b") -> DirectedTileSet:
    if name == "kari":
        return kari_tileset(rule6_variant)
    if name == "simple2stop":
        return stop_tileset()
    if name.startswith("simple"):
        try:
            return simple_tileset(int(name[len("simple"):]))
        except ValueError:
            pass
    raise FormatError(f"unknown tileset {name!r}")


def _need(obj: dict, key: str, kind):
    if key not in obj:
        raise FormatError(f"missing field {key!r}")
    if not isinstance(obj[key], kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return obj[key]


def _rows_from_flat(flat, width: int, height: int) -> np.ndarray:
    if len(flat) != width * height or not all(isinstance(v, int) for v in flat):
        raise FormatError("cell list does not match width x height integers")
    return np.asarray(flat, dtype=np.int64).reshape(height, width)[::-1]


def grid_to_dict(grid: Grid) -> dict:
    return {
        "tileset": grid.tileset.name,
        "topology": grid.topology,
        "width": grid.width,
        "height": grid.height,
        "cells": grid.cells[::-1].ravel().tolist(),
        "origin": list(grid.origin),
    }


def grid_from_dict(obj: Any, rule6_variant: str = "b") -> Grid:
    if not isinstance(obj, dict):
        raise FormatError("grid must be a JSON object")
    ts = tileset_by_name(_need(obj, "tileset", str), rule6_variant)
    w, h = _need(obj, "width", int), _need(obj, "height", int)
    cells = _rows_from_flat(_need(obj, "cells", list), w, h)
    origin = obj.get("origin", [0, 0])
    if not (isinstance(origin, list) and len(origin) == 2 and all(isinstance(v, int) for v in origin)):
        raise FormatError("origin must be a pair of integers")
    try:
        return Grid(ts, cells, obj.get("topology", "window"), tuple(origin))
    except ValueError as e:
        raise FormatError(str(e)) from None


def config_to_dict(config: Configuration) -> dict:
    out = grid_to_dict(config.grid)
    out.update({
        "group": config.group.name,
        "gamma": config.gamma[::-1].ravel().tolist(),
        "phase": config.phase,
        "m": config.m,
    })
    return out


def config_from_dict(obj: Any, rule6_variant: str = "b") -> Configuration:
    grid = grid_from_dict(obj, rule6_variant)
    try:
        group = parse_group(_need(obj, "group", str))
    except ValueError as e:
        raise FormatError(str(e)) from None
    gamma = _rows_from_flat(_need(obj, "gamma", list), grid.width, grid.height)
    try:
        return Configuration(grid, group, gamma, int(obj.get("phase", 0)), int(obj.get("m", 1)))
    except ValueError as e:
        raise FormatError(str(e)) from None


def pattern_to_dict(p: BallPattern) -> dict:
    return {"radius": p.radius, "values": dict(p.values)}


def pattern_from_dict(obj: Any) -> BallPattern:
    if not isinstance(obj, dict):
        raise FormatError("pattern must be a JSON object")
    r = _need(obj, "radius", int)
    vals = _need(obj, "values", dict)
    if any(v not in (0, 1) for v in vals.values()):
        raise FormatError("pattern values must be 0 or 1")
    try:
        return BallPattern(r, dict(vals))
    except ValueError as e:
        raise FormatError(str(e)) from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from None


def path_to_csv(cells) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "x", "y"])
    for i, (x, y) in enumerate(cells):
        w.writerow([i, x, y])
    return buf.getvalue()


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()
