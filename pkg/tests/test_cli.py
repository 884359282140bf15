import json

import numpy as np
import pytest

from karica import automaton as A, hilbert, tiles as T
from karica.cli import run
from karica.io import config_from_dict, config_to_dict, dumps, grid_from_dict, grid_to_dict


def call(tmp_path, *argv):
    out = tmp_path / "out.txt"
    code = run([*argv, "--output", str(out)])
    return code, out.read_text() if out.exists() else ""


def write(tmp_path, obj, name="in.json"):
    p = tmp_path / name
    p.write_text(dumps(obj))
    return str(p)


def test_hilbert_path_csv(tmp_path):
    code, text = call(tmp_path, "hilbert", "path", "--variant", "a", "--level", "1")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "step,x,y"
    cells = [tuple(map(int, ln.split(",")[1:])) for ln in lines[1:]]
    assert cells == hilbert.basic_path("a") == [(0, 0), (0, 1), (1, 1), (1, 0)]


def test_constants(tmp_path):
    code, text = call(tmp_path, "entropy", "constants")
    assert code == 0
    assert json.loads(text) == {"epsilon": "1/64", "M": 64, "refined": 4}


def test_ca_step_all_invalid(tmp_path, kari):
    blank = next(i for i, t in enumerate(kari.tiles) if t.basic == "blank_cross")
    g = T.uniform_grid(kari, blank, 3, 3)
    cfg = A.Configuration(g, A.cyclic(3), np.arange(9).reshape(3, 3) % 3)
    code, text = call(tmp_path, "ca", "step", "--input", write(tmp_path, config_to_dict(cfg)))
    assert code == 0
    assert json.loads(text)["gamma"] == config_to_dict(cfg)["gamma"]


def test_ca_step_chain(tmp_path):
    g = T.uniform_grid(T.simple_tileset(2), 0, 3, 1)
    cfg = A.Configuration(g, A.cyclic(2), [[1, 1, 0]])
    code, text = call(tmp_path, "ca", "step", "--input", write(tmp_path, config_to_dict(cfg)))
    assert json.loads(text)["gamma"] == [0, 1, 0]


def test_round_trip():
    rng = np.random.default_rng(0)
    g = T.Grid(T.simple_tileset(2), rng.integers(0, 2, (3, 5)), "torus")
    again = grid_from_dict(json.loads(dumps(grid_to_dict(g))))
    assert np.array_equal(again.cells, g.cells) and again.topology == "torus"
    cfg = A.Configuration(g, A.parse_group("product:[Z2,Zm:3]"), rng.integers(0, 6, (3, 5)), 1, 3)
    back = config_from_dict(json.loads(dumps(config_to_dict(cfg))))
    assert np.array_equal(back.gamma, cfg.gamma) and back.group == cfg.group
    assert (back.phase, back.m) == (1, 3)
    b = T.build_bxy(2)
    b = T.build_bxy(2, margin=1)
    again = grid_from_dict(grid_to_dict(b))
    assert np.array_equal(again.cells, b.cells) and again.origin == b.origin


def test_reproducible_bytes(tmp_path):
    argv = ["entropy", "sampled", "--input", None, "--horizons", "2,4", "--samples", "30", "--seed", "7"]
    g = T.uniform_grid(T.simple_tileset(2), 0, 8, 1)
    argv[3] = write(tmp_path, grid_to_dict(g))
    outs = []
    for k in range(2):
        p = tmp_path / f"o{k}.json"
        assert run([*argv, "--output", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["command"]["seed"] == 7


def test_seed_required(tmp_path):
    assert run(["entropy", "measure", "--samples", "10"]) == 1


def test_unknown_subcommand():
    assert run(["nope"]) == 1
    assert run(["tiles", "nope"]) == 1


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["tiles", "validate", "--input", str(p)]) == 1
    p.write_text('{"tileset": "simple2", "width": 2, "height": 2, "cells": [0]}')
    assert run(["tiles", "validate", "--input", str(p)]) == 1
    assert run(["tiles", "validate", "--input", str(tmp_path / "missing.json")]) == 1


def test_budget_refusal(tmp_path):
    g = T.uniform_grid(T.simple_tileset(2), 0, 16, 1)
    code, _ = call(tmp_path, "entropy", "exact", "--input", write(tmp_path, grid_to_dict(g)),
                   "--horizon", "12", "--budget", "100")
    assert code == 2


def test_preimage_cycle_refused(tmp_path):
    g = T.uniform_grid(T.simple_tileset(2), 0, 3, 1, topology="torus")
    cfg = A.Configuration(g, A.cyclic(2), [[1, 0, 1]])
    code, _ = call(tmp_path, "ca", "preimage", "--input", write(tmp_path, config_to_dict(cfg)), "--window", "3x1")
    assert code == 2


def test_preimage_cli(tmp_path):
    g = T.build_bxy(2, margin=1)
    rng = np.random.default_rng(1)
    cfg = A.Configuration(g, A.cyclic(2), rng.integers(0, 2, g.cells.shape))
    code, text = call(tmp_path, "ca", "preimage", "--input", write(tmp_path, config_to_dict(cfg)),
                      "--window", "3x3", "--at", "2,2")
    assert code == 0
    img = A.step(config_from_dict(json.loads(text))).gamma
    assert np.array_equal(img[2:5, 2:5], cfg.gamma[2:5, 2:5])


def test_derive_cli(tmp_path):
    block = hilbert.rho_power(0, 3)[2:6, 1:5]
    code, text = call(tmp_path, "hilbert", "derive", "--input", write(tmp_path, {"block": block[::-1].tolist()}))
    assert code == 0
    assert json.loads(text)["shift"] == [1, 0]
    bad = np.zeros((2, 2), dtype=int)
    code, _ = call(tmp_path, "hilbert", "derive", "--input", write(tmp_path, {"block": bad.tolist()}))
    assert code == 2


def test_bxy_trace_components(tmp_path):
    code, text = call(tmp_path, "tiles", "bxy", "--level", "2", "--margin", "1")
    assert code == 0
    gpath = write(tmp_path, json.loads(text), "g.json")
    grid = grid_from_dict(json.loads(text))
    x, y = T.bxy_entry(grid, 2, "a")
    code, text = call(tmp_path, "tiles", "trace", "--input", gpath, "--start", f"{x},{y}")
    out = json.loads(text)
    assert sum(grid.tileset[grid.cells[cy, cx]].basic == "blank_cross" for cx, cy in out["cells"]) == 16
    code, text = call(tmp_path, "tiles", "components", "--input", gpath)
    assert code == 0 and json.loads(text)["components"]


def test_enumerate_summary(tmp_path):
    code, text = call(tmp_path, "tiles", "enumerate", "--summary")
    out = json.loads(text)
    assert code == 0 and out["count"] == sum(out["by_basic"].values())


def test_freegroup_cli(tmp_path):
    code, text = call(tmp_path, "freegroup", "prob", "--event", "A")
    assert json.loads(text)["probabilities"] == {"A": "1/2"}
    pat = {"radius": 1, "values": {"": 1, "a": 0, "b": 1, "A": 0, "B": 1}}
    code, text = call(tmp_path, "freegroup", "preimage", "--input", write(tmp_path, pat))
    assert code == 0 and json.loads(text)["radius"] == 2
    pat["values"]["a"] = 3
    code, _ = call(tmp_path, "freegroup", "preimage", "--input", write(tmp_path, pat))
    assert code == 1


def test_rate_and_survival_csv(tmp_path):
    code, text = call(tmp_path, "entropy", "rate", "--values", "1,2,3")
    assert code == 0 and json.loads(text)["slope"] == pytest.approx(1.0)
    assert call(tmp_path, "entropy", "rate", "--values", "1,2")[0] == 2
    code, text = call(tmp_path, "entropy", "survival", "--tileset", "simple2", "--windows", "8",
                      "--thresholds", "1,2", "--samples", "5", "--seed", "1")
    assert code == 0
    assert text.splitlines()[0].split(",") == ["L", "window", "probability", "samples", "seed"]
    assert len(text.splitlines()) == 3
