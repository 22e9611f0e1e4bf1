"""Smoke test for the compiled extension.

Build first with `cargo build -p tropicurve-py` (or `--release`), then run
`python -m pytest crates/py/python`.
"""

import importlib.util
import json
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[3]


def load():
    candidates = sorted(
        (ROOT / "target").glob("*/libtropicurve_py.so"),
        key=lambda p: p.stat().st_mtime,
        reverse=True,
    )
    if not candidates:
        raise RuntimeError("build the extension with `cargo build -p tropicurve-py` first")
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "tropicurve_py.so"
    shutil.copy(candidates[0], target)
    spec = importlib.util.spec_from_file_location("tropicurve_py", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    sys.modules["tropicurve_py"] = module
    return module


tc = load()


def test_tate_curve():
    emb = tc.tate("1")
    curve = emb.tropicalize()
    assert curve.dim == 2
    assert curve.is_smooth() and curve.is_balanced()
    assert emb.is_fully_faithful()
    dirs = sorted(tuple(d) for d in curve.ray_directions())
    assert dirs == sorted([(1, 1)] * 3 + [(-1, 0)] * 3 + [(0, -1)] * 3)
    assert emb.skeleton().betti_number() == 1


def test_json_round_trip():
    emb = tc.tate("3/2")
    text = emb.to_json()
    assert json.loads(text)["schema"] == tc.SCHEMA == "tropicurve/1"
    assert tc.Embedding.from_json(text).to_json() == text


def test_pipelines():
    assert "circle-spoke" in tc.fixture_names()
    emb = tc.fixture("circle-spoke")
    ff, report = emb.faithfulize()
    assert ff.is_fully_faithful()
    assert json.loads(report)["certificate"]["fully_faithful"] is True
    smooth, _ = ff.smooth()
    assert smooth.tropicalize().is_smooth()


def test_divisors():
    g = tc.fixture("theta").skeleton()
    d = {
        "schema": "tropicurve/1",
        "kind": "divisor",
        "terms": [{"point": {"vertex": "a"}, "coeff": 2}],
    }
    b, f = g.break_divisor(json.dumps(d))
    assert sum(t["coeff"] for t in json.loads(b)["terms"]) == 2
    assert json.loads(f)["kind"] == "function"
    zero = {"schema": "tropicurve/1", "kind": "divisor", "terms": []}
    assert g.principal_witness(json.dumps(zero)) is not None


def test_errors():
    try:
        tc.tate("0")
    except ValueError:
        pass
    else:
        raise AssertionError("c = 0 must be rejected")
    try:
        tc.Curve.from_json('{"schema": "tropicurve/1"')
    except ValueError as e:
        assert "line" in str(e)
    else:
        raise AssertionError("truncated input must be rejected")
