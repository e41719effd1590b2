import json
import shutil
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from polyheight import verify
from polyheight.base_model import abelian_canonical_ring, build_ring, deg
from polyheight.cli import dump_adelic, dump_polytope, dump_ring, load_adelic, load_polytope, main, run

from conftest import rngs

HEIGHT = {"t": 1, "g": 1, "polytope": "[-1,1]", "gram": [["1"]], "degM": "3"}
CL2 = {"vertices": [["-1", "-1"], ["2", "-1"], ["-1", "2"]]}


def test_integrate_example():
    code, resp = run("integrate", {"polytope": CL2, "polynomial": "x^2+y^2"})
    assert code == 0 and resp["result"]["result"] == "9/2"


def test_height_example():
    code, resp = run("height", HEIGHT)
    r = resp["result"]
    assert code == 0
    assert (r["okounkov_route"], r["bkk_route"], r["printed_formula"], r["consistent"]) == \
        ("-12", "-12", "-4", True)
    assert resp["provenance"]


def test_minima_conventions():
    payload = {"t": 2, "g": 1, "polytope": "cl:2", "gram": [[1, 0], [0, 1]]}
    code, resp = run("minima", payload)
    assert code == 0 and resp["result"]["successive_minima"] == ["-5", "-5", "-1", "0"]
    code, resp = run("minima", {**payload, "convention": "printed"})
    assert resp["result"]["successive_minima"] == ["0", "0", "-1", "-5"]


def test_okounkov_and_bkk():
    code, resp = run("okounkov", {"polytope": "[-1,1]", "fiber": "[0,3]", "gram": [[1]]})
    assert code == 0 and resp["result"]["chi_volume"] == "-12"
    ring = dump_ring(abelian_canonical_ring(1, 3, [[1]]))
    code, resp = run("bkk", {"ring": ring, "gamma": {"1": 1}, "i": 2, "polytope": "[-1,1]"})
    assert code == 0
    assert resp["result"]["I_hat"] == "-4" and resp["result"]["F_hat"] == "-12"
    # with i = 1 and gamma = omega only the roof term survives
    code, resp = run("bkk", {"ring": ring, "gamma": {"omega": 1}, "i": 1, "polytope": "[-1,1]",
                             "roofs": [{"place": "v", "lift": [[-1, 1], [1, 1]]}]})
    assert resp["result"]["I_hat"] == "6"


def test_describe_with_roofs():
    code, resp = run("describe", {"polytope": "[0,2]",
                                  "roofs": [{"place": "v", "lift": [[0, 0], [1, 1], [2, 0]]}]})
    r = resp["result"]
    assert code == 0 and r["volume"] == "2" and r["hypograph_volume"] == "1"
    assert r["f_vector"] == [2, 1]


def test_schema_error_pointer():
    code, resp = run("height", {**HEIGHT, "gram": [["one"]]})
    assert code == 2
    assert resp["error"]["name"] == "SchemaError"
    assert resp["error"]["pointer"] == "/gram/0/0"
    code, resp = run("integrate", {"polytope": CL2})
    assert code == 2


def test_domain_error_exit_code():
    code, resp = run("height", {**HEIGHT, "gram": [["-1"]]})
    assert code == 1 and resp["error"]["name"] == "NotPSD"


def test_verify_report():
    code, resp = run("verify", {"suite": ["simplex", "duality"], "seed": 7, "cases": 3})
    assert code == 0 and resp["result"]["all_passed"]
    suites = resp["result"]["suites"]
    assert len(suites) == 2 and all(s["cases"] >= 3 and s["passed"] for s in suites.values())


def _main(tmp_path, command, payload, *extra):
    src, dst = tmp_path / "in.json", tmp_path / "out.json"
    src.write_text(json.dumps(payload))
    code = main([command, "--input", str(src), "--output", str(dst), *extra])
    return code, dst.read_bytes()


def test_main_is_deterministic(tmp_path):
    a = _main(tmp_path, "verify", {"suite": "minima", "cases": 2}, "--seed", "11")
    b = _main(tmp_path, "verify", {"suite": "minima", "cases": 2}, "--seed", "11")
    assert a == b and a[0] == 0
    assert json.loads(a[1])["result"]["seed"] == 11


def test_main_accepts_request_wrapper(tmp_path):
    code, out = _main(tmp_path, "height", {"command": "height", "payload": HEIGHT})
    assert code == 0 and json.loads(out)["result"]["bkk_route"] == "-12"
    code, out = _main(tmp_path, "minima", {"command": "height", "payload": HEIGHT})
    assert code == 2


def test_main_convention_flag(tmp_path):
    payload = {"t": 1, "g": 1, "polytope": "[-1,1]", "gram": [[1]]}
    code, out = _main(tmp_path, "minima", payload, "--convention", "printed")
    assert json.loads(out)["result"]["convention"] == "printed"


def test_bad_json(tmp_path):
    src, dst = tmp_path / "in.json", tmp_path / "out.json"
    src.write_text("{not json")
    assert main(["describe", "--input", str(src), "--output", str(dst)]) == 2


@pytest.mark.skipif(shutil.which("polyheight") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["polyheight", "integrate"], input=json.dumps(
        {"polytope": "cl:2", "polynomial": "x^2+y^2"}), capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["result"] == "9/2"


def test_module_entry():
    proc = subprocess.run([sys.executable, "-m", "polyheight.cli", "height"],
                          input=json.dumps(HEIGHT), capture_output=True, text=True)
    assert proc.returncode == 0 and '"-12"' in proc.stdout


@given(rngs, st.integers(1, 3))
def test_polytope_roundtrip(rng, t):
    p = verify.random_polytope(rng, t)
    assert load_polytope(json.loads(json.dumps(dump_polytope(p)))) == p


@given(rngs, st.integers(1, 2))
def test_adelic_roundtrip(rng, t):
    P = verify.random_adelic_polytope(rng, verify.random_polytope(rng, t))
    Q = load_adelic(P.base, json.loads(json.dumps(dump_adelic(P))))
    assert Q.global_roof == P.global_roof
    assert all(Q.roof(v) == P.roof(v) and Q.weight(v) == P.weight(v) for v in P.places)


@given(rngs, st.integers(1, 2))
def test_ring_roundtrip(rng, t):
    R, top = verify.random_ring(rng, t)
    S = build_ring(json.loads(json.dumps(dump_ring(R))))
    assert S.table == R.table and S.names == R.names
    el = verify.random_element(rng, R, top)
    assert deg(S, type(el).from_terms(S, el.terms)) == deg(R, el)
