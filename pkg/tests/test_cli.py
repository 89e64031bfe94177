import json
import shutil
import subprocess
import sys

import pytest
from fastapi.testclient import TestClient

from relk import cli
from relk.problem import dumps, load, open_problem, serialize
from relk.service import app


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _c(z):
    return [float(z.real), float(z.imag)]


def _el(scalar, *blocks):
    return {"scalar": [[_c(complex(scalar))]], "blocks": [[[_c(complex(b))]] for b in blocks]}


# an identity ladder C + C with ideal the first summand, plus a gamma triple whose
# path starts at -1, so no lift h with h(0) = 1 exists
BAD_LIFT = {
    "format": 1,
    "algebras": {"A": {"blocks": [1, 1]}},
    "homomorphisms": {"phi": {"source": "A", "target": "A", "multiplicities": [[1, 0], [0, 1]]}},
    "ladders": {"L": {"hom": "phi", "ideal_A": [0], "ideal_B": [0]}},
    "triples": {
        "t": {"kind": "k1", "hom": "L.gamma", "p": _el(1, 1), "u": _el(1, 1),
              "g": {"samples": [_el(-1, -1), _el(1, 1)]}},
    },
}


def test_kgroups(capsys, tmp_path):
    code, out, _ = _run(capsys, "kgroups", "ex2_6", "--alg", "A")
    assert code == 0 and "K0 = Z^2, K1 = 0" in out
    code, out, _ = _run(capsys, "kgroups", "ex2_6", "--alg", "B")
    assert code == 0 and "K0 = Z," in out


def test_unknown_name_exit_2(capsys):
    code, out, err = _run(capsys, "kgroups", "ex2_6", "--alg", "nope")
    assert code == 2 and "nope" in err and out == ""
    code, _, err = _run(capsys, "relative", "no_such_fixture")
    assert code == 2


def test_relative_examples(capsys):
    code, out, _ = _run(capsys, "relative", "ex2_6")
    assert code == 0
    assert "K0(A;B) = Z" in out and "K1(A;B) = 0" in out and "(v*v, vv*, v) form, valid" in out
    assert "class of generator = [1]" in out
    code, out, _ = _run(capsys, "relative", "ex2_7")
    assert code == 0 and "K1(A;B) = Z" in out and "K0(A;B) = 0" in out


def test_relative_identity_hom(capsys, tmp_path):
    doc = {"format": 1, "algebras": {"A": {"blocks": [1, 2]}},
           "homomorphisms": {"id": {"source": "A", "target": "A", "multiplicities": [[1, 0], [0, 1]]}}}
    f = tmp_path / "id.json"
    f.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "relative", str(f))
    assert code == 0 and "K0(A;B) = 0" in out and "K1(A;B) = 0" in out


def test_not_computable_exit_3(capsys):
    code, out, err = _run(capsys, "sixterm", "ex2_8")
    assert code == 3 and "not computable" in err


def test_sixterm_interval(capsys):
    code, out, _ = _run(capsys, "sixterm", "ex2_9")
    assert code == 0 and "Z/2" in out and "NOT exact" not in out


def test_boundary_commands(capsys):
    code, out, _ = _run(capsys, "boundary", "ex2_9", "--map", "exp", "--triple", "exp_input")
    assert code == 0 and "class = -2 in K1(C0(R)) ≅ Z" in out
    code, out, _ = _run(capsys, "boundary", "ex2_8", "--map", "index", "--grid", "65")
    assert code == 0 and "output matches expected matrix, max defect" in out


def test_boundary_trivial_ladder(capsys, tmp_path):
    doc = json.loads(json.dumps(BAD_LIFT))
    doc["triples"]["t"]["g"]["samples"][0] = _el(1, 1)
    f = tmp_path / "ok.json"
    f.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "boundary", str(f), "--map", "index")
    assert code == 0 and "class = 0" in out


def test_bad_lift_exit_4(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(BAD_LIFT))
    code, out, err = _run(capsys, "boundary", str(f), "--map", "index")
    assert code == 4 and "h(0) is not 1" in err


def test_verify(capsys, tmp_path):
    code, out, _ = _run(capsys, "verify", "ex2_6", "--triple", "generator")
    assert code == 0
    code, out, _ = _run(capsys, "verify", "ex2_6", "--triple", "generator", "--certificate", "rotation")
    assert code == 0 and "rotation elementary: pass" in out
    doc = json.loads(json.dumps(open_problem("ex2_6").doc))
    doc["triples"]["generator"]["v"]["body"][0][0][1] = [0.7, 0]
    f = tmp_path / "corrupt.json"
    f.write_text(json.dumps(doc))
    code, out, _ = _run(capsys, "verify", str(f), "--triple", "generator")
    assert code == 1 and "v*v - phi(p) defect 0.51" in out


def test_fixtures_listing(capsys, tmp_path):
    code, out, _ = _run(capsys, "fixtures")
    assert code == 0 and len(out.strip().splitlines()) == 8
    code, out, _ = _run(capsys, "fixtures", "--write", str(tmp_path))
    assert code == 0 and len(list(tmp_path.glob("*.json"))) == 8


def test_bundled_files_match_generated(tmp_path, capsys):
    from relk.problem import fixture_dir

    cli.main(["fixtures", "--write", str(tmp_path)])
    capsys.readouterr()
    for f in sorted(tmp_path.glob("*.json")):
        assert f.read_text() == (fixture_dir() / f.name).read_text(), f.name


def test_canonical_round_trip():
    from relk.problem import fixture_dir

    for f in sorted(fixture_dir().glob("*.json")):
        text = f.read_text()
        assert serialize(load(json.loads(text), str(f))) == text, f.name


def test_fixture_dir_override(capsys, tmp_path, monkeypatch):
    from relk.problem import fixture_dir

    shutil.copy(fixture_dir() / "ex2_6.json", tmp_path / "mine.json")
    monkeypatch.setenv("RELK_FIXTURE_DIR", str(tmp_path))
    code, out, _ = _run(capsys, "relative", "mine")
    assert code == 0 and "K0(A;B) = Z" in out
    code, _, _ = _run(capsys, "relative", "ex2_7")
    assert code == 2


def test_machine_output(capsys):
    code, out, _ = _run(capsys, "relative", "ex2_6", "--output", "machine")
    doc = json.loads(out)
    assert doc["format"] == 1 and doc["exit_code"] == 0
    assert doc["results"]["K0"]["describe"] == "Z"
    assert out == dumps(doc) + "\n"
    code, out, _ = _run(capsys, "--output", "machine", "sixterm", "ex2_8")
    assert code == 3 and json.loads(out)["results"]["error"]["type"] == "NotComputable"


def test_deterministic(capsys):
    a = _run(capsys, "relative", "ex2_7", "--output", "machine")
    b = _run(capsys, "relative", "ex2_7", "--output", "machine")
    assert a == b


def test_flags_either_side(capsys):
    a = _run(capsys, "--grid", "65", "relative", "ex2_7")
    b = _run(capsys, "relative", "ex2_7", "--grid", "65")
    assert a == b and a[0] == 0


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "relk.cli", "kgroups", "ex2_6", "--alg", "B"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "K0 = Z" in r.stdout


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_service_routes(client):
    r = client.post("/relative", json={"fixture": "ex2_6"})
    assert r.status_code == 200
    body = r.json()
    assert body["ok"] and body["format"] == 1 and body["results"]["K0"]["describe"] == "Z"
    r = client.post("/kgroups", json={"fixture": "ex2_6", "alg": "missing"}).json()
    assert r["exit_code"] == 2 and not r["ok"]
    r = client.post("/sixterm", json={"fixture": "ex2_8"}).json()
    assert r["exit_code"] == 3
    r = client.post("/boundary", json={"fixture": "ex2_9", "map": "exp", "triple": "exp_input"}).json()
    assert r["results"]["class"] == [-2]
    r = client.post("/verify", json={"fixture": "ex2_6", "triple": "generator", "certificate": "rotation"}).json()
    assert r["ok"]
    r = client.get("/fixtures").json()
    assert len(r["results"]["fixtures"]) == 8


def test_service_inline_problem(client):
    r = client.post("/boundary", json={"problem": BAD_LIFT, "map": "index"}).json()
    assert r["exit_code"] == 4
    r = client.post("/boundary", json={"fixture": "ex2_9", "map": "sideways"})
    assert r.status_code == 422
    r = client.post("/relative", json={}).json()
    assert r["exit_code"] == 2
