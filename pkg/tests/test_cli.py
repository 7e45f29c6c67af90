import json

import pytest
from fastapi.testclient import TestClient

from igusa2d import runner
from igusa2d.algebra import PolyQT, ZetaRat
from igusa2d.cli import main
from igusa2d.service import app


def call(capsys, *argv):
    rc = main(list(argv))
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


@pytest.fixture
def f_path(inputs_dir):
    return str(inputs_dir / "model_f.json")


@pytest.fixture
def g_path(inputs_dir):
    return str(inputs_dir / "model_g.json")


def write(tmp_path, doc) -> str:
    path = tmp_path / "in.json"
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


# -- exit codes ---------------------------------------------------------------------

@pytest.mark.parametrize("cmd", runner.COMMANDS)
def test_all_commands_succeed_on_model(capsys, f_path, cmd):
    rc, out, _ = call(capsys, cmd, "--input", f_path, "--max-level", "3")
    assert rc == 0 and out.startswith(f"command: {cmd}")


@pytest.mark.parametrize("doc", ["{oops", {"polynomial": {"expanded": []}},
                                 {"p": 4, "polynomial": {"expanded": [[1, 1, 0]]}}])
def test_input_errors_exit_one(capsys, tmp_path, doc):
    rc, _, err = call(capsys, "zeta", "--input", write(tmp_path, doc))
    assert rc == 1
    assert json.loads(err)["status"] == 1


def test_missing_file_exits_one(capsys, tmp_path):
    rc, _, _ = call(capsys, "geom", "--input", str(tmp_path / "absent.json"))
    assert rc == 1


def test_prime_required_for_zeta(capsys, tmp_path):
    path = write(tmp_path, {"polynomial": {"expanded": [[1, 1, 0]]}})
    assert call(capsys, "zeta", "--input", path)[0] == 1
    assert call(capsys, "zeta", "--input", path, "--prime", "3")[0] == 0


def test_degenerate_exits_two(capsys, inputs_dir):
    rc, _, err = call(capsys, "zeta", "--input", str(inputs_dir / "degenerate.json"))
    assert rc == 2
    assert "degenerate" in json.loads(err)["reason"]
    rc, _, _ = call(capsys, "check", "--input", str(inputs_dir / "degenerate.json"))
    assert rc == 2


def test_mismatch_exits_three(capsys, monkeypatch, f_path):
    real = runner.verify

    def perturbed(f, p, M, z):
        return real(f, p, M, z + ZetaRat(PolyQT.mono(2, 2)))

    monkeypatch.setattr(runner, "verify", perturbed)
    rc, out, err = call(capsys, "verify", "--input", f_path, "--max-level", "4", "--format", "json")
    assert rc == 3
    assert json.loads(err)["reason"] == "count mismatch at m=3"
    assert json.loads(out)["result"]["report"]["first_mismatch"] == 3


def test_max_level_bound_from_environment(capsys, monkeypatch, f_path):
    monkeypatch.setenv(runner.MAX_LEVEL_ENV, "2")
    assert call(capsys, "verify", "--input", f_path, "--max-level", "3")[0] == 1
    assert call(capsys, "verify", "--input", f_path, "--max-level", "2")[0] == 0
    monkeypatch.setenv(runner.MAX_LEVEL_ENV, "zero")
    assert call(capsys, "verify", "--input", f_path, "--max-level", "1")[0] == 1


def test_default_bound():
    assert runner.max_level_bound() == runner.DEFAULT_MAX_LEVEL_BOUND


# -- output documents ---------------------------------------------------------------

def test_json_is_byte_identical(capsys, g_path):
    first = call(capsys, "zeta", "--input", g_path, "--format", "json")[1]
    second = call(capsys, "zeta", "--input", g_path, "--format", "json")[1]
    assert first == second
    doc = json.loads(first)
    assert doc["input_hash"].startswith("sha256:") and doc["decisions"]["mode"] == "simple"


def test_hash_ignores_key_order():
    a = {"p": 3, "polynomial": {"expanded": [[1, 1, 0]]}}
    b = {"polynomial": {"expanded": [[1, 1, 0]]}, "p": 3}
    assert runner.canonical_hash(a) == runner.canonical_hash(b)


def test_latex_lists_poles(capsys, g_path):
    rc, out, _ = call(capsys, "zeta", "--input", g_path, "--format", "latex")
    assert rc == 0
    poles = next(line for line in out.splitlines() if line.startswith(r"\mathrm{poles}"))
    for s in (r"-\frac{1}{2}", r"-\frac{3}{10}", r"-\frac{7}{20}", r"-\frac{5}{18}", "-1"):
        assert s in poles


def test_zeta_then_verify_agree(capsys, f_path):
    z = json.loads(call(capsys, "zeta", "--input", f_path, "--format", "json")[1])
    v = json.loads(call(capsys, "verify", "--input", f_path, "--format", "json")[1])
    assert z["input_hash"] == v["input_hash"] and z["decisions"] == v["decisions"]
    assert v["result"]["report"]["all_match"]


def test_verify_csv(capsys, f_path):
    out = call(capsys, "verify", "--input", f_path, "--max-level", "2")[1]
    assert "m,predicted,counted,match\n1,1,1,1\n2,9,9,1" in out


def test_modes_agree_on_poles(capsys, g_path):
    docs = [json.loads(call(capsys, "poles", "--input", g_path, "--mode", m, "--format", "json")[1])
            for m in runner.MODES]
    assert docs[0]["result"]["actual"] == docs[1]["result"]["actual"]


# -- service ------------------------------------------------------------------------

@pytest.fixture
def client():
    return TestClient(app)


def test_service_health(client):
    assert client.get("/health").json()["ok"]


def test_service_matches_in_process(client, capsys, f_path):
    doc = json.loads(open(f_path).read())
    resp = client.post("/zeta", json=doc).json()
    local = json.loads(call(capsys, "zeta", "--input", f_path, "--format", "json")[1])
    assert resp["status"] == 0 and resp["document"] == local


def test_service_verify_csv_and_class_error(client, inputs_dir):
    doc = json.loads((inputs_dir / "model_f.json").read_text())
    resp = client.post("/verify", json={**doc, "max_level": 2}).json()
    assert resp["csv"].startswith("m,predicted,counted,match")
    bad = json.loads((inputs_dir / "degenerate.json").read_text())
    assert client.post("/zeta", json=bad).json()["status"] == 2


def test_service_schema_rejection(client):
    assert client.post("/zeta", json={"p": 3}).status_code == 422
    assert client.post("/zeta", json={"polynomial": {"expanded": []}, "p": 3}).json()["status"] == 1
