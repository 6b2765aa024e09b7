import json
import subprocess
import sys

from liewreath.cli import run_command
from liewreath.polyjet import jet_from_json


def run(capsys, *argv):
    code = run_command(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tcoeffs(capsys):
    code, out, _ = run(capsys, "tcoeffs", "--order", "4")
    assert code == 0 and out.strip() == "1, 1/2, 1/12, 0, -1/720"
    code, out, _ = run(capsys, "--json", "tcoeffs", "--order", "2")
    assert json.loads(out)["payload"] == ["1", "1/2", "1/12"]


def test_check_lie(capsys, tmp_path):
    code, out, _ = run(capsys, "check-lie", "sl2")
    assert code == 0 and out.startswith("pass")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "bad", "basis": ["a", "b", "c"], "brackets": [
        {"i": 0, "j": 1, "v": {"c": "1"}}, {"i": 1, "j": 2, "v": {"a": "1"}}, {"i": 0, "j": 2, "v": {"a": "-1"}}]}))
    code, out, _ = run(capsys, "--json", "check-lie", str(bad))
    rep = json.loads(out)
    assert code == 1 and rep["status"] == "fail" and rep["payload"]["kind"] == "jacobi"
    assert rep["payload"]["indices"] and any(c != "0" for c in rep["payload"]["defect"])


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "check-lie", str(tmp_path / "missing.json"))[0] == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, err = run(capsys, "series-bracket", "--lhs", str(broken), "--rhs", str(broken))
    assert code == 2 and "--lhs" in err
    assert run(capsys, "fundamental", "sl2", "--elem", "q")[0] == 2
    assert run(capsys, "tcoeffs", "--order", "x")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_fundamental_round_trip(capsys):
    code, out, _ = run(capsys, "--json", "fundamental", "heisenberg_3", "--elem", "x", "--order", "5")
    jet = jet_from_json(json.loads(out)["payload"])
    assert code == 0 and jet.polynomial and jet.degree() == 1


def test_series_bracket(capsys):
    xi = json.dumps({"source": ["x"], "target": ["x"], "order": 2, "polynomial": True,
                     "terms": [{"deg": 2, "mono": [2], "coord": 0, "c": "1"}]})
    eta = json.dumps({"source": ["x"], "target": ["x"], "order": 1, "polynomial": True,
                      "terms": [{"deg": 1, "mono": [1], "coord": 0, "c": "1"}]})
    code, out, _ = run(capsys, "--json", "series-bracket", "--lhs", xi, "--rhs", eta)
    terms = json.loads(out)["payload"]["terms"]
    assert code == 0 and terms == [{"deg": 2, "mono": [2], "coord": 0, "c": "-1"}]
    f = json.dumps({"source": ["t"], "target": ["x", "y", "z"], "order": 1, "polynomial": True,
                    "terms": [{"deg": 0, "mono": [0], "coord": 0, "c": "1"}]})
    g = json.dumps({"source": ["t"], "target": ["x", "y", "z"], "order": 1, "polynomial": True,
                    "terms": [{"deg": 1, "mono": [1], "coord": 1, "c": "1"}]})
    code, out, _ = run(capsys, "--json", "series-bracket", "heisenberg_3", "--lhs", f, "--rhs", g)
    assert json.loads(out)["payload"]["terms"] == [{"deg": 1, "mono": [1], "coord": 2, "c": "1"}]


def _element(f_terms, b, labels_y, labels_a, order=3):
    return json.dumps({"f": {"source": labels_y, "target": labels_a, "order": order, "polynomial": True,
                             "terms": f_terms}, "b": {"coords": b}})


def test_wreath_bracket_abelian(capsys):
    # (bg' - cf', 0) with f = y², g = y, b = 2, c = 3
    u = _element([{"deg": 2, "mono": [2], "coord": 0, "c": "1"}], ["2"], ["e1"], ["e1"])
    v = _element([{"deg": 1, "mono": [1], "coord": 0, "c": "1"}], ["3"], ["e1"], ["e1"])
    code, out, _ = run(capsys, "--json", "wreath-bracket", "abelian_1", "abelian_1", "--order", "3",
                       "--lhs", u, "--rhs", v)
    pay = json.loads(out)["payload"]
    got = {(t["deg"], t["c"]) for t in pay["f"]["terms"]}
    assert code == 0 and got == {(0, "2"), (1, "-6")} and pay["b"]["coords"] == ["0"]


def test_triangular(capsys, tmp_path):
    action = tmp_path / "act.json"
    action.write_text(json.dumps({"algebra": "abelian_1", "space": ["x"], "order": 1, "images": {
        "e1": {"source": ["x"], "target": ["x"], "order": 1, "polynomial": True,
               "terms": [{"deg": 1, "mono": [1], "coord": 0, "c": "1"}]}}}))
    u = _element([{"deg": 1, "mono": [1], "coord": 0, "c": "1"}], ["1"], ["e1"], ["e1"])
    code, out, _ = run(capsys, "--json", "triangular", str(action), "abelian_1", "abelian_1",
                       "--elem", u, "--order", "3")
    terms = {(tuple(t["mono"]), t["coord"], t["c"]) for t in json.loads(out)["payload"]["terms"]}
    assert code == 0 and terms == {((1, 1), 0, "1"), ((0, 0), 1, "1")}


def test_kk_embed(capsys):
    code, out, _ = run(capsys, "kk-embed", "solvable_2_extension", "--elem", "e1", "--order", "4", "--verify")
    assert code == 0 and "verify: pass" in out
    code, out, _ = run(capsys, "--json", "kk-embed", "solvable_2_extension", "--elem", "0,1", "--order", "3")
    pay = json.loads(out)["payload"]
    assert [t["c"] for t in pay["f"]["terms"]] == ["1", "1", "1/2", "1/6"]


def test_verify_deterministic(capsys, monkeypatch):
    monkeypatch.setenv("LIEW_WORKERS", "2")
    code1, out1, _ = run(capsys, "--json", "verify", "--suite", "embedding", "--order", "6", "--seed", "1")
    monkeypatch.setenv("LIEW_WORKERS", "1")
    code2, out2, _ = run(capsys, "--json", "verify", "--suite", "embedding", "--order", "6", "--seed", "1")
    assert code1 == code2 == 0 and out1 == out2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "liewreath.cli", "tcoeffs", "--order", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "1, 1/2, 1/12, 0"
    assert proc.stderr.startswith("time:")
