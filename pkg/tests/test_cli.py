import json

import pytest

from okounkov.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main, parse_number
from okounkov.wfield import WeightScalar, compare_any


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


TORIC = {"model": {"type": "toric", "vertices": [[0, 0], [1, 0], [0, 1]]},
         "valuation": {"weights": ["1"], "chart": 0}, "level_cap": 2, "m_max": 4}


def test_parse_number():
    assert parse_number("3/4") == pytest.approx(0.75)
    assert compare_any(parse_number("sqrt(5)"), WeightScalar.sqrt(5)) == 0
    assert compare_any(parse_number("1 + 2*sqrt(3)"), WeightScalar.sqrt(3, 2) + 1) == 0
    assert compare_any(parse_number({"a": 1, "b": "1/2", "D": 2}), WeightScalar.sqrt(2, "1/2") + 1) == 0


def test_body_nodal_toml(tmp_path):
    cfg = write(tmp_path, "c.toml", 'level_cap = 4\n[model]\ntype = "nodal"\n'
                                    '[valuation]\nweights = ["3", "1"]\ntiebreak = "lex"\n')
    out = tmp_path / "out"
    assert main(["body", "--config", cfg, "--out", str(out)]) == EXIT_OK
    res = json.loads((out / "body.json").read_text())
    assert res["equals_predicted"]
    assert res["body"]["vertices_text"] == [["0", "0"], ["1/2", "0"], ["0", "2"]]
    svg = (out / "body.svg").read_text()
    assert svg.count("<polygon") == 2


def test_invariants_deterministic(tmp_path):
    cfg = write(tmp_path, "c.json", TORIC)
    outs = []
    for k in range(2):
        o = tmp_path / f"o{k}"
        assert main(["invariants", "--config", cfg, "--tau", "0,1/4,1", "--out", str(o)]) == EXIT_OK
        outs.append(((o / "report.json").read_bytes(), (o / "convergence.csv").read_bytes()))
    assert outs[0] == outs[1]
    rep = json.loads(outs[0][0])
    assert rep["S_tau"]["1"] == [1, 3]
    assert rep["S_tau"]["1/4"] == [2, 3]


def test_invariants_env_threads(tmp_path, monkeypatch):
    cfg = write(tmp_path, "c.json", TORIC)
    monkeypatch.setenv("OKOUNKOV_THREADS", "1")
    a = tmp_path / "a"
    assert main(["invariants", "--config", cfg, "--out", str(a)]) == EXIT_OK
    monkeypatch.setenv("OKOUNKOV_THREADS", "4")
    b = tmp_path / "b"
    assert main(["invariants", "--config", cfg, "--out", str(b)]) == EXIT_OK
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_limits_affine(tmp_path, capsys):
    cfg = write(tmp_path, "l.json", {"sequence": {"type": "affine", "base": [[0], [0]],
                                                  "slope": [["1"], ["2"]]}})
    assert main(["limits", "--config", cfg]) == EXIT_OK
    res = json.loads(capsys.readouterr().out)
    assert res["cofinite_empty"] and res["pointwise"]["vertices_text"] == [["0"]]


def test_limits_chamber_sweep(tmp_path, capsys):
    cfg = write(tmp_path, "s.json", {"chamber_sweep": {"ratios": ["3", "4"], "m_max": 3}})
    assert main(["limits", "--config", cfg]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["all_identical"]


@pytest.mark.parametrize("cfg", [
    {},
    {"model": {"type": "quintic"}},
    {"model": {"type": "toric", "vertices": [[0, 0], [1, 0], [0, 1]]}},
    {"model": {"type": "toric", "vertices": [[0, 0], [1, 0], [0, 1]]},
     "valuation": {"weights": ["1", "-2"]}},
    {"model": {"type": "nodal"}, "valuation": {"weights": [0.5, 1]}},
])
def test_config_errors_write_nothing(tmp_path, cfg):
    path = write(tmp_path, "bad.json", cfg)
    out = tmp_path / "out"
    assert main(["body", "--config", path, "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_bad_json_and_missing_file(tmp_path):
    path = write(tmp_path, "bad.json", "{not json")
    assert main(["body", "--config", path]) == EXIT_CONFIG
    assert main(["body", "--config", str(tmp_path / "nope.json")]) == EXIT_CONFIG
    assert main(["body"]) == EXIT_CONFIG


def test_wall_is_reported(tmp_path):
    cfg = write(tmp_path, "w.json", {"model": {"type": "nodal"},
                                     "valuation": {"weights": ["5", "1"], "tiebreak": "lex"},
                                     "level_cap": 2})
    out = tmp_path / "o"
    assert main(["body", "--config", cfg, "--out", str(out)]) == EXIT_OK
    res = json.loads((out / "body.json").read_text())
    assert res["predicted"] is None and "wall" in res["predicted_error"]


def test_verify_subset(tmp_path, capsys):
    out = tmp_path / "v"
    assert main(["verify", "--criteria", "A4,A13", "--out", str(out)]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert [l.split()[0] for l in lines] == ["A4", "A13"]
    assert json.loads((out / "verify.json").read_text())["all_passed"]


def test_verify_failure_exit(monkeypatch):
    import okounkov.acceptance as acc
    monkeypatch.setitem(acc.CHECKS, "A4", lambda: (False, "forced"))
    assert main(["verify", "--criteria", "A4"]) == EXIT_FAIL


def test_verify_fault_injection_a1(monkeypatch, capsys):
    import okounkov.acceptance as acc

    def fib(n):
        a, b = 1, 1
        for _ in range(n):
            a, b = b, a + b
        return a
    monkeypatch.setitem(acc.CHECKS, "A1", lambda: acc.check_a1(d=fib))
    assert main(["verify", "--criteria", "A1,A13"]) == EXIT_FAIL
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("A1 FAIL") and lines[1].startswith("A13 PASS")


def test_body_examples(tmp_path):
    cfg = write(tmp_path, "n.json", {"model": {"type": "nodal"}, "level_cap": 6,
                                     "valuation": {"weights": ["3", "1"], "tiebreak": "lex"}})
    out = tmp_path / "n"
    assert main(["body", "--config", cfg, "--out", str(out)]) == EXIT_OK
    res = json.loads((out / "body.json").read_text())
    assert res["body"]["vertices_text"] == [["0", "0"], ["1/2", "0"], ["0", "2"]]
    assert res["equals_predicted"]
    cfg = write(tmp_path, "t.json", {"model": {"type": "toric", "vertices": [[0, 0], [1, 0], [0, 1]]},
                                     "valuation": {"weights": ["1", "sqrt(2)"]}, "level_cap": 1})
    out = tmp_path / "t"
    assert main(["body", "--config", cfg, "--out", str(out)]) == EXIT_OK
    res = json.loads((out / "body.json").read_text())
    assert sorted(res["body"]["vertices_text"]) == [["0", "0"], ["0", "1"], ["1", "0"]]
    assert res["body"]["volume"] == [1, 2]


def test_invariants_tau_zero_and_note(tmp_path):
    cfg = write(tmp_path, "c.json", TORIC)
    out = tmp_path / "o"
    assert main(["invariants", "--config", cfg, "--tau", "0,1/4,1", "--out", str(out)]) == EXIT_OK
    rep = json.loads((out / "report.json").read_text())
    assert rep["S_tau"]["0"] == rep["T"] == [1, 1]
    assert rep["delta_tau"]["1"] == [3, 1]
    assert "Q_tau" in rep["meta"]["s_tau_formula"]
    csv_text = (out / "convergence.csv").read_text()
    assert "." not in csv_text


def test_verify_unknown_criterion():
    assert main(["verify", "--criteria", "A99"]) == EXIT_CONFIG
