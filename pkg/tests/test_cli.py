import json

from qcommlab import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_matrix_csv(capsys):
    code, out, _ = run(capsys, "matrix", "--fn", "EQ", "--n", "2")
    assert code == 0
    assert out == "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n"
    code, out, _ = run(capsys, "matrix", "--fn", "DISJ", "--n", "1")
    assert code == 0 and out == "1,1\n1,0\n"


def test_matrix_json(capsys):
    code, out, _ = run(capsys, "matrix", "--fn", "INT", "--n", "1",
                       "--format", "json")
    assert code == 0
    assert json.loads(out) == {"n": 1, "values": [[0, 0], [0, 1]]}


def test_matrix_to_file(tmp_path, capsys):
    path = tmp_path / "eq.csv"
    code, out, _ = run(capsys, "matrix", "--fn", "EQ", "--n", "1",
                       "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_text() == "1,0\n0,1\n"


def test_ndet_agreement(capsys):
    for fn, n, cost in [("EQ", 3, 4), ("NEQ", 3, 2), ("INT", 4, 3),
                        ("DISJ", 2, 3)]:
        code, out, _ = run(capsys, "ndet", "--fn", fn, "--n", str(n))
        assert code == 0, (fn, out)
        assert f"protocol cost {cost}" in out
        assert "agree" in out and "DISAGREE" not in out


def test_intersect_simulation(capsys):
    code, out, _ = run(capsys, "intersect", "--n", "4", "--trials", "50",
                       "--seed", "7", "--x", "0010", "--y", "0010")
    assert code == 0
    assert "false_positives 0" in out
    code, out, _ = run(capsys, "intersect", "--n", "1", "--trials", "5",
                       "--seed", "3", "--x", "1", "--y", "1")
    assert code == 0 and "mean_cost 2.00" in out


def test_intersect_cost_only(capsys):
    code, out, _ = run(capsys, "intersect", "--n", "1048576", "--cost-only")
    assert code == 0 and out.startswith("cost_model ")


def test_intersect_requires_seed(capsys):
    code, _, err = run(capsys, "intersect", "--n", "4")
    assert code == 2 and "--seed" in err


def test_audit_commands(capsys):
    code, out, _ = run(capsys, "audit", "rank-bound", "--n", "2")
    assert code == 0 and json.loads(out)["ok"] is True
    code, out, _ = run(capsys, "audit", "eq-fullrank", "--n", "4",
                       "--trials", "100", "--seed", "1")
    assert code == 0 and json.loads(out)["ok"] is True
    code, out, _ = run(capsys, "audit", "monomial-rank", "--n", "4",
                       "--trials", "50", "--seed", "1")
    assert code == 0 and json.loads(out)["ok"] is True
    code, _, err = run(capsys, "audit", "eq-fullrank", "--n", "4")
    assert code == 2


def test_simulate_pair_and_matrix(capsys):
    code, out, _ = run(capsys, "simulate", "--fn", "EQ", "--n", "2",
                       "--x", "01", "--y", "01")
    assert code == 0
    obj = json.loads(out)
    assert obj["accept_prob"] == 1.0 and obj["cost"] == 3
    code, out, _ = run(capsys, "simulate", "--fn", "EQ", "--n", "1",
                       "--protocol", "svd", "--format", "json")
    assert code == 0 and json.loads(out)["n"] == 1


def test_deterministic_output(capsys):
    args = ["intersect", "--n", "8", "--trials", "20", "--seed", "11"]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_usage_errors_exit_two(capsys):
    code, _, _ = run(capsys, "matrix", "--fn", "BAD", "--n", "2")
    assert code == 2
    code, _, _ = run(capsys, "nosuch")
    assert code == 2
    code, _, _ = run(capsys, "matrix", "--fn", "EQ", "--n", "11")
    assert code == 2
