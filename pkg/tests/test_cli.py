"""Command-line behaviour: dispatch, output modes, exit codes, determinism."""

import json

import pytest

from msc.cli import main

SCALAR_FIELD = """
[setup]
base_dim = 2
fiber_dim = 1

[connection.gamma]
1,1,1 = "3"

[forms]
Pi  = "p1_1*hook(e_x1, vol) + p2_1*hook(e_x2, vol)"
Phi = "v1"
one = "1"
bad = "p2_1*hook(e_x1, vol)"
"""

KLEIN_GORDON = """
[setup]
base_dim = 2
fiber_dim = 1

[lagrangian]
L = "1/2*j1_1^2 + 1/2*j1_2^2"

[section.sol]
v1 = "x1 + 2*x2"
p1_1 = "1"
p2_1 = "2"
"""


@pytest.fixture
def scalar_doc(tmp_path):
    path = tmp_path / "scalar.msc"
    path.write_text(SCALAR_FIELD)
    return str(path)


@pytest.fixture
def kg_doc(tmp_path):
    path = tmp_path / "kg.msc"
    path.write_text(KLEIN_GORDON)
    return str(path)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_bracket_command(scalar_doc, capsys):
    code, out, _ = run(capsys, ["--file", scalar_doc, "bracket", "Pi", "Phi"])
    assert code == 0
    assert out.strip() == "1"
    code, out, _ = run(capsys, ["--file", scalar_doc, "bracket", "Phi", "Phi"])
    assert code == 0
    assert out.strip() == "0"


def test_dv_command(scalar_doc, capsys):
    code, out, _ = run(capsys, ["--file", scalar_doc, "dv", "Phi"])
    assert code == 0
    assert out.strip() == "Ev1"


def test_bullet_commands(scalar_doc, capsys):
    for left in ("Pi", "Phi"):
        code, out, _ = run(capsys, ["--file", scalar_doc, "bullet", left, "one"])
        assert code == 0
        assert out.strip() == "0"


def test_rejection_exit_code(scalar_doc, capsys):
    code, out, _ = run(capsys, ["--file", scalar_doc, "is-hamiltonian", "bad"])
    assert code == 1
    assert "rejected" in out


def test_json_output(scalar_doc, capsys):
    code, out, _ = run(capsys, ["--output", "json", "--file", scalar_doc,
                                "bracket", "Pi", "Phi"])
    assert code == 0
    payload = json.loads(out)
    assert payload["degree"] == 0
    assert payload["status"] == "hamiltonian"
    assert payload["text"] == "1"


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "broken.msc"
    path.write_text("[setup]\nbase_dim = 2\n")
    code, _, err = run(capsys, ["--file", str(path), "dv", "x"])
    assert code == 2
    assert "parse error" in err or "fiber_dim" in err


def test_missing_file_is_usage_error(capsys):
    code, _, err = run(capsys, ["dv", "x"])
    assert code == 2


def test_legendre_and_residuals(kg_doc, capsys):
    code, out, _ = run(capsys, ["--file", kg_doc, "legendre"])
    assert code == 0
    assert out.splitlines()[0] == "H = -1/2*p2_1^2 - 1/2*p1_1^2"
    code, out, _ = run(capsys, ["--file", kg_doc, "el-residual", "sol"])
    assert code == 0
    assert out.strip() == "E1 = 0"
    code, out, _ = run(capsys, ["--file", kg_doc, "ham-residual", "sol"])
    assert code == 0
    assert all(line.endswith("= 0") for line in out.strip().splitlines())


def test_verify_pass_and_determinism(capsys):
    argv = ["verify", "--property", "dv2", "--trials", "20", "--seed", "7",
            "--base-dim", "2", "--fiber-dim", "1"]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert "result: PASS" in out1


def test_verify_json_deterministic(capsys):
    argv = ["--output", "json", "verify", "--property", "closure",
            "--trials", "10", "--seed", "11"]
    code1, out1, _ = run(capsys, argv)
    code2, out2, _ = run(capsys, argv)
    assert code1 == 0 and out1 == out2
    payload = json.loads(out1)
    assert payload["result"] == "PASS"
    assert payload["failures"] == []


def test_verify_rejects_oversized_bounds(capsys):
    code, _, err = run(capsys, ["verify", "--property", "dv2",
                                "--trials", "5", "--base-dim", "9"])
    assert code == 2


def test_global_seed_feeds_verify(capsys):
    a = run(capsys, ["--seed", "5", "verify", "--property", "dv2",
                     "--trials", "10"])
    b = run(capsys, ["verify", "--property", "dv2", "--trials", "10",
                     "--seed", "5"])
    assert a == b
