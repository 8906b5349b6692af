import json
import math

import numpy as np
import pytest

from lamcomm.cli import OK, USAGE, VIOLATIONS, main, parse_dims
from lamcomm.serialize import write_matrix

J2 = np.array([[0, 1], [0, 0]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, m in {"jordan2": J2, "x": X, "eye": np.eye(3)}.items():
        paths[name] = str(tmp_path / f"{name}.json")
        write_matrix(paths[name], m)
    c, s = math.cos(0.3), math.sin(0.3)
    paths["z"] = str(tmp_path / "z.json")
    write_matrix(paths["z"], np.diag([1.0, -1.0]))
    paths["rot"] = str(tmp_path / "rot.json")
    write_matrix(paths["rot"], np.array([[c, -s], [s, c]]))
    bad = {
        "truncated": '{"dim": 2, "entries": [[[1, 0], [0, 0]], [[0',
        "nonsquare": '{"dim": 2, "entries": [[[1, 0], [0, 0]], [[0, 0]]]}',
        "nan": '{"dim": 1, "entries": [[[NaN, 0]]]}',
        "bools": '{"dim": 1, "entries": [[[true, false]]]}',
        "strings": '{"dim": 1, "entries": [[["1", "0"]]]}',
        "array": '[[1, 0]]',
    }
    for name, text in bad.items():
        paths[name] = str(tmp_path / f"{name}.json")
        (tmp_path / f"{name}.json").write_text(text)
    paths["missing"] = str(tmp_path / "missing.json")
    return paths


def test_parse_dims():
    assert parse_dims("2..5") == (2, 3, 4, 5)
    assert parse_dims("3,2") == (3, 2)


@pytest.mark.parametrize("name", ["truncated", "nonsquare", "nan", "bools", "strings", "array", "missing"])
def test_malformed_inputs_exit_2(capsys, files, name):
    code, out, err = run(capsys, "classify", files[name])
    assert code == USAGE
    assert out == "" and "error" in err


def test_truncated_json_reports_position(capsys, files):
    _, _, err = run(capsys, "classify", files["truncated"])
    assert "line 1 column" in err


@pytest.mark.parametrize("argv", [
    ["nosuch"],
    ["verify", "--theorem", "nosuch", "--family", "clock_shift:3"],
    ["verify", "--family", "clock_shift:3"],
    ["suite", "--trials", "0"],
    ["search", "--theorem", "thm_9", "--trials", "1"],
    ["pair", "clock_shift", "--dim", "1"],
    ["pair", "nosuch"],
    ["classify", "x.json", "--psd-tol", "-1"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == USAGE


def test_classify_table_for_jordan_block(capsys, files):
    code, out, _ = run(capsys, "classify", files["jordan2"], "--table")
    assert code == OK
    rows = {line.split()[0]: line.split()[1:] for line in out.splitlines()[1:]}
    assert rows["hyponormal"] == ["nonmember", "-1.000e+00"]
    assert rows["quasinilpotent"][0] == "member"


def test_classify_identity_is_member_of_every_class(capsys, files):
    code, out, _ = run(capsys, "classify", files["eye"])
    doc = json.loads(out)
    classes = doc["results"][0]["classes"]
    assert code == OK
    bad = {c: e["verdict"] for c, e in classes.items() if e["verdict"] not in ("member", "inapplicable")
           and c != "quasinilpotent"}
    assert bad == {}


def test_pair_output_feeds_classify_and_verify(capsys, tmp_path):
    out_dir = tmp_path / "pair"
    assert run(capsys, "pair", "clock_shift", "--dim", "3", "--out", str(out_dir))[0] == OK
    cert = json.loads((out_dir / "certificate.json").read_text())["results"][0]
    assert cert["lam"] == pytest.approx([-0.5, math.sqrt(3) / 2], abs=1e-12)
    assert run(capsys, "classify", str(out_dir / "A.json"))[0] == OK
    code, out, _ = run(capsys, "verify", "--all", "--a", str(out_dir / "A.json"), "--b", str(out_dir / "B.json"),
                       "--json")
    assert code == OK
    statuses = {r["theorem_id"]: r["status"] for r in json.loads(out)["results"]}
    assert statuses["power_identity"] == "confirmed"
    assert "violated" not in statuses.values()


def test_pair_without_out_prints_certificate(capsys):
    code, out, _ = run(capsys, "pair", "direct_sum", "--of", "clock_shift:2,clock_shift:2")
    assert code == OK
    assert json.loads(out)["results"][0]["lam"] == [-1.0, 0.0]


def test_verify_vacuous_exits_zero(capsys, files):
    code, out, _ = run(capsys, "verify", "--theorem", "modulus", "--a", files["jordan2"], "--b", files["x"])
    assert code == OK
    assert "vacuous" in out


def test_verify_violation_exits_one(capsys, files):
    # loosening eq_tol lets a pair that does not lambda-commute through the premise
    code, out, _ = run(capsys, "verify", "--theorem", "modulus", "--a", files["z"], "--b", files["rot"],
                       "--eq-tol", "1")
    assert code == VIOLATIONS
    assert "violated" in out


def test_suite_is_byte_identical(capsys, tmp_path):
    argv = ["suite", "--dims", "2..3", "--trials", "3", "--seed", "5"]
    first = run(capsys, *argv, "--report", str(tmp_path / "a.json"))
    second = run(capsys, *argv, "--report", str(tmp_path / "b.json"))
    assert first[0] == second[0] == OK
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_search_reports_json(capsys):
    code, out, _ = run(capsys, "search", "--theorem", "power_identity", "--trials", "5")
    assert code == OK
    assert json.loads(out)["results"][0]["theorems"]["power_identity"]["violated"] == 0
