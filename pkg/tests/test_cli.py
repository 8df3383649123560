import json
import subprocess
import sys

import pytest

from permrank import __version__
from permrank.cli import run

EXAMPLE = [[1, 1, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1], [1, 1, 1, -1]]


def write(tmp_path, name, q, rows):
    path = tmp_path / name
    k = len(rows[0]) if rows else 0
    body = "\n".join(" ".join(str(x % q) for x in r) for r in rows)
    path.write_text(f"# test matrix\n{q} {len(rows)} {k}\n{body}\n")
    return str(path)


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_per_on_example(tmp_path, capsys):
    f3 = write(tmp_path, "a3.mat", 3, EXAMPLE)
    f7 = write(tmp_path, "a7.mat", 7, EXAMPLE)
    assert call(capsys, "per", "--q", 3, f3)[:2] == (0, "0\n")
    assert call(capsys, "per", f7)[:2] == (0, "6\n")
    assert call(capsys, "per", "--method", "naive", f7)[:2] == (0, "6\n")


def test_per_non_square(tmp_path, capsys):
    f = write(tmp_path, "r.mat", 3, [[1, 2, 0], [0, 1, 1]])
    code, _, err = call(capsys, "per", f)
    assert code == 2 and "2x3" in err


def test_input_errors(tmp_path, capsys):
    assert call(capsys, "per", str(tmp_path / "missing.mat"))[0] == 2
    bad = tmp_path / "bad.mat"
    bad.write_text("3 2 2\n1 2\n")
    code, _, err = call(capsys, "per", str(bad))
    assert code == 2 and "rows" in err
    f = write(tmp_path, "a.mat", 3, [[1]])
    assert call(capsys, "per", "--q", 5, f)[0] == 2
    even = tmp_path / "even.mat"
    even.write_text("4 1 1\n1\n")
    assert call(capsys, "per", str(even))[0] == 2
    with pytest.raises(SystemExit) as exc:
        run(["bogus"])
    assert exc.value.code == 2


def test_budget_error_message(tmp_path, capsys):
    f = write(tmp_path, "big.mat", 3, [[1] * 25 for _ in range(25)])
    code, _, err = call(capsys, "per", f)
    assert code == 2 and "budget exceeded" in err


def test_json_header_and_payload(tmp_path, capsys):
    f = write(tmp_path, "a7.mat", 7, EXAMPLE)
    for argv in (("--json", "per", f), ("per", "--json", f)):
        code, out, _ = call(capsys, *argv)
        header, payload = (json.loads(x) for x in out.splitlines())
        assert code == 0 and header["tool_version"] == __version__ and header["rng_id"]
        assert header["args"]["command"] == "per" and payload == {"per": 6}


def test_prk(tmp_path, capsys):
    f = write(tmp_path, "p.mat", 5, [[0, 0], [1, 1], [1, -1]])
    code, out, _ = call(capsys, "prk", f)
    assert code == 0 and out.splitlines()[0] == "1"
    code, out, _ = call(capsys, "--json", "prk", f)
    payload = json.loads(out.splitlines()[1])
    assert payload["prk"] == 1 and len(payload["rows"]) == len(payload["cols"]) == 1


def test_nullcheck_and_witness_reverifies(tmp_path, capsys):
    rows = [[1, 0, 1, 1], [0, 1, 1, -1]]
    assert call(capsys, "nullcheck", write(tmp_path, "s3.mat", 3, rows))[1].startswith("permanull")
    code, out, _ = call(capsys, "nullcheck", write(tmp_path, "s5.mat", 5, rows))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "not permanull" and lines[1] == "alpha 0 0"
    witness = tmp_path / "w.mat"
    witness.write_text("\n".join(lines[2:]) + "\n")
    assert call(capsys, "per", str(witness))[1] != "0\n"
    for method in ("poly", "brute"):
        code, out, _ = call(capsys, "--json", "nullcheck", "--method", method, write(tmp_path, "s5.mat", 5, rows))
        assert json.loads(out.splitlines()[1])["permanull"] is False


def test_joint(tmp_path, capsys):
    a = write(tmp_path, "a.mat", 3, [[1, 1]])
    b = write(tmp_path, "b.mat", 3, [[1, 2]])
    assert call(capsys, "joint", a, b)[1].startswith("permanull")
    assert call(capsys, "joint", a, a)[1].startswith("not permanull")
    assert call(capsys, "joint", a)[0] == 2


def test_wellspread_and_certify(tmp_path, capsys):
    rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1]] * 4
    f = write(tmp_path, "x.mat", 3, rows)
    code, out, _ = call(capsys, "wellspread", f)
    cert = json.loads(out)
    assert code == 0 and cert["success"] and set(cert) == {"success", "parts", "dims", "ineffective_count"}
    assert call(capsys, "certify", f)[1] == "CERTIFIED_FULL\n"
    z = write(tmp_path, "z.mat", 3, [[0, 1, 1]] * 4)
    assert call(capsys, "certify", z)[1] == "ZERO_COLUMN\n"
    assert call(capsys, "certify", write(tmp_path, "t.mat", 3, [[1, 1]] * 3))[0] == 2


def test_puv(tmp_path, capsys):
    e = write(tmp_path, "e.mat", 3, [[0, 1, 0], [0, 0, 1]])
    assert call(capsys, "puv", e, e)[1] == "1\n"
    full = write(tmp_path, "f.mat", 3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert int(call(capsys, "puv", full, full)[1]) >= 2


def test_verify(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, text, _ = call(capsys, "verify", "--theorem", "c1", "--q", 3, "--n", 3, "--out", out, "--workers", 1)
    report = json.loads(text)
    assert code == 0 and report["total_enumerated"] == 13 and report["passing"] == 3 and report["ok"]
    assert json.loads(out.read_text()) == report
    code, text, _ = call(capsys, "verify", "--theorem", "charthreshold", "--q", 3, "--n", 4, "--d", 2)
    assert code == 0 and json.loads(text)["findings"]
    assert call(capsys, "verify", "--theorem", "charthreshold", "--q", 3, "--n", 4)[0] == 2
    code, text, _ = call(capsys, "verify", "--theorem", "manyfriends", "--q", 3, "--n", 2)
    assert code == 0 and json.loads(text)["findings"]
    with pytest.raises(SystemExit):
        run(["verify", "--theorem", "c1", "--n", "3"])


def test_mc_and_exact(tmp_path, capsys):
    out, table = tmp_path / "r.jsonl", tmp_path / "r.csv"
    argv = ["mc", "--kind", "MC_PER_ZERO", "--q", 3, "--n", 3, "--samples", 3000, "--seed", 7, "--out", out, "--csv", table]
    r1 = json.loads(call(capsys, *argv, "--workers", 1)[1])
    r2 = json.loads(call(capsys, *argv, "--workers", 2)[1])
    assert r1["hits"] == r2["hits"] and r1["samples"] == 3000
    assert len(out.read_text().splitlines()) == 2 and len(table.read_text().splitlines()) == 3
    code, text, _ = call(capsys, "exact", "--kind", "EXACT_PER_ZERO", "--q", 3, "--n", 2)
    assert code == 0 and json.loads(text)["hits"] == 33
    assert call(capsys, "exact", "--kind", "EXACT_Z", "--q", 3, "--n", 2)[0] == 2
    with pytest.raises(SystemExit):
        run(["mc", "--kind", "EXACT_Z", "--q", "3", "--n", "2"])


def test_repeat_runs_identical(tmp_path, capsys):
    argv = ("--json", "mc", "--kind", "MC_DET_ZERO", "--q", 3, "--n", 5, "--samples", 2000, "--seed", 3, "--workers", 1)
    outs = []
    for _ in range(2):
        lines = [json.loads(x) for x in call(capsys, *argv)[1].splitlines()]
        lines[1].pop("wall_time_ms")
        outs.append(lines)
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "a7.mat", 7, EXAMPLE)
    done = subprocess.run([sys.executable, "-m", "permrank", "per", f], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout == "6\n"
    done = subprocess.run([sys.executable, "-m", "permrank", "--version"], capture_output=True, text=True)
    assert __version__ in done.stdout
