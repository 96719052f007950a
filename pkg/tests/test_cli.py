import csv
import io as _io
import json
import subprocess
import sys

import numpy as np
import pytest

from qexpander import io
from qexpander.channel import Channel
from qexpander.cli import SWEEP_COLUMNS, main
from qexpander.generators import weyl_channel


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_channel(tmp_path, T, name="c.json"):
    path = tmp_path / name
    io.dump_json(io.channel_to_dict(T), path)
    return str(path)


def test_gen_haar_roundtrip(tmp_path, capsys):
    out = tmp_path / "h.json"
    code, _, _ = run(capsys, "gen", "--ensemble", "haar", "--dim", "4", "--degree", "3",
                     "--seed", "7", "--out", str(out))
    assert code == 0
    T = io.load_instance(out)
    assert isinstance(T, Channel) and T.dim == 4 and T.degree == 3
    first = out.read_bytes()
    run(capsys, "gen", "--ensemble", "haar", "--dim", "4", "--degree", "3", "--seed", "7",
        "--out", str(out))
    assert out.read_bytes() == first


def test_gen_weyl_and_cayley(capsys):
    code, out, _ = run(capsys, "gen", "--ensemble", "weyl", "--dim", "3")
    assert code == 0 and json.loads(out)["degree"] == 9
    code, out, _ = run(capsys, "gen", "--ensemble", "cayley", "--dim", "5", "--gens", "1,4")
    doc = json.loads(out)
    for u in doc["unitaries"]:
        m = io.matrix_from_literal(u)
        assert np.array_equal(np.sort(m.real.sum(axis=0)), np.ones(5))
        assert set(np.unique(m.real)) == {0.0, 1.0}


def test_gen_graph(capsys):
    code, out, _ = run(capsys, "gen", "--graph", "random", "--dim", "8", "--degree", "3")
    assert code == 0 and len(json.loads(out)["edges"]) == 12


def test_gen_validation_errors(capsys):
    assert run(capsys, "gen", "--ensemble", "cayley", "--dim", "5")[0] == 2
    assert run(capsys, "gen", "--ensemble", "cayley", "--dim", "5", "--gens", "1,2")[0] == 2
    assert run(capsys, "gen", "--dim", "4")[0] == 2
    assert run(capsys, "gen", "--bogus")[0] == 2
    code, _, err = run(capsys, "analyze", "--in", "/nonexistent/x.json")
    assert code == 2 and "/nonexistent/x.json" in err


def test_analyze_pauli(capsys):
    code, out, _ = run(capsys, "analyze", "--ensemble", "weyl", "--dim", "2")
    rec = json.loads(out)
    assert code == 0
    assert rec["rho"] == pytest.approx(0, abs=1e-12) and rec["unit_multiplicity"] == 1
    assert set(rec) >= {"dim", "degree", "rho", "unit_multiplicity", "is_expander_candidate",
                        "norm_estimates"}


def test_analyze_identity(tmp_path, capsys):
    path = write_channel(tmp_path, Channel((np.eye(3),)))
    rec = json.loads(run(capsys, "analyze", "--in", path)[1])
    assert rec["rho"] == pytest.approx(1) and rec["is_expander_candidate"] is False


def test_analyze_cayley(capsys):
    rec = json.loads(run(capsys, "analyze", "--ensemble", "cayley", "--dim", "5",
                         "--gens", "1,4")[1])
    assert rec["rho"] == pytest.approx(1, abs=1e-10)
    assert rec["diagonal_rho"] == pytest.approx(0.809017, abs=1e-6)
    assert rec["unit_multiplicity"] == 5


def test_analyze_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{\n  \"dim\": 2,,\n}")
    code, _, err = run(capsys, "analyze", "--in", str(path))
    assert code == 2 and "line 2" in err


def test_analyze_csv(capsys):
    code, out, _ = run(capsys, "analyze", "--ensemble", "weyl", "--dim", "2", "--format", "csv")
    rows = list(csv.DictReader(_io.StringIO(out)))
    assert code == 0 and len(rows) == 1 and rows[0]["dim"] == "2"


def test_witness_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "witness", "--ensemble", "cayley", "--dim", "5", "--gens", "1,4")
    assert code == 0 and json.loads(out)["pass"] is True
    code, _, err = run(capsys, "witness", "--ensemble", "weyl", "--dim", "2")
    assert code == 3 and "perfect mixer" in err
    code, out, _ = run(capsys, "witness", "--graph", "complete", "--dim", "4")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True and rep["rho"] == pytest.approx(1 / 3)
    code, out, _ = run(capsys, "witness", "--dim", "3", "--degree", "3", "--emit-projections")
    rep = json.loads(out)
    assert "P1" in rep and "c_eff" in rep
    assert run(capsys, "witness", "--graph", "cycle", "--dim", "4")[0] == 2


def test_sweep_table(tmp_path, capsys):
    out = tmp_path / "s.csv"
    argv = ["sweep", "--dim", "2,4,8", "--degree", "3", "--trials", "5", "--out", str(out)]
    assert run(capsys, *argv)[0] == 0
    text = out.read_text()
    rows = list(csv.DictReader(_io.StringIO(text)))
    assert text.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    assert len(rows) == 15
    assert all(r["pass"] == "True" and r["status"] == "ok" for r in rows)
    assert all(float(r["ratio"]) > float(r["guaranteed"]) for r in rows)
    run(capsys, *argv)
    assert out.read_text() == text
    par = tmp_path / "p.csv"
    run(capsys, "sweep", "--dim", "2,4,8", "--degree", "3", "--trials", "5", "--jobs", "2",
        "--out", str(par))
    assert par.read_text() == text


def test_sweep_errors(capsys):
    assert run(capsys, "sweep", "--dim", "")[0] == 2
    assert run(capsys, "sweep", "--dim", "x")[0] == 2
    assert run(capsys, "sweep", "--dim", "2", "--trials", "0")[0] == 2


def test_sweep_timing_column(capsys):
    code, out, _ = run(capsys, "sweep", "--dim", "2", "--trials", "1", "--timing")
    row = next(csv.DictReader(_io.StringIO(out)))
    assert float(row["runtime_ms"]) > 0


def test_verify_minimal(tmp_path, capsys):
    out = tmp_path / "v.json"
    code, _, _ = run(capsys, "verify", "--trials", "1", "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == 0 and all(r["pass"] and r["trials"] >= 1 for r in doc)
    assert run(capsys, "verify", "--trials", "0")[0] == 2


def test_verify_with_channel_file(tmp_path, capsys):
    path = write_channel(tmp_path, weyl_channel(3))
    code, out, _ = run(capsys, "verify", "--trials", "1", "--in", path)
    assert code == 0 and any(r["check"] == "eml_input" for r in json.loads(out))


def test_verify_rejects_corrupt_unitary(tmp_path, capsys):
    doc = io.channel_to_dict(weyl_channel(2))
    doc["unitaries"][1][0][1] = [0.9, 0.0]
    path = tmp_path / "corrupt.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "verify", "--trials", "1", "--in", str(path))
    assert code == 2 and "unitary 1" in err


def test_verify_default_run(tmp_path, capsys):
    code, _, _ = run(capsys, "verify", "--out", str(tmp_path / "v.json"))
    assert code == 0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qexpander", "analyze", "--ensemble", "weyl",
                          "--dim", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["dim"] == 2
