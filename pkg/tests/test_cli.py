import io
import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from certlab import cli, hierarchy
from certlab.circuitcert import detect_circuit
from certlab.cubecert import pe_from_distribution
from certlab.hierarchy import PUTINAR, SDSOS, SONC, CertEntry, Certificate, Circuit, SDSOSGram
from certlab.matrixkit import SymRationalMatrix
from certlab.polycore import Polynomial
from certlab.system import ConstraintSystem

DATA = Path(__file__).resolve().parent.parent / "data"
MOTZKIN = str(DATA / "motzkin2.json")
HALFPLANE = str(DATA / "cube2_halfplane.json")


def dump(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def call(*argv):
    r = cli.run(list(argv))
    return r.exit_code, r.payload


def test_classify_motzkin():
    code, out = call("classify", "--poly", MOTZKIN)
    assert code == 0
    assert (out["circuit"], out["nonnegative"], out["sos"]) == (True, True, False)


def test_classify_non_circuit(tmp_path):
    path = dump(tmp_path, "n2.json", hierarchy.witness_signed_quadric(2).to_json())
    code, out = call("classify", "--poly", path)
    assert code == 0 and out["circuit"] is False and out["reason"] == "too_many_interior"


def test_sa_solve_halfplane():
    code, out = call("sa-solve", "--system", HALFPLANE, "--degree", "2")
    assert code == 0 and out["bound"] == "-3/2"
    code, out = call("sa-solve", "--system", HALFPLANE, "--degree", "4", "--shape", "schmuedgen")
    assert code == 0 and out["bound"] == "-1"


def test_sa_solve_infeasible_system(tmp_path):
    G = ConstraintSystem.hypercube(1, [("neg", Polynomial.constant(1, -1))], Polynomial.var(1, 0))
    code, out = call("sa-solve", "--system", dump(tmp_path, "g.json", G.to_json()), "--degree", "2")
    assert code == 1 and out["bound"] is None and out["certificate_checked"]


def test_witness_motzkin():
    code, out = call("witness", "--kind", "motzkin", "--n", "2")
    assert code == 0
    assert Polynomial.from_json(out) == hierarchy.witness_generalized_motzkin(2)
    code, out = call("witness", "--kind", "sos_friendly", "--n", "2")
    assert code == 0 and ConstraintSystem.from_json(out).n == 2
    assert call("witness", "--kind", "nope", "--n", "2")[0] == 2


def test_mms_command(tmp_path):
    code, out = call("mms", "--poly", MOTZKIN)
    assert code == 0 and out["simplex"] == "M_simplex"
    assert [2, 2] not in out["mediated_set"]
    pts = dump(tmp_path, "p.json", {"dim": 2, "points": [[0, 0], [2, 0], [0, 2]]})
    code, out = call("mms", "--points", pts)
    assert code == 0 and len(out["mediated_set"]) == 6


def test_verify_matches_library(tmp_path):
    M2 = hierarchy.witness_generalized_motzkin(2)
    poly = dump(tmp_path, "m.json", M2.to_json())
    good = Certificate(SONC, PUTINAR, 6, [CertEntry(Circuit(Fraction(1), detect_circuit(M2)))])
    low = Certificate(SONC, PUTINAR, 4, good.entries)
    for cert, lam in [(good, "0"), (low, "0"), (good, "1/2")]:
        path = dump(tmp_path, "c.json", cert.to_json())
        code, out = call("verify", "--poly", poly, "--cert", path, "--lambda", lam)
        lib = hierarchy.verify(M2, Fraction(lam), ConstraintSystem.empty(2), cert)
        assert out["accepted"] == lib.accepted
        assert code == (0 if lib.accepted else 1)
    path = dump(tmp_path, "c.json", good.to_json())
    assert call("verify", "--poly", poly, "--cert", path, "--kind", "sos")[0] == 2


def test_convert_chain(tmp_path):
    sq = SDSOSGram(((1, 0), (0, 1)), SymRationalMatrix([[1, -1], [-1, 1]]))
    cert = dump(tmp_path, "sd.json", Certificate(SDSOS, PUTINAR, 2, [CertEntry(sq)]).to_json())
    poly = dump(tmp_path, "f.json", sq.polynomial(2).to_json())
    code, out = call("convert", "--cert", cert, "--poly", poly)
    assert code == 0 and out["verification"]["accepted"]
    sonc = dump(tmp_path, "sonc.json", out["certificate"])
    system = dump(tmp_path, "cube.json", ConstraintSystem.hypercube(2).to_json())
    code, out = call("convert", "--cert", sonc, "--to", "sa", "--system", system, "--poly", poly)
    assert code == 0 and out["certificate"]["kind"] == "SA" and out["verification"]["accepted"]
    assert call("convert", "--cert", sonc, "--to", "sos")[0] == 2


def test_moment_and_condition(tmp_path):
    pe = pe_from_distribution([(0, 0), (0, 1), (1, 0), (1, 1)], [Fraction(1, 4)] * 4, 2)
    path = dump(tmp_path, "pe.json", pe.to_json())
    code, out = call("moment", "--pe", path, "--degree", "2")
    assert code == 0 and out["psd"] and out["index_sets"] == [[], [0], [1]]
    code, out = call("condition", "--pe", path, "--var", "0", "--bit", "1")
    assert code == 0 and out["level"] == 1
    point = dump(tmp_path, "pt.json", pe_from_distribution([(1, 0)], [1], 2).to_json())
    code, out = call("condition", "--pe", point, "--var", "0", "--bit", "0")
    assert code == 1 and out["error"] == "degenerate"
    assert call("moment", "--pe", path, "--degree", "6")[0] == 2


def test_exit_codes(tmp_path):
    assert call("classify", "--poly", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("classify", "--poly", str(bad))[0] == 2
    assert call("classify", "--poly", dump(tmp_path, "x.json", {"n": 2, "terms": "oops"}))[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("sa-solve", "--system", HALFPLANE)[0] == 2
    code, out = call("sa-solve", "--system", HALFPLANE, "--degree", "4", "--budget", "3")
    assert code == 3 and out["error"] == "budget"
    code, _ = call("mms", "--points", dump(tmp_path, "big.json", {"dim": 2, "points": [[0, 0], [200, 0], [0, 200]]}), "--budget", "50")
    assert code == 3


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("CERTLAB_BUDGET", "3")
    assert call("sa-solve", "--system", HALFPLANE, "--degree", "4")[0] == 3
    monkeypatch.setenv("CERTLAB_BUDGET", "lots")
    assert call("sa-solve", "--system", HALFPLANE, "--degree", "4")[0] == 2


def test_stdin_and_main(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(Path(MOTZKIN).read_text()))
    assert cli.main(["classify", "--poly", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["sos"] is False


def test_table_format(capsys):
    assert cli.main(["classify", "--poly", MOTZKIN, "--format", "table"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "circuit\ttrue" in lines and "sos\tfalse" in lines


def test_rational_strings_and_determinism():
    runs = [
        subprocess.run(
            [sys.executable, "-m", "certlab.cli", "sa-solve", "--system", HALFPLANE, "--degree", "4"],
            capture_output=True,
            check=True,
        ).stdout
        for _ in range(2)
    ]
    assert runs[0] == runs[1]
    out = json.loads(runs[0])
    assert isinstance(out["bound"], str)
    assert runs[0].decode().endswith("}\n")


@pytest.mark.parametrize("n", [2, 3])
def test_separation_exit_zero(n):
    code, out = call("separation", "--n", str(n))
    assert code == 0 and out["all_passed"]
