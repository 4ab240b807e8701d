import io
import json
import subprocess
import sys

import pytest

from nexalc.cli import main
from nexalc.semantics import Interpretation
from conftest import EXAMPLE_KBS


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


@pytest.fixture
def ex1_tbox(files):
    return files("ex1.kb", "\n".join(EXAMPLE_KBS[1][0]) + "\n")


class TestSat:
    def test_unsat(self, files):
        tbox = files("t.kb", "A (-) 1/5 [= B (-) 3/10\n")
        query = files("q.kb", "A >= 1/2\nB < 3/5\n")
        code, out = run("sat", "--tbox", tbox, "--query", query)
        assert code == 1 and out == "UNSAT\n"

    def test_unsat_under_worked_kb(self, files, ex1_tbox):
        query = files("q.kb", "A >= 1/2\nB < 3/5\n")
        assert run("sat", "--tbox", ex1_tbox, "--query", query) == (1, "UNSAT\n")

    def test_sat_with_model(self, files):
        query = files("q.kb", "p >= 1/2\n")
        code, out = run("sat", "--query", query, "--model", "-", "--stats", "--print-grid")
        assert code == 0 and out.startswith("grid:")
        assert "SAT\n" in out and "model:" in out and "stats:" in out
        body = out.split("model:\n", 1)[1].split("stats:")[0]
        data = json.loads(body)
        I = Interpretation.from_json(data)
        assert data["designated"] in I.domain
        assert "0.5" not in out

    def test_model_file_and_dump(self, files, tmp_path):
        query = files("q.kb", "some R . A > 1/2\n")
        model, dump = tmp_path / "m.json", tmp_path / "g.json"
        code, _ = run("sat", "--query", query, "--on-the-fly", "--model", str(model), "--dump-graph", str(dump))
        assert code == 0
        assert len(Interpretation.loads(model.read_text()).domain) == 2
        assert json.loads(dump.read_text())["nodes"]

    def test_abox(self, files):
        abox = files("a.kb", "a : A >= 1\n(a, b) : R >= 1\na : all R . !B >= 1\nb : B >= 1\n")
        code, out = run("sat", "--query", abox)
        assert code == 1 and out == "UNSAT\n"

    def test_malformed(self, files, capsys):
        query = files("q.kb", "A >= 1/2\nB &\n")
        code, out = run("sat", "--query", query)
        assert code == 2 and out == ""
        assert "2:4" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run("sat", "--query", str(tmp_path / "nope.kb"))[0] == 2

    def test_bad_arguments(self):
        assert run("sat")[0] == 2
        assert run("frobnicate")[0] == 2


class TestValid:
    def test_worked_kb(self, ex1_tbox):
        code, out = run("valid", "--tbox", ex1_tbox, "--assertion", EXAMPLE_KBS[1][1])
        assert code == 0 and out == "VALID\n"

    def test_batch(self, ex1_tbox):
        code, out = run("valid", "--tbox", ex1_tbox, "--assertion", EXAMPLE_KBS[1][1], "--batch", "--stats")
        assert code == 0 and out.startswith("VALID\nstats:")

    def test_ground(self):
        assert run("valid", "--assertion", "0.3 >= 0.5") == (1, "INVALID\n")

    def test_countermodel(self, files):
        tbox = files("t.kb", "A [= B\n")
        code, out = run("valid", "--tbox", tbox, "--assertion", "B >= 1/2", "--model", "-")
        assert code == 1 and out.startswith("INVALID\nmodel:")

    def test_bad_assertion(self):
        assert run("valid", "--assertion", "A >=")[0] == 2


class TestOracleCommands:
    def test_oracle_unsat(self, files):
        tbox = files("t.kb", "A (-) 1/5 [= B (-) 3/10\n")
        query = files("q.kb", "A >= 1/2\nB < 3/5\n")
        assert run("oracle", "--tbox", tbox, "--query", query) == (1, "NO_MODEL_UP_TO(3)\n")

    def test_oracle_sat_and_budget(self, files):
        query = files("q.kb", "A >= 1/2\n")
        code, out = run("oracle", "--query", query, "--model")
        assert code == 0 and out.startswith("SAT(1)\nmodel:")
        tbox = files("t.kb", "A (-) 1/5 [= B (-) 3/10\n")
        query = files("q2.kb", "A >= 1/2\nB < 3/5\n")
        assert run("oracle", "--tbox", tbox, "--query", query, "--budget", "5") == (3, "ABORTED(3)\n")
        assert run("oracle", "--query", query, "--max-domain", "0")[0] == 2

    def test_crisp(self, files):
        code, out = run("crisp", "--kb", files("c.kb", "A & !A\n"))
        assert code == 0
        assert out == "fuzzy: UNSAT\nclassical: UNSAT\nclassical brute force: NO_MODEL_UP_TO(3)\nAGREE\n"
        code, out = run("crisp", "--kb", files("d.kb", "A [= some R . A\nA\n"))
        assert code == 0 and out.endswith("AGREE\n")


def test_deterministic(files, ex1_tbox):
    query = files("q.kb", "A >= 1/2\n(all R . B) (-) 1/5 >= 1/2\n")
    a = run("sat", "--tbox", ex1_tbox, "--query", query, "--model", "-", "--stats")
    b = run("sat", "--tbox", ex1_tbox, "--query", query, "--model", "-", "--stats")
    assert a == b and a[0] == 0


def test_module_entry_point(files):
    query = files("q.kb", "p >= 1/2\n")
    proc = subprocess.run([sys.executable, "-m", "nexalc", "sat", "--query", query],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "SAT\n"
