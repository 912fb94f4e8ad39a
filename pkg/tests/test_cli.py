import io
import json
import math

import pytest

from masep import cli
from masep.model import state
from masep.table import read_csv
from masep.verify import CheckResult

ONE = '{"positions":[0],"species":[1]}'
PAIR = '{"positions":[0,1],"species":[2,1]}'


def call(*argv):
    buf = io.StringIO()
    code = cli.run(list(argv), buf)
    return code, buf.getvalue()


def test_exact_initial_condition():
    code, text = call("exact", "--initial", ONE, "--final", ONE, "--t", "0", "--p", "0.5")
    assert code == 0
    lines = dict(line.split(" ", 1) for line in text.splitlines())
    assert float(lines["probability"]) == pytest.approx(1.0, abs=1e-10)
    assert "error_estimate" in lines and "refinements" in lines


def test_exact_with_radii():
    code, text = call("exact", "--initial", PAIR, "--final", PAIR, "--t", "1", "--p", "1",
                      "--radii", "1.2,1.4", "--nodes", "32")
    assert code == 0
    prob = float(text.split()[1])
    assert prob == pytest.approx(math.exp(-2), abs=1e-10)


@pytest.mark.parametrize("argv", [
    ["exact", "--initial", ONE, "--final", ONE, "--t", "1", "--p", "2"],
    ["exact", "--initial", ONE, "--final", ONE, "--t", "-1", "--p", "0.5"],
    ["exact", "--initial", '{"positions":[1,0],"species":[1,1]}', "--final", ONE,
     "--t", "1", "--p", "0.5"],
    ["exact", "--initial", ONE, "--final", ONE, "--t", "1", "--p", "0.5", "--radii", "1.3,1.2"],
    ["exact", "--initial", ONE, "--final", ONE, "--p", "0.5"],
    ["distribution", "--initial", ONE, "--t", "1", "--p", "0.5", "--window", "3:1"],
    ["distribution", "--initial", ONE, "--t", "1", "--p", "0.5", "--window", "2:5"],
    ["exact", "--initial", "not json", "--final", ONE, "--t", "1", "--p", "0.5"],
    ["nonsense"],
])
def test_invalid_input(argv):
    assert call(*argv)[0] == 1


def test_non_convergence_exit_code():
    code, _ = call("exact", "--initial", PAIR, "--final", PAIR, "--t", "30", "--p", "0.5",
                   "--radii", "3,3.5", "--nodes", "8", "--max-refinements", "1", "--tol", "1e-14")
    assert code == 3


def test_distribution_and_oracle_compare(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    common = ["--initial", PAIR, "--t", "1", "--p", "0.7", "--window=-12:12"]
    assert call("distribution", *common, "-o", str(a))[0] == 0
    assert call("oracle", *common, "-o", str(b))[0] == 0
    da, db = read_csv(open(a)), read_csv(open(b))
    assert set(da.probs) == set(db.probs)
    code, text = call("compare", str(a), str(b), "--tol", "1e-8")
    assert code == 0
    assert text.startswith("max_abs_dev") and "OK" in text


def test_compare_failure(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text("positions;species;probability\n0;1;0.5\n")
    b.write_text("positions;species;probability\n0;1;0.6\n")
    code, text = call("compare", str(a), str(b), "--tol", "1e-3")
    assert code == 2 and "EXCEEDED" in text


def test_compare_missing_file(tmp_path):
    assert call("compare", str(tmp_path / "nope.csv"), str(tmp_path / "nope2.csv"))[0] == 1


def test_simulate_csv_has_stderr():
    code, text = call("simulate", "--initial", PAIR, "--t", "0.5", "--p", "0.7",
                      "--paths", "500", "--seed", "4")
    assert code == 0
    assert text.splitlines()[0] == "positions;species;probability;stderr"
    d = read_csv(io.StringIO(text))
    assert d.total() == pytest.approx(1.0)
    assert d.stderr is not None


def test_simulate_deterministic(monkeypatch):
    monkeypatch.setenv("MASEP_WORKERS", "1")
    argv = ["simulate", "--initial", PAIR, "--t", "0.5", "--p", "0.7", "--paths", "300"]
    assert call(*argv) == call(*argv)


def test_verify_small():
    code, text = call("verify", "--n", "3", "--trials", "5", "--seed", "7")
    assert code == 0
    assert text.count("PASS") >= 10 and "FAIL" not in text
    assert call("verify", "--n", "3", "--trials", "5", "--seed", "7")[1] == text


def test_verify_failure(monkeypatch):
    monkeypatch.setattr(cli, "run_all", lambda **kw: [CheckResult("broken", 1.0, 1e-12)])
    code, text = call("verify")
    assert code == 2 and "FAIL" in text


def test_tables_default_n2():
    code, text = call("tables", "--matrix", "B")
    assert code == 0
    assert text.splitlines() == [
        "B;11;12;21;22",
        "11;1;0;0;0",
        "12;0;0;0;0",
        "21;0;1;1;0",
        "22;0;0;0;1",
    ]


def test_tables_r_exact():
    code, text = call("tables", "--n", "2", "--matrix", "R", "--xi-beta", "3", "--xi-alpha", "2")
    rows = [r.split(";") for r in text.splitlines()]
    assert rows[3] == ["21", "0", "1/4", "-3/4", "0"]


def test_amplitudes():
    code, text = call("amplitudes", "--nu", "1,2", "--xi", "2,3")
    assert code == 0
    rows = text.splitlines()
    assert rows[0] == "sigma;pi;nu;value"
    assert "2,1;2,1;1,2;1/4" in rows
    assert "2,1;1,2;1,2;-1" in rows


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"initial": {"positions": [0], "species": [1]},
                               "final": {"positions": [2], "species": [1]},
                               "t": 1.0, "p": 1.0}))
    code, text = call("exact", "--config", str(cfg))
    assert code == 0
    assert float(text.split()[1]) == pytest.approx(math.exp(-1) / 2, abs=1e-10)
    # flags beat the file
    code, text = call("exact", "--config", str(cfg), "--t", "2")
    assert float(text.split()[1]) == pytest.approx(math.exp(-2) * 2, abs=1e-10)


def test_oracle_pads_window():
    code, text = call("oracle", "--initial", ONE, "--t", "0", "--p", "0.5", "--window=-1:1")
    d = read_csv(io.StringIO(text))
    assert d.probs == {state([-1], [1]): 0.0, state([0], [1]): 1.0, state([1], [1]): 0.0}
