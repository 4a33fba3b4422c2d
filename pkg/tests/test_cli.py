from __future__ import annotations

import json

import pytest

from route_incentives.cli import run_cli
from route_incentives.topology import Topology, balanced_tree, line, ring


def call(capsys, *argv):
    code = run_cli(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def topo_file(tmp_path):
    def write(t: Topology, name="topo.json"):
        path = tmp_path / name
        path.write_text(json.dumps(t.to_dict()))
        return str(path)
    return write


def test_growth_csv(capsys):
    code, out, _ = call(capsys, "growth", "--max-k", "7")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "k,f,f_diff,factorial_k_minus_2"
    assert lines[-1] == "7,155,120,120"


def test_ring_matrix_rd6(capsys):
    code, out, _ = call(capsys, "ring-matrix", "--rd", "6")
    doc = json.loads(out)
    assert code == 0
    assert doc["reduced_actions"] == {"rows": ["2", "3"], "cols": ["1", "3"]}
    assert doc["pure_ne"] == []
    assert len(doc["br_cycle"]) == 4


def test_ring_matrix_csv_and_out_dir(capsys, tmp_path):
    code, out, _ = call(capsys, "ring-matrix", "--rd", "5", "--format", "csv",
                        "--out-dir", str(tmp_path))
    assert code == 0
    assert out.startswith("r1\\r2,")
    assert (tmp_path / "ring_matrix.csv").read_text() == out
    assert json.loads((tmp_path / "ring_matrix.json").read_text())["pure_ne"]


def test_ring_matrix_literal(capsys):
    _, out, _ = call(capsys, "ring-matrix", "--rd", "6", "--resolution", "literal")
    assert ["2", "1"] in json.loads(out)["pure_ne"]


def test_min_incentive(capsys, topo_file):
    code, out, _ = call(capsys, "min-incentive", "--topology", topo_file(ring(3)), "--bound", "9")
    assert code == 0
    assert json.loads(out)["r_d"] == "3"


def test_min_incentive_bound_exceeded_is_not_an_error(capsys, topo_file):
    code, out, _ = call(capsys, "min-incentive", "--topology", topo_file(line(4)), "--bound", "3")
    assert code == 0
    assert json.loads(out)["r_d"] == "none"


def test_construct_verify_simulate_round_trip(capsys, tmp_path, topo_file):
    prof = tmp_path / "line_spe_rd3.json"
    assert call(capsys, "construct", "--shape", "line", "--rd", "3", "--depth", "3",
                "--out", str(prof))[0] == 0
    code, out, _ = call(capsys, "verify", "--profile", str(prof), "--mode", "spe")
    assert code == 0 and json.loads(out)["equilibrium"] is True
    code, out, _ = call(capsys, "simulate", "--strategy", "file", "--profile", str(prof),
                        "--trials", "10", "--seed", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["converged"] and doc["unanimous"]
    assert doc["tree"]["received"] == {"1": "3", "2": "2", "3": "1"}


@pytest.mark.parametrize("argv", [
    ["--shape", "ring2", "--rd", "4"],
    ["--shape", "ring-special", "--depth", "4"],
])
def test_construct_ring_profiles_are_nash(capsys, tmp_path, argv):
    prof = tmp_path / "p.json"
    assert call(capsys, "construct", *argv, "--out", str(prof))[0] == 0
    code, out, _ = call(capsys, "verify", "--profile", str(prof), "--mode", "nash")
    assert code == 0 and json.loads(out)["equilibrium"] is True


def test_construct_tree(capsys, tmp_path, topo_file):
    prof = tmp_path / "tree.json"
    path = topo_file(balanced_tree(2, 2))
    assert call(capsys, "construct", "--shape", "tree", "--rd", "3", "--topology", path,
                "--out", str(prof))[0] == 0
    assert call(capsys, "verify", "--profile", str(prof))[0] == 0


def test_verify_failure_exits_one(capsys, tmp_path):
    prof = tmp_path / "rs.json"
    call(capsys, "construct", "--shape", "ring-special", "--depth", "4", "--out", str(prof))
    code, out, _ = call(capsys, "verify", "--profile", str(prof), "--mode", "spe")
    doc = json.loads(out)
    assert code == 1
    assert doc["equilibrium"] is False
    assert int(doc["failure"]["witness"]["gain"]) > 0


def test_simulate_builtin_strategies(capsys, topo_file):
    code, out, _ = call(capsys, "simulate", "--topology", topo_file(line(3)), "--rd", "3",
                        "--trials", "5", "--strategy", "line-spe")
    assert code == 0
    assert set(json.loads(out)) >= {"converged", "rounds", "tree", "unanimous"}
    code, out, _ = call(capsys, "simulate", "--topology", topo_file(ring(4)), "--rd", "5",
                        "--trials", "5", "--strategy", "ring-special", "--format", "dot")
    assert code == 0
    assert out.startswith("digraph") and "5 -> 7" in out


def test_simulate_wrong_shape(capsys, topo_file):
    code, _, err = call(capsys, "simulate", "--topology", topo_file(ring(3)), "--rd", "3",
                        "--strategy", "line-spe")
    assert code == 2 and "tree" in err


def test_bad_topology_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nodes": ["0", "1", "2", "3"], "destination": "0",
                               "edges": [["0", "1"], ["2", "3"]]}))
    code, _, err = call(capsys, "min-incentive", "--topology", str(bad), "--bound", "3")
    assert code == 2 and "disconnected" in err
    code, _, _ = call(capsys, "simulate", "--topology", str(tmp_path / "missing.json"), "--rd", "1")
    assert code == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli(["frobnicate"])
    assert exc.value.code == 2
    assert call(capsys, "construct", "--shape", "line", "--rd", "3")[0] == 2
    assert call(capsys, "growth", "--max-k", "3", "--format", "dot")[0] == 2


def test_outputs_are_byte_identical(capsys, tmp_path, topo_file):
    path = topo_file(balanced_tree(2, 2))
    runs = []
    for _ in range(2):
        runs.append(call(capsys, "simulate", "--topology", path, "--rd", "4", "--trials", "8",
                         "--seed", "11")[1])
        runs.append(call(capsys, "ring-matrix", "--rd", "7")[1])
        call(capsys, "construct", "--shape", "ring-special", "--depth", "5",
             "--out", str(tmp_path / f"c{len(runs)}.json"))
    assert runs[0] == runs[2] and runs[1] == runs[3]
    assert (tmp_path / "c2.json").read_bytes() == (tmp_path / "c4.json").read_bytes()


def test_json_numbers_are_strings(capsys, tmp_path):
    prof = tmp_path / "p.json"
    call(capsys, "construct", "--shape", "line", "--rd", "4", "--depth", "2", "--out", str(prof))
    text = prof.read_text()

    def walk(node):
        if isinstance(node, dict):
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)
        else:
            assert not isinstance(node, (int, float)) or isinstance(node, bool)

    walk(json.loads(text))
