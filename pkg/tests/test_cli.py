import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from causalflow import blrm
from causalflow._io import parse_table
from causalflow.cli import main
from causalflow.measures import CURVE_COLUMNS
from causalflow.network import format_network

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def net_file(tmp_path, ref_net):
    path = tmp_path / "blrm.net"
    path.write_text(format_network(ref_net))
    return path


@pytest.fixture
def cycle_file(tmp_path):
    path = tmp_path / "cycle.net"
    path.write_text("node a decay=1 noise=1\nnode b decay=1 noise=1\nedge a b gain=1\nedge b a gain=1\n")
    return path


def test_analyze_csv_and_svg(tmp_path, net_file):
    out, svg = tmp_path / "curve.csv", tmp_path / "curve.svg"
    code = main(["analyze", "--network", str(net_file), "--source", "x", "--target", "y",
                 "--tau-min", "0.01", "--tau-max", "100", "--tau-steps", "64", "--out", str(out), "--svg", str(svg)])
    assert code == 0
    columns, rows, footer = parse_table(out.read_text())
    assert columns == CURVE_COLUMNS and len(rows) == 64
    tau_opt = blrm.tau_opt(blrm.BlrmParams(0.1, 0.2, 10.0, 10.0))
    assert abs(footer["tau_opt"] - tau_opt) < 0.2
    assert footer["tau_res"] > footer["tau_opt"]
    root = ET.parse(svg).getroot()
    lines = root.findall(f".//{SVG}polyline")
    assert len(lines) == 6
    assert {p.get("data-name") for p in lines} == {"i_lag", "te", "r_linear", "r_wb", "s", "c"}


def test_analyze_to_stdout(capsys, net_file):
    assert main(["analyze", "--network", str(net_file), "--source", "y", "--target", "x",
                 "--tau-scale", "lin", "--tau-min", "0", "--tau-max", "10", "--tau-steps", "5"]) == 0
    columns, rows, _ = parse_table(capsys.readouterr().out)
    c = [r[columns.index("c")] for r in rows]
    assert max(abs(v) for v in c) <= 1e-9
    assert rows[0][columns.index("i_tot")] == math.inf


def test_usage_errors(net_file, tmp_path):
    assert main([]) == 1
    assert main(["analyze", "--network", str(net_file)]) == 1
    assert main(["analyze", "--network", str(net_file), "--source", "x", "--target", "q"]) == 1
    assert main(["analyze", "--network", str(net_file), "--source", "x", "--target", "y", "--tau-min", "0"]) == 1
    assert main(["analyze", "--network", str(tmp_path / "missing.net"), "--source", "x", "--target", "y"]) == 1
    assert main(["simulate", "--network", str(net_file), "--dt", "1", "--steps", "5", "--scheme", "em"]) == 1
    assert main(["bogus"]) == 1


def test_invalid_network_exit_code(cycle_file):
    assert main(["analyze", "--network", str(cycle_file), "--source", "a", "--target", "b"]) == 2
    assert main(["verify", "--network", str(cycle_file)]) == 2


def test_simulate_estimate_round_trip(tmp_path, net_file):
    traj = tmp_path / "traj.csv"
    assert main(["simulate", "--network", str(net_file), "--dt", "1", "--steps", "4000",
                 "--ensemble", "4", "--seed", "3", "--out", str(traj)]) == 0
    out = tmp_path / "est.csv"
    assert main(["estimate", "--network", str(net_file), "--trajectories", str(traj), "--source", "x",
                 "--target", "y", "--tau-scale", "lin", "--tau-min", "0", "--tau-max", "20",
                 "--tau-steps", "21", "--out", str(out)]) == 0
    columns, rows, _ = parse_table(out.read_text())
    assert columns == CURVE_COLUMNS + ("effective_n",)
    assert len(rows) == 21
    assert abs(rows[0][columns.index("i_xy")] - 0.5 * math.log(3)) < 0.1
    assert all(r[columns.index("effective_n")] > 0 for r in rows)


def test_estimate_in_memory_and_bad_trajectories(tmp_path, net_file):
    out = tmp_path / "est.csv"
    assert main(["estimate", "--network", str(net_file), "--source", "x", "--target", "y",
                 "--dt", "1", "--steps", "2000", "--ensemble", "2", "--out", str(out)]) == 0
    bad = tmp_path / "bad.csv"
    bad.write_text("time,q\n# trajectory 0\n0,1\n1,2\n")
    assert main(["estimate", "--network", str(net_file), "--trajectories", str(bad),
                 "--source", "x", "--target", "y"]) == 1


def test_byte_identical_reruns(tmp_path, net_file):
    outputs = []
    for run in range(2):
        traj, curve = tmp_path / f"t{run}.csv", tmp_path / f"c{run}.csv"
        main(["simulate", "--network", str(net_file), "--dt", "0.5", "--steps", "300",
              "--ensemble", "3", "--seed", "17", "--out", str(traj)])
        main(["estimate", "--network", str(net_file), "--trajectories", str(traj), "--source", "x",
              "--target", "y", "--out", str(curve)])
        outputs.append((traj.read_bytes(), curve.read_bytes()))
    assert outputs[0] == outputs[1]


def test_capacity_command(tmp_path):
    out = tmp_path / "cap.csv"
    assert main(["capacity", "--grid-min", "100", "--grid-max", "1e4", "--grid-steps", "3", "--out", str(out)]) == 0
    columns, rows, footer = parse_table(out.read_text())
    assert columns == ("beta_t_rel", "peak_c", "tau_res", "i_opt") and len(rows) == 3
    assert 0.5 < footer["capacity_estimate"] < 0.6 and "capacity_uncertainty" in footer
    one = tmp_path / "one.csv"
    assert main(["capacity", "--grid-min", "2", "--grid-max", "2", "--grid-steps", "1", "--out", str(one)]) == 0
    _, rows, footer = parse_table(one.read_text())
    assert len(rows) == 1 and footer == {}
    assert main(["capacity", "--grid-min", "0"]) == 1


def test_verify_command(tmp_path, net_file):
    out = tmp_path / "report.txt"
    assert main(["verify", "--network", str(net_file), "--out", str(out)]) == 0
    text = out.read_text()
    assert "FAIL" not in text and text.strip().endswith("checks passed")


def test_module_entry_point(net_file):
    res = subprocess.run([sys.executable, "-m", "causalflow", "analyze", "--network", str(net_file),
                          "--source", "x", "--target", "y", "--tau-steps", "3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith(",".join(CURVE_COLUMNS))
