import argparse
import json
import math

import pytest

from ghost.cli import OutputFormat, RunConfig, main, read_config_file
from ghost.errors import DomainViolation
from ghost.fields import Identity, Quadratic, VectorField1D
from ghost.passage import DEFAULT_IV
from ghost.results import fit_record, read_samples_csv
from ghost.scaling import SweepSpec, fit_samples, sweep

SMALL_SWEEP = ["--r-lo", "1e-4", "--r-hi", "1e-2", "--points", "3"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- sweep ---

def test_sweep_writes_csv(tmp_path, capsys):
    target = tmp_path / "quadratic.csv"
    code, _, _ = run(capsys, "sweep", "--phase", "quadratic", *SMALL_SWEEP, "-o", str(target))
    assert code == 0
    samples, labels = read_samples_csv(target)
    assert len(samples) == 3
    assert samples[0].r == pytest.approx(1e-2)
    assert samples[0].t == pytest.approx(29.422553, rel=1e-7)
    assert labels == {"engine": "quadrature", "phase": "quadratic", "param": "identity"}


def test_sweep_to_stdout_is_reproducible(capsys):
    argv = ["sweep", "--phase", "power:1.5", *SMALL_SWEEP]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == second[0] == 0
    assert first[1] == second[1]
    assert first[1].splitlines()[0] == "r,t,engine,phase,param"


def test_sweep_invalid_arguments(capsys):
    assert run(capsys, "sweep", "--phase", "quadratic", "--points", "2")[0] == 2
    assert run(capsys, "sweep", "--phase", "cubic")[0] == 2
    assert run(capsys, "sweep")[0] == 2
    assert run(capsys, "sweep", "--phase", "quadratic", "--engine", "closed_form")[0] == 2


def test_sweep_failure_exits_3(capsys):
    code, out, err = run(capsys, "sweep", "--phase", "pendulum:2", *SMALL_SWEEP, "--interval=-1,1")
    assert code == 3
    assert out == ""
    assert "r=" in err


# --- fit ---

def test_sweep_then_fit_matches_in_process(tmp_path, capsys):
    target = tmp_path / "quadratic.csv"
    assert run(capsys, "sweep", "--phase", "quadratic", "--points", "9", "-o", str(target))[0] == 0
    code, out, _ = run(capsys, "fit", str(target))
    assert code == 0
    expected = fit_record(fit_samples(sweep(VectorField1D(Quadratic(), Identity()), SweepSpec(points=9))))
    assert json.loads(out) == expected
    assert json.loads(out)["model"] == "power"


def test_fit_constant_csv(sample_csv, capsys):
    path = sample_csv([(1e-2, 2.0), (1e-3, 2.0), (1e-4, 2.0)])
    code, out, _ = run(capsys, "fit", str(path), "--candidates")
    assert code == 0
    payload = json.loads(out)
    assert payload["selected"]["model"] == "constant"
    assert payload["selected"]["prefactor"] == 2.0
    assert [c["model"] for c in payload["candidates"]] == ["constant", "logarithmic", "power"]


def test_fit_bad_inputs(tmp_path, capsys):
    malformed = tmp_path / "bad.csv"
    malformed.write_text("a,b\n1,2\n")
    assert run(capsys, "fit", str(malformed))[0] == 2

    nonpositive = tmp_path / "negative.csv"
    nonpositive.write_text("r,t,engine,phase,param\n0.1,-1.0,quadrature,quadratic,identity\n")
    assert run(capsys, "fit", str(nonpositive))[0] == 2

    header_only = tmp_path / "empty.csv"
    header_only.write_text("r,t,engine,phase,param\n")
    assert run(capsys, "fit", str(header_only))[0] == 3

    assert run(capsys, "fit", str(tmp_path / "missing.csv"))[0] == 2


# --- scan ---

def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--alphas", "0.5,1,2")
    assert code == 0
    entries = json.loads(out)
    assert [e["alpha"] for e in entries] == [0.5, 1.0, 2.0]
    assert [e["model"] for e in entries] == ["constant", "logarithmic", "power"]
    assert entries[2]["exponent"] == pytest.approx(0.5, abs=0.02)


def test_scan_rejects_unsorted_alphas(capsys):
    assert run(capsys, "scan", "--alphas", "2,1", *SMALL_SWEEP)[0] == 2
    assert run(capsys, "scan", "--alphas", "one,two")[0] == 2


# --- pendulum ---

def test_pendulum_bottleneck(capsys):
    code, out, _ = run(capsys, "pendulum", "--a", "2", "--omega", "1.01")
    assert code == 0
    payload = json.loads(out)
    assert payload["time"] == pytest.approx(10.0 * math.pi * math.atan(5.0), rel=1e-6)
    assert payload["a"] == 2.0
    assert payload["engine"] == "quadrature"


def test_pendulum_limit(capsys):
    code, out, _ = run(capsys, "pendulum", "--a", "0.5", "--mode", "limit")
    assert code == 0
    assert json.loads(out)["limit"] == pytest.approx(math.pi * math.sqrt(0.5) / 0.5, rel=1e-6)
    assert run(capsys, "pendulum", "--a", "2", "--mode", "limit")[0] == 3


def test_pendulum_modes_need_omega(capsys):
    assert run(capsys, "pendulum", "--a", "2", "--mode", "rotation")[0] == 2
    assert run(capsys, "pendulum", "--a", "2", "--omega", "1.0")[0] == 3


def test_pendulum_sweep(capsys):
    code, out, _ = run(capsys, "pendulum", "--a", "2", "--mode", "sweep", *SMALL_SWEEP)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 4
    assert lines[1].endswith(",quadrature,pendulum:2,omega-1")


def test_pendulum_sweep_below_unit_exponent(capsys):
    code, out, _ = run(capsys, "pendulum", "--a", "0.5", "--mode", "sweep", "--r-lo", "1e-10", "--r-hi", "1e-6",
                       "--points", "5")
    assert code == 0
    assert len(out.splitlines()) == 6


# --- table and curves ---

def test_table(capsys):
    code, out, _ = run(capsys, "table", "--points", "13")
    assert code == 0
    assert "SCALING LAWS FOR THREE EXAMPLES" in out
    rows = {line.split("|")[0].strip(): line.split("|")[1].strip() for line in out.splitlines()
            if line.count("|") == 2 and "scaling" not in line}
    assert rows == {"sqrt(x)": "constant", "x": "logarithmic", "x^2": "square-root"}


def test_curves_figure_1(capsys):
    code, out, _ = run(capsys, "curves", "--figure", "1", "--samples", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,a,r,f"
    assert len(lines) == 1 + 3 * 3 * 5


def test_curves_figure_3(tmp_path, capsys):
    target = tmp_path / "figure3.csv"
    code, _, _ = run(capsys, "curves", "--figure", "3", "--exponents", "2", "--samples", "5", "-o", str(target))
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "theta,a,F,one_minus_F,one_plus_F"
    middle = [float(v) for v in lines[3].split(",")]
    assert middle[0] == 0.0
    assert middle[3] == pytest.approx(1.0)
    assert run(capsys, "curves", "--figure", "3", "--samples", "1")[0] == 2
    assert run(capsys, "curves", "--figure", "2")[0] == 2


# --- config files ---

def test_config_file(tmp_path, capsys):
    config = tmp_path / "sweep.cfg"
    config.write_text("# small quadratic sweep\nphase = quadratic\nr_lo = 1e-4\nr_hi = 1e-2\npoints = 3\n")
    code, out, _ = run(capsys, "sweep", "--config", str(config))
    assert code == 0
    assert len(out.splitlines()) == 4

    code, out, _ = run(capsys, "sweep", "--config", str(config), "--points", "4")
    assert code == 0
    assert len(out.splitlines()) == 5


def test_config_file_errors(tmp_path, capsys):
    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("colour = red\n")
    assert run(capsys, "sweep", "--phase", "quadratic", "--config", str(unknown))[0] == 2

    garbled = tmp_path / "garbled.cfg"
    garbled.write_text("just words\n")
    assert run(capsys, "sweep", "--config", str(garbled))[0] == 2
    assert run(capsys, "sweep", "--config", str(tmp_path / "missing.cfg"))[0] == 2


def test_read_config_file(tmp_path):
    config = tmp_path / "flags.cfg"
    config.write_text("verbose = yes\nthreads = 2\ncandidates = off\n")
    assert read_config_file(config) == ["--verbose", "--threads=2"]
    nested = tmp_path / "nested.cfg"
    nested.write_text("config = other.cfg\n")
    with pytest.raises(DomainViolation):
        read_config_file(nested)


# --- run settings ---

def test_run_config_validates_before_running():
    args = argparse.Namespace(r_lo=1e-6, r_hi=1e-2, points=5, engine="ode",
                              interval=DEFAULT_IV, output=None)
    run = RunConfig.from_args(args, "quadratic/identity")
    assert run.spec.points == 5
    assert run.fmt is OutputFormat.CSV
    with pytest.raises(DomainViolation):
        RunConfig.from_args(argparse.Namespace(**{**vars(args), "points": 2}), "quadratic/identity")


def test_linear_phase_sweep_fits_logarithmic(tmp_path, capsys):
    target = tmp_path / "linear.csv"
    assert run(capsys, "sweep", "--phase", "power:1", "-o", str(target))[0] == 0
    code, out, _ = run(capsys, "fit", str(target))
    assert code == 0
    assert json.loads(out)["model"] == "logarithmic"
