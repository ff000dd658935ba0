import subprocess
import sys

import pytest

GRID = ["--a-range=-3:3:13", "--b-range=-3:3:13"]


def run_simulation_cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "hebbian_kuramoto", *argv],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def sample_dir(tmp_path_factory):
    """CSV inputs produced by the simulation package's own command line."""
    root = tmp_path_factory.mktemp("csv")
    run_simulation_cli("simulate", "--omega=-1,-0.5,1.5", "--out", str(root / "sim"))
    run_simulation_cli("lock-scan", *GRID, "--out", str(root / "scan"))
    run_simulation_cli("feasibility", *GRID, "--out", str(root / "sweep"))
    return root


@pytest.fixture(scope="session")
def trajectory_csv(sample_dir):
    return sample_dir / "sim" / "trajectory.csv"


@pytest.fixture(scope="session")
def lock_scan_csv(sample_dir):
    return sample_dir / "scan" / "lock_scan.csv"


@pytest.fixture(scope="session")
def sweep_csv(sample_dir):
    return sample_dir / "sweep" / "feasibility.csv"
