import json
import subprocess
import sys

import pytest

import cgca_al as c

DS_TRAIN_PER_TYPE = 40
DS_TEST_PER_CARD = 10


def run_pcpa(*args):
    """The diagnosis toolkit is driven only through its CLI here."""
    proc = subprocess.run([sys.executable, "-m", "pcpa.cli", *map(str, args)],
                         capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    """Grid + area files and a small dataset produced by the toolkit CLI."""
    ws = tmp_path_factory.mktemp("cgca")
    run_pcpa("convert-case", "--grid", "ieee30", "-o", ws / "grid.json")
    run_pcpa("area", "--grid", "ieee30", "--size", "8", "--lines", "8",
             "-o", ws / "area.json")
    run_pcpa("dataset", "--grid", "ieee30", "--area", ws / "area.json",
             "--train", DS_TRAIN_PER_TYPE, "--test", DS_TEST_PER_CARD,
             "--seed", "12", "-o", ws / "ds")
    return ws


@pytest.fixture(scope="session")
def spec(workspace):
    return c.load_graph_spec(workspace / "grid.json", workspace / "area.json")


@pytest.fixture(scope="session")
def dataset(workspace, spec):
    return c.load_dataset(workspace / "ds", spec)
