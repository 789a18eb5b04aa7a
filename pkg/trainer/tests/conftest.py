import json
import subprocess

import pytest


def gen_dataset(out, basis, delta, seed=42, resolution=64, extra=()):
    proc = subprocess.run(
        ["hamflow", "gen", "--basis", basis, "--delta", delta,
         "--seed", str(seed), "--resolution", str(resolution),
         "--out", str(out), *extra],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def b1_dataset(tmp_path_factory):
    """Full (b1, d3) dataset at 128px: 8 functions x 50 clouds."""
    out = tmp_path_factory.mktemp("b1") / "ds"
    return gen_dataset(out, "b1", "d3", resolution=128)


@pytest.fixture(scope="session")
def b2_dataset(tmp_path_factory):
    """Full (b2, d3) dataset at 32px: 242 functions x 50 clouds."""
    out = tmp_path_factory.mktemp("b2") / "ds"
    return gen_dataset(out, "b2", "d3", resolution=32)


def score_with_cli(dataset_dir, predictions):
    proc = subprocess.run(
        ["hamflow", "score", "--dataset", str(dataset_dir),
         "--predictions", str(predictions)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)
