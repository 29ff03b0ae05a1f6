import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from extforge import golden
from extforge.cli import main

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"


@pytest.mark.parametrize("name", golden.NAMES)
def test_rebuild_matches_committed(name):
    assert golden.render(golden.build(name)) == (GOLDEN / f"{name}.json").read_text()


def test_independent_process_matches():
    # a fresh interpreter with a different hash seed
    env = dict(os.environ, PYTHONHASHSEED="12345")
    r = subprocess.run([sys.executable, str(ROOT / "scripts" / "make_golden.py"), "--check"], env=env, capture_output=True, text=True)
    assert r.returncode == 0, r.stdout + r.stderr


@pytest.mark.parametrize("algo", ["tre", "crtre", "raz", "nmraz-toy", "rate-half-toy"])
def test_cli_reproduces_vectors(capsys, algo):
    data = json.loads((GOLDEN / f"{algo}.json").read_text())
    params = ROOT / "params" / f"{algo}.json"
    assert json.loads(params.read_text()) == data["params"]
    for v in data["vectors"]:
        code = main(["extract", "--algo", algo, "--params", str(params), "--x", v["x"], "--seed", v["y"], "--allow-out-of-regime"])
        out = capsys.readouterr().out
        assert code == 0 and out.strip() == v["out"]
