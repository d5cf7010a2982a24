"""Drive the full file-based pipeline through the command-line interface.

Everything here goes through `surface-fixtures <subcommand>` exactly as an
external toolchain would: write a labeled PLY and a JSON fixture spec,
inspect the cloud, detect boundaries, solve a guidance field, and simulate
agents — all from files, no Python API.

Run:  python3 demos/04_cli_pipeline.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from surface_fixtures.plyio import write_cloud


def run(*args):
    cmd = [sys.executable, "-m", "surface_fixtures.cli", *map(str, args)]
    print(f"\n$ surface-fixtures {' '.join(map(str, args))}")
    proc = subprocess.run(cmd, capture_output=True, text=True, check=True)
    print(proc.stdout.strip())
    return json.loads(proc.stdout.splitlines()[-1])


with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    # annotated plate: central obstacle (1), right-edge target (2)
    n = 50
    xs, ys = np.meshgrid(np.linspace(0, 1, n), np.linspace(0, 1, n))
    positions = np.column_stack([xs.ravel(), ys.ravel(), np.zeros(n * n)])
    labels = np.zeros(n * n, dtype=int)
    labels[np.hypot(positions[:, 0] - 0.5, positions[:, 1] - 0.5) < 0.12] = 1
    labels[positions[:, 0] > 0.94] = 2
    write_cloud(tmp / "plate.ply", positions, labels=labels)

    spec = {
        "kind": "guidance",
        "regions": {"1": {"role": "obstacle"}, "2": {"role": "target"}},
        "k": 12,
        "tolerance": 1e-9,
        "seed": 3,
    }
    (tmp / "guide.json").write_text(json.dumps(spec))

    run("info", "--cloud", tmp / "plate.ply")
    run("boundaries", "--cloud", tmp / "plate.ply", "--out", tmp / "rim.ply")
    run("solve-guidance", "--cloud", tmp / "plate.ply",
        "--spec", tmp / "guide.json", "--out", tmp / "flow.ply")
    summary = run("simulate", "--cloud", tmp / "plate.ply",
                  "--spec", tmp / "guide.json", "--starts", 8,
                  "--max-steps", 400, "--out", tmp / "traj.csv")

    print(f"\nsimulation outcomes: {summary['outcomes']}")
    print("artifacts:", ", ".join(p.name for p in sorted(tmp.iterdir())))
