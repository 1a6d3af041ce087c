#!/usr/bin/env python3
"""Write the CSV data and plot scripts behind every published figure and table.

Everything goes through the ``qrws`` command line, so this doubles as a
worked example of the CLI. Trained models from ``train_models.py`` are
picked up from ``--models-dir`` when present; the surrogate panels are
skipped otherwise.

Render the figures afterwards with ``for f in OUT/*.plot.py; do python3 $f; done``.
"""

import argparse
import sys
from pathlib import Path

from qrws.cli import main as qrws

ALPHA = {1: "-0.589", 2: "-0.149", 3: "-0.204"}


def call(*argv) -> None:
    code = qrws([str(a) for a in argv])
    if code != 0:
        sys.exit(code)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("figures"))
    ap.add_argument("--models-dir", type=Path, default=Path("models"))
    ap.add_argument("--res", type=int, default=201, help="points per axis for phase-plane maps")
    args = ap.parse_args()
    out, models = args.out_dir, args.models_dir
    out.mkdir(parents=True, exist_ok=True)

    # oscillation of p with the number of iterations at the Grover point
    for n, k in ((2, 40), (3, 120)):
        call("simulate", "--n", n, "--phi", "pi", "--zeta", "pi", "--scan", k, "--out", out / f"scan_n{n}.csv", "--plot")

    # phase-plane maps with their ridges, then profiles along each curve
    for n in (1, 2, 3):
        call("grid", "--n", n, "--res", args.res, "--out", out / f"grid_n{n}.csv", "--plot")
        call("ridge", "--n", n, "--grid-size", args.res, "--out", out / f"ridge_n{n}.csv", "--plot")
        for curve in ("line32", "line33", "line34", "sine"):
            extra = ["--alpha", ALPHA[n]] if curve == "sine" else []
            call("profile", "--n", n, "--curve", curve, *extra, "--grid-size", args.res,
                 "--out", out / f"profile_{curve}_n{n}.csv", "--plot")

    # surrogate counterparts, including the n = 4 prediction of the combined model
    for n in (1, 2, 3):
        model = models / f"n{n}.model"
        if model.exists():
            call("ridge", "--n", n, "--source", "dnn", "--model", model, "--grid-size", args.res,
                 "--out", out / f"ridge_dnn_n{n}.csv", "--plot")
    combined = models / "combined.model"
    if combined.exists():
        call("ridge", "--n", 4, "--source", "dnn", "--model", combined, "--grid-size", args.res,
             "--out", out / "ridge_dnn_n4.csv", "--plot")

    call("reproduce", "--out-dir", out, "--models-dir", models)


if __name__ == "__main__":
    main()
