#!/usr/bin/env python3
"""Regenerate the sweeps and train the per-qubit and combined surrogates.

Writes ``n1.model``, ``n2.model``, ``n3.model`` and ``combined.model`` plus a
training-history CSV for each into ``--out-dir``; that directory is what
``qrws reproduce --models-dir`` expects.

The default sizes follow the published setup (300 000 points for n = 1, 2 and
15 000 for n = 3). ``--scale 0.1`` gives a quick run.
"""

import argparse
import logging
import time
from pathlib import Path

from qrws import Dataset, TrainConfig, generate, save_model, train
from qrws.surrogate import save_history_csv
from qrws.sweep import default_workers, save_csv

# (n, samples, layers, neurons)
PER_QUBIT = [(1, 300_000, 7, 15), (2, 300_000, 9, 13), (3, 15_000, 7, 22)]
COMBINED = (7, 24)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("models"))
    ap.add_argument("--epochs", type=int, default=200)
    ap.add_argument("--scale", type=float, default=1.0, help="multiply every sample count")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=default_workers())
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    cfg = TrainConfig(epochs=args.epochs, seed=0)

    parts = []
    for n, samples, layers, neurons in PER_QUBIT:
        t = time.perf_counter()
        data = generate(n, max(100, int(samples * args.scale)), args.seed, args.workers)
        save_csv(data, args.out_dir / f"sweep_n{n}.csv")
        parts.append(data)
        model, report = train(data, 2, layers, neurons, cfg)
        save_model(model, args.out_dir / f"n{n}.model")
        save_history_csv(report, args.out_dir / f"n{n}_history.csv")
        logging.info("n=%d L=%d N=%d val_loss=%.3e (%.0f s)", n, layers, neurons, report.best_val_loss,
                     time.perf_counter() - t)

    t = time.perf_counter()
    model, report = train(Dataset.concat(parts), 3, *COMBINED, cfg)
    save_model(model, args.out_dir / "combined.model")
    save_history_csv(report, args.out_dir / "combined_history.csv")
    logging.info("combined L=%d N=%d val_loss=%.3e (%.0f s)", *COMBINED, report.best_val_loss,
                 time.perf_counter() - t)


if __name__ == "__main__":
    main()
