"""Command-line interface: ``qrws <subcommand> [flags]``.

Exit codes: 0 success, 1 runtime failure, 2 invalid input.  Failures print a
single ``error:<module>:<kind>: message`` line on stderr.  Angles are radians
and accept the token ``pi`` (``pi``, ``-pi/2``, ``2*pi``, ``0.8pi``).

A ``--config FILE`` of ``key=value`` lines (keys are flag names without the
leading dashes) supplies defaults; flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import plotscripts
from .evaluators import ModelEvaluator, SimulatorEvaluator
from .optimize import DEConfig, SobolConfig, maximize_probability, result_csv_row
from .ridge import (
    CurveSpec,
    extract_ridge,
    fit_alpha,
    profile,
    save_fit_csv,
    save_profile_csv,
    save_ridge_csv,
    stability_width,
)
from .surrogate import (
    ModelFormatError,
    TrainConfig,
    grid_search,
    load_model,
    predict_p,
    save_grid_csv,
    save_history_csv,
    save_model,
    train,
)
from .sweep import Dataset, DatasetError, default_workers, generate, grid, load_csv, save_csv
from .walk import MAX_QUBITS, k_iterations, run

MODULE_OF = {
    "simulate": "qrws_core",
    "sweep": "sweep",
    "grid": "sweep",
    "train": "surrogate",
    "gridsearch": "surrogate",
    "predict": "surrogate",
    "optimize": "optimize",
    "ridge": "ridgefit",
    "fit-alpha": "ridgefit",
    "profile": "ridgefit",
    "reproduce": "cli",
}


class CliError(Exception):
    def __init__(self, module: str, kind: str, message: str, code: int):
        super().__init__(message)
        self.module, self.kind, self.code = module, kind, code


def _fail(kind: str, message: str, module: str = "cli", code: int = 2):
    raise CliError(module, kind, message, code)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):  # argparse's own usage errors
        raise CliError("cli", "usage", message, 2)


# ---------------------------------------------------------------- value types

_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*(?:pi|π)(?:\s*/\s*(\d+\.?\d*))?$")


def angle(text: str) -> float:
    """Radians from a decimal or a ``pi`` expression."""
    s = text.strip().lower()
    m = _PI_RE.match(s)
    if m:
        coef = m.group(1)
        c = -1.0 if coef == "-" else 1.0 if coef in ("", "+") else float(coef)
        div = float(m.group(2)) if m.group(2) else 1.0
        if div == 0.0:
            raise argparse.ArgumentTypeError(f"division by zero in angle {text!r}")
        return c * math.pi / div
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r} (use radians or e.g. 'pi/2')") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"angle must be finite: {text!r}")
    return v


def _bounded_int(lo: int, hi: Optional[int] = None):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < lo or (hi is not None and v > hi):
            rng = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
            raise argparse.ArgumentTypeError(f"{v} must be {rng}")
        return v

    return conv


def _unit_open(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"{v} must lie strictly between 0 and 1")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (v > 0.0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"{v} must be positive and finite")
    return v


def _int_list(text: str) -> list[int]:
    """``"1,5,9"`` or an inclusive range ``"1:20"`` / ``"5:30:5"``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            if step < 1:
                raise ValueError
            vals = list(range(lo, hi + 1, step))
        else:
            vals = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b,c' or 'lo:hi[:step]', got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError(f"need a nonempty list of positive integers, got {text!r}")
    return vals


QUBITS = _bounded_int(1, 8)


# ---------------------------------------------------------------- parser


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--source", choices=["sim", "dnn"], default="sim",
                   help="probability source: direct simulation or a trained surrogate (default: sim)")
    p.add_argument("--model", type=Path, help="surrogate model file (required with --source dnn)")


def _add_cap(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-n", type=_bounded_int(1, MAX_QUBITS), default=MAX_QUBITS,
                   help=f"refuse simulations above this many coin qubits (default and hard limit: {MAX_QUBITS})")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="qrws", description="Quantum random walk search on the hypercube with a Householder coin.")
    top.add_argument("--config", type=Path, help="key=value defaults file; explicit flags override it")
    sub = top.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", help="success probability for one (phi, zeta, n)")
    p.add_argument("--n", type=QUBITS, required=True, help="coin qubits (coin dimension 2**n)")
    p.add_argument("--phi", type=angle, required=True, help="Householder phase, radians")
    p.add_argument("--zeta", type=angle, required=True, help="global phase, radians")
    p.add_argument("--target", type=_bounded_int(0), nargs="+", default=[0],
                   help="marked node index or indices (default: 0)")
    p.add_argument("--steps", type=_bounded_int(0), help="walk iterations (default: optimal count for n)")
    p.add_argument("--scan", type=_bounded_int(1), metavar="K",
                   help="also write p after 0..K iterations to --out as step,p CSV")
    p.add_argument("--out", type=Path, help="CSV path for --scan")
    p.add_argument("--plot", action="store_true", help="write a plot script next to the --scan CSV")
    _add_cap(p)

    p = sub.add_parser("sweep", help="Monte Carlo dataset of p over random (phi, zeta)")
    p.add_argument("--n", type=QUBITS, required=True, help="coin qubits")
    p.add_argument("--samples", type=_bounded_int(1), required=True, help="number of random points")
    p.add_argument("--seed", type=_bounded_int(0), default=0, help="random stream key (default: 0)")
    p.add_argument("--workers", type=_bounded_int(1), help="worker processes (default: $QRWS_WORKERS or CPU count)")
    p.add_argument("--k-best", action="store_true", help="also record the best step within one period")
    p.add_argument("--out", type=Path, required=True, help="output CSV path")
    p.add_argument("--plot", action="store_true", help="write a scatter-heatmap plot script")
    _add_cap(p)

    p = sub.add_parser("grid", help="regular (phi, zeta) grid of p on [0, 2pi]^2")
    p.add_argument("--n", type=QUBITS, required=True, help="coin qubits")
    p.add_argument("--res", type=_bounded_int(2), required=True, help="points per axis")
    p.add_argument("--k-best", action="store_true", help="also record the best step within one period")
    p.add_argument("--out", type=Path, required=True, help="output CSV path")
    p.add_argument("--plot", action="store_true", help="write a heatmap plot script")
    _add_cap(p)

    def training_flags(p):
        p.add_argument("--data", type=Path, nargs="+", required=True,
                       help="sweep CSV file(s); several files with different n train a combined model")
        p.add_argument("--epochs", type=_bounded_int(1), default=200, help="maximum epochs (default: 200)")
        p.add_argument("--batch", type=_bounded_int(1), default=256, help="mini-batch size (default: 256)")
        p.add_argument("--lr", type=_positive_float, default=1e-3, help="Adam step size (default: 1e-3)")
        p.add_argument("--patience", type=_bounded_int(1), default=50,
                       help="early-stopping patience in epochs (default: 50)")
        p.add_argument("--train-fraction", type=_unit_open, default=0.8,
                       help="share of samples used for training (default: 0.8)")
        p.add_argument("--seed", type=_bounded_int(0), default=0, help="initialization and split seed (default: 0)")
        p.add_argument("--input-dim", type=int, choices=[2, 3],
                       help="2 = (phi, zeta), 3 = (phi, zeta, n); default: 3 for mixed-n data, else 2")

    p = sub.add_parser("train", help="fit a surrogate network to sweep data")
    training_flags(p)
    p.add_argument("--layers", type=_bounded_int(1), required=True, help="hidden layers L")
    p.add_argument("--neurons", type=_bounded_int(1), required=True, help="neurons per hidden layer N")
    p.add_argument("--out", type=Path, required=True, help="model file to write")
    p.add_argument("--history", type=Path, help="epoch,train_loss,val_loss CSV path")
    p.add_argument("--plot", action="store_true", help="write a loss-curve plot script (needs --history)")

    p = sub.add_parser("gridsearch", help="best validation loss over an (L, N) grid")
    training_flags(p)
    p.add_argument("--layers", type=_int_list, required=True, help="hidden layer counts, e.g. 1:20 or 1,5,9")
    p.add_argument("--neurons", type=_int_list, required=True, help="neurons per layer, e.g. 5:30:5")
    p.add_argument("--out", type=Path, required=True, help="L,N,val_loss CSV path")
    p.add_argument("--plot", action="store_true", help="write a heatmap plot script")

    p = sub.add_parser("optimize", help="global maximum of p over [0, 2pi]^2")
    p.add_argument("--n", type=QUBITS, required=True, help="coin qubits")
    _add_source(p)
    p.add_argument("--method", choices=["de", "sobol"], default="de",
                   help="differential evolution or Sobol multistart (default: de)")
    p.add_argument("--seed", type=_bounded_int(0), default=0, help="optimizer seed (default: 0)")
    p.add_argument("--population", type=_bounded_int(4), default=30, help="DE population size (default: 30)")
    p.add_argument("--generations", type=_bounded_int(0), default=200, help="DE generations (default: 200)")
    p.add_argument("--samples", type=_bounded_int(1), default=1024, help="Sobol scan points (default: 1024)")
    p.add_argument("--top-k", type=_bounded_int(1), default=8, help="Sobol local refinements per prefix (default: 8)")
    p.add_argument("--out", type=Path, help="append-free CSV with header method,n,phi,zeta,value,evals")
    _add_cap(p)

    for name, helptext in (("ridge", "ridge zeta*(phi) of maximal p"), ("fit-alpha", "fit alpha of the sine-corrected curve")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--n", type=QUBITS, required=True, help="coin qubits")
        _add_source(p)
        p.add_argument("--grid-size", type=_bounded_int(8), default=201, help="phi grid points (default: 201)")
        p.add_argument("--min-fraction", type=float, default=0.9,
                       help="fit only ridge points with p >= this share of the ridge maximum (default: 0.9)")
        p.add_argument("--out", type=Path, help="output CSV path")
        if name == "ridge":
            p.add_argument("--plot", action="store_true", help="write a ridge plot script")
        _add_cap(p)

    p = sub.add_parser("profile", help="p along a zeta(phi) curve and its stability width")
    p.add_argument("--n", type=QUBITS, required=True, help="coin qubits")
    _add_source(p)
    p.add_argument("--curve", choices=["line32", "line33", "line34", "sine"], required=True,
                   help="line32: -2phi+pi+2k*pi, line33: phi/2+pi/2, line34: pi, sine: -2phi+3pi+alpha*sin(2phi)")
    p.add_argument("--k", type=int, default=1, help="branch index for line32 (default: 1)")
    p.add_argument("--alpha", type=float, default=0.0, help="sine amplitude, radians (default: 0)")
    p.add_argument("--grid-size", type=_bounded_int(2), default=201, help="phi grid points (default: 201)")
    p.add_argument("--fraction", type=_unit_open, default=0.9,
                   help="stability-width threshold as a share of the profile maximum (default: 0.9)")
    p.add_argument("--out", type=Path, help="phi,zeta,p CSV path")
    p.add_argument("--plot", action="store_true", help="write a line plot script")
    _add_cap(p)

    p = sub.add_parser("predict", help="surrogate prediction at one point")
    p.add_argument("--model", type=Path, required=True, help="surrogate model file")
    p.add_argument("--phi", type=angle, required=True, help="Householder phase, radians")
    p.add_argument("--zeta", type=angle, required=True, help="global phase, radians")
    p.add_argument("--n", type=QUBITS, help="coin qubits (combined models only)")

    p = sub.add_parser("reproduce", help="regenerate the optimum and alpha tables")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="directory for table1.csv and table2.csv")
    p.add_argument("--models-dir", type=Path,
                   help="directory with n1.model, n2.model, n3.model and/or combined.model for the DNN cells")
    p.add_argument("--n-max", type=_bounded_int(1, 3), default=3, help="largest simulated coin size (default: 3)")
    p.add_argument("--grid-size", type=_bounded_int(8), default=201, help="ridge phi grid points (default: 201)")
    p.add_argument("--seed", type=_bounded_int(0), default=0, help="optimizer seed (default: 0)")
    return top


# ---------------------------------------------------------------- config file


def _read_config(path: Path) -> dict[str, str]:
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        _fail("io", f"cannot read config {path}: {exc.strerror}")
    out = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            _fail("config", f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn config entries into flags placed before the user's own flags."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path)
    known, rest = pre.parse_known_args(argv)
    if known.config is None:
        return argv
    entries = _read_config(known.config)
    commands = [a for a in rest if a in MODULE_OF]
    if not commands:
        return rest
    cmd = commands[0]
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[cmd]
    by_dest = {a.dest: a for a in sub._actions if a.option_strings}
    injected: list[str] = []
    for key, value in entries.items():
        action = by_dest.get(key)
        if action is None:
            _fail("config", f"{known.config}: unknown key {key!r} for '{cmd}'")
        flag = action.option_strings[-1]
        if isinstance(action, argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes", "on"):
                injected.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                _fail("config", f"{known.config}: {key} expects true/false, got {value!r}")
        elif action.nargs in ("+", "*"):
            injected += [flag, *value.split()]
        else:
            injected += [flag, value]
    i = rest.index(cmd)
    # argparse keeps the last occurrence, so explicit flags after these win
    return rest[: i + 1] + injected + rest[i + 1 :]


# ---------------------------------------------------------------- helpers


def _check_cap(n: int, args) -> None:
    cap = getattr(args, "max_n", MAX_QUBITS)
    if n > cap:
        _fail("memory", f"n={n} exceeds the simulation cap n <= {cap}", MODULE_OF[args.command])


def _evaluator(args, n: int):
    if args.source == "dnn":
        if args.model is None:
            _fail("validation", "--source dnn requires --model", MODULE_OF[args.command])
        model = load_model(args.model)
        return ModelEvaluator(model, n), model
    if args.model is not None:
        _fail("validation", "--model given but --source is sim", MODULE_OF[args.command])
    _check_cap(n, args)
    return SimulatorEvaluator(n), None


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _note(path: Path) -> None:
    print(f"wrote {path}")


def _load_datasets(paths: Sequence[Path]) -> Dataset:
    return Dataset.concat([load_csv(p) for p in paths])


def _input_dim(args, data: Dataset) -> int:
    if args.input_dim is not None:
        if args.input_dim == 2 and data.n is None:
            _fail("validation", "mixed-n data needs --input-dim 3", "surrogate")
        return args.input_dim
    return 2 if data.n is not None else 3


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        epochs=args.epochs, batch_size=args.batch, learning_rate=args.lr,
        patience=args.patience, train_fraction=args.train_fraction, seed=args.seed,
    )


# ---------------------------------------------------------------- commands


def cmd_simulate(args) -> None:
    _check_cap(args.n, args)
    nodes = 2 ** (2**args.n)
    bad = [t for t in args.target if t >= nodes]
    if bad:
        _fail("validation", f"target {bad[0]} outside [0, {nodes})", "qrws_core")
    k = k_iterations(args.n) if args.steps is None else args.steps
    if args.scan is not None:
        if args.out is None:
            _fail("validation", "--scan needs --out", "qrws_core")
        hist = run(args.n, args.phi, args.zeta, args.target, max(args.scan, k), history=True).history
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "p"])
            for step, p in enumerate(hist[: args.scan + 1]):
                w.writerow([step, _fmt(p)])
        _note(args.out)
        if args.plot:
            _note(plotscripts.line_script(args.out, "step", ["p"], f"p vs steps, n={args.n}"))
        p = hist[k]
    else:
        if args.plot:
            _fail("validation", "--plot needs --scan", "qrws_core")
        p = run(args.n, args.phi, args.zeta, args.target, k).probability
    print(f"p={_fmt(p)}")
    print(f"k={k}")


def cmd_sweep(args) -> None:
    _check_cap(args.n, args)
    workers = args.workers or default_workers()
    ds = generate(args.n, args.samples, args.seed, workers, with_k_best=args.k_best)
    save_csv(ds, args.out)
    _note(args.out)
    if args.plot:
        _note(plotscripts.heatmap_script(args.out, "phi", "zeta", "p", f"Monte Carlo p, n={args.n}"))


def cmd_grid(args) -> None:
    _check_cap(args.n, args)
    ds = grid(args.n, args.res, with_k_best=args.k_best)
    save_csv(ds, args.out)
    _note(args.out)
    if args.plot:
        _note(plotscripts.heatmap_script(args.out, "phi", "zeta", "p", f"p(phi, zeta), n={args.n}"))


def cmd_train(args) -> None:
    data = _load_datasets(args.data)
    dim = _input_dim(args, data)
    model, report = train(data, dim, args.layers, args.neurons, _train_config(args))
    save_model(model, args.out)
    _note(args.out)
    print(f"best_epoch={report.best_epoch}")
    print(f"val_loss={_fmt(report.best_val_loss)}")
    if args.history is not None:
        save_history_csv(report, args.history)
        _note(args.history)
        if args.plot:
            _note(plotscripts.line_script(args.history, "epoch", ["train_loss", "val_loss"], "loss", log_y=True))
    elif args.plot:
        _fail("validation", "--plot needs --history", "surrogate")


def cmd_gridsearch(args) -> None:
    data = _load_datasets(args.data)
    dim = _input_dim(args, data)
    losses = grid_search(data, args.layers, args.neurons, _train_config(args), input_dim=dim)
    save_grid_csv(losses, args.layers, args.neurons, args.out)
    _note(args.out)
    if np.all(np.isnan(losses)):
        _fail("numeric", "every grid cell failed", "surrogate", 1)
    i, j = np.unravel_index(np.nanargmin(losses), losses.shape)
    print(f"best L={args.layers[i]} N={args.neurons[j]} val_loss={_fmt(losses[i, j])}")
    if args.plot:
        _note(plotscripts.heatmap_script(args.out, "N", "L", "val_loss", "validation loss"))


def cmd_optimize(args) -> None:
    ev, _ = _evaluator(args, args.n)
    if args.method == "de":
        cfg = DEConfig(population=args.population, generations=args.generations, seed=args.seed)
    else:
        if args.top_k > args.samples:
            _fail("validation", "--top-k must not exceed --samples", "optimize")
        cfg = SobolConfig(samples=args.samples, top_k=args.top_k, seed=args.seed)
    res = maximize_probability(ev, args.n, args.method, cfg)
    print(f"method={res.method} n={args.n} phi={_fmt(res.x[0])} zeta={_fmt(res.x[1])}")
    print(f"p={_fmt(res.value)} evals={res.evals}")
    if args.source == "dnn":
        print(f"p_sim={_fmt(res.true_value)}")
    row = result_csv_row(res)
    if args.out is not None:
        args.out.write_text("method,n,phi,zeta,value,evals\n" + row + "\n", encoding="utf-8")
        _note(args.out)
    else:
        print(row)


def _ridge(args):
    ev, _ = _evaluator(args, args.n)
    return extract_ridge(ev, args.n, args.grid_size)


def cmd_ridge(args) -> None:
    ridge = _ridge(args)
    fit = fit_alpha(ridge, args.min_fraction)
    print(f"alpha={_fmt(fit.alpha)} rms={_fmt(fit.rms_residual)} points={fit.points}")
    if args.out is not None:
        save_ridge_csv(ridge, args.out)
        _note(args.out)
        if args.plot:
            _note(plotscripts.line_script(args.out, "phi", ["zeta_unwrapped"], f"ridge, n={args.n}"))
    elif args.plot:
        _fail("validation", "--plot needs --out", "ridgefit")


def cmd_fit_alpha(args) -> None:
    fit = fit_alpha(_ridge(args), args.min_fraction)
    print(f"alpha={_fmt(fit.alpha)}")
    print(f"rms_residual={_fmt(fit.rms_residual)}")
    if args.out is not None:
        save_fit_csv(fit, args.n, args.source, args.out)
        _note(args.out)


def cmd_profile(args) -> None:
    ev, _ = _evaluator(args, args.n)
    spec = CurveSpec(args.curve, k=args.k, alpha=args.alpha)
    prof = profile(ev, spec, args.n, args.grid_size)
    j = int(np.argmax(prof.p))
    print(f"p_max={_fmt(prof.p[j])} phi_max={_fmt(prof.phi[j])}")
    print(f"width={_fmt(stability_width(prof, args.fraction))}")
    if args.out is not None:
        save_profile_csv(prof, args.out)
        _note(args.out)
        if args.plot:
            _note(plotscripts.line_script(args.out, "phi", ["p"], f"{args.curve} profile, n={args.n}"))
    elif args.plot:
        _fail("validation", "--plot needs --out", "ridgefit")


def cmd_predict(args) -> None:
    model = load_model(args.model)
    if model.input_dim == 3 and args.n is None:
        _fail("validation", "this combined model needs --n", "surrogate")
    if model.input_dim == 2 and args.n is not None:
        _fail("validation", "this model takes no --n", "surrogate")
    print(f"p={_fmt(predict_p(model, args.phi, args.zeta, args.n))}")


def _models(models_dir: Optional[Path]) -> dict:
    found = {}
    if models_dir is None:
        return found
    for key in ("n1", "n2", "n3", "combined"):
        path = models_dir / f"{key}.model"
        if path.exists():
            found[key] = load_model(path)
    return found


def _model_for(models: dict, n: int):
    m = models.get(f"n{n}")
    return m if m is not None else models.get("combined")


def cmd_reproduce(args) -> None:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    models = _models(args.models_dir)
    ns = list(range(1, args.n_max + 1))
    na = "NA"

    rows = []
    for n in ns:
        for method in ("de", "sobol"):
            cfg = DEConfig(seed=args.seed) if method == "de" else SobolConfig(seed=args.seed)
            res = maximize_probability("sim", n, method, cfg)
            rows.append([f"{method}_sim", n, _fmt(res.x[0]), _fmt(res.x[1]), _fmt(res.value)])
            model = _model_for(models, n)
            if model is None:
                rows.append([f"{method}_dnn", n, na, na, na])
            else:
                res = maximize_probability(model, n, method, cfg)
                rows.append([f"{method}_dnn", n, _fmt(res.x[0]), _fmt(res.x[1]), _fmt(res.value)])
        rows.append(["grover", n, _fmt(math.pi), _fmt(math.pi), _fmt(run(n, math.pi, math.pi).probability)])
    t1 = args.out_dir / "table1.csv"
    with open(t1, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "n", "phi", "zeta", "p"])
        w.writerows(rows)
    _note(t1)

    rows = []
    for n in ns + ([4] if "combined" in models else []):
        mc = _fmt(fit_alpha(extract_ridge("sim", n, args.grid_size)).alpha) if n in ns else na
        model = _model_for(models, n)
        dnn = na if model is None else _fmt(fit_alpha(extract_ridge(ModelEvaluator(model, n), n, args.grid_size)).alpha)
        rows.append([n, mc, dnn])
    t2 = args.out_dir / "table2.csv"
    with open(t2, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "alpha_mc", "alpha_dnn"])
        w.writerows(rows)
    _note(t2)


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "grid": cmd_grid,
    "train": cmd_train,
    "gridsearch": cmd_gridsearch,
    "optimize": cmd_optimize,
    "ridge": cmd_ridge,
    "fit-alpha": cmd_fit_alpha,
    "profile": cmd_profile,
    "predict": cmd_predict,
    "reproduce": cmd_reproduce,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command = "cli"
    try:
        args = parser.parse_args(_apply_config(parser, argv))
        command = args.command
        COMMANDS[command](args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except CliError as exc:
        print(f"error:{exc.module}:{exc.kind}: {exc}", file=sys.stderr)
        return exc.code
    except (DatasetError, ModelFormatError) as exc:
        print(f"error:{MODULE_OF.get(command, 'cli')}:format: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error:{MODULE_OF.get(command, 'cli')}:io: {exc}", file=sys.stderr)
        return 1
    except MemoryError as exc:
        print(f"error:{MODULE_OF.get(command, 'cli')}:memory: {exc}", file=sys.stderr)
        return 1
    except FloatingPointError as exc:
        print(f"error:{MODULE_OF.get(command, 'cli')}:numeric: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error:{MODULE_OF.get(command, 'cli')}:validation: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
