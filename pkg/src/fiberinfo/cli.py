"""fiberinfo command line: xi | curves | mi | validate | propagate.

Exit codes: 0 success, 1 validation failure, 2 usage or input error, 3 outside the perturbative domain.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from pathlib import Path

import numpy as np

from . import ensemble as ens_mod
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, FiberInfoError
from .grid import ComplexSignal

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


def _g(x) -> str:
    return "%.17g" % x


class InputFormatError(FiberInfoError, ValueError):
    pass


def read_signal_csv(path, grid) -> ComplexSignal:
    """Read ``t,re,im[,...]`` rows (header required) into a fine-grid signal."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["t", "re", "im"]:
            raise InputFormatError(f"{path}: line 1: expected header t,re,im")
        for lineno, row in enumerate(reader, 2):
            if not row or not "".join(row).strip():
                continue
            try:
                rows.append((float(row[1]), float(row[2])))
            except (IndexError, ValueError):
                raise InputFormatError(f"{path}: line {lineno}: cannot parse {','.join(row)!r}") from None
    if len(rows) != grid.M:
        raise InputFormatError(f"{path}: expected {grid.M} samples, found {len(rows)}")
    x = np.array([r + 1j * i for r, i in rows])
    return ComplexSignal(grid, x, "fine")


def write_signal_csv(path, signal: ComplexSignal) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "re", "im", "power"])
        for t, v in zip(signal.times, signal.samples):
            w.writerow([_g(t), _g(v.real), _g(v.imag), _g(abs(v) ** 2)])


# ---------------------------------------------------------------- commands

def cmd_xi(args, cfg, out) -> int:
    xi = ens_mod.solve_xi()
    out.write(f"xi={_g(xi)}\nresidual={_g(abs(ens_mod.xi_residual(xi)))}\n")
    return EXIT_OK


def curves_csv(gamma_max: float, points: int, v_list) -> str:
    gammas = np.linspace(0.0, gamma_max, points)
    c = ens_mod.curves(gammas, v_list)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "Id", "Ix"] + [f"G_v{v:g}" for v in v_list])
    Gs = [c.G(v) for v in v_list]
    for i, g in enumerate(gammas):
        w.writerow([_g(g), _g(c.Id[i]), _g(c.IX[i])] + [_g(G[i]) for G in Gs])
    return buf.getvalue()


def cmd_curves(args, cfg, out) -> int:
    if not args.gamma_max > 0 or args.points < 2:
        raise ConfigError("need --gamma-max > 0 and --points >= 2")
    text = curves_csv(args.gamma_max, args.points, args.v or [])
    _emit(args, out, "curves.csv", text)
    return EXIT_OK


def mi_breakdown(cfg: RunConfig):
    params = cfg.params
    W_X = cfg.signal_bandwidth()
    params.check_perturbative(W_X)
    ens = ens_mod.OscillatorEnsemble(cfg.P, cfg.T, cfg.M)
    avg = ens_mod.ensemble_averager(ens, params, "analytic", W_X=W_X)
    from .information import mutual_information

    return mutual_information(avg, params)


def cmd_mi(args, cfg, out) -> int:
    mi = mi_breakdown(cfg)
    g = mi.groups
    lines = [
        f"gamma_tilde={_g(cfg.gamma_tilde)}",
        f"M_d={mi.M_d}",
        f"H_X={_g(mi.H_X)}",
        f"jacobian_term={_g(mi.jacobian)}  # -<sum ln sqrt(1+mu^2/3)>, gamma_tilde",
        f"log_norm_term={_g(mi.log_norm)}  # M_d ln(dt_d/(e pi Q L))",
        f"wd_term={_g(mi.wd_term)}  # beta L W_d^2 = {_g(g['beta_L_Wd2'])}",
        f"wx_term={_g(mi.wx_term)}  # beta L W_X^2 = {_g(g.get('beta_L_WX2', float('nan')))}",
        f"total={_g(mi.total)}",
        f"delta_I={_g(mi.delta_I)}  # per coarse sample",
        f"G={_g(mi.G) if mi.G is not None else 'nan'}",
    ]
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_validate(args, cfg, out) -> int:
    from .validate import run_validation

    if args.samples is not None:
        cfg = cfg.replace(N=args.samples)
    rep = run_validation(cfg)
    text = rep.table() + "\n\n" + rep.to_keyvalue()
    out.write(text)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "validation.txt").write_text(rep.to_keyvalue())
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_propagate(args, cfg, out) -> int:
    from .propagation import gaussian_pulse, split_step_propagate
    from .rng import stream

    grid = cfg.grid
    X = read_signal_csv(args.input, grid) if args.input else gaussian_pulse(grid, cfg.P, cfg.pulse_width)
    params = cfg.params
    outdir = Path(args.out or cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)
    clean = split_step_propagate(X, params, cfg.steps)
    write_signal_csv(outdir / "propagate_noiseless.csv", clean.output)
    written = ["propagate_noiseless.csv"]
    if args.seed is not None:
        noisy = split_step_propagate(X, params, cfg.steps, stream(args.seed, 0))
        write_signal_csv(outdir / "propagate_noisy.csv", noisy.output)
        written.append("propagate_noisy.csv")
    out.write("".join(f"wrote={outdir / w}\n" for w in written))
    return EXIT_OK


def _emit(args, out, name, text):
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / name).write_text(text)
    else:
        out.write(text)


def _v_list(text: str):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --v list {text!r}") from None
    if any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("--v values must be positive")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (overrides the config)")
    common.add_argument("--out", default=None, help="output directory")

    p = argparse.ArgumentParser(prog="fiberinfo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("xi", parents=[common], help="solve 2 xi coth 2xi = 3")
    c = sub.add_parser("curves", parents=[common], help="I_d, I_X and G curves as CSV")
    c.add_argument("--gamma-max", type=float, default=20.0)
    c.add_argument("--points", type=int, default=201)
    c.add_argument("--v", type=_v_list, default=[3.0, 10.0, 14.0], help="comma-separated v = W_d/W_X values")
    sub.add_parser("mi", parents=[common], help="mutual-information breakdown")
    v = sub.add_parser("validate", parents=[common], help="run the oracle suite")
    v.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
    pr = sub.add_parser("propagate", parents=[common], help="split-step propagation to CSV")
    pr.add_argument("--input", default=None, help="CSV with header t,re,im; default is the built-in pulse")
    return p


COMMANDS = {"xi": cmd_xi, "curves": cmd_curves, "mi": cmd_mi, "validate": cmd_validate,
            "propagate": cmd_propagate}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = load_config(args.config) if args.config else RunConfig()
            if args.seed is not None:
                cfg = cfg.replace(seed=args.seed)
            cfg.check_hierarchy()
            code = COMMANDS[args.command](args, cfg, out)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except DomainError as exc:
        print(f"fiberinfo: outside the perturbative domain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConfigError, InputFormatError, OSError) as exc:
        print(f"fiberinfo: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
