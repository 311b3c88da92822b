"""Command-line interface.

Subcommands: spectrum | rates | coherence | compare | fit.  Results go to
stdout as 4-digit human summaries; --out writes the full-precision record
(CSV by default, JSON with --format json) and renders a PNG figure next to
it (--no-plot suppresses, --plot forces one without --out).  Exit codes:
0 ok, 2 config error, 3 numeric non-convergence, 4 I/O error.

Convention notes printed where they matter: noise spectra take angular
frequencies (rad/s), and the closed-form frequency-ratio instance uses the
radial characteristic size (printed with the output).
"""

import argparse
import csv
import math
import sys

import numpy as np

from .config import load_config
from .errors import (
    ConfigError,
    ConvergenceError,
    InsufficientStructureError,
    SpectrumDomainError,
    TrapCoherenceError,
)
from .profilefit import IntensityCut, fit_lg_cut, lg_cut_model
from .report import ResultRecord, write_csv, write_json
from . import pipeline

_UNIT_SCALE = {"m": 1.0, "um": 1e-6}


def _write_record(record: ResultRecord, out: str, fmt: str):
    if fmt == "json":
        write_json(record, out)
    else:
        write_csv(record, out)


def _plot_path(args, suffix=".png"):
    if args.out:
        base = args.out.rsplit(".", 1)[0]
        return base + suffix
    return args.command + suffix


def _should_plot(args) -> bool:
    # figures accompany every written report unless suppressed; --plot
    # forces one even when no --out is given
    if args.plot is None:
        return bool(args.out)
    return args.plot


def _g4(value) -> str:
    if value is None:
        return "n/a"
    return format(value, ".4g")


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    if args.n_basis is not None:
        cfg = _override_n_basis(cfg, args.n_basis)
    record = pipeline.spectrum_record(cfg)
    data = record.data
    print(f"trap order l = {data['l']}, n_basis = {data['n_basis']}, "
          f"converged states = {data['converged_count']}")
    for name, om in data["omega_rad_s"].items():
        print(f"  omega_{name} = {_g4(om)} rad/s")
    print("k  epsilon      converged")
    for row in data["table"]["rows"]:
        k, eps, conv = row[0], row[1], row[2]
        print(f"{k:<3d}{eps:<13.6g}{'yes' if conv else 'no'}")
    if args.out:
        _write_record(record, args.out, args.format)
    if _should_plot(args):
        from .plotting import save_spectrum_figure

        eps = [r[1] for r in data["table"]["rows"]]
        save_spectrum_figure(_plot_path(args), eps, data["converged_count"], data["l"])
    return 0


def cmd_rates(args) -> int:
    cfg = load_config(args.config)
    if args.n_basis is not None:
        cfg = _override_n_basis(cfg, args.n_basis)
    record = pipeline.rates_record(cfg)
    data = record.data
    l = data["l"]
    print("note: noise spectra are one-sided PSDs of angular frequency (rad/s)")
    print(f"trap order l = {l}")
    print(f"Sum|<m|X^{2 * l}|0>|^2 = {_g4(data['sum_x_2l'])}   "
          f"l^2 Sum|<m|X^{2 * l - 1}|0>|^2 = {_g4(data['l2_sum_x_2l_minus_1'])}")
    print("axis  omega_rad_s   R_lambda_1_s  R_x_1_s")
    for name, omega, r_lam, r_x in data["table"]["rows"]:
        print(f"{name:<6}{_g4(omega):<14}{_g4(r_lam):<14}{_g4(r_x)}")
    print(f"total R = {_g4(data['total_rate_1_s'])} 1/s")
    if args.out:
        _write_record(record, args.out, args.format)
    if _should_plot(args):
        from .plotting import save_rates_figure

        rates = pipeline.compute_rates(cfg)
        save_rates_figure(_plot_path(args), rates.axes)
    return 0


def cmd_coherence(args) -> int:
    cfg = load_config(args.config)
    if args.n_basis is not None:
        cfg = _override_n_basis(cfg, args.n_basis)
    record = pipeline.coherence_record(cfg, args.t_max, args.n_points)
    data = record.data
    print(f"var_des = {_g4(data['var_des_rad_s'])} rad/s, "
          f"R = {_g4(data['total_rate_1_s'])} 1/s, "
          f"1/e time = {_g4(data['t_1e_s'])} s")
    if args.out:
        _write_record(record, args.out, args.format)
    if _should_plot(args):
        from .plotting import save_coherence_figure

        rows = data["table"]["rows"]
        ts = [r[0] for r in rows]
        cs = [r[1] for r in rows]
        save_coherence_figure(_plot_path(args), ts, cs, data["t_1e_s"])
    return 0


def cmd_compare(args) -> int:
    cfg_a = load_config(args.config)
    cfg_b = load_config(args.config_b)
    record = pipeline.compare_records(cfg_a, cfg_b)
    data = record.data
    print(f"{'quantity':<24}{'A':>14}{'B':>14}")
    for name, a, b in data["table"]["rows"]:
        pa = _g4(a) if not isinstance(a, str) else a
        pb = _g4(b) if not isinstance(b, str) else b
        print(f"{name:<24}{pa:>14}{pb:>14}")
    if data["frequency_ratio_instance"] is not None:
        print(f"frequency ratio (hbar^2/(8 M a^2 V0))^(1/6) = "
              f"{data['frequency_ratio_instance']:.4g}")
        print(f"  assuming {data['frequency_ratio_assumption']}")
    winners = data["winners"]
    print("lower-decoherence trap per channel: "
          f"parametric {winners['parametric']}, pointing {winners['pointing']}, "
          f"DES {winners['des']}; longest 1/e time: {winners['overall']}")
    if args.out:
        _write_record(record, args.out, args.format)
    if _should_plot(args):
        from .decoherence import CoherenceModel
        from .plotting import save_compare_figure

        models = [
            CoherenceModel(data[side]["var_des_rad_s"], data[side]["total_rate_1_s"])
            for side in ("a", "b")
        ]
        times = [t for t in (data["a"]["t_1e_s"], data["b"]["t_1e_s"])
                 if math.isfinite(t)]
        t_max = 3.0 * max(times) if times else 1.0
        save_compare_figure(_plot_path(args), models, ["A", "B"], t_max)
    return 0


def _read_cut_csv(path, unit_scale):
    positions, values, sigmas = [], [], []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            for lineno, row in enumerate(reader, start=1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if not positions and not _is_number(row[0]):
                    continue  # header line(s) before the first data row
                try:
                    positions.append(unit_scale * float(row[0]))
                    values.append(float(row[1]))
                    if len(row) > 2 and row[2].strip():
                        sigmas.append(float(row[2]))
                except (ValueError, IndexError):
                    raise ConfigError(f"{path}:{lineno}: cannot parse row {row!r}")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    sigma = np.array(sigmas) if len(sigmas) == len(positions) and sigmas else None
    return IntensityCut(np.array(positions), np.array(values), sigma)


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def cmd_fit(args) -> int:
    scale = _UNIT_SCALE[args.unit] if args.unit != "px" else args.px_scale_m
    if args.unit == "px" and not args.px_scale_m:
        raise ConfigError("--px-scale-m is required with --unit px")
    cut = _read_cut_csv(args.datafile, scale)
    if args.noise_frac:
        rng = np.random.default_rng(args.seed)
        peak = float(np.ptp(cut.values))
        cut = IntensityCut(
            cut.positions,
            cut.values + rng.normal(0.0, args.noise_frac * peak, cut.values.shape),
            cut.sigma,
        )
    fit = fit_lg_cut(cut, args.oam)
    dw = fit.uncertainty(0)
    print(f"fitted waist w = {fit.w * 1e6:.4f} um +- {dw * 1e6:.4f} um")
    print(f"amplitude = {_g4(fit.amplitude)}, center = {_g4(fit.center)} m, "
          f"background = {_g4(fit.background)}")
    print(f"relative rms residual = {_g4(fit.rms_residual)}")
    record = ResultRecord.create(
        inputs={"datafile": args.datafile, "oam": args.oam, "unit": args.unit},
        data={
            "w_m": fit.w,
            "w_sigma_m": dw,
            "amplitude": fit.amplitude,
            "center_m": fit.center,
            "background": fit.background,
            "rms_residual": fit.rms_residual,
        },
        config_hash="",
    )
    if args.out:
        _write_record(record, args.out, args.format)
    dense = np.linspace(cut.positions[0], cut.positions[-1], 400)
    model = lg_cut_model(dense, fit.w, fit.amplitude, fit.center, fit.background, args.oam)
    if args.model_out:
        with open(args.model_out, "w", newline="") as fh:
            fh.write("position_m,model_value\n")
            for x, v in zip(dense, model):
                fh.write(f"{x:.17g},{v:.17g}\n")
    if _should_plot(args):
        from .plotting import save_fit_figure

        save_fit_figure(_plot_path(args), cut.positions, cut.values, dense, model, fit.w)
    return 0


def _override_n_basis(cfg, n_basis):
    import copy
    import dataclasses

    if n_basis < 2 * cfg.l + 2:
        raise ConfigError(
            f"--n-basis {n_basis} too small for trap order l={cfg.l}; "
            f"need >= {2 * cfg.l + 2}"
        )
    canonical = copy.deepcopy(cfg.canonical)
    canonical["compute"]["n_basis"] = n_basis
    return dataclasses.replace(cfg, n_basis=n_basis, canonical=canonical)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trapcoh",
        description="Coherence of a single atom in power-law optical traps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", help="write the full-precision record here")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--plot", action=argparse.BooleanOptionalAction,
                       default=None,
                       help="render a PNG next to the output (default: on "
                            "whenever --out is given)")

    p = sub.add_parser("spectrum", help="trap eigenvalues and convergence flags")
    add_common(p)
    p.add_argument("--n-basis", type=int, help="override compute.n_basis")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("rates", help="phonon jump rates per axis and total")
    add_common(p)
    p.add_argument("--n-basis", type=int, help="override compute.n_basis")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("coherence", help="coherence envelope C(t)")
    add_common(p)
    p.add_argument("--n-basis", type=int, help="override compute.n_basis")
    p.add_argument("--t-max", type=float, required=True, help="last sample time (s)")
    p.add_argument("--n-points", type=int, default=200)
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("compare", help="side-by-side decoherence of two traps")
    add_common(p)
    p.add_argument("--config-b", required=True, help="second YAML configuration")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fit", help="fit a measured 1-D intensity cut")
    p.add_argument("datafile", help="CSV with position,value[,sigma] columns")
    p.add_argument("--oam", type=int, required=True, help="beam order (1 or 2)")
    p.add_argument("--unit", choices=("m", "um", "px"), default="m",
                   help="unit of the position column")
    p.add_argument("--px-scale-m", type=float, help="meters per pixel for --unit px")
    p.add_argument("--noise-frac", type=float,
                   help="add seeded Gaussian noise (fraction of peak) before fitting")
    p.add_argument("--seed", type=int, default=0,
                   help="RNG seed for --noise-frac Monte Carlo exercises")
    p.add_argument("--model-out", help="write the fitted model curve as CSV")
    add_common(p, needs_config=False)
    p.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, SpectrumDomainError, InsufficientStructureError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except TrapCoherenceError as exc:  # pragma: no cover
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
