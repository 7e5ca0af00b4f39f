"""Command-line front end: ``tsr simulate | splitting | op-find | fit``.

Exit codes: 0 ok, 2 usage/config/CSV error, 3 model error, 4 no doublet,
5 not converged, 6 unidentifiable.
"""

import argparse
import sys

import numpy as np

from .errors import NoDoubletError, TsrError, UnidentifiableError
from .fitting import FitProblem, fit, seed_detunings_from_peaks
from .io import (
    ConfigError,
    CsvError,
    config_to_model,
    format_number,
    read_config,
    read_spectrum_csv,
    scan_grid,
    write_spectrum_csv,
)
from .operating_point import antiresonance_op, find_doublet, find_optimum_op
from .quadrature import noise_spectrum, noise_values

EXIT_USAGE = 2
EXIT_MODEL = 3
EXIT_NO_DOUBLET = 4
EXIT_NOT_CONVERGED = 5
EXIT_UNIDENTIFIABLE = 6

# CLI name -> (library name, to-internal, to-CLI, default bounds in CLI units)
FREE_PARAMETERS = {
    "homodyne_angle_deg": ("homodyne_angle", np.radians, np.degrees, (-30.0, 30.0)),
    "internal_loss": ("internal_loss", float, float, (0.0, 0.1)),
    "phi_src": ("phi_src", float, float, None),
    "phi_tsrc": ("phi_tsrc", float, float, None),
    "input_squeezing_db": ("input_squeezing", float, float, (0.0, 15.0)),
    "homodyne_efficiency": ("homodyne_efficiency", float, float, (0.5, 1.0)),
}
DETUNING_HALF_RANGE = 0.1


class UsageError(Exception):
    pass


def _emit(out, pairs):
    for key, value in pairs:
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, (int, np.integer)):
            text = str(value)
        elif isinstance(value, float):
            text = format_number(value)
        else:
            text = str(value)
        out.write(f"{key}={text}\n")


def _model_at_op(args, model):
    if args.op == "optimum":
        op = find_optimum_op(model)
        return op.apply(model)
    if args.op == "antires":
        return antiresonance_op(model).apply(model)
    phi_src = model.src_space.detuning if args.phi_src is None else args.phi_src
    phi_tsrc = model.tsrc_space.detuning if args.phi_tsrc is None else args.phi_tsrc
    return model.with_detunings(phi_src, phi_tsrc)


def _load(args):
    doc = read_config(args.config)
    model = config_to_model(doc)
    if getattr(args, "squeeze_db", None) is not None:
        if args.squeeze_db < 0:
            raise UsageError("--squeeze-db must be >= 0")
        model = model.replace(input_squeezing=args.squeeze_db)
    return doc, model


def cmd_simulate(args, out):
    doc, model = _load(args)
    series = noise_spectrum(_model_at_op(args, model), scan_grid(doc))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            write_spectrum_csv(series, fh)
    else:
        write_spectrum_csv(series, out)
    return 0


def cmd_splitting(args, out):
    _, model = _load(args)
    report = find_doublet(_model_at_op(args, model))
    _emit(out, [
        ("splitting_hz", report.splitting),
        ("upper_hz", report.upper_resonance),
        ("lower_hz", report.lower_resonance),
        ("absorption_upper", report.absorption_at_peaks[0]),
        ("absorption_lower", report.absorption_at_peaks[1]),
    ])
    return 0


def cmd_op_find(args, out):
    _, model = _load(args)
    op = find_optimum_op(model)
    _emit(out, [
        ("phi_src_rad", op.phi_src),
        ("phi_tsrc_rad", op.phi_tsrc),
        ("residual_asymmetry", op.residual_asymmetry),
        ("converged", op.converged),
    ])
    return 0 if op.converged else EXIT_NOT_CONVERGED


def _parse_free(text, bounds_overrides, model):
    names = [n.strip() for n in text.split(",") if n.strip()]
    if not names:
        raise UsageError("--free needs at least one parameter")
    free = {}
    for name in names:
        if name not in FREE_PARAMETERS:
            raise UsageError(f"unknown free parameter {name!r}; choose from {', '.join(FREE_PARAMETERS)}")
        internal, to_internal, _, default = FREE_PARAMETERS[name]
        if name in bounds_overrides:
            lo, hi = bounds_overrides[name]
        elif default is None:
            centre = model.src_space.detuning if name == "phi_src" else model.tsrc_space.detuning
            lo, hi = centre - DETUNING_HALF_RANGE, centre + DETUNING_HALF_RANGE
        else:
            lo, hi = default
        free[internal] = (float(to_internal(lo)), float(to_internal(hi)))
    return names, free


def _parse_bounds(items):
    out = {}
    for item in items or ():
        name, sep, rng = item.partition("=")
        lo, sep2, hi = rng.partition(":")
        if not (sep and sep2):
            raise UsageError(f"--bounds expects name=low:high, got {item!r}")
        try:
            out[name.strip()] = (float(lo), float(hi))
        except ValueError:
            raise UsageError(f"--bounds: bad numbers in {item!r}") from None
    return out


def cmd_fit(args, out):
    _, model = _load(args)
    try:
        data = read_spectrum_csv(args.data)
    except OSError as exc:
        raise CsvError(f"{args.data}: {exc.strerror}") from None
    if args.seed_detunings:
        seed = seed_detunings_from_peaks(data, model)
        model = model.with_detunings(seed.phi_src, seed.phi_tsrc)
    names, free = _parse_free(args.free, _parse_bounds(args.bounds), model)
    try:
        problem = FitProblem(model, free, data)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = fit(problem)

    pairs = []
    for name in names:
        internal, _, to_cli, _ = FREE_PARAMETERS[name]
        value = float(to_cli(result.estimates[internal]))
        width = float(to_cli(result.half_widths[internal]))
        pairs += [(name, value), (f"{name}_halfwidth", width)]
    pairs += [
        ("residual_rms_db", result.residual_rms),
        ("iterations", result.iterations),
        ("converged", result.converged),
    ]
    _emit(out, pairs)

    model_db = noise_values(result.best_model, data.frequencies)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frequency_hz,data_db,model_db,residual_db\n")
        for f, d, m in zip(data.frequencies, data.values, model_db):
            fh.write(",".join(format_number(x) for x in (f, d, m, m - d)) + "\n")
    return 0 if result.converged else EXIT_NOT_CONVERGED


def _add_op_flags(p, default):
    p.add_argument("--op", choices=("optimum", "antires", "explicit"), default=default,
                   help="operating point; 'explicit' uses --phi-src/--phi-tsrc or the config detunings")
    p.add_argument("--phi-src", type=float, default=None, help="SRC detuning in rad (explicit OP)")
    p.add_argument("--phi-tsrc", type=float, default=None, help="TSRC detuning in rad (explicit OP)")


def build_parser():
    parser = argparse.ArgumentParser(prog="tsr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="homodyne noise spectrum as CSV")
    p.add_argument("config")
    _add_op_flags(p, "explicit")
    p.add_argument("--squeeze-db", type=float, default=None, help="override input squeezing")
    p.add_argument("--out", default=None, help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("splitting", help="resonance doublet location")
    p.add_argument("config")
    _add_op_flags(p, "optimum")
    p.set_defaults(func=cmd_splitting)

    p = sub.add_parser("op-find", help="optimum operating point detunings")
    p.add_argument("config")
    p.set_defaults(func=cmd_op_find)

    p = sub.add_parser("fit", help="fit model parameters to a measured spectrum")
    p.add_argument("config")
    p.add_argument("data", help="spectrum CSV (frequency_hz,noise_db)")
    p.add_argument("--free", required=True, help="comma-separated: " + ", ".join(FREE_PARAMETERS))
    p.add_argument("--bounds", action="append", metavar="NAME=LOW:HIGH",
                   help="override bounds of a free parameter (CLI units)")
    p.add_argument("--seed-detunings", action="store_true",
                   help="start from detunings inferred from the spectral peaks")
    p.add_argument("--out", required=True, help="model-vs-data CSV path")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args, out)
    except (ConfigError, CsvError, UsageError) as exc:
        err.write(f"tsr {args.command}: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"tsr {args.command}: {exc}\n")
        return EXIT_USAGE
    except NoDoubletError as exc:
        err.write(f"tsr {args.command}: NO_DOUBLET: {exc}\n")
        return EXIT_NO_DOUBLET
    except UnidentifiableError as exc:
        err.write(f"tsr {args.command}: UNIDENTIFIABLE: {exc}\n")
        return EXIT_UNIDENTIFIABLE
    except TsrError as exc:
        err.write(f"tsr {args.command}: {exc}\n")
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
