"""Command-line front end.

Exit status: 0 success, 1 validation error, 2 enumeration budget exceeded,
3 a verify subcommand found a violated bound, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import codingsim, exponents, spectrum
from .enumeration import DEFAULT_BUDGET
from .errors import CapacityError, InputError
from .modelio import file_hash, load_model
from .models import ChannelModel, JointSourceModel, SourceModel, induce_joint, reference_rates

EXIT_OK, EXIT_INVALID, EXIT_CAPACITY, EXIT_VIOLATED, EXIT_USAGE = 0, 1, 2, 3, 64
FMT = ".12g"
LN2 = math.log(2.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    p = _Parser(prog="infospec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    commands = {
        "e0-curve": "sample E0(rho) for an input/channel pair",
        "j0-curve": "sample J0(rho) for a joint source",
        "exponent": "optimized exponent over a grid of rates",
        "spectrum": "exact or Monte Carlo density spectrum",
        "verify-t1": "check the channel-side bound over thresholds",
        "verify-t2": "check the source-side bound over thresholds",
        "tilted": "tilted-law conditional entropy versus the J0 slope",
        "sim-channel": "random-coding ML decoding simulation",
        "sim-sw": "random-binning MAP decoding simulation",
    }
    for name, help_text in commands.items():
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--model", action="append", required=True, metavar="PATH",
                       help="model file; repeat for an input/channel pair")
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--rho", type=_floats)
        s.add_argument("--rate", type=_floats)
        s.add_argument("--threshold", type=_floats)
        s.add_argument("--delta", type=float)
        s.add_argument("--grid", type=int)
        s.add_argument("--samples", type=int, default=0)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--bin-seed", type=int, default=0)
        s.add_argument("--codebooks", type=int, default=100)
        s.add_argument("--transmissions", type=int, default=500)
        s.add_argument("--kind", choices=["information", "entropy"])
        s.add_argument("--optimize-input", action="store_true")
        s.add_argument("--ties-as-errors", action="store_true")
        s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        s.add_argument("--units", choices=["nats", "bits"], default="nats")
        s.add_argument("--out", metavar="PATH")
    return p


# ----------------------------------------------------------------- helpers

def _num(v):
    return float(format(v, FMT)) if isinstance(v, float) and math.isfinite(v) else v


def _rounded(obj):
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return _num(v) if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _models(args):
    loaded = [load_model(p) for p in args.model]
    sources = [m for m in loaded if isinstance(m, SourceModel)]
    channels = [m for m in loaded if isinstance(m, ChannelModel)]
    joints = [m for m in loaded if isinstance(m, JointSourceModel)]
    return sources, channels, joints


def _pair(args):
    sources, channels, joints = _models(args)
    if len(sources) != 1 or len(channels) != 1 or joints:
        raise InputError(f"{args.command} needs one source model and one channel model")
    return sources[0], channels[0]


def _joint(args):
    sources, channels, joints = _models(args)
    if len(joints) == 1 and not sources and not channels:
        return joints[0]
    if len(sources) == 1 and len(channels) == 1 and not joints:
        return induce_joint(sources[0], channels[0])
    raise InputError(f"{args.command} needs one joint model (or a source and a channel)")


def _scale(args):
    return 1.0 if args.units == "nats" else LN2


def _rhos(args, default=11):
    if args.rho:
        return args.rho
    return list(np.linspace(0.0, 1.0, args.grid or default))


def _rates_nats(args, values):
    return [v * _scale(args) for v in values]


def _header(args, argv):
    cfg = {k: v for k, v in vars(args).items() if k != "out"}
    cfg["model_sha256"] = [file_hash(p) for p in args.model]
    return [f"infospec {args.command}", "argv: " + json.dumps(list(argv)),
            "config: " + json.dumps(cfg, sort_keys=True)]


def _csv(args, argv, columns, rows):
    lines = [f"# {h}" for h in _header(args, argv)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format(float(v), FMT) for v in row))
    return "\n".join(lines) + "\n"


def _json(args, argv, payload):
    doc = {"command": args.command, "argv": list(argv),
           "model_sha256": [file_hash(p) for p in args.model], **payload}
    return json.dumps(_rounded(doc), indent=2, sort_keys=True) + "\n"


def _emit(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- commands

def _cmd_e0_curve(args, argv):
    source, channel = _pair(args)
    d = _scale(args)
    rows = [(r, exponents.gallager_e0(source, channel, args.n, r, budget=args.budget) / d)
            for r in _rhos(args)]
    return _csv(args, argv, ["rho", f"e0_{args.units}"], rows), EXIT_OK


def _cmd_j0_curve(args, argv):
    joint = _joint(args)
    d = _scale(args)
    rows = [(r, exponents.source_j0(joint, args.n, r, budget=args.budget) / d) for r in _rhos(args)]
    return _csv(args, argv, ["rho", f"j0_{args.units}"], rows), EXIT_OK


def _cmd_exponent(args, argv):
    if not args.rate:
        raise InputError("exponent needs --rate values")
    d = _scale(args)
    sources, channels, joints = _models(args)
    rows = []
    if sources and channels:
        source, channel = _pair(args)
        for shown, R in zip(args.rate, _rates_nats(args, args.rate)):
            if args.optimize_input:
                e, rho, _ = exponents.optimize_iid_input(channel, R, args.grid or exponents.RHO_GRID)
            else:
                e, rho = exponents.channel_exponent(source, channel, args.n, R,
                                                    args.grid or exponents.RHO_GRID, args.budget)
            rows.append((shown, e / d, rho))
    else:
        joint = _joint(args)
        for shown, R in zip(args.rate, _rates_nats(args, args.rate)):
            e, rho = exponents.source_exponent(joint, args.n, R, args.grid or exponents.RHO_GRID,
                                               args.budget)
            rows.append((shown, e / d, rho))
    return _csv(args, argv, [f"rate_{args.units}", f"exponent_{args.units}", "rho"], rows), EXIT_OK


def _cmd_spectrum(args, argv):
    sources, channels, joints = _models(args)
    if sources and channels and not joints:
        model = _pair(args)
    else:
        model = _joint(args)
    if args.samples > 0:
        spec = spectrum.monte_carlo_spectrum(model, args.n, args.kind, args.samples, args.seed,
                                             args.workers)
    else:
        spec = spectrum.exact_spectrum(model, args.n, args.kind, budget=args.budget)
    body = spectrum.spectrum_to_csv(spec, args.units, FMT)
    return "".join(f"# {h}\n" for h in _header(args, argv)) + body, EXIT_OK


def _report_json(args, argv, reports, reference):
    d = _scale(args)
    out = []
    for r in reports:
        row = r.to_dict()
        for key in ("threshold", "lhs", "rhs", "slack"):
            row[key] = row[key] / d
        out.append(row)
    status = EXIT_OK if all(r.holds for r in reports) else EXIT_VIOLATED
    payload = {"units": args.units, "reference": reference, "reports": out,
               "all_hold": status == EXIT_OK}
    return _json(args, argv, payload), status


def _thresholds(args, lo, hi, ref_value):
    if args.threshold:
        return _rates_nats(args, args.threshold)
    if ref_value is None:
        raise InputError("no closed-form reference rate for this model; pass --threshold")
    if args.delta is not None:
        delta = args.delta * _scale(args)
        return [ref_value - delta if lo == 0.0 else ref_value + delta]
    if not hi > lo:
        raise InputError("empty threshold interval; pass --threshold")
    return exponents.threshold_grid(lo, hi, args.grid or 10)


def _cmd_verify_t1(args, argv):
    source, channel = _pair(args)
    ref = reference_rates((source, channel))
    ts = _thresholds(args, 0.0, ref.inf_mutual_info or 0.0, ref.inf_mutual_info)
    reports = [exponents.verify_theorem1(source, channel, args.n, t, args.budget) for t in ts]
    return _report_json(args, argv, reports, {"inf_mutual_info": ref.inf_mutual_info})


def _cmd_verify_t2(args, argv):
    joint = _joint(args)
    ref = reference_rates(joint)
    h = ref.sup_cond_entropy
    lnx = joint.alphabets[0].log_size
    ts = _thresholds(args, h if h is not None else 0.0, lnx, h)
    reports = [exponents.verify_theorem2(joint, args.n, t, args.budget) for t in ts]
    return _report_json(args, argv, reports, {"sup_cond_entropy": h})


def _cmd_tilted(args, argv):
    joint = _joint(args)
    d = _scale(args)
    rows = []
    for r in _rhos(args):
        tj = exponents.tilted_joint(joint, args.n, r, args.budget)
        rows.append((r, tj.log_normalizer / args.n / d, tj.conditional_entropy() / args.n / d,
                     tj.total_mass()))
    cols = ["rho", f"j0_{args.units}", f"dj0_drho_{args.units}", "total_mass"]
    return _csv(args, argv, cols, rows), EXIT_OK


def _single_rate(args):
    if not args.rate or len(args.rate) != 1:
        raise InputError(f"{args.command} needs exactly one --rate")
    return args.rate[0] * _scale(args)


def _sim_json(args, argv, result):
    d = result.to_dict()
    payload = {"seed": args.seed, "units": args.units, "result": d}
    return _json(args, argv, payload), EXIT_OK


def _cmd_sim_channel(args, argv):
    source, channel = _pair(args)
    cfg = codingsim.ChannelSimConfig(source, channel, args.n, _single_rate(args), args.codebooks,
                                     args.transmissions, args.seed, args.ties_as_errors)
    return _sim_json(args, argv, codingsim.simulate_channel_code(cfg, args.workers))


def _cmd_sim_sw(args, argv):
    joint = _joint(args)
    res = codingsim.simulate_slepian_wolf(joint, args.n, _single_rate(args), args.bin_seed,
                                          args.samples or 10000, args.seed, args.workers,
                                          args.budget, args.ties_as_errors)
    return _sim_json(args, argv, res)


COMMANDS = {
    "e0-curve": _cmd_e0_curve, "j0-curve": _cmd_j0_curve, "exponent": _cmd_exponent,
    "spectrum": _cmd_spectrum, "verify-t1": _cmd_verify_t1, "verify-t2": _cmd_verify_t2,
    "tilted": _cmd_tilted, "sim-channel": _cmd_sim_channel, "sim-sw": _cmd_sim_sw,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"infospec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        text, status = COMMANDS[args.command](args, argv)
    except CapacityError as exc:
        print(f"infospec: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, OSError) as exc:
        print(f"infospec: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(args, text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
