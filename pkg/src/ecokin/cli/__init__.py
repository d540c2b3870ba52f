"""Command-line interface.

Exit codes: 0 success, 1 I/O error, 2 validation error, 3 numeric or
feasibility error.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ecokin.cli.config import ConfigError, VERSION, load_config, parse_config
from ecokin.cli.report import render, render_plot_data
from ecokin.cli.runner import BlockError, run

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text: str, n: int | None = None, what: str = "values") -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers for {what}, got {text!r}")
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} numbers for {what}, got {text!r}")
    return vals


def _event_arg(text):
    return _floats(text, 2, "an event tau,l")


def _leg_arg(text):
    return _floats(text.replace(":", ","), 2, "a leg v:dtau")


def _matrix_arg(text):
    return [_floats(r, None, "a matrix row") for r in text.split(";")]


# options whose values may start with "-" (e.g. "--leg -0.6:1")
_SIGNED_VALUE_OPTS = ("--leg", "--boost", "--a", "--b", "--init", "--K", "--prices", "--quality-rate")


def _attach_signed_values(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in _SIGNED_VALUE_OPTS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomised checks (fallback: $ECOKIN_SEED, then config seed, then 0)")
    common.add_argument("--format", choices=("csv", "jsonl", "json-lines"), default="csv")
    common.add_argument("--emit-plot-data", metavar="PATH", default=None,
                        help="write (series, x, y) samples for external plotting")
    common.add_argument("--log-base", choices=("2", "e"), default="2")
    common.add_argument("--jobs", type=int, default=1, help="run independent blocks concurrently")
    common.add_argument("-o", "--output", default="-", help="report destination (default stdout)")

    ap = argparse.ArgumentParser(prog="ecokin", description="Relativistic kinematics of pricing.",
                                 parents=[common])
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", parents=[common], help="execute a scenario config")
    p.add_argument("config")

    p = sub.add_parser("quotes", parents=[common], help="interval estimates from a quotes CSV")
    p.add_argument("csv")

    p = sub.add_parser("transport", parents=[common], help="bread transportation model")
    p.add_argument("--S0", type=float, required=True)
    p.add_argument("--k", dest="k_t", type=float, required=True)
    p.add_argument("--length", dest="l_AB", type=float, required=True)
    p.add_argument("--n-a", dest="n_A", type=float, default=1.0)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--quality-rate", type=float, default=None,
                   help="|dl/d ln n| to check against the economic speed of light")

    p = sub.add_parser("economy", parents=[common], help="technology-matrix economy")
    p.add_argument("--K", type=_matrix_arg, required=True, help='rows separated by ";", e.g. "0.5,0.2;0.3,0.6"')
    p.add_argument("--init", type=lambda t: _floats(t, None, "initial outputs"), default=None,
                   help="initial outputs (default: balanced eigenvector)")
    p.add_argument("--cycles", type=int, default=50)

    p = sub.add_parser("twin", parents=[common], help="twin-paradox itinerary")
    p.add_argument("--leg", type=_leg_arg, action="append", required=True, help="v:dtau, repeatable")

    p = sub.add_parser("interval", parents=[common], help="economic interval between two events")
    p.add_argument("--a", type=_event_arg, default=None)
    p.add_argument("--b", type=_event_arg, default=None)
    p.add_argument("--boost", type=float, action="append", default=[])
    p.add_argument("--prices", type=lambda t: _floats(t, 4, "a_min,a_max,b_min,b_max"), default=None)

    p = sub.add_parser("algebra-check", parents=[common], help="randomised algebra law checks")
    p.add_argument("--draws", type=int, default=1000)
    return ap


def _config_for(args):
    """Translate a verb's arguments into an equivalent config mapping."""
    cmd = None
    if args.verb == "quotes":
        cmd = {"quotes": {"csv": str(Path(args.csv).resolve())}}
    elif args.verb == "transport":
        body = {k: getattr(args, k) for k in ("S0", "k_t", "l_AB", "n_A")}
        if args.step is not None:
            body["step"] = args.step
        if args.quality_rate is not None:
            body["quality_rate"] = args.quality_rate
        cmd = {"transport": body}
    elif args.verb == "economy":
        cmd = {"economy": {"K": args.K, "init": args.init or "balanced", "cycles": args.cycles}}
    elif args.verb == "twin":
        cmd = {"twin": {"legs": args.leg}}
    elif args.verb == "interval":
        body = {}
        if args.a is not None or args.b is not None:
            body["pairs"] = [[args.a or [0.0, 0.0], args.b or [0.0, 0.0]]]
            if args.boost:
                body["boosts"] = args.boost
        if args.prices is not None:
            body["prices"] = [args.prices]
        cmd = {"interval": body}
    elif args.verb == "algebra-check":
        cmd = {"algebra": {"laws": {"draws": args.draws}, "witnesses": True}}
    return {"version": VERSION, "commands": [cmd]}


def _resolve_seed(cli_seed, cfg_seed):
    if cli_seed is not None:
        return cli_seed
    env = os.environ.get("ECOKIN_SEED")
    if env not in (None, ""):
        try:
            return int(env)
        except ValueError:
            raise ConfigError("$ECOKIN_SEED", f"not an integer: {env!r}") from None
    return cfg_seed if cfg_seed is not None else 0


def _write(dest: str, text: str):
    if dest == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(dest).write_text(text)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(_attach_signed_values(sys.argv[1:] if argv is None else argv))
    try:
        if args.verb == "run":
            cfg = load_config(args.config)
        else:
            cfg = parse_config(_config_for(args), Path.cwd())
        seed = _resolve_seed(args.seed, cfg.seed)
        env = run(cfg, seed=seed, log_base=args.log_base, jobs=max(1, args.jobs))
        _write(args.output, render(env, args.format))
        if args.emit_plot_data:
            _write(args.emit_plot_data, render_plot_data(env))
    except ConfigError as exc:
        print(f"ecokin: validation error at {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BlockError as exc:
        if isinstance(exc.cause, (KeyError, ConfigError)):
            print(f"ecokin: validation error at {exc.path}: {exc.cause}", file=sys.stderr)
            return EXIT_VALIDATION
        print(f"ecokin: numeric/feasibility error at {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"ecokin: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
