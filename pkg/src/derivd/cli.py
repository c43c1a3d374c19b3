"""derivd command line: run the experiments or evaluate one formula.

    derivd exp1|exp2|exp3|exp4 [--config FILE] [--seed N] [--out DIR]
    derivd calc <formula> [options]

Default output directory comes from --out, then $DERIVD_OUT, then ./out.
"""

from __future__ import annotations

import argparse
import os
import sys

from .experiments import DEFAULTS, OUTPUT_DIR_ENV, calc, load_config, run_experiment


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="derivd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for exp in DEFAULTS:
        p = sub.add_parser(exp, help="run %s and write CSV/JSON reports" % exp)
        p.add_argument("--config", help="JSON config file (top level or keyed by experiment)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="output directory")
        if exp == "exp3":
            p.add_argument(
                "--policy",
                choices=["lru", "lfu", "truemi", "freqdepth", "threshold"],
                action="append",
                dest="policies",
                help="restrict to a policy (repeatable); default runs the four baselines",
            )
            p.add_argument(
                "--tau-scale", type=float, default=None, dest="tau_scale",
                help="threshold policy scale factor on ln(atom_count)",
            )

    c = sub.add_parser("calc", help="evaluate one formula with explicit units")
    csub = c.add_subparsers(dest="formula", required=True)

    def f(name, **flags):
        cp = csub.add_parser(name)
        for flag, (typ, default, help_) in flags.items():
            cp.add_argument("--" + flag, type=typ, default=default, required=default is None, help=help_)
        cp.add_argument("--temp", type=float, default=300.0, help="temperature in kelvin")
        return cp

    f("critical-frequency", atoms=(float, None, "atom universe size"), c=(float, 1.0, "system constant"))
    f("landauer", depth=(float, None, "derivation steps"))
    f(
        "critical-storage",
        hq=(float, None, "H(Q) in bits"),
        budget=(float, None, "energy budget in joules"),
        hqk=(float, None, "H(Q|K) in bits"),
    )
    f(
        "triality",
        energy=(float, None, "joules"),
        time=(float, None, "seconds or steps"),
        storage=(float, None, "bits"),
        hqk=(float, None, "H(Q|K) in bits"),
    )
    f("capacity", states=(float, None, "ontology states"), energy=(float, None, "joules"))
    f(
        "amortized",
        **{
            "storage-bits": (float, None, "stored bits"),
            "freq": (float, None, "access share or count"),
            "h-derive": (float, None, "derivation cost in bits"),
        },
    )
    mc = csub.add_parser("multi-cost")
    mc.add_argument("--storage", type=float, default=100.0)
    mc.add_argument("--n", type=int, default=1000)
    mc.add_argument("--probs", type=_float_list, default=[0.5, 0.3, 0.2])
    mc.add_argument("--h", type=_float_list, default=[10.0, 20.0, 30.0])
    mc.add_argument("--temp", type=float, default=300.0)
    f("alpha-critical", hq=(float, None, "H(Q) in bits"), **{"mean-depth": (float, None, "steps")})
    f("entropy-production", mi=(float, None, "served information in nats"))
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "calc":
        values = {k.replace("-", "_"): v for k, v in vars(args).items() if k not in ("command", "formula")}
        values = {k: v for k, v in values.items() if v is not None}
        try:
            result = calc(args.formula, values)
        except (ValueError, KeyError) as exc:
            print("error: %s" % exc, file=sys.stderr)
            return 2
        print("formula: %s" % args.formula)
        for key, value in result.items():
            print("  %s = %s" % (key, value))
        return 0

    overrides = {"seed": args.seed}
    if getattr(args, "policies", None):
        overrides["policies"] = args.policies
    if getattr(args, "tau_scale", None) is not None:
        overrides["tau_scale"] = args.tau_scale
    cfg = load_config(args.command, args.config, overrides)
    out_dir = args.out or os.environ.get(OUTPUT_DIR_ENV) or "out"
    report, paths = run_experiment(args.command, cfg, out_dir)
    meta = {k: v for k, v in report.metadata.items() if k not in ("config",)}
    print("%s: %d rows -> %s" % (args.command, len(report.rows), ", ".join(paths)))
    for key, value in meta.items():
        if key in ("experiment", "version"):
            continue
        print("  %s: %s" % (key, value))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
