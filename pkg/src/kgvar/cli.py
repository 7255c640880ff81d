"""Command line front end.

    kgvar eig --box 1,1,1 --n 32 --k 1
    kgvar reduce-check [--perturb 0.01]
    kgvar residual --mode 1 --nt 64 --refine 3
    kgvar boost --v 0,0,0 --event 1,2,3,4
    kgvar spin [--static]
    kgvar entropy --profile two-level --levels 256
    kgvar christoffel --embedding polar

Every command prints a JSON report and, with ``--out DIR``, also writes it
(plus CSV tables or field files) there.  Exit codes: 0 all checks passed,
1 a check failed, 2 usage error, 3 numerical failure.
"""

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, checks
from .constants import PhysicalConstants
from .entropy import curve_csv
from .errors import ArgumentError, KGVarError
from .grid import save_field

REPORT_SCHEMA = "kgvar.report/1"
EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="kgvar", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    units = common.add_mutually_exclusive_group()
    units.add_argument("--nondim", dest="units", action="store_const", const="nondim",
                       help="m = c = hbar = gamma = 1 (default)")
    units.add_argument("--si", dest="units", action="store_const", const="si", help="SI constants, electron mass")
    common.add_argument("--config", type=Path, help="JSON file overriding command options")
    common.add_argument("--out", type=Path, help="directory for report and artifacts")
    common.set_defaults(units="nondim")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eig", parents=[common], help="Dirichlet Laplacian eigenpairs and dispersion roots")
    p.add_argument("--box", type=_floats, default=[1.0, 1.0, 1.0])
    p.add_argument("--n", type=int, default=32, help="points per axis, boundary included")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("reduce-check", parents=[common], help="flat-limit identities of both curvature forms")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--nt", type=int, default=16)
    p.add_argument("--perturb", type=float, default=0.0, help="amplitude of a non-flat bump added to r")

    p = sub.add_parser("residual", parents=[common], help="Klein-Gordon residual convergence")
    p.add_argument("--mode", type=_positive_int, default=1)
    p.add_argument("--n", type=int, default=8, help="spatial points per axis on the coarsest level")
    p.add_argument("--nt", type=int, default=17, help="time points on the coarsest level")
    p.add_argument("--refine", type=int, default=3)
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--root", choices=["principal", "minus"], default="principal")

    p = sub.add_parser("boost", parents=[common], help="Lorentz boost of an event")
    p.add_argument("--v", type=_floats, default=[0.0, 0.0, 0.0])
    p.add_argument("--event", type=_floats, default=[0.0, 0.0, 0.0, 0.0], help="t,x1,x2,x3")
    p.add_argument("--random", type=int, default=0, help="also run N random events with |v| <= 0.9c")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("spin", parents=[common], help="J = L + S decomposition and epsilon oracle")
    p.add_argument("--n", type=int, default=17)
    p.add_argument("--v", type=_floats, default=[0.3, -0.2, 0.1], help="translation velocity")
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--axis", choices=["x", "y", "z"], default="z")
    p.add_argument("--static", action="store_true")

    p = sub.add_parser("entropy", parents=[common], help="W(E), S(E) and 1/T curves")
    p.add_argument("--profile", choices=sorted(checks.ENTROPY_WINDOWS), default="two-level")
    p.add_argument("--levels", type=int, default=256)
    p.add_argument("--n", type=int, default=64)

    p = sub.add_parser("christoffel", parents=[common], help="Christoffel symbols against analytic values")
    p.add_argument("--embedding", choices=sorted(checks.EMBEDDINGS), default="polar")
    p.add_argument("--n", type=int, default=33)
    p.add_argument("--refine", type=int, default=2)
    return parser


def _apply_config(parser, args):
    if args.config is None:
        return args
    try:
        cfg = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest) or dest in ("command", "config"):
            parser.error(f"unknown config key {key!r} for {args.command}")
        setattr(args, dest, value)
    return args


def _validate(parser, args):
    cmd = args.command
    if cmd == "eig":
        if len(args.box) < 1 or any(L <= 0 for L in args.box):
            parser.error("--box lengths must be positive")
        if args.n < 3:
            parser.error("--n must be at least 3")
        interior = (args.n - 2) ** len(args.box)
        if not 1 <= args.k <= interior:
            parser.error(f"--k must lie in [1, {interior}]")
    elif cmd == "reduce-check":
        if args.n < 4 or args.nt < 4:
            parser.error("--n and --nt must be at least 4")
    elif cmd == "residual":
        if args.n < 4 or args.nt < 4 or args.refine < 2 or args.t_final <= 0:
            parser.error("need --n >= 4, --nt >= 4, --refine >= 2 and --t-final > 0")
        if args.mode > (args.n - 2) ** 3:
            parser.error("--mode exceeds the number of interior points")
    elif cmd == "boost":
        if len(args.v) != 3 or len(args.event) != 4:
            parser.error("--v needs 3 components and --event needs 4 (t,x1,x2,x3)")
        if args.random < 0:
            parser.error("--random must be nonnegative")
    elif cmd == "spin":
        if args.n < 5 or len(args.v) != 3 or args.eps <= 0:
            parser.error("need --n >= 5, a 3-component --v and --eps > 0")
    elif cmd == "entropy":
        if args.levels < 2 or args.n < 4:
            parser.error("need --levels >= 2 and --n >= 4")
    elif cmd == "christoffel":
        if args.n < 5 or args.refine < 2:
            parser.error("need --n >= 5 and --refine >= 2")


def _run(args, consts):
    artifacts = {}
    if args.command == "eig":
        report, pairs = checks.eig_report(tuple(args.box), args.n, args.k, consts, args.seed)
        for i, p in enumerate(pairs, 1):
            artifacts[f"eigenpair_{i}.json"] = p.phi2
    elif args.command == "reduce-check":
        report = checks.reduction_report(args.n, args.nt, consts, args.perturb)
    elif args.command == "residual":
        report = checks.residual_report(args.n, args.nt, args.refine, args.mode, consts, args.t_final, args.root)
        rows = report["levels"]
        lines = ["n,nt,h,dt,kg_residual,skg_residual"]
        lines += [f"{r['n']},{r['nt']},{r['h']!r},{r['dt']!r},{r['kg_residual']!r},{r['skg_residual']!r}" for r in rows]
        artifacts["residual.csv"] = "\r\n".join(lines) + "\r\n"
    elif args.command == "boost":
        report = checks.boost_report(args.event, args.v, consts, args.random, args.seed)
    elif args.command == "spin":
        report = checks.spin_report(args.n, args.v, consts, args.eps, args.axis, args.static)
    elif args.command == "entropy":
        report, curve = checks.entropy_report(args.profile, args.n, args.levels, consts)
        artifacts["entropy.csv"] = curve_csv(*curve)
    elif args.command == "christoffel":
        report = checks.christoffel_report(args.embedding, args.n, args.refine)
    else:  # pragma: no cover - argparse restricts the choices
        raise ArgumentError(args.command)
    return report, artifacts


def _emit(report, artifacts, out):
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{report['command']}.json").write_text(text + "\n")
    for name, item in artifacts.items():
        if isinstance(item, str):
            with open(out / name, "w", newline="") as fh:
                fh.write(item)
        else:
            save_field(out / name, item)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args = _apply_config(parser, args)
    _validate(parser, args)
    threads = os.environ.get("KGVAR_THREADS")
    if threads:
        # only affects BLAS libraries that read these at load time
        os.environ.setdefault("OMP_NUM_THREADS", threads)
    consts = PhysicalConstants.nondimensional() if args.units == "nondim" else PhysicalConstants.si()
    try:
        report, artifacts = _run(args, consts)
    except ArgumentError as exc:
        print(json.dumps({"schema": REPORT_SCHEMA, "command": args.command, "error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except (KGVarError, ArithmeticError) as exc:
        diag = {"schema": REPORT_SCHEMA, "command": args.command, "error": str(exc), "type": type(exc).__name__}
        residuals = getattr(exc, "residuals", None)
        if residuals is not None:
            diag["residuals"] = [float(r) for r in residuals]
        print(json.dumps(diag, indent=2, sort_keys=True))
        return EXIT_NUMERIC
    passed = checks.all_passed(report)
    report = {
        "schema": REPORT_SCHEMA,
        "units": args.units,
        "constants": consts.to_dict(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "passed": passed,
        **report,
    }
    _emit(report, artifacts, args.out)
    return EXIT_OK if passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
