"""Command-line front end.

Subcommands: forward, synth, invert, analyze-symbol, eshelby-static.
Exit codes: 0 success, 2 configuration error, 3 solver failure.

Numerical modules are imported lazily so --threads can cap the BLAS pool
before the numerical stack initializes.
"""

import argparse
import json
import os
import sys


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elascat",
        description="Forward and inverse 2D plane-strain elastic scattering.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="YAML experiment config")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--seed", type=int, default=None, help="noise seed override")
        p.add_argument("--threads", type=int, default=None,
                       help="BLAS/OpenMP thread cap")

    p = sub.add_parser("forward", help="solve the direct problem, write fields")
    common(p)
    p = sub.add_parser("synth", help="forward data plus a seeded noisy copy")
    common(p)
    p = sub.add_parser("invert", help="Newton reconstruction from far-field data")
    common(p)
    p.add_argument("--data", required=True, help="far-field CSV (clean or noisy)")

    p = sub.add_parser("analyze-symbol",
                       help="invertibility and symbol-determinant diagnostics")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--kappa-star", type=float, required=True)
    p.add_argument("--mu-star", type=float, required=True)
    p.add_argument("--out", default=None, help="optional JSON output path")
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("eshelby-static",
                       help="periodic-cell eigenstrain solve for a disc")
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--dkappa", type=float, required=True)
    p.add_argument("--dmu", type=float, required=True)
    p.add_argument("--resolution", type=int, default=128)
    p.add_argument("--radius", type=float, default=0.3)
    p.add_argument("--eps11", type=float, default=1.0)
    p.add_argument("--eps22", type=float, default=1.0)
    p.add_argument("--eps12", type=float, default=0.0)
    p.add_argument("--out", default="out")
    p.add_argument("--threads", type=int, default=None)
    return parser


def _cap_threads(threads):
    if threads is None:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(threads)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    _cap_threads(getattr(args, "threads", None))

    from .errors import ConfigError, ElascatError

    try:
        if args.command == "analyze-symbol":
            from .errors import DegenerateModuli, SingularContrast
            from .runner import cmd_analyze_symbol

            try:
                result = cmd_analyze_symbol(args.lam, args.mu, args.kappa_star,
                                            args.mu_star, args.out)
            except (SingularContrast, DegenerateModuli) as exc:
                print(json.dumps({"error": type(exc).__name__,
                                  "message": str(exc)}, indent=2, sort_keys=True))
                return 3
            print(json.dumps(result, indent=2, sort_keys=True))
            return 0
        if args.command == "eshelby-static":
            from .runner import cmd_eshelby_static

            return cmd_eshelby_static(
                args.lam, args.mu, args.dkappa, args.dmu, args.resolution,
                args.radius, (args.eps11, args.eps22, args.eps12), args.out)

        from .config import load_config
        from .runner import cmd_forward, cmd_invert, cmd_synth

        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.resolved["noise"]["seed"] = args.seed
        out = args.out if args.out is not None else cfg.output_dir
        if args.command == "forward":
            return cmd_forward(cfg, out)
        if args.command == "synth":
            return cmd_synth(cfg, out)
        if args.command == "invert":
            return cmd_invert(cfg, args.data, out)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ElascatError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
