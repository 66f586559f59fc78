"""Command-line front end.

Subcommands: constants | certify | sweep | empirical | poisson | mixed.
JSON is the canonical output format, CSV a flat projection of the same rows.
Exit codes: 0 all checks pass, 2 a mathematical bound was violated,
1 operational error. BE_CERTIFY_TOL overrides the quadrature tolerance.
"""

import argparse
import csv
import io
import json
import math
import sys

from becert import certifier, empirical, random_sums
from becert.constants import UNIVERSAL

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


def _sig12(v: float) -> float:
    return float(f"{v:.12g}")


def _emit(payload, args, rows=None, header=None):
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(header)
        for row in rows:
            w.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_constants(args) -> int:
    payload = {
        "theta0": _sig12(UNIVERSAL.theta0),
        "kappa": _sig12(UNIVERSAL.kappa),
        "esseen_lower": _sig12(UNIVERSAL.esseen_lower),
        "bhattacharya_bound": _sig12(UNIVERSAL.bhattacharya_bound),
        "tolerances": {"theta0": 1e-12, "kappa": 1e-10,
                       "esseen_lower": 1e-15, "bhattacharya_bound": 1e-9},
    }
    rows = [(k, v) for k, v in payload.items() if k != "tolerances"]
    _emit(payload, args, rows=rows, header=("constant", "value"))
    return EXIT_OK


def cmd_certify(args) -> int:
    fn = certifier.certify_theorem1 if args.theorem == 1 else certifier.certify_theorem2
    kwargs = {"mode": args.mode, "parallelism": args.parallelism,
              "progress": (lambda msg: print(msg, file=sys.stderr))
              if args.mode == "full" else None}
    if args.target is not None:
        kwargs["target"] = args.target
    result = fn(**kwargs)
    rows = [(c["name"], c["passed"], c["value"], c["limit"]) for c in result.checks]
    _emit(result.to_dict(), args, rows=rows,
          header=("check", "passed", "value", "limit"))
    return EXIT_OK if result.passed else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    policy = certifier.SweepPolicy(
        cells=args.cells, max_depth=args.max_depth,
        N_rules=((math.inf, args.big_n),),
        uniform_only=not args.finite_n,
        parallelism=args.parallelism,
    )
    report = certifier.sweep(args.k, args.eps_lo, args.eps_hi, args.target,
                             policy, mode="cli",
                             progress=lambda m: print(m, file=sys.stderr))
    rows = [(c.eps_lo, c.eps_hi, c.C_hi, c.bracket, c.passed)
            for c in report.cells]
    _emit(report.to_dict(), args, rows=rows,
          header=("eps_lo", "eps_hi", "C_hi", "bracket", "passed"))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_empirical(args) -> int:
    dist = empirical.dist_from_spec(args.dist)
    dist = empirical.standardize(dist)
    bound = args.bound
    if bound.startswith("classical:"):
        bound = ("classical", float(bound.split(":", 1)[1]))
    rows = empirical.verify_inequality(dist, range(1, args.n_max + 1), bound,
                                       parallelism=args.parallelism)
    payload = {"dist": args.dist, "bound": args.bound, "rows": rows,
               "passed": all(r["passed"] for r in rows)}
    _emit(payload, args,
          rows=[(r["n"], r["distance"], r["bound"], r["margin"], r["passed"])
                for r in rows],
          header=("n", "distance", "bound", "margin", "passed"))
    return EXIT_OK if payload["passed"] else EXIT_VIOLATION


def cmd_poisson(args) -> int:
    dist = empirical.dist_from_spec(args.dist)
    mixture, trunc = empirical.compound_poisson(dist, args.lam, args.tail_tol)
    rho = empirical.kolmogorov_to_normal(mixture)
    bound = random_sums.poisson_be_bound(empirical.moments(dist), args.lam)
    margin = bound - (rho - trunc)
    payload = {
        "dist": args.dist, "lambda": args.lam, "tail_tol": args.tail_tol,
        "distance": rho, "truncation_mass": trunc, "bound": bound,
        "margin": margin, "passed": margin >= 0.0,
    }
    _emit(payload, args,
          rows=[(args.lam, rho, trunc, bound, margin, payload["passed"])],
          header=("lambda", "distance", "truncation_mass", "bound", "margin",
                  "passed"))
    return EXIT_OK if payload["passed"] else EXIT_VIOLATION


def _parse_scenario(text: str):
    name, _, rest = text.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ValueError(f"scenario parameter {item!r} must be key=value")
            params[key.strip()] = float(val)
    return name.strip(), params


def cmd_mixed(args) -> int:
    name, params = _parse_scenario(args.scenario)
    t = params.get("t", 1.0)
    if name in ("gamma", "exponential"):
        r = 1.0 if name == "exponential" else params["r"]
        inv = random_sums.gamma_inverse_sqrt_moment(r, t)
        bound = random_sums.theorem5_bound(args.beta3, inv, args.delta)
        payload = {
            "scenario": args.scenario, "t": t, "r": r,
            "coefficient": random_sums.POISSON_COEFF * inv * math.sqrt(t),
            "inv_sqrt_moment": inv, "delta_t": args.delta, "bound": bound,
        }
    elif name == "heavy":
        alpha = params["alpha"]
        e_abs_v = random_sums.heavy_tail_mean_abs(alpha)
        mean_abs_dev = args.mean_abs_dev if args.mean_abs_dev is not None else e_abs_v
        prof = empirical.MomentProfile(args.mu, args.sigma2, args.beta3)
        bound = random_sums.theorem8_bound(prof, e_abs_v, mean_abs_dev,
                                           args.delta, t)
        payload = {
            "scenario": args.scenario, "t": t, "alpha": alpha,
            "E_abs_V": e_abs_v, "mean_abs_dev": mean_abs_dev,
            "delta_t": args.delta, "bound": bound,
        }
    else:
        raise ValueError(f"unknown scenario {name!r} "
                         "(expected gamma:r=..,t=.. | exponential:t=.. | heavy:alpha=..,t=..)")
    _emit(payload, args, rows=[tuple(payload.values())],
          header=tuple(payload.keys()))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="becert",
        description="Certified sharpened central-limit-theorem error bounds: "
                    "constant certification, bracketed sweeps, exact-distribution "
                    "verification, and random-sum bound evaluation.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None, help="write the report here")

    sp = sub.add_parser("constants", help="certified universal constants")
    common(sp)
    sp.set_defaults(fn=cmd_constants)

    sp = sub.add_parser("certify", help="certify a theorem's constant")
    sp.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    sp.add_argument("--mode", choices=("spot", "full"), default="spot")
    sp.add_argument("--target", type=float, default=None)
    sp.add_argument("--parallelism", type=int, default=1)
    common(sp)
    sp.set_defaults(fn=cmd_certify)

    sp = sub.add_parser("sweep", help="bracketed max of C(eps) on an interval")
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--eps-lo", type=float, required=True)
    sp.add_argument("--eps-hi", type=float, required=True)
    sp.add_argument("--target", type=float, required=True)
    sp.add_argument("--cells", type=int, default=25)
    sp.add_argument("--max-depth", type=int, default=8)
    sp.add_argument("--big-n", type=int, default=200,
                    help="tail index N for the n-uniform bound")
    sp.add_argument("--finite-n", action="store_true",
                    help="also maximize over finite n in [n_*, N)")
    sp.add_argument("--parallelism", type=int, default=1)
    common(sp)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("empirical", help="exact distances vs the bounds")
    sp.add_argument("--dist", required=True,
                    help='"rademacher", "two_point:p", or JSON file')
    sp.add_argument("--n-max", type=int, default=20)
    sp.add_argument("--bound", default="theorem2",
                    help="theorem1 | theorem2 | classical:C")
    sp.add_argument("--parallelism", type=int, default=1)
    common(sp)
    sp.set_defaults(fn=cmd_empirical)

    sp = sub.add_parser("poisson", help="Poisson random-sum bound check")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--tail-tol", type=float, default=1e-10)
    common(sp)
    sp.set_defaults(fn=cmd_poisson)

    sp = sub.add_parser("mixed", help="mixed-intensity random-sum bounds")
    sp.add_argument("--scenario", required=True,
                    help="gamma:r=..,t=.. | exponential:t=.. | heavy:alpha=..,t=..")
    sp.add_argument("--beta3", type=float, default=1.0)
    sp.add_argument("--mu", type=float, default=1.0)
    sp.add_argument("--sigma2", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.0,
                    help="structural Kolmogorov distance input")
    sp.add_argument("--mean-abs-dev", type=float, default=None,
                    help="E|Lambda_t - t|/sqrt(t) for the heavy scenario "
                         "(defaults to E|V|, its large-t limit)")
    common(sp)
    sp.set_defaults(fn=cmd_mixed)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError, RuntimeError) as exc:
        print(f"becert: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
