"""Command-line interface: exact formulas, Monte Carlo runs, and reproduction
of the worked examples, all emitting JSON/CSV with run manifests."""

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, analysis, bbp, series, walk
from .params import (
    CookieVector,
    WalkKind,
    as_probability,
    classify,
    constant_cookies,
    delta,
    excited_asymmetric_walk,
    excited_walk,
    parse_config,
    simple_walk,
)

# fixed default so documented examples reproduce exactly (never wall clock)
DEFAULT_SEED = 0xC00C1E

EXIT_OK = 0
EXIT_BAD_PARAMS = 2
EXIT_IO = 3
EXIT_MISMATCH = 4


def _fmt(x):
    """17 significant digits: round-trips doubles, locale-free."""
    return f"{float(x):.17g}"


def _jsonable(x):
    if isinstance(x, Fraction):
        return {"fraction": f"{x.numerator}/{x.denominator}", "value": float(x)}
    return x


def _parse_cookies(text):
    """Comma list of probabilities; 'v*N' repeats v N times."""
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "*" in piece:
            value, _, count = piece.rpartition("*")
            out.extend([as_probability(value)] * int(count))
        else:
            out.append(as_probability(piece))
    return out


def _config_from_args(args):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            return parse_config(fh)
    cookies = _parse_cookies(args.cookies) if getattr(args, "cookies", None) else []
    kind = WalkKind(getattr(args, "kind", "excited_asymmetric"))
    if kind is WalkKind.SIMPLE:
        return simple_walk(args.bias if args.bias is not None else args.p0)
    if kind is WalkKind.EXCITED_SYMMETRIC:
        return excited_walk(cookies)
    bias = args.bias if args.bias is not None else args.p0
    if not cookies and getattr(args, "p1", None) is not None:
        cookies = [args.p1]
    return excited_asymmetric_walk(cookies, bias)


class _Run:
    def __init__(self, args, command):
        self.args = args
        self.command = command
        self.start = time.monotonic()

    def manifest(self):
        skip = {"func", "out", "format", "threads"}
        params = {k: _jsonable(v) for k, v in sorted(vars(self.args).items())
                  if k not in skip and not callable(v)}
        return {
            "command": self.command,
            "params": params,
            "seed": self.args.seed,
            "version": __version__,
            "duration_s": round(time.monotonic() - self.start, 6),
        }

    def emit(self, result, csv_rows=None, csv_header=None):
        """Write the result (JSON, or CSV when rows are given and --format/--out
        ask for it) plus a manifest; stdout gets result + manifest inline."""
        args = self.args
        as_csv = csv_rows is not None and (
            args.format == "csv" or (args.out and str(args.out).endswith(".csv")))
        if args.out:
            try:
                with open(args.out, "w") as fh:
                    if as_csv:
                        fh.write(",".join(csv_header) + "\n")
                        for row in csv_rows:
                            fh.write(",".join(
                                _fmt(v) if isinstance(v, float) else str(v)
                                for v in row) + "\n")
                    else:
                        json.dump(result, fh, sort_keys=True, indent=2)
                        fh.write("\n")
                with open(str(args.out) + ".manifest.json", "w") as fh:
                    json.dump(self.manifest(), fh, sort_keys=True, indent=2)
                    fh.write("\n")
            except OSError as exc:
                print(f"error: cannot write output: {exc}", file=sys.stderr)
                sys.exit(EXIT_IO)
            print(json.dumps({"out": str(args.out), "manifest": self.manifest()},
                             sort_keys=True))
        else:
            if as_csv:
                sys.stdout.write(",".join(csv_header) + "\n")
                for row in csv_rows:
                    sys.stdout.write(",".join(
                        _fmt(v) if isinstance(v, float) else str(v)
                        for v in row) + "\n")
            else:
                print(json.dumps({"result": result, "manifest": self.manifest()},
                                 sort_keys=True))


def cmd_speed(args):
    run = _Run(args, "speed")
    result = {}
    if not args.mc or args.both:
        v = analysis.exact_speed_earw(args.p0, args.p1)
        result["v_star"] = float(v)
    if args.mc or args.both:
        config = _config_from_args(args)
        est = walk.estimate_speed(config, steps=args.steps, replicas=args.replicas,
                                  base_seed=args.seed, threads=args.threads)
        result["mc"] = est.to_dict()
        if args.both:
            z = (est.mean - result["v_star"]) / est.std_error
            result["z_score"] = z
    run.emit(result)


def cmd_figure3(args):
    run = _Run(args, "figure3")
    p1_list = [float(as_probability(p)) for p in args.p1_list.split(",")]
    rows = analysis.figure3_rows(p1_list=p1_list, grid=args.grid)
    result = {"rows": len(rows), "p1_list": p1_list, "grid": args.grid}
    if not args.out:
        args.format = "csv"
    run.emit(result, csv_rows=rows, csv_header=("p0", "p1", "v_star"))


def cmd_delta(args):
    run = _Run(args, "delta")
    cookies = CookieVector(_parse_cookies(args.cookies))
    run.emit({"M": cookies.M, "delta": _jsonable(delta(cookies))})


def cmd_classify(args):
    run = _Run(args, "classify")
    if getattr(args, "config", None):
        with open(args.config) as fh:
            config = parse_config(fh)
        cls = config.classify()
        cookies = config.cookies
    else:
        cookies = CookieVector(_parse_cookies(args.cookies))
        cls = classify(cookies)
    run.emit({"delta": _jsonable(delta(cookies)), "class": cls.value})


def cmd_stationary(args):
    run = _Run(args, "stationary")
    if args.cookies and args.kind == "excited_symmetric":
        law = bbp.erw_law(_parse_cookies(args.cookies))
    else:
        law = bbp.earw_law([args.p1], args.p0)
    est = bbp.estimate_stationary(law, args.steps, burnin=args.burnin,
                                  seed=args.seed)
    run.emit({
        "mean": est.mean,
        "speed": bbp.speed_from_stationary(est.mean),
        "drift_diagnostic": est.drift_diagnostic,
        "burnin": est.burnin,
        "steps": est.steps,
        "pmf": {str(k): v / est.pmf.total for k, v in sorted(est.pmf.weights.items())},
    })


def cmd_pi(args):
    run = _Run(args, "pi")
    if args.which == 0:
        res = series.pi0_product(args.p0, args.p1, tol=args.tol)
        run.emit(res.to_dict())
    else:
        if args.oracle:
            run.emit(series.pi1_report(args.p0, args.p1, tol=args.tol,
                                       paths=args.paths, barrier=args.barrier,
                                       seed=args.seed))
        else:
            a, b = series.pi1_sum(args.p0, args.p1, tol=args.tol)
            run.emit({"variant_A": a.to_dict(), "variant_B": b.to_dict()})


def cmd_pgf(args):
    run = _Run(args, "pgf")
    res = analysis.pgf_eval(args.p0, args.p1, args.s, tol=args.tol)
    run.emit({"s": res.s, "value": res.value, "factors_used": res.factors_used,
              "tail_bound": res.tail_bound})


def cmd_coupling(args):
    run = _Run(args, "coupling")
    head = tuple(_parse_cookies(args.cookies)) if args.cookies else (args.p,) * args.M
    head = tuple(float(p) for p in head)
    N = args.N if args.N else bbp.minimal_coupling_N(head, args.p0)
    pair = bbp.CoupledPairConfig(head=head, p0=args.p0, N=N)
    res = bbp.run_coupled_batch(pair, args.paths, args.steps, args.seed)
    res["N"] = N
    run.emit(res)


def cmd_uz(args):
    run = _Run(args, "uz")
    config = _config_from_args(args)
    rep = bbp.check_u_z_equality(config, args.n, args.samples, args.seed)
    run.emit({
        "n": rep.n,
        "samples": rep.samples,
        "marginal_tvs": rep.marginal_tvs,
        "max_tv": rep.max_tv,
        "resampled": rep.resampled,
        "passed": rep.passed,
    })


def cmd_decomp(args):
    run = _Run(args, "decomp")
    if args.cookies:
        head = _parse_cookies(args.cookies)
    else:
        head = [args.p1]
    law = bbp.CookieSequenceLaw(head=tuple(float(p) for p in head),
                                tail=float(args.p0))
    rep = bbp.check_decomposition(law, args.k, args.samples, args.seed)
    run.emit({
        "k": rep.k,
        "M": rep.M,
        "samples": rep.samples,
        "tv_k_minus_M": rep.tv_k_minus_M,
        "tv_k_minus_M_plus_1": rep.tv_k_minus_M_plus_1,
        "selected_convention": rep.selected_convention,
        "passed": rep.passed,
    })


def _reproduce_corollary45():
    p, q = Fraction("0.99"), Fraction("0.85")
    checks = []
    d3 = delta(constant_cookies(3, q))
    checks.append(("delta(3, q) = 2.1", d3 == Fraction("2.1"), float(d3)))
    p8 = analysis.p_i_strength(3, p, 8)
    checks.append(("p^(8) = 697/1100", p8 == Fraction(697, 1100), str(p8)))
    d11 = delta(constant_cookies(11, p8))
    checks.append(("delta(11, p_8) = 2.94", d11 == Fraction("2.94"), float(d11)))
    N = analysis.corollary_threshold_N(p, q)
    checks.append(("N = 7", N == 7, N))
    return checks


def _reproduce_prop46():
    p, q = Fraction("0.99"), Fraction("0.85")
    eps = Fraction("0.0045")
    eps_max, minimal_M = analysis.proposition_bounds(p, q, eps)
    checks = [
        ("epsilon = 0.0045 < epsilon_max", eps < eps_max, float(eps_max)),
        ("minimal M = 115 (delta > 2 with 114 tilted cookies)",
         minimal_M == 115, minimal_M),
    ]
    v_star = analysis.exact_speed_earw(Fraction(1, 2) + eps, p)
    identity = eps / (eps + (1 - p))
    checks.append(("v*(1/2+eps, p) = eps/(eps+(1-p))", v_star == identity,
                   float(v_star)))
    checks.append(("v*(1/2+eps, p) < f(q)",
                   v_star < analysis.speed_lower_bound_3cookie(q), float(v_star)))
    return checks


def _reproduce_order_counterexample():
    checks = []
    g0 = analysis.order_counterexample_gap(Fraction(1, 2))
    checks.append(("gap(1/2) = 0", g0 == 0, float(g0)))
    for p in (Fraction(3, 4), Fraction("0.99")):
        g = analysis.order_counterexample_gap(p)  # dual forms agree exactly
        checks.append((f"gap({p}) > 0", g > 0, float(g)))
    return checks


def _reproduce_theorem43_decay(seed, steps, replicas, threads):
    checks = []
    ests = {}
    for i in (0, 5, 20):
        strength = float(analysis.p_i_strength(3, Fraction("0.9"), i))
        config = excited_walk([strength] * (3 + i))
        est = walk.estimate_speed(config, steps=steps, replicas=replicas,
                                  base_seed=(seed, i), threads=threads)
        ests[i] = est
        bound = 2 * strength - 1
        checks.append((
            f"v(3+{i}, p_{i}) <= 2 p^({i}) - 1 + 3 SE",
            est.mean <= bound + 3 * est.std_error,
            {"estimate": est.mean, "se": est.std_error, "bound": bound},
        ))
    se = (ests[0].std_error ** 2 + ests[20].std_error ** 2) ** 0.5
    checks.append((
        "v(23, p_20) < v(3, p_0) by more than 6 SE",
        ests[0].mean - ests[20].mean > 6 * se,
        {"i0": ests[0].mean, "i20": ests[20].mean, "combined_se": se},
    ))
    return checks


def cmd_reproduce(args):
    run = _Run(args, "reproduce")
    if args.which == "corollary45":
        checks = _reproduce_corollary45()
    elif args.which == "prop46":
        checks = _reproduce_prop46()
    elif args.which == "order-counterexample":
        checks = _reproduce_order_counterexample()
    else:
        checks = _reproduce_theorem43_decay(args.seed, args.steps,
                                            args.replicas, args.threads)
    ok = all(passed for _, passed, _ in checks)
    run.emit({
        "which": args.which,
        "checks": [{"name": name, "passed": passed, "value": value}
                   for name, passed, value in checks],
        "all_passed": ok,
    })
    if not ok:
        sys.exit(EXIT_MISMATCH)


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def _prob(text):
    return float(as_probability(text))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cookiewalk",
        description="Excited and excited-asymmetric random walk toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("speed", help="exact and/or Monte Carlo limiting speed")
    sp.add_argument("--p0", type=_prob, required=True)
    sp.add_argument("--p1", type=_prob)
    sp.add_argument("--mc", action="store_true")
    sp.add_argument("--both", action="store_true")
    sp.add_argument("--steps", type=int, default=1_000_000)
    sp.add_argument("--replicas", type=int, default=20)
    sp.add_argument("--config", default=None)
    sp.add_argument("--cookies", default=None)
    sp.add_argument("--kind", default="excited_asymmetric")
    sp.add_argument("--bias", type=_prob, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_speed)

    sp = sub.add_parser("figure3", help="speed-curve CSV over a p0 grid")
    sp.add_argument("--grid", type=int, default=99)
    sp.add_argument("--p1-list", dest="p1_list", default="0.8,0.9,0.99")
    _add_common(sp)
    sp.set_defaults(func=cmd_figure3)

    sp = sub.add_parser("delta", help="total per-site drift of a cookie vector")
    sp.add_argument("--cookies", required=True)
    _add_common(sp)
    sp.set_defaults(func=cmd_delta)

    sp = sub.add_parser("classify", help="qualitative class from the drift")
    sp.add_argument("--cookies", default=None)
    sp.add_argument("--config", default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("stationary", help="occupation-frequency stationary estimate")
    sp.add_argument("--p0", type=_prob)
    sp.add_argument("--p1", type=_prob)
    sp.add_argument("--cookies", default=None)
    sp.add_argument("--kind", default="excited_asymmetric")
    sp.add_argument("--steps", type=int, default=1_000_000)
    sp.add_argument("--burnin", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_stationary)

    sp = sub.add_parser("pi", help="stationary masses pi(0), pi(1) by series")
    sp.add_argument("--p0", type=_prob, required=True)
    sp.add_argument("--p1", type=_prob, required=True)
    sp.add_argument("--which", type=int, choices=(0, 1), required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--oracle", action="store_true",
                    help="for --which 1: run the MC variant-selection oracle")
    sp.add_argument("--paths", type=int, default=100_000)
    sp.add_argument("--barrier", type=int, default=200)
    _add_common(sp)
    sp.set_defaults(func=cmd_pi)

    sp = sub.add_parser("pgf", help="stationary PGF value by infinite product")
    sp.add_argument("--p0", type=_prob, required=True)
    sp.add_argument("--p1", type=_prob, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-12)
    _add_common(sp)
    sp.set_defaults(func=cmd_pgf)

    sp = sub.add_parser("coupling", help="coupled chain domination check")
    sp.add_argument("--M", type=int, default=1)
    sp.add_argument("--p", type=_prob, default=0.9)
    sp.add_argument("--cookies", default=None)
    sp.add_argument("--p0", type=_prob, required=True)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--paths", type=int, default=1000)
    sp.add_argument("--steps", type=int, default=10_000)
    _add_common(sp)
    sp.set_defaults(func=cmd_coupling)

    sp = sub.add_parser("uz", help="left-step profile vs chain marginals")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--p0", type=_prob, default=None)
    sp.add_argument("--p1", type=_prob, default=None)
    sp.add_argument("--config", default=None)
    sp.add_argument("--cookies", default=None)
    sp.add_argument("--kind", default="excited_asymmetric")
    sp.add_argument("--bias", type=_prob, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_uz)

    sp = sub.add_parser("decomp", help="failure-count decomposition check")
    sp.add_argument("--p0", type=_prob, required=True)
    sp.add_argument("--p1", type=_prob, default=None)
    sp.add_argument("--cookies", default=None)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--samples", type=int, default=1_000_000)
    _add_common(sp)
    sp.set_defaults(func=cmd_decomp)

    sp = sub.add_parser("reproduce", help="recompute the worked examples")
    sp.add_argument("which", choices=("corollary45", "prop46",
                                      "order-counterexample", "theorem43-decay"))
    sp.add_argument("--steps", type=int, default=1_000_000)
    sp.add_argument("--replicas", type=int, default=20)
    _add_common(sp)
    sp.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(EXIT_BAD_PARAMS)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(EXIT_IO)


if __name__ == "__main__":
    main()
