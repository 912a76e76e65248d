"""Command-line surface.

Every subcommand prints a single JSON envelope (or CSV for the bulk data
emitters) on stdout; progress goes to stderr.  Output is deterministic:
floats are fixed at 12 significant digits, keys are sorted, and the
wall-time field stays null unless --timing is passed.  Exit codes: 0 on
success, 1 when a verification subcommand finds a failing comparison, 2 for
usage errors.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import attractor, cftx, classgroup, eccensus, qseries, rademacher, tables
from .quadforms import is_fundamental

_DEFAULT_PRECISION_ENV = "CLASSFORMS_PRECISION"


def _fmt(x):
    """Normalize a value for deterministic JSON emission."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, float):
        return float(f"{x:.12g}")
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return {"re": _fmt(x.real), "im": _fmt(x.imag)}
    if isinstance(x, dict):
        return {str(k): _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    if hasattr(x, "__int__") and not isinstance(x, int):
        return int(x)
    return x


def _emit(args, command, parameters, results, provenance, t0):
    envelope = {
        "command": command,
        "parameters": _fmt(parameters),
        "results": _fmt(results),
        "provenance": provenance,
        "wall_time_ms": _fmt((time.monotonic() - t0) * 1000.0) if args.timing else None,
    }
    json.dump(envelope, sys.stdout, sort_keys=True, separators=(",", ":"))
    sys.stdout.write("\n")


def _emit_csv(header, rows, comment=None):
    if comment:
        sys.stdout.write(f"# {comment}\n")
    sys.stdout.write(header + "\n")
    for row in rows:
        sys.stdout.write(",".join(_csv_cell(x) for x in row) + "\n")


def _csv_cell(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _disc(args) -> int:
    d = args.D
    if args.neg:
        d = -abs(d)
    if d >= 0:
        raise ValueError(f"discriminant must be negative (got {d}); "
                         "pass it as -84 or with --neg 84")
    return d


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _default_precision() -> int:
    try:
        return int(os.environ.get(_DEFAULT_PRECISION_ENV, "30"))
    except ValueError:
        return 30


# --- subcommand implementations ----------------------------------------------


def _cmd_classgroup(args, t0):
    D = _disc(args)
    desc = classgroup.group_structure(D)
    results = {
        "D": D,
        "representatives": [list(f) for f in desc.representatives],
        "class_number": len(desc.representatives),
        "elementary_divisors": list(desc.elementary_divisors),
    }
    if is_fundamental(D):
        results["two_torsion_order"] = classgroup.two_torsion_order(D)
        results["ggz_lower_bound"] = classgroup.ggz_lower_bound(D)
    _emit(args, "classgroup", {"D": D}, results, "classforms.classgroup.group_structure", t0)
    return 0


def _cmd_bh_classify(args, t0):
    D = _disc(args)
    charges = attractor.classify_black_holes(D)
    results = {
        "D": D,
        "entropy": attractor.entropy(D),
        "classes": [
            {"p2": c.p2, "pq": c.pq, "q2": c.q2, "form": list(attractor.form_from_charges(c))}
            for c in charges
        ],
    }
    _emit(args, "bh classify", {"D": D}, results, "classforms.attractor.classify_black_holes", t0)
    return 0


def _cmd_bh_tau(args, t0):
    tau = attractor.attractor_tau((args.a, args.b, args.c))
    results = {"form": [args.a, args.b, args.c], "tau": tau}
    _emit(args, "bh tau", {"a": args.a, "b": args.b, "c": args.c}, results,
          "classforms.attractor.attractor_tau", t0)
    return 0


def _cmd_bh_hilbert(args, t0):
    D = _disc(args)
    coeffs = attractor.hilbert_class_polynomial(D)
    results = {"D": D, "degree": len(coeffs) - 1,
               "coefficients_low_to_high": [str(c) for c in coeffs]}
    _emit(args, "bh hilbert", {"D": D}, results,
          "classforms.attractor.hilbert_class_polynomial", t0)
    return 0


def _cmd_series(args, t0):
    makers = {
        "delta": (qseries.delta_series, "classforms.qseries.delta_series"),
        "invdelta": (qseries.inverse_delta_series, "classforms.qseries.inverse_delta_series"),
        "j": (qseries.j_series, "classforms.qseries.j_series"),
    }
    maker, prov = makers[args.kind]
    s = maker(args.order)
    results = {
        "kind": args.kind,
        "valuation": s.valuation,
        "truncation_order": s.truncation_order,
        "coefficients": {str(n): str(s.coefficient(n))
                         for n in range(s.valuation, s.truncation_order)},
    }
    _emit(args, f"series {args.kind}", {"order": args.order}, results, prov, t0)
    return 0


def _cmd_trace(args, t0):
    value = qseries.hecke_trace(args.weight, args.n)
    results = {"weight": args.weight, "n": args.n, "trace": value}
    _emit(args, "trace", {"weight": args.weight, "n": args.n}, results,
          "classforms.qseries.hecke_trace", t0)
    return 0


def _cmd_rademacher(args, t0):
    params = rademacher.RademacherParams(cmax=args.cmax, precision_digits=args.precision)
    if args.kind == "invdelta":
        value = rademacher.rademacher_inv_delta(args.n, params)
        exact = int(qseries.inverse_delta_series(args.n + 1).coefficient(args.n))
        results = {"n": args.n, "value": value, "exact": exact,
                   "relative_error": abs(value - exact) / abs(exact)}
        prov = "classforms.rademacher.rademacher_inv_delta"
    elif args.kind == "tau":
        value = rademacher.rademacher_tau(args.n, params)
        exact = int(qseries.delta_series(args.n + 1).coefficient(args.n))
        beta = rademacher._beta_cached(params.cmax, params.precision_digits)
        results = {"n": args.n, "value": value, "exact": exact, "beta": beta,
                   "relative_error": abs(value - exact) / abs(exact)}
        prov = "classforms.rademacher.rademacher_tau"
    else:
        value = rademacher.rd_coefficient(args.d, args.n, params)
        results = {"d": args.d, "n": args.n, "value": value}
        prov = "classforms.rademacher.rd_coefficient"
    _emit(args, f"rademacher {args.kind}",
          {"n": args.n, "d": args.d, "cmax": args.cmax, "precision": args.precision},
          results, prov, t0)
    return 0


def _cmd_singular_trace(args, t0):
    expected = (24 * args.n - 1) * qseries.partition_numbers(args.n)[args.n]
    value = rademacher.trace_singular_moduli(args.n, args.order, args.precision)
    results = {
        "n": args.n,
        "trace": value,
        "expected": expected,
        "abs_residual": abs(value - expected),
        "points": [list(p.form) for p in rademacher.enumerate_QD(args.n)],
    }
    _emit(args, "singular-trace", {"n": args.n}, results,
          "classforms.rademacher.trace_singular_moduli", t0)
    return 0 if abs(value - expected) < 1e-4 else 1


def _cmd_ecc_verify(args, t0):
    try:
        rows = eccensus.verify_deuring(args.q)
    except AssertionError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    for r in rows:
        print(f"q={r.q} t={r.t:+d} observed={r.observed} expected={r.expected} "
              f"{r.status}", file=sys.stderr)
    results = [
        {"q": r.q, "t": r.t, "observed": r.observed, "expected": r.expected,
         "weighted_expected": str(r.weighted_expected), "status": r.status}
        for r in rows
    ]
    _emit(args, "ecc verify", {"q": args.q}, results, "classforms.eccensus.verify_deuring", t0)
    return 0


def _cmd_ecc_torsion(args, t0):
    q, n = args.q, args.n
    rows = []
    tmax = int((4 * q) ** 0.5)
    for t in range(-tmax, tmax + 1):
        try:
            count = eccensus.torsion_class_count(q, t, n)
        except ValueError:
            continue
        unweighted, weighted = eccensus.expected_torsion_count(q, t, n)
        rows.append({
            "q": q, "t": t, "n": n, "observed": count,
            "expected_unweighted": unweighted, "expected_weighted": str(weighted),
            "fractional": weighted.denominator != 1,
        })
    _emit(args, "ecc torsion", {"q": q, "n": n}, rows,
          "classforms.eccensus.torsion_class_count", t0)
    return 0


def _cmd_cft_zk(args, t0):
    z = cftx.extremal_partition_function(args.k, args.order)
    results = {
        "k": args.k,
        "coefficients": {str(n): str(z.coefficient(n))
                         for n in range(z.valuation, z.truncation_order)},
    }
    if args.cmax:
        report = cftx.verify_zk_identity(args.k, cmax=args.cmax, order=args.order)
        results["identity_check"] = report
    _emit(args, "cft zk", {"k": args.k, "order": args.order, "cmax": args.cmax},
          results, "classforms.cftx.extremal_partition_function", t0)
    return 0


def _polar_chunk(bounds):
    lo, hi, mmax = bounds
    h = tables.class_number_table(4 * mmax)
    spf = tables.spf_table(4 * mmax)
    out = []
    for m in range(lo, hi):
        P = cftx.polar_count_formula(m, h_table=h, spf=spf)
        out.append((m, cftx.normalized_excess(m, P)))
    return out


def _cmd_cft_polar(args, t0):
    mmax = args.mmax
    if args.emit == "table":
        rows = cftx.extremal_n2_report(mmax)
        results = {
            "rows": rows,
            "flagged": [r["m"] for r in rows if r["flagged"]],
            "documented_candidates": list(cftx.DOCUMENTED_EXTREMAL_CANDIDATES),
        }
        _emit(args, "cft polar", {"mmax": mmax, "emit": args.emit}, results,
              "classforms.cftx.extremal_n2_report", t0)
        return 0
    if args.jobs > 1:
        # deterministic ordered merge over contiguous chunks
        chunk = (mmax + args.jobs - 1) // args.jobs
        bounds = [(lo, min(lo + chunk, mmax + 1), mmax)
                  for lo in range(1, mmax + 1, chunk)]
        tables.class_number_table(4 * mmax)  # prebuild so forked workers share it
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            pairs = [p for part in pool.map(_polar_chunk, bounds) for p in part]
        values = [v for _, v in pairs]
        import numpy as np

        values = np.array(values)
    else:
        values = cftx.figure_data(mmax)
    print(f"scanned {mmax} indices", file=sys.stderr)
    if args.emit == "figure-data":
        _emit_csv("m,normalized_excess", [(m + 1, values[m]) for m in range(mmax)])
    elif args.emit == "histogram":
        width, bins = cftx.histogram(values)
        _emit_csv("bin_left,bin_right,count", bins, comment=f"bin_width = {width:.12g}")
    else:
        _emit_csv("value,cumulative_fraction", cftx.empirical_cdf(values))
    return 0


def _cmd_stats_cohen_lenstra(args, t0):
    count, proportion = classgroup.cl_statistics(args.p, args.N)
    results = {
        "p": args.p,
        "N": args.N,
        "count_indivisible": count,
        "proportion": proportion,
        "predicted": classgroup.cohen_lenstra_prediction(args.p),
    }
    _emit(args, "stats cohen-lenstra", {"p": args.p, "N": args.N}, results,
          "classforms.classgroup.cl_statistics", t0)
    return 0


def _cmd_stats_ng(args, t0):
    results = {
        "g": args.g,
        "x": args.x,
        "count": classgroup.ng_count(args.g, args.x),
        "cg_constant": classgroup.cg_constant(args.g),
    }
    _emit(args, "stats ng", {"g": args.g, "x": args.x}, results,
          "classforms.classgroup.ng_count", t0)
    return 0


def _cmd_stats_h_scan(args, t0):
    limit = args.N
    h = tables.class_number_table(limit)
    fund = tables.fundamental_mask(limit)
    rows = []
    for n in range(3, limit + 1):
        if fund[n]:
            rows.append((-n, int(h[n]),
                         classgroup.siegel_reference_curve(-n, args.epsilon)))
    if args.format == "csv":
        _emit_csv("D,h,siegel_curve", rows, comment=f"epsilon = {args.epsilon:.12g}")
    else:
        _emit(args, "stats h-scan", {"N": limit, "epsilon": args.epsilon},
              [{"D": d, "h": hh, "siegel_curve": s} for d, hh, s in rows],
              "classforms.tables.class_number_table", t0)
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="classforms",
        description="class groups, trace formulas, Rademacher sums, charge classes",
    )
    top.add_argument("--format", choices=("json", "csv"), default="json",
                     help="output format where both make sense")
    top.add_argument("--neg", action="store_true",
                     help="negate the discriminant argument (lets you avoid a leading dash)")
    top.add_argument("--timing", action="store_true",
                     help="fill wall_time_ms (off by default to keep output byte-identical)")
    top.add_argument("--jobs", type=int, default=1, help="parallel workers for long scans")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classgroup", help="reduced forms, structure, bounds at D")
    p.add_argument("D", type=int)
    p.set_defaults(func=_cmd_classgroup)

    bh = sub.add_parser("bh", help="charge-class operations").add_subparsers(
        dest="subcommand", required=True)
    p = bh.add_parser("classify", help="inequivalent charge classes at D")
    p.add_argument("D", type=int)
    p.set_defaults(func=_cmd_bh_classify)
    p = bh.add_parser("tau", help="fixed-point modulus of a form")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)
    p.set_defaults(func=_cmd_bh_tau)
    p = bh.add_parser("hilbert", help="class polynomial of the modular invariant")
    p.add_argument("D", type=int)
    p.set_defaults(func=_cmd_bh_hilbert)

    p = sub.add_parser("series", help="exact q-expansions")
    p.add_argument("kind", choices=("delta", "invdelta", "j"))
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=_cmd_series)

    p = sub.add_parser("trace", help="Hecke trace on weight-k cusp forms")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("rademacher", help="truncated Kloosterman-Bessel sums")
    p.add_argument("kind", choices=("invdelta", "tau", "rd"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=1, help="principal-part depth for kind=rd")
    p.add_argument("--cmax", type=int, default=200)
    p.add_argument("--precision", type=int, default=_default_precision())
    p.set_defaults(func=_cmd_rademacher)

    p = sub.add_parser("singular-trace", help="trace of the completed level-6 form")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--precision", type=int, default=None)
    p.set_defaults(func=_cmd_singular_trace)

    ecc = sub.add_parser("ecc", help="curve censuses over prime fields").add_subparsers(
        dest="subcommand", required=True)
    p = ecc.add_parser("verify", help="per-trace counts against class numbers")
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=_cmd_ecc_verify)
    p = ecc.add_parser("torsion", help="full n-torsion counts within a trace class")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_ecc_torsion)

    cft = sub.add_parser("cft", help="extremal series and polar counting").add_subparsers(
        dest="subcommand", required=True)
    p = cft.add_parser("zk", help="extremal partition function")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--order", type=int, default=6)
    p.add_argument("--cmax", type=int, default=0,
                   help="when positive, also run the expansion identity check")
    p.set_defaults(func=_cmd_cft_zk)
    p = cft.add_parser("polar", help="polar-count scan and figure data")
    p.add_argument("--mmax", type=int, required=True)
    p.add_argument("--emit", choices=("table", "figure-data", "histogram", "cdf"),
                   default="table")
    p.set_defaults(func=_cmd_cft_polar)

    stats = sub.add_parser("stats", help="class-number statistics").add_subparsers(
        dest="subcommand", required=True)
    p = stats.add_parser("cohen-lenstra", help="indivisibility proportion vs prediction")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=_cmd_stats_cohen_lenstra)
    p = stats.add_parser("ng", help="square-free D with an order-g class")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.set_defaults(func=_cmd_stats_ng)
    p = stats.add_parser("h-scan", help="h(D) with the growth reference curve")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.set_defaults(func=_cmd_stats_h_scan)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.monotonic()
    try:
        return args.func(args, t0)
    except (ValueError, OverflowError) as exc:
        return _usage_error(str(exc))
    except (ArithmeticError, AssertionError) as exc:
        print(f"identity failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
