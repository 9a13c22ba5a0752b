"""Command-line front end.

Exit codes: 0 ok, 1 check failed, 2 input error, 3 degenerate analysis.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2, 3


class InputError(Exception):
    pass


def fmt(v: float) -> str:
    """17 significant digits, '.' decimal, no locale."""
    v = float(v)
    if v == 0:
        return "0"
    return format(v, ".17g")


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"bad integer list {text!r}") from exc
    if not vals or any(v < 0 for v in vals):
        raise InputError(f"bad integer list {text!r}")
    return vals


def _load(path: str):
    from .zfun import FormatError, load

    try:
        return load(path)
    except (OSError, FormatError) as exc:
        raise InputError(str(exc)) from exc


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(type(o).__name__)


def _emit_json(obj, stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(obj, default=_json_default, indent=2) + "\n")


# -- commands ---------------------------------------------------------------------

def cmd_analyze(args) -> int:
    from .classify import InconclusiveExpansion, classify_stability
    from .symbol import analyze

    f = _load(args.input)
    if f.is_zero():
        print("zero function has no maximum", file=sys.stderr)
        return EXIT_DEGENERATE
    raw = analyze(f, args.max_order)
    g = f * (1 / raw.normalization)
    an = analyze(g, args.max_order)
    out = {"analysis": raw.to_dict()}
    try:
        out["verdict"] = classify_stability(an, g).to_dict()
    except InconclusiveExpansion as exc:
        out["verdict"] = None
        out["error"] = str(exc)
        _emit_json(out)
        return EXIT_DEGENERATE
    _emit_json(out)
    return EXIT_OK


def cmd_classify(args) -> int:
    from .classify import InconclusiveExpansion, classify, growth_exponent_fit

    f = _load(args.input)
    if f.is_zero():
        print("zero function has no maximum", file=sys.stderr)
        return EXIT_DEGENERATE
    try:
        _, verdict = classify(f, args.max_order)
    except InconclusiveExpansion as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DEGENERATE
    out = verdict.to_dict()
    if args.fit:
        n_min, n_max = _int_list(args.fit)
        from .symbol import analyze

        g = f * (1 / analyze(f).normalization)
        out["fitted_growth_exponent"] = growth_exponent_fit(g, n_min, n_max)
    _emit_json(out)
    return EXIT_OK


def cmd_power(args) -> int:
    from .zfun import power

    f = _load(args.input)
    if args.n < 0 or (args.method == "fft" and args.n > 10**6):
        raise InputError("n must be in 0..1e6")
    p = power(f, args.n, args.method)
    w = sys.stdout
    w.write("x,re,im\n")
    for x, v in zip(p.xs, p.coeffs):
        w.write(f"{int(x)},{fmt(v.real)},{fmt(v.imag)}\n")
    return EXIT_OK


def cmd_llt_compare(args) -> int:
    from .llt import LLTPreconditionError, llt_error_curve
    from .symbol import analyze

    f = _load(args.input)
    ns = _int_list(args.n)
    if f.width == 1:
        print("single-point support has no local limit", file=sys.stderr)
        return EXIT_DEGENERATE
    an = analyze(f)
    try:
        reports = llt_error_curve(f, an, ns)
    except LLTPreconditionError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DEGENERATE
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("n,x,exact_re,exact_im,approx_re,approx_im\n")
        for r in reports:
            for x, e, a in zip(r.xs, r.exact_values, r.approx_values):
                out.write(f"{r.n},{int(x)},{fmt(e.real)},{fmt(e.imag)},{fmt(a.real)},{fmt(a.imag)}\n")
    finally:
        if args.out:
            out.close()
    summary = {"normalization": an.normalization,
               "note": "values divided by normalization^n",
               "sup_error_scaled": {str(r.n): r.sup_error_scaled for r in reports}}
    if args.summary:
        with open(args.summary, "w") as fh:
            _emit_json(summary, fh)
    else:
        _emit_json(summary, sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def cmd_kernel_eval(args) -> int:
    import numpy as np

    from .kernels import KernelSpec, eval_kernel

    if args.step <= 0 or args.to < args.start:
        raise InputError("need step > 0 and to >= from")
    try:
        spec = KernelSpec.of(args.m, args.b)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    count = int(math.floor((args.to - args.start) / args.step + 1e-9)) + 1
    xs = args.start + args.step * np.arange(count)
    vals = eval_kernel(spec, xs)
    sys.stdout.write("x,re,im\n")
    for x, v in zip(xs, vals):
        sys.stdout.write(f"{fmt(x)},{fmt(v.real)},{fmt(v.imag)}\n")
    return EXIT_OK


def _read_edges(path: str):
    edges = []
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise InputError(f"{path}:{lineno}: expected 'x y weight'")
                edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
    except OSError as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return edges


def cmd_carne_verify(args) -> int:
    from scipy import sparse

    from .carne import (BandedHermitian, TruncationError, WalkParams, carne_bound_report,
                        diag_lower_check, transmutation_check)

    ns = _int_list(args.n)
    try:
        params = WalkParams(args.s, args.k)
        if args.graph == "path":
            base = BandedHermitian.path_walk(args.dim)
        else:
            base = BandedHermitian.from_edges(_read_edges(args.graph))
        M = BandedHermitian(base.matrix, base.pi, params.a)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    disc = max(transmutation_check(M, params, n, seed=args.seed) for n in ns)
    rep = carne_bound_report(M, args.k, ns, args.c)
    out = {"discrepancy": disc, "bound_constants": rep.to_dict()["C_of_n"],
           "locality_violations": rep.locality_violations}
    try:
        out["diag_ratios"] = {str(n): r for n, r in diag_lower_check(M, args.k, ns).ratios.items()}
    except TruncationError as exc:
        out["diag_ratios"] = None
        out["diag_error"] = str(exc)
    _emit_json(out)
    return EXIT_OK if disc <= 1e-7 and rep.locality_violations == 0 else EXIT_FAIL


def cmd_examples(args) -> int:
    from .fixtures import CHECKS, describe

    if args.action == "list":
        for name in CHECKS:
            print(describe(name))
        return EXIT_OK
    if args.name not in CHECKS:
        raise InputError(f"unknown example {args.name!r}")
    result = CHECKS[args.name][1]()
    width = max(len(r[0]) for r in result.rows) if result.rows else 0
    for label, value, req, ok in result.rows:
        print(f"{'ok  ' if ok else 'FAIL'}  {label:<{width}}  {value!r}  {req}")
    print(f"{args.name}: {'PASS' if result.passed else 'FAIL'}")
    return EXIT_OK if result.passed else EXIT_FAIL


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convpow", description="Convolution powers on the integers.")
    p.add_argument("--threads", type=int, default=None, help="BLAS/OpenMP thread count")
    p.add_argument("--seed", type=int, default=42, help="seed for randomized probes")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="maximum points and local expansions")
    a.add_argument("--input", required=True)
    a.add_argument("--max-order", type=int, default=12)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("classify", help="stability verdict")
    c.add_argument("--input", required=True)
    c.add_argument("--max-order", type=int, default=12)
    c.add_argument("--fit", default=None, metavar="NMIN,NMAX", help="also fit the l1 growth exponent")
    c.set_defaults(func=cmd_classify)

    pw = sub.add_parser("power", help="n-th convolution power as CSV")
    pw.add_argument("--input", required=True)
    pw.add_argument("--n", type=int, required=True)
    pw.add_argument("--method", choices=["direct", "squaring", "fft"], default="fft")
    pw.set_defaults(func=cmd_power)

    l = sub.add_parser("llt-compare", help="exact powers against the local limit approximation")
    l.add_argument("--input", required=True)
    l.add_argument("--n", required=True, help="comma separated")
    l.add_argument("--out", default=None, help="CSV path (default stdout)")
    l.add_argument("--summary", default=None, help="summary JSON path")
    l.set_defaults(func=cmd_llt_compare)

    k = sub.add_parser("kernel-eval", help="tabulate a limit kernel")
    k.add_argument("--m", type=int, required=True)
    k.add_argument("--b", type=float, default=0.0)
    k.add_argument("--from", dest="start", type=float, required=True)
    k.add_argument("--to", type=float, required=True)
    k.add_argument("--step", type=float, required=True)
    k.set_defaults(func=cmd_kernel_eval)

    cv = sub.add_parser("carne-verify", help="transmutation identity and Carne-type bounds")
    cv.add_argument("--graph", default="path", help="'path' or an edge-list file 'x y weight'")
    cv.add_argument("--dim", type=int, default=401)
    cv.add_argument("--k", type=int, default=2)
    cv.add_argument("--s", type=float, default=0.5)
    cv.add_argument("--c", type=float, default=0.1)
    cv.add_argument("--n", default="25,50,100")
    cv.set_defaults(func=cmd_carne_verify)

    e = sub.add_parser("examples", help="fixture library")
    e.add_argument("action", choices=["list", "run"])
    e.add_argument("name", nargs="?")
    e.set_defaults(func=cmd_examples)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    if args.command == "examples" and args.action == "run" and not args.name:
        print("examples run needs a name", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
