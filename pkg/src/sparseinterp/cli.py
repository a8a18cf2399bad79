"""Command-line driver: ``sparseinterp {gen,interp,bench,verify}``.

Exit codes: 0 success, 1 probable failure / mismatch, 2 usage or input error.
"""
import argparse
import logging
import random
import statistics
import sys

from .blackbox import Explicit, OversizeError, Product, expand_oracle, parse_circuit
from .engine import InterpParams, UnsupportedHeightError, sparse_interp
from .sparse import (InfeasibleError, ParseError, canonicalize, load, parse, parse_blocks,
                     random_instance, save, serialize)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _primes(text):
    try:
        return tuple(int(t) for t in text.split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad prime list {text!r}") from None


def _write_poly(f, path):
    if path:
        save(f, path)
    else:
        sys.stdout.write(serialize(f))


def cmd_gen(args):
    rng = random.Random(args.seed)
    try:
        f = random_instance(args.nvars, args.terms, args.degree, args.height, rng)
    except (InfeasibleError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    _write_poly(f, args.output)
    return EXIT_OK


def _load_box(args):
    text = _read(args.input)
    if args.kind == "explicit":
        f = parse(text)
        if args.degree is not None and args.degree != f.D:
            f = canonicalize(f.terms, f.n, args.degree)
        return Explicit(f)
    if args.kind == "product":
        factors = parse_blocks(text)
        D = args.degree or sum(f.D - 1 for f in factors) + 1
        return Product(tuple(factors), D)
    if args.nvars is None or args.degree is None:
        raise UsageError("--kind circuit needs --nvars and --degree")
    return parse_circuit(text, args.nvars, args.degree)


def _params(args, n, D, T, H):
    return InterpParams(
        n=n, T=T, D=D, H=H, mode=args.mode, seed=args.seed,
        workers=args.threads, retries=args.retries, force_q=args.force_q,
        force_alpha=args.force_alpha, force_primes=args.force_primes)


def cmd_interp(args):
    try:
        bb = _load_box(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.nvars is not None and args.nvars != bb.n:
        raise UsageError(f"--nvars {args.nvars} disagrees with input ({bb.n})")
    try:
        f, stats = sparse_interp(bb, _params(args, bb.n, bb.D, args.terms, args.height))
    except UnsupportedHeightError as exc:
        raise UsageError(str(exc)) from None
    _write_poly(f, args.output)
    print(stats.report(), file=sys.stderr)
    return EXIT_FAIL if stats.failed else EXIT_OK


BENCH_COLUMNS = ("run", "factors", "nvars", "T", "D", "mu", "lambda", "q",
                 "t_eval", "t_sort", "t_recovery", "t_verify", "t_total", "correct")


def _l1(f):
    return sum(abs(c) for c, _ in f.terms)


def cmd_bench(args):
    rng = random.Random(args.seed)
    try:
        factors = tuple(random_instance(args.nvars, args.terms, args.degree, args.height, rng)
                        for _ in range(args.factors))
    except (InfeasibleError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    D = args.factors * (args.degree - 1) + 1
    T = 1
    H = 1
    for f in factors:
        T *= max(len(f), 1)
        H *= max(_l1(f), 1)
    bb = Product(factors, D)
    try:
        truth = expand_oracle(bb)
    except OversizeError:
        truth = None
    rows = []
    print("\t".join(BENCH_COLUMNS))
    for run in range(args.repeat):
        params = InterpParams(n=args.nvars, T=T, D=D, H=H, mode=args.mode,
                              seed=args.seed + run, workers=args.threads,
                              retries=args.retries)
        try:
            f, st = sparse_interp(bb, params)
        except UnsupportedHeightError as exc:
            raise UsageError(str(exc)) from None
        correct = (f == truth) if truth is not None else (not st.failed)
        total = st.t_eval + st.t_sort + st.t_recovery + st.t_verify
        row = (run, args.factors, args.nvars, T, D, st.mu, st.lam, st.q,
               st.t_eval, st.t_sort, st.t_recovery, st.t_verify, total, int(correct))
        rows.append(row)
        print("\t".join(f"{v:.6f}" if isinstance(v, float) else str(v) for v in row))
        print(f"run {run}: mu={st.mu} lambda={st.lam} eval={st.t_eval:.3f}s "
              f"total={total:.3f}s correct={correct}", file=sys.stderr)
    med = ["median", args.factors, args.nvars, T, D]
    for i in range(5, len(BENCH_COLUMNS)):
        vals = [r[i] for r in rows]
        if i == len(BENCH_COLUMNS) - 1:
            med.append(int(all(vals)))
        elif isinstance(vals[0], float):
            med.append(f"{statistics.median(vals):.6f}")
        else:
            med.append(statistics.median_low(vals))
    print("\t".join(map(str, med)))
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_FAIL


def cmd_verify(args):
    try:
        a, b = load(args.a), load(args.b)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if (a.n, a.D) != (b.n, b.D):
        print(f"header differs: nvars/degree {a.n}/{a.D} vs {b.n}/{b.D}")
        return EXIT_FAIL
    ta, tb = dict((e, c) for c, e in a.terms), dict((e, c) for c, e in b.terms)
    # reversed-tuple order is Kronecker-code order
    codes = sorted(set(ta) | set(tb), key=lambda e: tuple(reversed(e)))
    for e in codes:
        if ta.get(e, 0) != tb.get(e, 0):
            exps = " ".join(map(str, e))
            print(f"first difference at exponents ({exps}): {ta.get(e, 0)} vs {tb.get(e, 0)}")
            return EXIT_FAIL
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="sparseinterp", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def shape(p, required=True):
        p.add_argument("--nvars", type=int, required=required)
        p.add_argument("--terms", type=int, required=required)
        p.add_argument("--degree", type=int, required=required)
        p.add_argument("--height", type=int, required=required)

    def engine(p):
        p.add_argument("--mode", choices=("heuristic", "provable"), default="heuristic")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--retries", type=int, default=2)
        p.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", help="write a random sparse polynomial")
    shape(g)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    i = sub.add_parser("interp", help="interpolate a black box given as a file")
    i.add_argument("input")
    i.add_argument("--kind", choices=("explicit", "product", "circuit"), default="explicit")
    i.add_argument("--nvars", type=int)
    i.add_argument("--degree", type=int)
    i.add_argument("--terms", type=int, required=True)
    i.add_argument("--height", type=int, required=True)
    engine(i)
    i.add_argument("-o", "--output")
    i.add_argument("--force-q", type=int)
    i.add_argument("--force-alpha", type=int)
    i.add_argument("--force-primes", type=_primes)
    i.set_defaults(func=cmd_interp)

    b = sub.add_parser("bench", help="interpolate products of random sparse factors")
    b.add_argument("--factors", type=int, default=1)
    b.add_argument("--nvars", type=int, default=20)
    b.add_argument("--degree", type=int, default=40)
    b.add_argument("--terms", type=int, default=3)
    b.add_argument("--height", type=int, default=16)
    b.add_argument("--repeat", type=int, default=1)
    engine(b)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="compare two polynomial files")
    v.add_argument("a")
    v.add_argument("b")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for name in ("threads", "repeat", "factors"):
        if getattr(args, name, 1) < 1:
            print(f"error: --{name} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
