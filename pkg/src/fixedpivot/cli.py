"""Command-line entry point: ``fixedpivot <subcommand> ...``.

Exit status is 0 on success, 2 on a usage error and 1 on a runtime error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import bench, medcouple, raster, robust, select, vervaat, weighted
from .mt import MT19937, r_seed


class UsageError(ValueError):
    pass


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"not a list of numbers: {text!r}") from exc


def _read_values(args) -> np.ndarray:
    if args.values is not None:
        return _floats(args.values)
    source = sys.stdin.read() if args.input in (None, "-") else Path(args.input).read_text()
    return _floats(source)


def _rng(seed: int, flavor: str = "classic") -> MT19937:
    return MT19937(seed % 2**32, flavor=flavor)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _add_values(p):
    p.add_argument("--values", help="comma- or space-separated numbers")
    p.add_argument("--in", dest="input", help="file of numbers (default: stdin)")


def cmd_select(args, out):
    data = _read_values(args)
    k = bench.resolve_rank(args.k, data.size) if data.size else int(args.k)
    value, counts = select.select_kth_instrumented(
        data, k, oracle=args.oracle, shuffle=args.shuffle, rng=_rng(args.seed) if args.shuffle else None
    )
    print(_fmt(value), file=out)
    if args.counts:
        print(f"exit={counts.exit_tests} data={counts.data_comparisons} branch={counts.branch_tests} "
              f"incr={counts.position_increments} total={counts.total}", file=out)


def cmd_wselect(args, out):
    values = _read_values(args)
    weights = _floats(args.weights) if args.weights is not None else np.ones_like(values)
    res = weighted.weighted_percentile(values, weights, args.p)
    print(_fmt(res.value), file=out)
    if args.kstar:
        print(f"kstar={res.kstar}", file=out)


def cmd_medcouple(args, out):
    data = _read_values(args)
    fn = medcouple.medcouple_fast if args.method == "fast" else medcouple.medcouple_naive
    print(_fmt(fn(data)), file=out)


def cmd_vervaat(args, out):
    if args.what == "rnd":
        if args.count is None:
            raise UsageError("vervaat rnd needs --count")
        for y in vervaat.vervaat_rnd(args.beta, args.count, _rng(args.seed), eps=args.eps):
            print(_fmt(y), file=out)
        return
    if args.x is None:
        raise UsageError(f"vervaat {args.what} needs --x")
    xs = _floats(args.x)
    f, F = vervaat.vervaat_pdf_cdf(xs, args.beta, method=args.method, n_terms=args.n_terms)
    for y in (f if args.what == "pdf" else F):
        print(_fmt(y), file=out)


def cmd_rng(args, out):
    rng = _rng(args.seed) if args.mode == "classic" else _r_seeded(args.seed)
    if args.dist == "unif":
        values = [_fmt(u) for u in rng.random(args.count)]
    elif args.dist == "norm":
        values = [_fmt(z) for z in rng.standard_normal(args.count)]
    elif args.dist.startswith("int:"):
        try:
            upper = int(args.dist[4:])
        except ValueError:
            raise UsageError(f"bad integer range {args.dist!r}") from None
        values = [str(int(v)) for v in rng.uniform_int(upper, args.count)]
    else:
        raise UsageError(f"unknown --dist {args.dist!r}; use unif, norm or int:N")
    for v in values:
        print(v, file=out)


def _r_seeded(seed: int) -> MT19937:
    if not -(2**31) <= seed < 2**31:
        raise UsageError("R-mode seeds are 32-bit signed integers")
    return r_seed(seed)


def _write_csv(path, header, rows, out):
    fh = out if path in (None, "-") else open(path, "w", newline="", encoding="ascii")
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if fh is not out:
            fh.close()


def cmd_robust(args, out):
    backend = robust.UpdateBackend.parse(args.backend)
    rows = []
    for rep in range(args.replicates):
        X = robust.contaminated_sample(args.n, args.p, args.contamination, _rng(args.seed + rep))
        if args.method == "mcd":
            costs = []
            est = robust.mcd_approx(X, n_starts=args.starts, rng=_rng(args.seed + rep + 7919), backend=backend,
                                    hint_rng=_rng(args.seed + rep + 104729), costs=costs)
            rows.append((rep, backend.value, est.h, _fmt(est.log_det), len(costs),
                         sum(c.data_comparisons for c in costs), sum(c.total for c in costs)))
        else:
            states = robust.fs_progression(X, args.m0 or args.p + 1, backend)
            costs = [s.comparisons for s in states if s.comparisons is not None]
            rows.append((rep, backend.value, len(states), sum(s.interchange for s in states), len(costs),
                         sum(c.data_comparisons for c in costs), sum(c.total for c in costs)))
    third = "h" if args.method == "mcd" else "steps"
    fourth = "log_det" if args.method == "mcd" else "interchanges"
    _write_csv(args.out, ("rep", "backend", third, fourth, "selections", "data", "total"), rows, out)


def cmd_filter(args, out):
    img = raster.read_pnm(Path(args.input).read_bytes())
    if args.noise is not None:
        img = raster.add_salt_pepper(img, args.noise, _rng(args.seed))
    mask = raster.Mask3(_floats(args.mask)) if args.mask else None
    result = raster.weighted_median_filter(img, mask)
    Path(args.output).write_bytes(raster.write_pnm(result, binary=not args.plain))


def cmd_bench(args, out):
    config = bench.BenchConfig(
        dist=args.dist,
        n_set=[int(v) for v in args.n.split(",") if v.strip()] if args.n else [],
        k_set=[v.strip() for v in args.k.split(",") if v.strip()],
        replicates=args.replicates,
        seed=args.seed,
        variant=args.variant.replace("-", "_"),
    )
    rows = bench.bench_run(config, timing=args.timing)
    text = bench.rows_to_csv(rows, timing=args.timing)
    if args.out in (None, "-"):
        out.write(text)
    else:
        Path(args.out).write_text(text, encoding="ascii", newline="\n")
    if args.summary:
        dest = sys.stderr if args.out in (None, "-") else out
        for g in bench.summarize(rows):
            print(f"n={g.n} k={g.k} count={g.count} min={g.min} mean={g.mean:.6g} "
                  f"median={g.median:.6g} max={g.max}", file=dest)
    if args.dickman:
        dest = sys.stderr if args.out in (None, "-") else out
        for n in config.n_set:
            totals = [r.total for r in rows if r.n == n and r.k == n]
            if totals:
                print(f"n={n} dickman_ks={bench.dickman_fit(totals, n):.6g}", file=dest)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fixedpivot", description="Fixed-pivot selection toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
        p.set_defaults(func=fn)
        return p

    p = add("select", cmd_select, "k-th smallest value")
    _add_values(p)
    p.add_argument("--k", required=True, help="1-based rank or median/max/min")
    p.add_argument("--oracle", type=int, help="1-based index of a pivot hint")
    p.add_argument("--shuffle", action="store_true", help="shuffle before selecting (uses --seed)")
    p.add_argument("--counts", action="store_true", help="also print comparison counts")

    p = add("wselect", cmd_wselect, "weighted percentile")
    _add_values(p)
    p.add_argument("--weights", help="weights, same count as values (default all 1)")
    p.add_argument("--p", type=float, default=0.5, help="percentile in [0, 1] (default 0.5)")
    p.add_argument("--kstar", action="store_true", help="also print the settled rank")

    p = add("medcouple", cmd_medcouple, "medcouple skewness")
    _add_values(p)
    p.add_argument("--method", choices=("fast", "naive"), default="fast")

    p = add("vervaat", cmd_vervaat, "Vervaat perpetuity pdf, cdf or variates")
    p.add_argument("what", choices=("pdf", "cdf", "rnd"))
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--x", help="evaluation points for pdf/cdf")
    p.add_argument("--count", type=int, help="number of variates for rnd")
    p.add_argument("--method", choices=("exact", "series"), default="exact")
    p.add_argument("--n-terms", type=int, default=100, help="series order (default 100)")
    p.add_argument("--eps", type=float, default=1e-12, help="sampler truncation (default 1e-12)")

    p = add("rng", cmd_rng, "Mersenne Twister streams")
    p.add_argument("--mode", choices=("classic", "r"), default="classic")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--dist", default="unif", help="unif, norm or int:N")

    p = add("robust", cmd_robust, "MCD or Forward Search on simulated data")
    p.add_argument("method", choices=("mcd", "fs"))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--contamination", type=float, default=0.2)
    p.add_argument("--backend", default="select", help="sort, select or select-oracle")
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--starts", type=int, default=50, help="MCD random starts (default 50)")
    p.add_argument("--m0", type=int, help="Forward Search start size (default p+1)")
    p.add_argument("--out", help="CSV path (default stdout)")

    p = add("filter", cmd_filter, "3x3 weighted-median filter of a PNM image")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--noise", type=float, help="salt-and-pepper fraction added first")
    p.add_argument("--mask", help="nine weights, row by row")
    p.add_argument("--plain", action="store_true", help="write P2/P3 instead of P5/P6")

    p = add("bench", cmd_bench, "comparison-count benchmark CSV")
    p.add_argument("--dist", default="uniform", help="uniform, bs[:shape,scale] or lognormal[:mu,sigma]")
    p.add_argument("--n", default="1000", help="comma-separated sizes")
    p.add_argument("--k", default="max", help="comma-separated ranks or median/max/min")
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--variant", default="select", help="select, select-oracle or sort-baseline")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--summary", action="store_true", help="print min/mean/median/max per (n, k)")
    p.add_argument("--dickman", action="store_true", help="print the Dickman KS distance for k = n")
    p.add_argument("--timing", action="store_true", help="add a wall-clock seconds column")
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except (raster.PNMError, OSError, RuntimeError, robust.SingularCovarianceError) as exc:
        print(f"fixedpivot {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"fixedpivot {args.command}: usage error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
