"""Command-line interface tying enumeration, extension, and analysis together.

Every output file starts with a ``# manifest: {...}`` comment recording the
command and parameters that produced it, so any file can be regenerated
exactly.  Worker counts and wall time are deliberately left out of the
header: they never affect the numbers, and identical runs must produce
byte-identical files.

Exit codes: 0 success, 2 usage error, 3 input-format error, 4 resource
limit, 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field

import mpmath

from . import reference_counts
from .analysis import (amplitude_estimate, combined_ratios, extrapolate_linear,
                       gradient_estimator, lambda_estimator, linear_intercepts,
                       normalised_coefficients, quotient_ratios, ratios,
                       ReferenceSeries, series_with_ratio_tail)
from .approximant import default_configs, predict_ensemble, predict_ratios_ensemble
from .enumerator import (binomial_transform, enumerate_parallel, enumerate_series,
                         inverse_binomial_transform)
from .errors import (FixtureUnknown, ResourceLimit, SeriesFormatError, TwoStacksError)
from .series import (WORKING_DPS, EstimateTable, Series, read_estimates, read_series,
                     sci, write_estimates, write_series)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_RESOURCE = 4
EXIT_VERIFY = 5


@dataclass
class RunManifest:
    """What a command ran with; embedded in output headers for exact re-runs."""

    command: str
    parameters: dict
    input_files: list = field(default_factory=list)
    output_files: list = field(default_factory=list)
    wall_time: float = 0.0
    worker_count: int = 1

    def header(self) -> str:
        stable = {"command": self.command, "parameters": self.parameters,
                  "input_files": self.input_files, "output_files": self.output_files}
        return "manifest: " + json.dumps(stable, sort_keys=True)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twostacks",
        description="Count two-stacks-in-series sortable permutations and "
                    "analyse the counting series.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="compute exact counts s_0..s_n (series file)")
    p.add_argument("--n", type=int, required=True, help="largest index to compute")
    p.add_argument("--start-len", type=int, default=None,
                   help="shard start-sequence length m (default min(6, n-1))")
    p.add_argument("--workers", type=int, default=None, help="worker processes")
    p.add_argument("--increment-avoiding", action="store_true",
                   help="count increment-avoiding permutations (t_n) instead")
    p.add_argument("--no-prune", action="store_true", help="disable automaton pruning")
    p.add_argument("--out", required=True)

    p = sub.add_parser("transform", help="binomial transform of a series file")
    p.add_argument("--series", required=True)
    p.add_argument("--direction", choices=("forward", "inverse"), default="forward",
                   help="forward: t -> s; inverse: s -> t")
    p.add_argument("--out", required=True)

    p = sub.add_parser("extend", help="predict further coefficients (estimate CSV)")
    p.add_argument("--series", required=True)
    p.add_argument("--orders", default="2,3,4", help="comma-separated ODE orders")
    p.add_argument("--predict", type=int, default=19, help="number of coefficients")
    p.add_argument("--trim", type=float, default=0.10)
    p.add_argument("--out", required=True)

    p = sub.add_parser("ratios-predict", help="predict further ratios (estimate CSV)")
    p.add_argument("--series", required=True)
    p.add_argument("--orders", default="4")
    p.add_argument("--predict", type=int, default=30)
    p.add_argument("--trim", type=float, default=0.10)
    p.add_argument("--out", required=True)

    p = sub.add_parser("analyze", help="ratio-method analyses")
    mode = p.add_subparsers(dest="mode", required=True)

    def common(m, tail=True):
        m.add_argument("--series", required=True)
        if tail:
            m.add_argument("--tail", default=None, help="estimate CSV extending the series")
            m.add_argument("--tail-kind", choices=("auto", "coefficients", "ratios"),
                           default="auto")
        m.add_argument("--window", type=int, default=15)
        m.add_argument("--out", required=True)

    common(mode.add_parser("ratios", help="r_n with extrapolated intercept summary"))
    common(mode.add_parser("intercepts", help="linear intercepts n r_n - (n-1) r_{n-1}"))
    m = mode.add_parser("gradient", help="exponent estimator (r_{n-1}-r_n) n(n-1)/mu")
    common(m)
    m.add_argument("--mu", type=float, required=True)
    m.add_argument("--abscissa-power", type=int, default=2,
                   help="report against 1/n^power (subleading exponent unknown)")
    m = mode.add_parser("quotient", help="ratios of s_n / ref_n against a reference series")
    common(m)
    m.add_argument("--ref", required=True, help="reference series file")
    m.add_argument("--ref-mu", type=float, default=None)
    m.add_argument("--ref-g", type=float, default=None)
    m = mode.add_parser("lambda", help="growth-rate quotient from two reference series")
    common(m)
    m.add_argument("--ref1", required=True, help="reference with exponent --g1")
    m.add_argument("--g1", type=float, required=True)
    m.add_argument("--ref2", required=True, help="reference with exponent --g2")
    m.add_argument("--g2", type=float, required=True)
    m.add_argument("--mu-ref", type=float, default=None,
                   help="shared reference growth rate (reports implied mu)")
    m = mode.add_parser("amplitude", help="amplitude from s_n / (mu^n n^g)")
    common(m)
    m.add_argument("--mu", type=float, required=True)
    m.add_argument("--g", type=float, required=True)

    p = sub.add_parser("verify", help="golden-data regression checks")
    p.add_argument("fixture", choices=("coefficients-small", "s19-prediction", "transforms"))
    p.add_argument("--workers", type=int, default=None)

    return parser


def _parse_orders(text):
    try:
        orders = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise SeriesFormatError(f"bad --orders value: {text!r}") from None
    if not orders:
        raise SeriesFormatError("--orders is empty")
    return orders


def _load_tail(args) -> EstimateTable | None:
    """Load --tail as a coefficient or ratio table, detecting the kind from
    the embedded manifest when --tail-kind is auto."""
    if not getattr(args, "tail", None):
        return None
    table, comments = read_estimates(args.tail)
    kind = args.tail_kind
    if kind == "auto":
        for c in comments:
            if c.startswith("manifest:"):
                try:
                    cmd = json.loads(c[len("manifest:"):].strip()).get("command", "")
                except json.JSONDecodeError:
                    continue
                if cmd == "extend":
                    kind = "coefficients"
                elif cmd == "ratios-predict":
                    kind = "ratios"
        if kind == "auto":
            raise SeriesFormatError(
                f"{args.tail}: cannot infer tail kind; pass --tail-kind explicitly")
    args.tail_kind = kind
    return table


def _tail_ratio_table(series: Series, args) -> EstimateTable | None:
    """Normalise --tail to a ratio table (converting a coefficient table)."""
    table = _load_tail(args)
    if table is None:
        return None
    if args.tail_kind == "ratios":
        return table
    extended = series.with_tail(table)
    seq = ratios(extended)
    rows = [r for r in seq.rows if r.n > series.last_exact]
    from .series import EstimateRow
    return EstimateTable([EstimateRow(r.n, r.r, r.std_dev, 1) for r in rows])


def _write_rows(path, manifest, header, rows, footer=()):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {manifest.header()}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
        for line in footer:
            fh.write(f"# {line}\n")


def _cmd_enumerate(args) -> int:
    series = enumerate_series(args.n, m=args.start_len, workers=args.workers,
                              increment_avoiding=args.increment_avoiding,
                              pruned=not args.no_prune)
    manifest = RunManifest("enumerate", {
        "n": args.n, "start_len": args.start_len,
        "increment_avoiding": args.increment_avoiding, "pruned": not args.no_prune,
    }, output_files=[args.out], worker_count=args.workers or os.cpu_count() or 1)
    write_series(args.out, series, comments=[manifest.header()])
    print(f"wrote {args.out} with coefficients 0..{args.n}")
    return EXIT_OK


def _cmd_transform(args) -> int:
    series = read_series(args.series)
    out = binomial_transform(series) if args.direction == "forward" \
        else inverse_binomial_transform(series)
    manifest = RunManifest("transform", {"direction": args.direction},
                           input_files=[args.series], output_files=[args.out])
    write_series(args.out, out, comments=[manifest.header()])
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_extend(args) -> int:
    series = read_series(args.series)
    cfgs = default_configs(len(series.exact), orders=_parse_orders(args.orders))
    table = predict_ensemble(series, cfgs, args.predict, args.trim)
    manifest = RunManifest("extend", {
        "orders": args.orders, "predict": args.predict, "trim": args.trim,
    }, input_files=[args.series], output_files=[args.out])
    write_estimates(args.out, table, comments=[manifest.header()])
    print(f"wrote {args.out}: coefficients {table.rows[0].n}..{table.rows[-1].n}")
    return EXIT_OK


def _cmd_ratios_predict(args) -> int:
    series = read_series(args.series)
    cfgs = default_configs(len(series.exact), orders=_parse_orders(args.orders))
    table = predict_ratios_ensemble(series, cfgs, args.predict, args.trim)
    manifest = RunManifest("ratios-predict", {
        "orders": args.orders, "predict": args.predict, "trim": args.trim,
    }, input_files=[args.series], output_files=[args.out])
    write_estimates(args.out, table, comments=[manifest.header()])
    print(f"wrote {args.out}: ratios {table.rows[0].n}..{table.rows[-1].n}")
    return EXIT_OK


def _one_over_n(n: int, power: int = 1) -> str:
    with mpmath.workdps(WORKING_DPS):
        return sci(mpmath.mpf(1) / mpmath.mpf(n) ** power)


def _intercept_summary(table, window):
    """Extrapolated limit at the requested window plus neighbours, to show
    sensitivity to the window choice."""
    lines = []
    for w in (max(2, window - 5), window, window + 5):
        try:
            intercept, slope = extrapolate_linear(table, w)
        except TwoStacksError:
            continue
        lines.append(f"intercept (window={w}, vs 1/n): {sci(intercept)}  slope: {sci(slope)}")
    return lines


def _analyze_manifest(args, mode, extra=None) -> RunManifest:
    params = {"window": args.window}
    if getattr(args, "tail", None):
        params["tail_kind"] = args.tail_kind
    if extra:
        params.update(extra)
    inputs = [args.series] + ([args.tail] if getattr(args, "tail", None) else [])
    return RunManifest(f"analyze {mode}", params, input_files=inputs,
                       output_files=[args.out])


def _cmd_analyze(args) -> int:
    series = read_series(args.series)
    if args.mode == "ratios":
        seq = combined_ratios(series, _tail_ratio_table(series, args))
        rows = [(str(r.n), _one_over_n(r.n), sci(r.r), sci(r.std_dev)) for r in seq.rows]
        footer = _intercept_summary(seq.to_estimates(), args.window)
        _write_rows(args.out, _analyze_manifest(args, "ratios"),
                    "n,one_over_n,r_n,std_dev", rows, footer)
    elif args.mode == "intercepts":
        seq = combined_ratios(series, _tail_ratio_table(series, args))
        table = linear_intercepts(seq)
        rows = [(str(r.n), _one_over_n(r.n), sci(r.value), sci(r.std_dev))
                for r in table.rows]
        footer = _intercept_summary(table, args.window)
        for w in (args.window,):
            mu2, _ = extrapolate_linear(table, w, abscissa_power=2)
            footer.append(f"intercept (window={w}, vs 1/n^2): {sci(mu2)}")
        _write_rows(args.out, _analyze_manifest(args, "intercepts"),
                    "n,one_over_n,l_n,std_dev", rows, footer)
    elif args.mode == "gradient":
        seq = combined_ratios(series, _tail_ratio_table(series, args))
        table = gradient_estimator(seq, args.mu)
        power = args.abscissa_power
        rows = [(str(r.n), _one_over_n(r.n, power), sci(r.value), sci(r.std_dev))
                for r in table.rows]
        g_ex, _ = extrapolate_linear(table, args.window, abscissa_power=power)
        tail_rows = table.rows[-5:]
        trend = sum(r.value for r in tail_rows) / len(tail_rows)
        footer = [f"extrapolated g (window={args.window}, vs 1/n^{power}): {sci(g_ex)}",
                  f"trend g (mean of last {len(tail_rows)}): {sci(trend)}"]
        _write_rows(args.out, _analyze_manifest(args, "gradient",
                    {"mu": args.mu, "abscissa_power": power}),
                    f"n,one_over_n^{power},g_n,std_dev", rows, footer)
    elif args.mode == "quotient":
        ref_series = read_series(args.ref)
        ref = ReferenceSeries(ref_series, args.ref_mu or 0.0, args.ref_g or 0.0)
        seq = quotient_ratios(series, ref)
        rows = [(str(r.n), _one_over_n(r.n), sci(r.r), sci(r.std_dev)) for r in seq.rows]
        footer = _intercept_summary(seq.to_estimates(), args.window)
        if args.ref_mu:
            lam, _ = extrapolate_linear(seq.to_estimates(), args.window)
            footer.append(f"implied mu = lambda * ref_mu: {sci(lam * args.ref_mu)}")
        manifest = _analyze_manifest(args, "quotient",
                                     {"ref_mu": args.ref_mu, "ref_g": args.ref_g})
        manifest.input_files.append(args.ref)
        _write_rows(args.out, manifest, "n,one_over_n,quotient_ratio,std_dev", rows, footer)
    elif args.mode == "lambda":
        ref1 = ReferenceSeries(read_series(args.ref1), 0.0, args.g1)
        ref2 = ReferenceSeries(read_series(args.ref2), 0.0, args.g2)
        r1 = quotient_ratios(series, ref1)
        r2 = quotient_ratios(series, ref2)
        table = lambda_estimator(r1, r2, args.g1, args.g2)
        rows = [(str(r.n), _one_over_n(r.n), sci(r.value), sci(r.std_dev))
                for r in table.rows]
        lam, _ = extrapolate_linear(table, args.window)
        footer = [f"extrapolated lambda (window={args.window}): {sci(lam)}"]
        if args.mu_ref:
            footer.append(f"implied mu = lambda * mu_ref: {sci(lam * args.mu_ref)}")
        manifest = _analyze_manifest(args, "lambda",
                                     {"g1": args.g1, "g2": args.g2, "mu_ref": args.mu_ref})
        manifest.input_files += [args.ref1, args.ref2]
        _write_rows(args.out, manifest, "n,one_over_n,lambda_n,std_dev", rows, footer)
    elif args.mode == "amplitude":
        tail = _tail_ratio_table(series, args)
        target = series_with_ratio_tail(series, tail) if tail is not None else series
        table = normalised_coefficients(target, args.mu, args.g)
        a, big_a = amplitude_estimate(target, args.mu, args.g, window=args.window)
        rows = [(str(r.n), _one_over_n(r.n), sci(r.value), sci(r.std_dev))
                for r in table.rows]
        footer = [f"amplitude a (window={args.window}): {sci(a)}",
                  f"amplitude A = a*Gamma(g+1): {sci(big_a)}"]
        _write_rows(args.out, _analyze_manifest(args, "amplitude",
                    {"mu": args.mu, "g": args.g}),
                    "n,one_over_n,normalised,std_dev", rows, footer)
    else:
        raise FixtureUnknown(args.mode)
    print(f"wrote {args.out}")
    return EXIT_OK


def _verify_report(name: str, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def _cmd_verify(args) -> int:
    golden = reference_counts()
    ok = True
    if args.fixture == "coefficients-small":
        series = enumerate_series(10, m=2, workers=args.workers)
        for n in range(11):
            ok &= _verify_report(f"s_{n}", series.exact[n] == golden.exact[n],
                                 f"computed {series.exact[n]}, expected {golden.exact[n]}")
    elif args.fixture == "s19-prediction":
        head = Series("head", golden.exact[:19])
        table = predict_ensemble(head, default_configs(19, orders=(4,)), k=1, trim=0.10)
        row = table.rows[0]
        true = golden.exact[19]
        rel = abs(row.value - true) / true
        ok &= _verify_report("relative error", rel <= 1e-8,
                             f"{sci(rel, 3)} (limit 1e-8), estimate {sci(row.value)}")
        sigmas = abs(row.value - true) / row.std_dev
        ok &= _verify_report("within 3 std devs", sigmas <= 3,
                             f"{sci(sigmas, 3)} std devs, std {sci(row.std_dev, 4)}")
    elif args.fixture == "transforms":
        rng = random.Random(20250810)
        failures = 0
        for trial in range(100):
            values = [1] + [rng.randrange(0, 10 ** rng.randrange(1, 12))
                            for _ in range(rng.randrange(1, 25))]
            series = Series(f"random-{trial}", values)
            round_trip = inverse_binomial_transform(binomial_transform(series))
            failures += round_trip.exact != series.exact
        ok &= _verify_report("round-trip", failures == 0,
                             f"{100 - failures}/100 random sequences")
    else:
        raise FixtureUnknown(args.fixture)
    return EXIT_OK if ok else EXIT_VERIFY


def run(argv) -> int:
    """Execute a command line; returns the exit status."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        if args.command == "enumerate":
            status = _cmd_enumerate(args)
        elif args.command == "transform":
            status = _cmd_transform(args)
        elif args.command == "extend":
            status = _cmd_extend(args)
        elif args.command == "ratios-predict":
            status = _cmd_ratios_predict(args)
        elif args.command == "analyze":
            status = _cmd_analyze(args)
        elif args.command == "verify":
            status = _cmd_verify(args)
        else:  # unreachable: argparse rejects unknown commands
            return EXIT_USAGE
    except FixtureUnknown as exc:
        print(f"error: unknown fixture: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SeriesFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except TwoStacksError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"elapsed: {time.monotonic() - started:.1f}s", file=sys.stderr)
    return status


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
