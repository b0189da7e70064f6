"""Command-line front end.

Every subcommand echoes its resolved configuration: as '#'-prefixed header
lines in table and csv formats, or under the "config" key in json.  Data
always goes to the selected output stream; progress and diagnostics go to
stderr only.  Exit codes: 0 success, 2 usage or validation error, 3 cost
or numeric-guard error.

Machine formats print floats with 17 significant digits so values
round-trip exactly; human tables use 6.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import experiments, expsums, gfunction, zeta_identity
from .cotangent import (
    FareyFraction,
    c0,
    decompose,
    q_split,
    q_sum,
    vasyunin,
)
from .errors import (
    CapTooLargeError,
    ConfigParseError,
    CostGuardError,
    CotlabError,
    EmptySampleError,
    EmptyWindowError,
    NotCoprimeError,
    ThresholdTooLargeError,
)
from .experiments import (
    BoxSpec,
    ExperimentReport,
    MomentSpec,
    StatRecord,
    make_test_function,
    reports_to_csv_text,
    write_json,
)
from .numthy import ShiftSet, Window, is_prime, primes_in_range
from .zeta_identity import QuadratureSpec, residual

_GUARD_ERRORS = (CostGuardError, CapTooLargeError, ThresholdTooLargeError)


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def _fmt6(x: float) -> str:
    return format(float(x), ".6g")


class Output:
    """Writes one command's results in the selected format."""

    def __init__(self, fmt: str, stream, config: dict):
        self.fmt = fmt
        self.stream = stream
        self.config = {k: v for k, v in sorted(config.items()) if v is not None}

    def _header_lines(self) -> list[str]:
        return [f"# {k} = {v}" for k, v in self.config.items()]

    def scalar(self, value: float) -> None:
        if self.fmt == "json":
            json.dump({"config": self.config, "value": float(value)}, self.stream)
            self.stream.write("\n")
            return
        for line in self._header_lines():
            self.stream.write(line + "\n")
        self.stream.write(_fmt17(value) + "\n")

    def rows(self, columns: list[str], rows: list[list]) -> None:
        if self.fmt == "json":
            json.dump(
                {"config": self.config, "columns": columns, "rows": rows}, self.stream
            )
            self.stream.write("\n")
            return
        for line in self._header_lines():
            self.stream.write(line + "\n")
        if self.fmt == "csv":
            self.stream.write(",".join(columns) + "\n")
            for row in rows:
                self.stream.write(
                    ",".join(_fmt17(v) if isinstance(v, float) else str(v) for v in row)
                    + "\n"
                )
            return
        widths = [
            max(len(c), *(len(self._cell(r[i])) for r in rows)) if rows else len(c)
            for i, c in enumerate(columns)
        ]
        self.stream.write(
            "  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n"
        )
        for row in rows:
            self.stream.write(
                "  ".join(self._cell(v).ljust(w) for v, w in zip(row, widths)).rstrip()
                + "\n"
            )

    @staticmethod
    def _cell(v) -> str:
        return _fmt6(v) if isinstance(v, float) else str(v)

    def reports(self, reports: list[ExperimentReport]) -> None:
        if self.fmt == "json":
            write_json(reports, self.stream)
            return
        if self.fmt == "csv":
            for line in self._header_lines():
                self.stream.write(line + "\n")
            self.stream.write(reports_to_csv_text(reports))
            return
        rows = []
        for rep in reports:
            for rec in rep.records:
                rows.append(
                    [rec.name, rec.empirical, rec.target, rec.abs_gap, rec.rel_gap, rec.n, rep.q]
                )
        self.rows(["name", "empirical", "target", "abs_gap", "rel_gap", "n", "q"], rows)


def _parse_shifts(text: str) -> ShiftSet:
    return ShiftSet(tuple(int(v) for v in text.split(",") if v.strip() != ""))


def _parse_terms(text: str) -> tuple[tuple[int, int], ...]:
    terms = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m, _, a = part.partition(":")
        terms.append((int(m), int(a or 0)))
    return tuple(terms)


def _window(args) -> Window:
    return Window.relaxed_range(args.a0, args.a1)


def _zero_timings(reports: list[ExperimentReport], args) -> list[ExperimentReport]:
    if args.timings == "zero":
        for rep in reports:
            rep.runtime_ms = 0.0
    return reports


def _add_global_options(parser, suppress: bool) -> None:
    def dflt(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        "--format", choices=("table", "csv", "json"), default=dflt("table")
    )
    parser.add_argument(
        "--output", default=dflt(None), help="write data stream to a file"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=dflt(int(os.environ.get("COTLAB_THREADS", "1"))),
        help="worker cap for sweeps (default: COTLAB_THREADS or 1)",
    )
    parser.add_argument("--seed", type=int, default=dflt(0))
    parser.add_argument(
        "--timings",
        choices=("real", "zero"),
        default=dflt("real"),
        help="'zero' blanks runtime_ms for byte-reproducible output",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cotlab",
        description="cotangent-sum distribution laboratory",
    )
    _add_global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=lambda **kw: argparse.ArgumentParser(parents=[common], **kw))

    p = sub.add_parser("c0", help="cotangent sum c0(r/b)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--b", type=int, required=True)

    p = sub.add_parser("vasyunin", help="Vasyunin sum V(r/b)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--b", type=int, required=True)

    p = sub.add_parser("qsum", help="q-sum with floor weights")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = sub.add_parser("decompose", help="block decomposition rows (s_j, d_j, t_j)")
    p.add_argument("--r-eff", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--max-rows", type=int, default=20, help="0 prints every row")

    p = sub.add_parser("qsplit", help="near-pole / remainder split of the q-sum")
    p.add_argument("--r-eff", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m1", type=int, required=True)
    p.add_argument("--mode", choices=("scaled", "raw"), default="scaled")

    p = sub.add_parser("g-eval", help="truncated sawtooth series g(alpha; cap)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--cap", type=int, required=True)

    p = sub.add_parser("g-moments", help="exact moments of g(.; cap)")
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--k", default="1,2,3,4", help="comma list of orders")

    p = sub.add_parser("inverse-box", help="inverse-ratio box count vs target")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a0", type=float, required=True)
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--shifts", default="0")
    p.add_argument("--alphas", required=True, help="comma list, one per shift")
    p.add_argument("--delta", type=float, required=True)

    p = sub.add_parser("exp-sum", help="complete exponential sum with inverse poles")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--terms", default="", help="m:a pairs, e.g. '1:0,1:1'")

    p = sub.add_parser("exp-bounds", help="bound-ratio sweeps")
    p.add_argument("--kind", choices=("mixed", "kloosterman", "fouvry-michel"), default="mixed")
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--L", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--grid", type=int, default=20, help="kloosterman coefficient grid size")
    p.add_argument("--x", type=int, default=10**5, help="prime cutoff for fouvry-michel")

    p = sub.add_parser("moments", help="joint moments over a numerator window")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a0", type=float, required=True)
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--shifts", default="0")
    p.add_argument("--k", required=True, help="comma list, one per shift")
    p.add_argument("--cap-exponent", type=int, default=10)
    p.add_argument("--scale", type=float, default=math.pi)
    p.add_argument("--mode", choices=("all", "primes"), default="all")
    p.add_argument("--statistic", choices=("c0", "q"), default="c0")
    p.add_argument("--sample-limit", type=int, default=experiments.DEFAULT_SAMPLE_LIMIT)
    p.add_argument("--normalization", choices=("count", "printed"), default="count")

    p = sub.add_parser("theorem11", help="joint distributional factorization check")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a0", type=float, required=True)
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--shifts", default="0")
    p.add_argument("--f", default="gauss:0:1", help="comma list of test functions")
    p.add_argument("--cap-exponent", type=int, default=12)
    p.add_argument("--scale", type=float, default=math.pi)
    p.add_argument("--mode", choices=("all", "primes"), default="all")
    p.add_argument("--g-samples", type=int, default=100_000)
    p.add_argument("--sample-limit", type=int, default=experiments.DEFAULT_SAMPLE_LIMIT)
    p.add_argument("--samples-out", default=None, help="write raw sample series CSV")

    p = sub.add_parser(
        "calibrate-scale", help="scale minimising KS distance to the g sample"
    )
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a0", type=float, required=True)
    p.add_argument("--a1", type=float, required=True)
    p.add_argument("--shifts", default="0")
    p.add_argument("--cap-exponent", type=int, default=12)
    p.add_argument("--mode", choices=("all", "primes"), default="all")
    p.add_argument("--g-samples", type=int, default=100_000)
    p.add_argument("--sample-limit", type=int, default=experiments.DEFAULT_SAMPLE_LIMIT)

    p = sub.add_parser("identity", help="weighted |zeta|^2 integral vs closed form")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--T", type=float, default=10_000.0)
    p.add_argument("--step", type=float, default=0.05)

    p = sub.add_parser("batch", help="run a config file of experiment cells")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=None, help="write per-cell CSV/JSON files")

    return parser


def _config_echo(args, skip=("output", "command")) -> dict:
    return {
        k: v
        for k, v in vars(args).items()
        if k not in skip and not k.startswith("_")
    }


def _require_prime(q: int) -> None:
    if not is_prime(q):
        raise NotCoprimeError(f"q = {q} must be prime")


def _dispatch(args, out: Output) -> int:
    cmd = args.command

    if cmd == "c0":
        out.scalar(c0(FareyFraction(args.r, args.b)))
    elif cmd == "vasyunin":
        out.scalar(vasyunin(FareyFraction(args.r, args.b)))
    elif cmd == "qsum":
        _require_prime(args.q)
        out.scalar(q_sum(args.r, args.q))
    elif cmd == "g-eval":
        out.scalar(gfunction.g_trunc(args.alpha, args.cap))
    elif cmd == "decompose":
        _require_prime(args.q)
        dec = decompose(args.r_eff, args.q)
        rows = dec.rows()
        limit = len(rows) if args.max_rows == 0 else args.max_rows
        out.rows(
            ["j", "s", "d", "t"],
            [[j, s, d, t] for j, (s, d, t) in enumerate(rows[:limit])],
        )
    elif cmd == "qsplit":
        _require_prime(args.q)
        sp = q_split(args.r_eff, args.q, args.m1, mode=args.mode)
        full = q_sum(args.r_eff, args.q)
        out.rows(
            ["name", "value"],
            [
                ["q0", sp.q0],
                ["q1", sp.q1],
                ["q0_plus_q1", sp.q0 + sp.q1],
                ["q_sum", full],
                ["selected_blocks", int(sp.selected_j.size)],
            ],
        )
    elif cmd == "g-moments":
        ks = [int(v) for v in args.k.split(",") if v.strip() != ""]
        out.rows(
            ["k", "moment"],
            [[k, gfunction.moment_exact(args.cap, k)] for k in ks],
        )
    elif cmd == "inverse-box":
        _require_prime(args.q)
        shifts = _parse_shifts(args.shifts)
        box = BoxSpec(
            alphas=tuple(float(v) for v in args.alphas.split(",")), delta=args.delta
        )
        rep = experiments.inverse_box_report(
            args.q, _window(args), shifts, box, seed=args.seed
        )
        out.reports(_zero_timings([rep], args))
    elif cmd == "exp-sum":
        _require_prime(args.q)
        arg = expsums.RationalExponentArg(n=args.n, terms=_parse_terms(args.terms))
        val = expsums.mixed_exp_sum(args.q, arg)
        out.rows(
            ["part", "value"],
            [["real", val.real], ["imag", val.imag], ["abs", abs(val)]],
        )
    elif cmd == "exp-bounds":
        qs = [int(v) for v in primes_in_range(3, args.qmax)]
        if args.kind == "mixed":
            report = expsums.bound_ratio_sweep(qs, args.L, args.trials, seed=args.seed)
        elif args.kind == "fouvry-michel":
            report = expsums.prime_ratio_sweep(
                qs, args.x, args.trials, seed=args.seed, L=args.L
            )
        else:
            rows = []
            for q in qs:
                worst = 0.0
                for mm in range(1, args.grid + 1):
                    for nn in range(1, args.grid + 1):
                        if mm % q == 0 and nn % q == 0:
                            continue
                        worst = max(
                            worst,
                            abs(expsums.kloosterman(mm, nn, q)) / (2.0 * math.sqrt(q)),
                        )
                rows.append([q, worst])
            out.rows(["q", "max_weil_ratio"], rows)
            return 0
        out.rows(
            ["q", "max_ratio", "mean_ratio", "p95_ratio", "trials"],
            [
                [row.q, row.max_ratio, row.mean_ratio, row.p95_ratio, row.trials]
                for row in report.rows
            ],
        )
    elif cmd == "moments":
        _require_prime(args.q)
        shifts = _parse_shifts(args.shifts)
        spec = MomentSpec(
            k=tuple(int(v) for v in args.k.split(",")),
            cap_exponent=args.cap_exponent,
            scale=args.scale,
            mode=args.mode,
        )
        fn = (
            experiments.joint_c0_moments
            if args.statistic == "c0"
            else experiments.joint_q_moments
        )
        rep = fn(
            args.q,
            _window(args),
            shifts,
            spec,
            seed=args.seed,
            sample_limit=args.sample_limit,
            threads=args.threads,
            normalization=args.normalization,
        )
        out.reports(_zero_timings([rep], args))
    elif cmd == "theorem11":
        _require_prime(args.q)
        shifts = _parse_shifts(args.shifts)
        family = [make_test_function(s.strip()) for s in args.f.split(",")]
        rep = experiments.theorem_check(
            args.q,
            _window(args),
            shifts,
            family,
            mode=args.mode,
            cap=1 << args.cap_exponent,
            scale=args.scale,
            g_sample_count=args.g_samples,
            seed=args.seed,
            sample_limit=args.sample_limit,
            threads=args.threads,
        )
        if args.samples_out:
            with open(args.samples_out, "w", encoding="utf-8") as fh:
                fh.write("series,value\n")
                for name, arr in rep.arrays.items():
                    for v in np.sort(arr):
                        fh.write(f"{name},{_fmt17(v)}\n")
        out.reports(_zero_timings([rep], args))
    elif cmd == "calibrate-scale":
        _require_prime(args.q)
        scale, ks = experiments.calibrate_scale(
            args.q,
            _window(args),
            _parse_shifts(args.shifts),
            mode=args.mode,
            cap=1 << args.cap_exponent,
            g_sample_count=args.g_samples,
            seed=args.seed,
            sample_limit=args.sample_limit,
            threads=args.threads,
        )
        out.rows(["name", "value"], [["best_scale", scale], ["ks_at_best", ks]])
    elif cmd == "identity":
        import time

        spec = QuadratureSpec(T=args.T, step=args.step)
        t0 = time.perf_counter()
        res = residual(FareyFraction(args.r, args.b), spec)
        elapsed_ms = (time.perf_counter() - t0) * 1e3
        rec = StatRecord(
            name=f"identity_r{res.r}_b{res.b}",
            empirical=res.lhs,
            target=res.rhs,
            n=1,
        )
        rep = ExperimentReport(
            name="identity",
            q=res.b,
            window=(0.0, 1.0),
            shifts=(0,),
            records=[rec],
            sample_count=1,
            seed=args.seed,
            config={
                "kind": "identity",
                "r": res.r,
                "b": res.b,
                "T": res.T,
                "step": args.step,
                "uncertainty": res.uncertainty,
            },
            runtime_ms=elapsed_ms,
            extras={"uncertainty": res.uncertainty, "T": res.T},
        )
        out.reports(_zero_timings([rep], args))
    elif cmd == "batch":
        reports = experiments.run_config(args.config, threads=args.threads)
        _zero_timings(reports, args)
        if args.out_dir:
            os.makedirs(args.out_dir, exist_ok=True)
            for rep in reports:
                base = os.path.join(args.out_dir, rep.name)
                with open(base + ".csv", "w", encoding="utf-8") as fh:
                    fh.write(reports_to_csv_text([rep]))
                with open(base + ".json", "w", encoding="utf-8") as fh:
                    write_json([rep], fh)
            print(f"wrote {len(reports)} report(s) to {args.out_dir}", file=sys.stderr)
        else:
            out.reports(reports)
    else:  # pragma: no cover - argparse enforces the choices
        raise AssertionError(cmd)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config_echo(args)
    stream = sys.stdout
    close = False
    if args.output:
        stream = open(args.output, "w", encoding="utf-8")
        close = True
    out = Output(args.format, stream, config)
    try:
        return _dispatch(args, out)
    except _GUARD_ERRORS as exc:
        print(f"cotlab: {exc}", file=sys.stderr)
        return 3
    except (CotlabError, ValueError) as exc:
        print(f"cotlab: {exc}", file=sys.stderr)
        return 2
    finally:
        if close:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
