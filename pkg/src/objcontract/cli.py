"""Command-line front end: ``objcontract contract|verify|pareto|bench``.

Exit codes: 0 success, 1 verification failed, 2 refused (size cap),
64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .bench import StudyGrid, kind_from_name, run_study, summarize
from .contraction import REJECT, SPLIT, ContractionConfig, SignedInputError, contract_objective
from .core import contraction_factor
from .enumeration import FEASIBLE_CAP, SIGNATURE_CAP, CapExceeded, efficient_set, pareto_front
from .enumeration import verify_order_preserving
from .instance_io import InstanceParseError, read_instance, serialize_instance, write_instance
from .scaling import gcd_scale, scale_round

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_REFUSED = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _sampler_list(text: str) -> tuple[str, ...]:
    try:
        return tuple(kind_from_name(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fmt_gamma(g: Fraction) -> str:
    return f"{g.numerator}/{g.denominator}"


# -- contract ---------------------------------------------------------------


def cmd_contract(args) -> int:
    inst = read_instance(args.instance)
    method = args.method
    if method != "scale-round" and args.divisor is not None:
        raise UsageError("--divisor only applies to --method scale-round")
    if method == "scale-round" and args.divisor is None:
        raise UsageError("--method scale-round needs --divisor")
    summary, payload, new_rows, traces = [f"method={method}"], [], [], []
    cfg = ContractionConfig(time_limit=args.time_limit, signed_mode=args.signed,
                            emit_trace=args.trace is not None)
    for i, row in enumerate(inst.objectives.rows):
        c = row.coeffs
        if method == "exact":
            res = contract_objective(c, cfg)
            new_rows.append(res.d)
            summary.append(f"obj[{i}] status={res.status} gamma={_fmt_gamma(res.gamma)} "
                           f"gamma_pct={float(100 * res.gamma):.4f} cuts={res.cuts_added} "
                           f"iterations={res.iterations} runtime_ms={res.elapsed * 1000:.1f}")
            payload.append({"d": list(res.d), "status": res.status, "gamma": _fmt_gamma(res.gamma),
                            "cuts_added": res.cuts_added, "iterations": res.iterations,
                            "elapsed": res.elapsed, "trace": res.trace})
            if res.trace is not None:
                traces.extend((i, *t) for t in res.trace)
        else:
            if any(v < 0 for v in c):
                raise SignedInputError(f"objective {i} has negative coefficients; "
                                       f"{method} scaling needs non-negative input")
            rep = gcd_scale(c) if method == "gcd" else scale_round(c, divisor=args.divisor)
            new_rows.append(rep.d)
            gamma = contraction_factor(c, rep.d) if any(c) else Fraction(0)
            exact = {True: "yes", False: "no", None: "unknown"}[rep.exact]
            summary.append(f"obj[{i}] lambda={rep.lambda_description} order_preserving={exact} "
                           f"gamma={_fmt_gamma(gamma)} gamma_pct={float(100 * gamma):.4f}")
            payload.append({"d": list(rep.d), "lambda": str(rep.lambda_description),
                            "order_preserving": rep.exact, "gamma": _fmt_gamma(gamma)})
    out = inst.with_objectives(new_rows)
    if args.output:
        write_instance(out, args.output)
        print("\n".join(summary))
    else:
        sys.stdout.write(serialize_instance(out))
        print("\n".join("# " + line for line in summary))
    if args.json:
        Path(args.json).write_text(json.dumps({"method": method, "objectives": payload}, indent=2) + "\n")
    if args.trace:
        lines = ["objective,iteration,upper,lower"] + [",".join(map(str, t)) for t in traces]
        Path(args.trace).write_text("\n".join(lines) + "\n")
    return EXIT_OK


# -- verify -----------------------------------------------------------------


def cmd_verify(args) -> int:
    a, b = read_instance(args.original), read_instance(args.transformed)
    if (a.nvars, a.nobjs) != (b.nvars, b.nobjs):
        raise UsageError(f"shape mismatch: {a.nobjs}x{a.nvars} vs {b.nobjs}x{b.nvars}")
    if a.nvars > SIGNATURE_CAP:
        print(f"refused: n={a.nvars} exceeds the verification cap of {SIGNATURE_CAP}")
        return EXIT_REFUSED
    ok = True
    for i, (rc, rd) in enumerate(zip(a.objectives.rows, b.objectives.rows)):
        reports = verify_order_preserving(rc.coeffs, rd.coeffs)
        if not reports:
            print(f"obj[{i}] PRESERVED")
            continue
        ok = False
        print(f"obj[{i}] VIOLATED")
        for r in reports:
            print(f"  {r.kind}: x={_bits(r.x)} y={_bits(r.y)} original={r.original_values} "
                  f"transformed={r.transformed_values}")
    if a.nvars <= FEASIBLE_CAP and a.constraints == b.constraints:
        same = efficient_set(a) == efficient_set(b)
        print(f"efficient sets {'EQUAL' if same else 'DIFFER'}")
        ok = ok and same
    return EXIT_OK if ok else EXIT_VIOLATION


def _bits(x) -> str:
    return "(" + ",".join(map(str, x)) + ")"


# -- pareto -----------------------------------------------------------------


def cmd_pareto(args) -> int:
    inst = read_instance(args.instance)
    if inst.nvars > FEASIBLE_CAP:
        print(f"refused: n={inst.nvars} exceeds the enumeration cap of {FEASIBLE_CAP}")
        return EXIT_REFUSED
    front = pareto_front(inst)
    for point in sorted(front.points):
        sols = " ".join(_bits(x) for x in sorted(front.entries[point]))
        print(f"{_bits(point)}: {sols}")
    print(f"nondominated points: {len(front)}")
    print(f"efficient solutions: {len(front.solutions)}")
    return EXIT_OK


# -- bench ------------------------------------------------------------------


def cmd_bench(args) -> int:
    grid = StudyGrid(args.samplers, args.n_list, args.k_list, args.samples_per_cell, args.seed)
    cfg = ContractionConfig(time_limit=args.time_limit)

    def report(r):
        print(f"{r.sampler} n={r.n} k={r.k} #{r.sample_index} {r.status} "
              f"gamma_pct={float(100 * r.gamma):.2f} {r.runtime:.2f}s", file=sys.stderr, flush=True)

    records = run_study(grid, cfg, workers=args.workers, progress=report if args.verbose else None)
    summary = summarize(records)
    Path(args.output).write_text(summary.csv)
    print(summary.table())
    print(f"wrote {len(records)} records to {args.output}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="objcontract", description="Exact objective coefficient contraction for "
                                                "multi-objective binary programs.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("contract", help="contract or scale every objective of an instance")
    c.add_argument("instance")
    c.add_argument("-o", "--output", help="write the transformed instance here (default: stdout)")
    c.add_argument("--method", choices=["exact", "gcd", "scale-round"], default="exact")
    c.add_argument("--divisor", type=int, help="divisor for scale-round, e.g. 5 or 10000")
    c.add_argument("--time-limit", type=float, default=600.0, metavar="SECONDS")
    c.add_argument("--signed", choices=[REJECT, SPLIT], default=REJECT)
    c.add_argument("--trace", metavar="PATH", help="CSV of per-iteration bounds (exact only)")
    c.add_argument("--json", metavar="PATH", help="machine-readable result file")
    c.set_defaults(func=cmd_contract)

    v = sub.add_parser("verify", help="check that a transformed instance keeps every order")
    v.add_argument("original")
    v.add_argument("transformed")
    v.set_defaults(func=cmd_verify)

    pa = sub.add_parser("pareto", help="enumerate the non-dominated set")
    pa.add_argument("instance")
    pa.set_defaults(func=cmd_pareto)

    b = sub.add_parser("bench", help="run the sampling study and write CSV")
    b.add_argument("--n-list", type=_int_list, default=(5, 6, 7, 8))
    b.add_argument("--k-list", type=_int_list, default=(3, 4))
    b.add_argument("--samplers", type=_sampler_list, default=("uniform", "oom", "log"))
    b.add_argument("--samples-per-cell", type=int, default=5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--time-limit", type=float, default=600.0, metavar="SECONDS")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--output", default="study.csv")
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        if getattr(args, "time_limit", 1.0) <= 0:
            raise UsageError("--time-limit must be positive")
        if args.command == "bench" and (args.samples_per_cell < 1 or args.workers < 1
                                        or args.seed < 0 or min(args.n_list) < 1 or min(args.k_list) < 1):
            raise UsageError("grid values must be positive")
        return args.func(args)
    except (UsageError, InstanceParseError, SignedInputError, OSError, ValueError) as exc:
        print(f"objcontract: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"objcontract: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED


if __name__ == "__main__":
    sys.exit(main())
