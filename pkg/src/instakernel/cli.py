"""Command-line front end: parse instance files, dispatch reductions, emit
equivalent instances with pre-solutions and reports, and run verification
oracles.

Subcommands
    reduce-vector   l1-minimize a single constraint vector
    compress        reduce one instance file (static / kernel / equivalent)
    verify          compare an original/reduced pair by exhaustive oracle
    report          batch-compress several instances into report.csv + report.png

Exit codes: 0 ok, 1 input error, 2 budget exceeded, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .budget import BudgetError, InputError, VerificationError
from .equivvec import find_violation, reduce_vector
from .exactmath import bit_size, dot
from .ilpcore import FeasIlp, InfeasibleVerdict, enumerate_feasible
from .ilpreduce import (
    NFoldIlp,
    TwoStageIlp,
    boxed_solutions,
    equiv_nfold,
    equiv_two_stage,
    kernel_bits_bound,
    kernelize_feasibility,
    nfold_reduced,
    static_equiv_ilp,
    two_stage_reduced,
    u_bound,
)
from .knapfam import (
    KnapsackInstance,
    MdKnapsackInstance,
    SubsetSumInstance,
    UnboundedKnapsackInstance,
    compress_knapsack,
    compress_mdknapsack,
    compress_subsetsum,
    dp_knapsack_oracle,
    dp_uks_oracle,
    equiv_uks,
    feasible_subsets,
    feasible_subsets_md,
    subsetsum_solutions,
)
from .reports import ReductionReport, render_report_png, write_report_csv
from .schedbal import (
    LoadBalancingInstance,
    Objective,
    PreSolution,
    brute_force_loadbalance,
    equiv_loadbalancing,
    expand_schedule,
)
from .serialize import (
    encode_instance,
    encode_presolution,
    kind_of,
    read_instance,
    write_instance,
)


def _parse_vector(text: str) -> tuple[int, ...]:
    parts = [p for chunk in text.split(",") for p in chunk.split()]
    if not parts:
        raise InputError("empty vector")
    try:
        return tuple(int(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"vector entries must be integers: {exc}") from exc


def _emit(args, human: str, record: dict) -> None:
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        print(human)


# ---------------------------------------------------------------------------
# reduce-vector
# ---------------------------------------------------------------------------


def cmd_reduce_vector(args) -> int:
    if args.w is not None:
        w = _parse_vector(args.w)
    elif args.input is not None:
        try:
            with open(args.input, encoding="utf-8") as fh:
                w = _parse_vector(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from exc
    else:
        raise InputError("need --w or --in")
    result = reduce_vector(w, args.delta, budget=args.budget)
    if args.verify:
        witness = find_violation(
            result.original, result.reduced, args.delta, budget=args.budget
        )
        if witness is not None:
            raise VerificationError(f"verdicts differ at z={list(witness)}")
    record = {
        "original": [str(v) for v in result.original],
        "reduced": [str(v) for v in result.reduced],
        "delta": str(result.radius),
        "l1_before": str(sum(abs(v) for v in result.original)),
        "l1_after": str(result.l1_norm),
        "verified": bool(result.verified),
    }
    _emit(
        args,
        f"reduced {list(result.reduced)}, l1 {result.l1_norm} "
        f"(from {sum(abs(v) for v in result.original)})",
        record,
    )
    return 0


# ---------------------------------------------------------------------------
# compress
# ---------------------------------------------------------------------------


def _default_u(obj) -> int:
    if isinstance(obj, FeasIlp):
        return max(u_bound(obj), 1)
    if isinstance(obj, TwoStageIlp):
        return max(max(u_bound(obj.block_ilp(i)) for i in range(obj.n_blocks)), 1)
    if isinstance(obj, NFoldIlp):
        cands = [u_bound(obj.linking_ilp())]
        cands += [u_bound(obj.block_ilp(i)) for i in range(obj.n_blocks)]
        return max(max(cands), 1)
    raise InputError("u only applies to ilp kinds")


def _compress_dispatch(obj, mode: str, u: Optional[int], budget: Optional[int]):
    """Run the reduction matching (kind, mode).

    Returns (reduced, pre, theoretical_bound_bits, infeasible_reason).
    """
    if isinstance(obj, FeasIlp):
        if mode == "kernel":
            bound = kernel_bits_bound(obj.a.nrows, obj.a.ncols, obj.a.inf_norm())
            kern = kernelize_feasibility(obj)
            if isinstance(kern, InfeasibleVerdict):
                return None, None, bound, kern.reason
            return kern.residual, kern.fixed, bound, None
        equiv = static_equiv_ilp(obj, u=u, budget=budget)
        return equiv.reduced, None, equiv.bit_report[2], None
    if isinstance(obj, TwoStageIlp):
        u_eff = u if u is not None else _default_u(obj)
        parts = equiv_two_stage(obj, u_eff, budget=budget)
        reduced = two_stage_reduced(obj, parts)
        return reduced, None, sum(p.bit_report[2] for p in parts), None
    if isinstance(obj, NFoldIlp):
        u_eff = u if u is not None else _default_u(obj)
        parts = equiv_nfold(obj, u_eff, budget=budget)
        reduced = nfold_reduced(obj, parts)
        return reduced, None, sum(p.bit_report[2] for p in parts), None
    if isinstance(obj, KnapsackInstance):
        comp = compress_knapsack(obj, budget)
        return comp.reduced, None, comp.equiv.bit_report[2], None
    if isinstance(obj, SubsetSumInstance):
        comp = compress_subsetsum(obj, budget)
        return comp.reduced, None, comp.equiv.bit_report[2], None
    if isinstance(obj, MdKnapsackInstance):
        comp = compress_mdknapsack(obj, budget)
        return comp.reduced, None, comp.equiv.bit_report[2], None
    if isinstance(obj, UnboundedKnapsackInstance):
        eq = equiv_uks(obj, budget)
        return (
            eq.compression.reduced,
            eq.copies,
            eq.compression.equiv.bit_report[2],
            None,
        )
    if isinstance(obj, LoadBalancingInstance):
        bundle = equiv_loadbalancing(obj, Objective.LOAD_BALANCING, budget=budget)
        if isinstance(bundle, InfeasibleVerdict):
            return None, None, 0, bundle.reason
        return bundle.residual, bundle.pre, bundle.report.bits_bound, None
    raise InputError(f"cannot compress {type(obj).__name__}")


def _run_oracle(original, reduced, pre, u: Optional[int], budget: Optional[int]):
    """Exhaustive equivalence check; returns (status, detail)."""
    if isinstance(original, FeasIlp) and isinstance(reduced, FeasIlp):
        if isinstance(pre, tuple):
            # kernel pair: feasibility must match and composition must solve
            residual_sols = enumerate_feasible(reduced, budget=budget)
            caps = reduced.effective_upper()
            probe = FeasIlp(
                a=original.a,
                b=original.b,
                lower=original.lower,
                upper=tuple(pre[i] + caps[i] for i in range(original.a.ncols)),
            )
            original_sols = enumerate_feasible(probe, budget=budget)
            if bool(residual_sols) != bool(original_sols):
                return "Failed", "feasibility verdicts differ"
            for sol in residual_sols:
                lifted = tuple(f + x for f, x in zip(pre, sol))
                if not original.is_solution(lifted):
                    return "Failed", f"composed point {list(lifted)} is not a solution"
            return "Verified", None
        u_eff = u if u is not None else max(u_bound(original), 1)
        sols_o = set(boxed_solutions(original, u_eff, budget))
        sols_r = set(boxed_solutions(reduced, u_eff, budget))
        if sols_o != sols_r:
            witness = sorted(sols_o ^ sols_r)[0]
            return "Failed", f"solution sets differ at x={list(witness)}"
        return "Verified", None
    if isinstance(original, TwoStageIlp) and isinstance(reduced, TwoStageIlp):
        return _run_oracle(original.assemble(), reduced.assemble(), None, u, budget)
    if isinstance(original, NFoldIlp) and isinstance(reduced, NFoldIlp):
        return _run_oracle(original.assemble(), reduced.assemble(), None, u, budget)
    if isinstance(original, KnapsackInstance) and isinstance(reduced, KnapsackInstance):
        if feasible_subsets(original) != feasible_subsets(reduced):
            return "Failed", "feasible subsets differ"
        return "Verified", None
    if isinstance(original, SubsetSumInstance) and isinstance(reduced, SubsetSumInstance):
        if subsetsum_solutions(original) != subsetsum_solutions(reduced):
            return "Failed", "solution subsets differ"
        return "Verified", None
    if isinstance(original, MdKnapsackInstance) and isinstance(reduced, MdKnapsackInstance):
        if feasible_subsets_md(original) != feasible_subsets_md(reduced):
            return "Failed", "feasible subsets differ"
        return "Verified", None
    if isinstance(original, UnboundedKnapsackInstance) and isinstance(
        reduced, KnapsackInstance
    ):
        best = dp_uks_oracle(original, budget=budget)
        feasible_o = best >= original.target
        _, feasible_r = dp_knapsack_oracle(reduced, budget=budget)
        if feasible_o != feasible_r:
            return "Failed", "target-reachability verdicts differ"
        return "Verified", None
    if isinstance(original, LoadBalancingInstance) and isinstance(
        reduced, LoadBalancingInstance
    ):
        truth = brute_force_loadbalance(original, budget=budget)
        echo = brute_force_loadbalance(reduced, budget=budget)
        feasible_o = not isinstance(truth, InfeasibleVerdict)
        feasible_r = not isinstance(echo, InfeasibleVerdict)
        if feasible_o != feasible_r:
            return "Failed", "feasibility verdicts differ"
        if feasible_r and isinstance(pre, PreSolution):
            schedule = expand_schedule(original, reduced, pre, echo, budget=budget)
            totals = [0] * original.d
            for idx, counts in enumerate(schedule):
                load = dot(counts, original.p)
                if not original.l <= load <= original.u:
                    return "Failed", f"machine {idx} load {load} leaves the window"
                for j in range(original.d):
                    totals[j] += counts[j]
            if tuple(totals) != original.n:
                return "Failed", "reconstructed schedule drops jobs"
        return "Verified", None
    raise InputError(
        f"no oracle for {type(original).__name__} vs {type(reduced).__name__}"
    )


def cmd_compress(args) -> int:
    original = read_instance(args.input)
    kind = kind_of(original)
    started = time.perf_counter()
    try:
        reduced, pre, bound, infeasible = _compress_dispatch(
            original, args.mode, args.u, args.budget
        )
    except BudgetError as exc:
        elapsed = int((time.perf_counter() - started) * 1000)
        report = ReductionReport(
            instance=os.path.basename(args.input),
            kind=kind,
            original_bits=bit_size(original),
            reduced_bits=0,
            theoretical_bound_bits=0,
            elapsed_ms=elapsed,
            verdict="BudgetExceeded",
            verification="Skipped",
        )
        _emit(args, f"budget exceeded: {exc}", report.to_json_dict())
        return 2
    elapsed = int((time.perf_counter() - started) * 1000)

    if infeasible is not None:
        report = ReductionReport(
            instance=os.path.basename(args.input),
            kind=kind,
            original_bits=bit_size(original),
            reduced_bits=0,
            theoretical_bound_bits=bound,
            elapsed_ms=elapsed,
            verdict="Infeasible",
            verification="Skipped",
        )
        _emit(args, f"instance is infeasible: {infeasible}", report.to_json_dict())
        return 0

    out_path = args.out or args.input + ".reduced.json"
    write_instance(out_path, encode_instance(reduced))
    pre_path = None
    if pre is not None:
        pre_path = args.pre_out or args.input + ".pre.json"
        write_instance(pre_path, encode_presolution(pre, kind))

    verification = "Skipped"
    detail = None
    if args.verify:
        try:
            verification, detail = _run_oracle(
                original, reduced, pre, args.u, args.budget
            )
        except BudgetError:
            verification = "Skipped"

    report = ReductionReport(
        instance=os.path.basename(args.input),
        kind=kind,
        original_bits=bit_size(original),
        reduced_bits=bit_size(reduced),
        theoretical_bound_bits=bound,
        elapsed_ms=elapsed,
        verdict="Reduced",
        verification=verification,
    )
    lines = [
        f"wrote {out_path}" + (f" and {pre_path}" if pre_path else ""),
        f"bits {report.original_bits} -> {report.reduced_bits}"
        f" (proven cap {report.theoretical_bound_bits})",
        f"verification: {verification}" + (f" ({detail})" if detail else ""),
    ]
    _emit(args, "\n".join(lines), report.to_json_dict())
    if verification == "Failed":
        print(f"counterexample: {detail}", file=sys.stderr)
        return 3
    return 0


def cmd_verify(args) -> int:
    original = read_instance(args.original)
    reduced = read_instance(args.reduced)
    pre = read_instance(args.pre) if args.pre else None
    status, detail = _run_oracle(original, reduced, pre, args.u, args.budget)
    record = {"verification": status, "detail": detail}
    _emit(args, f"verification: {status}" + (f" ({detail})" if detail else ""), record)
    if status != "Verified":
        if detail:
            print(f"counterexample: {detail}", file=sys.stderr)
        return 3
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _gen_knapsack(rng: random.Random) -> KnapsackInstance:
    n = rng.randint(3, 6)
    weights = tuple((1 << 64) + rng.randrange(1 << 48) for _ in range(n))
    profits = tuple((1 << 64) + rng.randrange(1 << 48) for _ in range(n))
    return KnapsackInstance(
        weights=weights,
        profits=profits,
        capacity=sum(weights) // 2,
        target=sum(profits) // 3,
    )


def _gen_subsetsum(rng: random.Random) -> SubsetSumInstance:
    n = rng.randint(3, 6)
    values = tuple((1 << 64) + rng.randrange(1 << 48) for _ in range(n))
    picked = [v for v in values if rng.random() < 0.5]
    target = sum(picked) if picked else values[0]
    return SubsetSumInstance(values=values, target=target)


def _gen_loadbalance(rng: random.Random) -> LoadBalancingInstance:
    d = rng.randint(1, 2)
    p = tuple(rng.randint(1, 3) for _ in range(d))
    m = rng.randint(50, 500)
    n = tuple(m * rng.randint(1, 20) for _ in range(d))
    avg = dot(p, n) // m
    return LoadBalancingInstance(
        p=p, n=n, m=m, l=max(0, avg - 2), u=avg + p[0] * 2 + 2
    )


def _gen_ilp(rng: random.Random) -> FeasIlp:
    from .exactmath import IntMatrix

    m, n = rng.randint(1, 2), rng.randint(2, 3)
    rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(m)]
    if all(all(v == 0 for v in row) for row in rows):
        rows[0][0] = 1
    return FeasIlp(
        a=IntMatrix.from_rows(rows),
        b=tuple(rng.randint(-4, 4) for _ in range(m)),
    )


_GENERATORS = {
    "knapsack": _gen_knapsack,
    "subsetsum": _gen_subsetsum,
    "loadbalance": _gen_loadbalance,
    "ilp": _gen_ilp,
}


def cmd_report(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    sources: list[str] = list(args.inputs or [])
    if args.generate:
        rng = random.Random(args.seed)
        for spec_item in args.generate:
            if ":" not in spec_item:
                raise InputError("--generate takes kind:count, e.g. knapsack:3")
            kind, _, count_text = spec_item.partition(":")
            if kind not in _GENERATORS:
                raise InputError(
                    f"cannot generate kind {kind!r}; choose from {sorted(_GENERATORS)}"
                )
            try:
                count = int(count_text)
            except ValueError as exc:
                raise InputError(f"bad count in {spec_item!r}") from exc
            for i in range(count):
                path = os.path.join(args.out_dir, f"gen-{kind}-{i}.json")
                write_instance(path, encode_instance(_GENERATORS[kind](rng)))
                sources.append(path)
    if not sources:
        raise InputError("nothing to report on: pass --in files or --generate")

    rows: list[ReductionReport] = []
    for path in sources:
        original = read_instance(path)
        kind = kind_of(original)
        started = time.perf_counter()
        try:
            reduced, pre, bound, infeasible = _compress_dispatch(
                original, args.mode, args.u, args.budget
            )
            verdict = "Reduced" if infeasible is None else "Infeasible"
        except BudgetError:
            reduced, pre, bound, verdict = None, None, 0, "BudgetExceeded"
        elapsed = int((time.perf_counter() - started) * 1000)
        verification = "Skipped"
        if args.verify and reduced is not None:
            try:
                verification, _ = _run_oracle(
                    original, reduced, pre, args.u, args.budget
                )
            except BudgetError:
                verification = "Skipped"
        rows.append(
            ReductionReport(
                instance=os.path.basename(path),
                kind=kind,
                original_bits=bit_size(original),
                reduced_bits=bit_size(reduced) if reduced is not None else 0,
                theoretical_bound_bits=bound,
                elapsed_ms=elapsed,
                verdict=verdict,
                verification=verification,
            )
        )

    csv_path = os.path.join(args.out_dir, "report.csv")
    png_path = os.path.join(args.out_dir, "report.png")
    write_report_csv(rows, csv_path)
    render_report_png(rows, png_path)
    if args.json:
        print(json.dumps([r.to_json_dict() for r in rows], sort_keys=True))
    else:
        for rep in rows:
            print(
                f"{rep.instance}: {rep.original_bits} -> {rep.reduced_bits} bits,"
                f" {rep.verdict}, verification {rep.verification}"
            )
        print(f"wrote {csv_path} and {png_path}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="instakernel",
        description="provably equivalent compression of integer-programming instances",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--budget", type=int, default=None, help="enumeration budget")
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="machine-readable output")
        fmt.add_argument(
            "--human", dest="json", action="store_false", help="plain text (default)"
        )

    p = sub.add_parser("reduce-vector", help="l1-minimize an equivalent vector")
    p.add_argument("--w", help="comma-separated integer vector")
    p.add_argument("--in", dest="input", help="file with the vector")
    p.add_argument("--delta", type=int, required=True, help="solution box radius")
    p.add_argument("--verify", action="store_true", help="exhaustive equivalence check")
    common(p)
    p.set_defaults(func=cmd_reduce_vector)

    p = sub.add_parser("compress", help="reduce an instance file")
    p.add_argument("--in", dest="input", required=True, help="instance file")
    p.add_argument(
        "--mode",
        choices=("static", "kernel"),
        default="static",
        help="ilp kinds: rewrite in place (static) or pre-pack a kernel",
    )
    p.add_argument("--out", help="output path (default: <in>.reduced.json)")
    p.add_argument("--pre-out", help="pre-solution path (default: <in>.pre.json)")
    p.add_argument("--u", type=int, help="solution box radius for static mode")
    p.add_argument("--verify", action="store_true", help="run the matching oracle")
    common(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("verify", help="compare original and reduced instances")
    p.add_argument("--original", required=True)
    p.add_argument("--reduced", required=True)
    p.add_argument("--pre", help="pre-solution file for equivalent-instance kinds")
    p.add_argument("--u", type=int, help="solution box radius for ilp pairs")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="batch-compress into report.csv + report.png")
    p.add_argument("--in", dest="inputs", nargs="*", help="instance files")
    p.add_argument(
        "--generate",
        nargs="*",
        help="synthesize instances, kind:count (knapsack, subsetsum, loadbalance, ilp)",
    )
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--out-dir", default=".", help="where report files land")
    p.add_argument("--mode", choices=("static", "kernel"), default="static")
    p.add_argument("--u", type=int, help="solution box radius for static ilp kinds")
    p.add_argument("--verify", action="store_true", help="oracle-check each reduction")
    common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
