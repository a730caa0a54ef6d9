"""Command-line harness: ``infsieve <subcommand> [flags]``.

Exit codes: 0 ok, 1 nothing found, 2 bad flags or input, 3 oracle refusal.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import geometry
from .errors import NotFound, OracleRefusal
from .heuristic import GAMMA, GAMMA1, GAMMA2, HeuristicConfig, default_sample_count, run_nv_svp, run_nv_svp_two_level
from .instances import KINDS, InstanceSpec, generate
from .lattice import Basis, norm, parse_basis, scale_to_window
from .oracle import MAX_DIM, brute_cvp, brute_svp
from .provable import (
    GAMMA_EXACT,
    XI_EXACT,
    candidate_guesses,
    desk_sample_count,
    exact_svp_auto_run,
    iteration_count,
    lemma_sample_count,
    run_approx_cvp,
)
from .report import decimal_str, dumps, emit_volume_table, make_report, rational_str

ALGORITHMS = ("svp-exact", "svp-exact-bday", "svp-approx", "cvp-approx", "svp-nv", "svp-nv2")
LEMMA_N_LIMIT = 2_000_000


class UsageError(ValueError):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None


def _vector(text: str) -> tuple:
    try:
        return tuple(Fraction(x) for x in text.replace(",", " ").split())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad vector {text!r}") from None


# --------------------------------------------------------------------------
# argument parsing

def _instance_flags(p):
    p.add_argument("--basis", metavar="FILE", help="basis file (otherwise one is generated)")
    p.add_argument("--kind", choices=KINDS, default="random-integer")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--entry-bound", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)


def _algorithm_flags(p):
    p.add_argument("--gamma", type=_rational)
    p.add_argument("--xi", type=_rational)
    p.add_argument("--tau", type=_rational)
    p.add_argument("--alpha", type=_rational)
    p.add_argument("--gamma1", type=_rational)
    p.add_argument("--gamma2", type=_rational)
    p.add_argument("--N", type=int)
    p.add_argument("--paper-n", action="store_true", help="use the sample count of the success lemma")
    p.add_argument("--target", type=_vector, help="CVP target, e.g. '2/5,2/5'")
    p.add_argument("--max-iterations", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infsieve", description="l-infinity lattice sieves")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ALGORITHMS:
        p = sub.add_parser(name, help=f"run {name} once")
        _instance_flags(p)
        _algorithm_flags(p)
        p.add_argument("--check", action="store_true", help="compare against the brute-force oracle")
    p = sub.add_parser("oracle", help="brute-force SVP, or CVP with --target")
    _instance_flags(p)
    p.add_argument("--target", type=_vector)
    p = sub.add_parser("constants", help="complexity constants")
    p.add_argument("--gamma", type=_rational)
    p.add_argument("--xi", type=_rational)
    p.add_argument("--birthday", action="store_true")
    p.add_argument("--two-level", action="store_true")
    p.add_argument("--gamma1", type=_rational)
    p.add_argument("--gamma2", type=_rational)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--text", action="store_true")
    p = sub.add_parser("volume", help="closed form vs Monte Carlo table (CSV)")
    p.add_argument("--n", type=_int_list, default=[2, 4, 6])
    p.add_argument("--gamma", type=_float_list, default=[0.9, 0.97])
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=geometry.DEFAULT_SEED)
    p.add_argument("--csv", action="store_true", default=True)
    p = sub.add_parser("gen", help="print a generated basis")
    _instance_flags(p)
    p = sub.add_parser("bench", help="batch trials against the oracle (JSON lines)")
    p.add_argument("--alg", choices=ALGORITHMS, required=True)
    p.add_argument("--kind", choices=KINDS, default="random-integer")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--entry-bound", type=int, default=10)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _algorithm_flags(p)
    return ap


# --------------------------------------------------------------------------
# running algorithms

def _load_basis(args) -> Basis:
    if getattr(args, "basis", None):
        with open(args.basis) as fh:
            return parse_basis(fh.read())
    return generate(InstanceSpec(args.kind, args.n, args.entry_bound, args.seed))


def _pick(value, default):
    return default if value is None else value


def _exact_sample_count(B: Basis, gamma, xi, variant: str) -> int:
    g = candidate_guesses(B)[0]
    scaled, _ = scale_to_window(B, g)
    k = iteration_count(gamma, xi, B.n, B.n * scaled.max_column_norm())
    N = lemma_sample_count(B.n, gamma, xi, k, variant)
    if N > LEMMA_N_LIMIT:
        raise UsageError(f"the lemma asks for N = {N}, above the limit {LEMMA_N_LIMIT}")
    return N


def run_algorithm(alg: str, B: Basis, args, seed: int, target=None, check: bool = False) -> dict:
    """Run one algorithm and build its report; NotFound becomes a report with success False."""
    n = B.n
    params: dict = {}
    oracle_norm = None
    extra: dict = {}
    t0 = time.perf_counter()
    vector, value, iterations, centres = None, None, 0, []
    error = None
    try:
        if alg in ("svp-exact", "svp-exact-bday", "svp-approx"):
            approx = alg == "svp-approx"
            gamma = _pick(args.gamma, Fraction(2, 3) if approx else GAMMA_EXACT)
            xi = _pick(args.xi, Fraction(1) if approx else XI_EXACT)
            variant = "approx" if approx else ("birthday" if alg == "svp-exact-bday" else "exact")
            if args.paper_n:
                N = _exact_sample_count(B, gamma, xi, variant)
            else:
                N = _pick(args.N, desk_sample_count(n, gamma, xi))
            params = {"gamma": gamma, "xi": xi, "N": N, "birthday": alg == "svp-exact-bday"}
            res = exact_svp_auto_run(B, gamma, xi, N, seed, birthday=alg == "svp-exact-bday", approx=approx)
            vector, value = res.vector, res.norm
            run = dict((g, r) for g, r in res.runs)[res.guess]
            iterations, centres = run.iterations, run.centre_counts
            params["lambda_guess"] = res.guess
        elif alg == "cvp-approx":
            tau = _pick(args.tau, Fraction(2))
            gamma = _pick(args.gamma, Fraction(1, 2))
            xi = _pick(args.xi, tau / 3)
            alpha = _pick(args.alpha, Fraction(1, 4))
            N = _pick(args.N, 1000)
            if target is None:
                raise UsageError("cvp-approx needs --target")
            if len(target) != n:
                raise UsageError("target dimension does not match the basis")
            params = {"tau": tau, "gamma": gamma, "xi": xi, "alpha": alpha, "N": N}
            res = run_approx_cvp(B, target, tau, gamma, xi, alpha, N, seed)
            extra["target"] = list(target)
            iterations = len(res.candidates)
            if res.vector is None:
                raise NotFound("no survivor with a nonzero last coordinate")
            vector, value = res.vector, res.distance
        else:
            two = alg == "svp-nv2"
            cfg = HeuristicConfig(
                gamma=float(_pick(args.gamma, GAMMA)),
                gamma1=float(_pick(args.gamma1, GAMMA1)),
                gamma2=float(_pick(args.gamma2, GAMMA2)),
                N=_pick(args.N, default_sample_count(n)),
                seed=seed,
                max_iterations=args.max_iterations,
            )
            params = {"gamma1": cfg.gamma1, "gamma2": cfg.gamma2} if two else {"gamma": cfg.gamma}
            params["N"] = cfg.N
            res = (run_nv_svp_two_level if two else run_nv_svp)(B, cfg)
            vector, value = res.vector, res.norm
            iterations = res.iterations
            centres = [t["centres"] for t in res.trace]
    except NotFound as exc:
        error = str(exc)
    wall = int((time.perf_counter() - t0) * 1000)
    success = None
    if check:
        if alg == "cvp-approx":
            _, oracle_norm = brute_cvp(B, target)
        else:
            _, oracle_norm = brute_svp(B)
        if value is None:
            success = False
        elif alg == "svp-approx":
            g, x = Fraction(params["gamma"]), Fraction(params["xi"])
            tau = x * (2 - g) / (1 - g)
            success = value <= tau * (1 + Fraction(2, n)) * oracle_norm
        elif alg == "cvp-approx":
            success = value <= 2 * Fraction(params["tau"]) * oracle_norm
        else:
            success = value == oracle_norm
    rep = make_report(alg, params, B, vector, seed, oracle_norm, success, iterations, centres, wall, **extra)
    if value is not None and alg == "cvp-approx":
        rep["output_norm"], rep["output_norm_decimal"] = rational_str(value), decimal_str(value)
    if error is not None:
        rep["error"] = error
    return rep


def _bench_trial(payload):
    alg, kind, n, bound, ss, args = payload
    inst_seed, alg_seed = (int(x) for x in ss.generate_state(2, np.uint32))
    B = generate(InstanceSpec(kind, n, bound, inst_seed))
    target = None
    if alg == "cvp-approx":
        rng = np.random.default_rng(inst_seed)
        target = args.target or tuple(Fraction(int(x), 7) for x in rng.integers(-7 * bound, 7 * bound + 1, size=n))
    return run_algorithm(alg, B, args, alg_seed, target, check=True)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("INF_SIEVE_THREADS", "1")))
    except ValueError:
        return 1


def cmd_bench(args, out) -> int:
    if args.n > MAX_DIM:
        raise OracleRefusal(f"bench compares against the oracle, which refuses n={args.n} > {MAX_DIM}")
    if args.trials < 1:
        raise UsageError("trials must be positive")
    seeds = np.random.SeedSequence(args.seed).spawn(args.trials)
    payloads = [(args.alg, args.kind, args.n, args.entry_bound, ss, args) for ss in seeds]
    workers = min(_workers(), args.trials)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            reports = list(pool.map(_bench_trial, payloads))
    else:
        reports = [_bench_trial(p) for p in payloads]
    wins = 0
    for i, rep in enumerate(reports):
        rep["trial"] = i
        wins += bool(rep["success"])
        print(dumps(rep), file=out)
    summary = {
        "summary": True,
        "algorithm": args.alg,
        "kind": args.kind,
        "n": args.n,
        "trials": args.trials,
        "successes": wins,
        "not_found": sum(1 for r in reports if r["output_vector"] is None),
        "success_rate": wins / args.trials,
        "seed": args.seed,
    }
    print(json.dumps(summary, sort_keys=True), file=out)
    return 0


def cmd_constants(args, out) -> int:
    table: dict = {}
    if args.two_level:
        if args.gamma1 is None or args.gamma2 is None:
            raise UsageError("--two-level needs --gamma1 and --gamma2")
        table["two_level"] = geometry.two_level_constants(args.gamma1, args.gamma2).as_dict()
    else:
        if args.gamma is None:
            raise UsageError("constants needs --gamma (or --two-level)")
        g = args.gamma
        if args.xi is not None:
            table["provable"] = geometry.provable_constants(g, args.xi, args.birthday).as_dict()
            table["provable"]["birthday"] = args.birthday
            tau, expo = geometry.approx_constants(g, args.xi)
            table["approximate"] = {"tau": tau, "exponent": expo}
        if Fraction(1, 2) < g <= 1:
            table["heuristic"] = geometry.heuristic_constants(g).as_dict()
        if not table:
            raise UsageError("no constants are defined for these parameters")
    params = {k: (str(v) if isinstance(v, Fraction) else v)
              for k, v in (("gamma", args.gamma), ("xi", args.xi), ("gamma1", args.gamma1), ("gamma2", args.gamma2))
              if v is not None}
    if args.text:
        for section, vals in table.items():
            print(f"[{section}]", file=out)
            for k, v in vals.items():
                if v is not None:
                    print(f"  {k:<10} {v:.6f}" if isinstance(v, float) else f"  {k:<10} {v}", file=out)
    else:
        print(json.dumps({"params": params, **table}, sort_keys=True), file=out)
    return 0


def cmd_oracle(args, out) -> int:
    B = _load_basis(args)
    if args.target is not None:
        if len(args.target) != B.n:
            raise UsageError("target dimension does not match the basis")
        z, dist = brute_cvp(B, args.target)
        res = {"closest": [rational_str(x) for x in z], "distance": rational_str(dist),
               "distance_decimal": decimal_str(dist)}
    else:
        v, nv = brute_svp(B)
        res = {"vector": [rational_str(x) for x in v], "norm": rational_str(nv), "norm_decimal": decimal_str(nv)}
    print(json.dumps(res, sort_keys=True), file=out)
    return 0


def cmd_volume(args, out) -> int:
    pairs = []
    if args.gamma1 is not None or args.gamma2 is not None:
        if args.gamma1 is None or args.gamma2 is None:
            raise UsageError("two-level rows need both --gamma1 and --gamma2")
        pairs.append((args.gamma1, args.gamma2))
    out.write(emit_volume_table(args.n, args.gamma, args.samples, args.seed, pairs))
    return 0


def dispatch(args, out=None) -> int:
    out = sys.stdout if out is None else out
    cmd = args.command
    if cmd == "constants":
        return cmd_constants(args, out)
    if cmd == "volume":
        return cmd_volume(args, out)
    if cmd == "oracle":
        return cmd_oracle(args, out)
    if cmd == "gen":
        out.write(_load_basis(args).to_text())
        return 0
    if cmd == "bench":
        return cmd_bench(args, out)
    B = _load_basis(args)
    if args.check and B.n > MAX_DIM:
        raise OracleRefusal(f"oracle refuses n={B.n} > {MAX_DIM}")
    rep = run_algorithm(cmd, B, args, args.seed, args.target, args.check)
    print(dumps(rep), file=out)
    return 1 if rep["output_vector"] is None else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return dispatch(args)
    except OracleRefusal as exc:
        print(f"infsieve: {exc}", file=sys.stderr)
        return 3
    except NotFound as exc:
        print(f"infsieve: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"infsieve: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
