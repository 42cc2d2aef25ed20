"""``metasense`` command line.

Exit status: 0 success, 1 validation failure, 2 usage error. Stochastic
subcommands take ``--seed``; its default comes from ``METASENSE_SEED``
(else 0).
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .confidence import canonical_spec, d_from_auc
from .empirical import LogFormatError, load_log, report
from .numerics import logit
from .scenario import (
    DEFAULT_MIN_MARGIN,
    find_inversions,
    inversions_to_json,
    parse_range,
    sweep_grid,
    write_grid_csv,
)
from .simulator import HumanPolicy, replicate_experiment_conditions, run_trials
from .team import (
    HumanSpec,
    combined_accuracy,
    combined_constant_integral,
    combined_constant_value,
    combined_variable_approx,
    combined_variable_exact,
)

SEED_ENV = "METASENSE_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in the open interval (0, 1)")
    return v


def _range(text: str) -> np.ndarray:
    try:
        return parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_ai(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--theta", type=_probability, required=required, help="AI accuracy theta_m in (0, 1)")
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--auc", type=float, help="AI meta-AUC in [0.5, 1)")
    g.add_argument("--d", type=float, help="AI Cohen's d >= 0")


def _add_human(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c-h", type=_probability, help="constant human confidence in (0, 1)")
    p.add_argument("--mu-h", type=float, help="logit-space mean of a logit-normal human")
    p.add_argument("--sigma-h", type=float, help="logit-space SD of a logit-normal human (> 0)")


def _add_grid(p: argparse.ArgumentParser) -> None:
    _add_human(p)
    p.add_argument("--theta-range", type=_range, required=True, metavar="A:B:N", help="AI accuracy axis")
    p.add_argument("--auc-range", type=_range, required=True, metavar="A:B:N", help="meta-AUC axis")
    p.add_argument("--method", choices=("closed", "quadrature"), default="closed")
    p.add_argument("--refine", type=int, default=1, help="insert REFINE-1 points between grid nodes")
    p.add_argument("--workers", type=int, default=1)


def _ai_d(args) -> float:
    if args.d is not None:
        if not (args.d >= 0 and math.isfinite(args.d)):
            raise UsageError(f"--d must be finite and >= 0, got {args.d}")
        return float(args.d)
    try:
        return d_from_auc(args.auc)
    except ValueError as exc:
        raise UsageError(f"--auc: {exc}") from None


def _human(args, allow_missing: bool = False) -> Optional[HumanSpec]:
    has_const = args.c_h is not None
    has_ln = args.mu_h is not None or args.sigma_h is not None
    if has_const and has_ln:
        raise UsageError("give either --c-h or --mu-h/--sigma-h, not both")
    if has_const:
        return HumanSpec.constant(args.c_h)
    if has_ln:
        if args.mu_h is None or args.sigma_h is None:
            raise UsageError("a logit-normal human needs both --mu-h and --sigma-h")
        if not args.sigma_h > 0:
            raise UsageError("--sigma-h must be positive")
        return HumanSpec.logit_normal(args.mu_h, args.sigma_h)
    if allow_missing:
        return None
    raise UsageError("a human spec is required: --c-h or --mu-h/--sigma-h")


def _grid_cells(args):
    human = _human(args)
    if np.any(args.auc_range < 0.5) or np.any(args.auc_range >= 1.0):
        raise UsageError("--auc-range must stay within [0.5, 1)")
    if np.any(args.theta_range <= 0) or np.any(args.theta_range >= 1):
        raise UsageError("--theta-range must stay within (0, 1)")
    if args.refine < 1:
        raise UsageError("--refine must be >= 1")
    method = "closed-form" if args.method == "closed" else "quadrature"
    return sweep_grid(
        human, args.theta_range, args.auc_range, method, refine=args.refine, workers=args.workers
    )


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- subcommands -----------------------------------------------------------


def cmd_expected_utility(args) -> int:
    d = _ai_d(args)
    human = _human(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.method == "approx":
        if human.is_constant:
            raise UsageError("--method approx applies to a logit-normal human")
        if d == 0:
            raise UsageError("--method approx needs d > 0")
        res = combined_variable_approx(human, args.theta, d)
    else:
        method = {"closed": "closed-form", "quadrature": "quadrature", "mc": "monte-carlo"}[args.method]
        res = combined_accuracy(human, args.theta, d, method, n=args.n, seed=args.seed)
    print(json.dumps({"combined": res.value, "method": res.method, "error_bound": res.error_bound}))
    return 0


def cmd_grid(args) -> int:
    import io

    buf = io.StringIO()
    write_grid_csv(_grid_cells(args), buf)
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_invert(args) -> int:
    if args.min_margin < 0:
        raise UsageError("--min-margin must be >= 0")
    pairs = find_inversions(_grid_cells(args), args.min_margin)
    _emit(inversions_to_json(pairs, indent=2) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.policy == "threshold":
        if args.threshold is None or not 0 < args.threshold < 1:
            raise UsageError("--policy threshold needs --threshold in (0, 1)")
        policy = HumanPolicy.fixed_threshold(args.threshold)
    else:
        if args.threshold is not None:
            raise UsageError("--threshold only applies to --policy threshold")
        policy = HumanPolicy({"ideal": "ideal-observer", "self": "always-self", "ai": "always-ai"}[args.policy])

    if args.table1:
        if args.theta is not None or args.auc is not None or args.d is not None or args.c_h is not None:
            raise UsageError("--table1 fixes the AI conditions; drop --theta/--auc/--d/--c-h")
        if args.trials_out:
            raise UsageError("--trials-out is not available with --table1")
        sigma_h = 0.5 if args.sigma_h is None else args.sigma_h
        mu_h = float(logit(0.55)) if args.mu_h is None else args.mu_h
        if not sigma_h > 0:
            raise UsageError("--sigma-h must be positive")
        summaries = replicate_experiment_conditions(
            args.seed, args.n, mu_h=mu_h, sigma_h=sigma_h, policy=policy, workers=args.workers
        )
        print(json.dumps([s.to_dict() for s in summaries], indent=2))
        return 0

    if args.theta is None or (args.auc is None and args.d is None):
        raise UsageError("simulate needs --theta and --auc/--d (or --table1)")
    ai = canonical_spec(args.theta, _ai_d(args))
    human = _human(args)
    log, summary = run_trials(
        ai, human, policy, args.n, args.seed, workers=args.workers, keep_trials=bool(args.trials_out)
    )
    if args.trials_out:
        with open(args.trials_out, "w", newline="") as fh:
            log.to_csv(fh)
    print(summary.to_json(indent=2))
    return 0


def cmd_analyze(args) -> int:
    try:
        log = load_log(args.log, args.format)
    except (LogFormatError, OSError) as exc:
        raise UsageError(f"{args.log}: {exc}") from None
    print(report(log).to_json(indent=2))
    return 0


def cmd_validate(args) -> int:
    """Sweep the documented grid and compare every route against its reference."""
    for name in ("human_acc_range", "theta_range", "c_h_range"):
        vals = getattr(args, name)
        if np.any(vals <= 0) or np.any(vals >= 1):
            raise UsageError(f"--{name.replace('_', '-')} must stay within (0, 1)")
    if np.any(args.auc_range < 0.5) or np.any(args.auc_range >= 1.0):
        raise UsageError("--auc-range must stay within [0.5, 1)")
    if np.any(args.sigma_h_range <= 0):
        raise UsageError("--sigma-h-range must be positive")
    results = {}
    failed = False

    # 1. bivariate-normal approximation vs quadrature, logit-normal human
    worst = None
    count = 0
    for acc_h, s_h, th, auc in itertools.product(
        args.human_acc_range, args.sigma_h_range, args.theta_range, args.auc_range
    ):
        d = d_from_auc(float(auc))
        human = HumanSpec.logit_normal(float(logit(acc_h)), float(s_h))
        exact = combined_variable_exact(human, float(th), d).value
        approx = combined_variable_approx(human, float(th), d).value
        rel = abs(approx - exact) / exact
        count += 1
        if worst is None or rel > worst["rel_error"]:
            worst = {"mu_h": human.mu_h, "sigma_h": human.sigma_h, "theta_m": float(th), "auc": float(auc),
                     "quadrature": exact, "approx": approx, "rel_error": rel}
    ok = worst["rel_error"] <= args.tol_approx
    results["approx_vs_quadrature"] = {"cells": count, "tolerance": args.tol_approx, "pass": ok, "worst": worst}
    failed |= not ok

    # 2. constant-human closed form vs direct quadrature of the reliance rule
    worst = None
    count = 0
    for c_h, th, auc in itertools.product(args.c_h_range, args.theta_range, args.auc_range):
        d = d_from_auc(float(auc))
        closed = float(combined_constant_value(float(c_h), float(th), d))
        quad = combined_constant_integral(float(c_h), canonical_spec(float(th), d)).value
        err = abs(closed - quad)
        count += 1
        if worst is None or err > worst["abs_error"]:
            worst = {"c_h": float(c_h), "theta_m": float(th), "auc": float(auc),
                     "closed": closed, "quadrature": quad, "abs_error": err}
    ok = worst["abs_error"] <= args.tol_closed
    results["closed_vs_quadrature"] = {"cells": count, "tolerance": args.tol_closed, "pass": ok, "worst": worst}
    failed |= not ok

    # 3. optional closed form vs simulation
    if args.mc_trials:
        worst = None
        count = 0
        for i, (c_h, th, auc) in enumerate(itertools.product(args.c_h_range, args.theta_range, args.auc_range)):
            d = d_from_auc(float(auc))
            closed = float(combined_constant_value(float(c_h), float(th), d))
            _, s = run_trials(canonical_spec(float(th), d), HumanSpec.constant(float(c_h)), HumanPolicy(),
                              args.mc_trials, args.seed, stream=(i,), keep_trials=False)
            z = abs(s.accuracy_after - closed) / max(s.standard_error, 1e-300)
            count += 1
            if worst is None or z > worst["z"]:
                worst = {"c_h": float(c_h), "theta_m": float(th), "auc": float(auc),
                         "closed": closed, "simulated": s.accuracy_after, "se": s.standard_error, "z": z}
        ok = worst["z"] <= args.mc_z
        results["closed_vs_simulation"] = {"cells": count, "z_limit": args.mc_z, "pass": ok, "worst": worst}
        failed |= not ok

    print(json.dumps(results, indent=2))
    if failed:
        for name, r in results.items():
            if not r["pass"]:
                print(f"FAIL {name}: worst cell {json.dumps(r['worst'])}", file=sys.stderr)
        return 1
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metasense",
        description="Human-AI team accuracy as a function of AI accuracy and metacognitive sensitivity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expected-utility", help="combined accuracy for one AI and one human")
    _add_ai(p)
    _add_human(p)
    p.add_argument("--method", choices=("closed", "approx", "quadrature", "mc"), default="closed")
    p.add_argument("--n", type=int, default=1_000_000, help="trials for --method mc")
    p.add_argument("--seed", type=int, default=None, help=f"seed for --method mc (default ${SEED_ENV} or 0)")
    p.set_defaults(func=cmd_expected_utility)

    p = sub.add_parser("grid", help="combined accuracy over a (theta_m, AUC) grid, as CSV")
    _add_grid(p)
    p.add_argument("--out", default="-", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("invert", help="inversion pairs on a grid, as JSON")
    _add_grid(p)
    p.add_argument("--min-margin", type=float, default=DEFAULT_MIN_MARGIN)
    p.add_argument("--out", default="-", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("simulate", help="trial-level Monte Carlo, summary as JSON")
    _add_ai(p, required=False)
    _add_human(p)
    p.add_argument("--table1", action="store_true", help="simulate the five study assistants A-E")
    p.add_argument("--policy", choices=("ideal", "threshold", "self", "ai"), default="ideal")
    p.add_argument("--threshold", type=float, help="AI confidence threshold for --policy threshold")
    p.add_argument("--n", type=int, default=100_000, help="trials (per condition with --table1)")
    p.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trials-out", help="write per-trial CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="accuracy, Cohen's d and meta-AUC of a prediction log")
    p.add_argument("--log", required=True, help="CSV or JSON log with correct/confidence fields")
    p.add_argument("--format", choices=("csv", "json"), help="default: from the file suffix")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("validate", help="check analytic routes against quadrature (and simulation)")
    p.add_argument("--tol-approx", type=float, default=0.01, help="relative tolerance, bivariate-normal form")
    p.add_argument("--tol-closed", type=float, default=1e-8, help="absolute tolerance, constant-human form")
    p.add_argument("--human-acc-range", type=_range, default=parse_range("0.2:0.9:5"), metavar="A:B:N",
                   help="sigmoid(mu_h) axis")
    p.add_argument("--sigma-h-range", type=_range, default=parse_range("0.1:1.5:5"), metavar="A:B:N")
    p.add_argument("--theta-range", type=_range, default=parse_range("0.3:0.9:5"), metavar="A:B:N")
    p.add_argument("--auc-range", type=_range, default=parse_range("0.55:0.995:5"), metavar="A:B:N")
    p.add_argument("--c-h-range", type=_range, default=parse_range("0.1:0.9:5"), metavar="A:B:N",
                   help="constant human confidence axis")
    p.add_argument("--mc-trials", type=int, default=0, help="also simulate each constant-human cell")
    p.add_argument("--mc-z", type=float, default=3.0, help="max |simulated - closed| in standard errors")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = _default_seed()
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
