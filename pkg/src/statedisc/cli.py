"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 resource cap exceeded, 4 stale policy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path
from typing import Sequence

from . import bounds as bnd
from .dp import (
    DEFAULT_Q_P,
    DEFAULT_Q_PHI,
    MODES,
    build_risk_tables,
    evaluate,
    load_tables,
    next_action,
    policy_map,
    save_tables,
)
from .errors import ParameterError, PolicyFormatError, ResourceError, StalePolicyError
from .experiments import FIGURE_IDS, ExperimentConfig, emit_csv, run_experiment
from .greedy import plateau_bound, run_lg, run_mlg
from .measurements import qubit_action_space, qutrit_action_spaces
from .problem import DiscriminationProblem, load_problem
from .quantum import DEFAULT_DIM_CAP

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE, EXIT_STALE = 0, 2, 3, 4
_FIGURE_ALIASES = {fid.split("_")[0]: fid for fid in FIGURE_IDS if fid.startswith("fig")}


def _emit(args, text: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _action_space(problem: DiscriminationProblem, args):
    if problem.dim == 2:
        return qubit_action_space(args.q_phi)
    ternary, binary = qutrit_action_spaces(args.r_vec, args.q_quant)
    return binary if args.binary else ternary


def _measurement_summary(m) -> list:
    return [[round(float(x), 12) for x in p.ravel()] for p in m.projectors]


def _first_action(tables, problem: DiscriminationProblem) -> dict:
    k, meas = next_action(tables, tables.full_mask, problem.prior_q, problem)
    return {"subsystem": k, "projectors": _measurement_summary(meas)}


def _dp_mode(strategy: str) -> str:
    return {"order-mlg": "order_opt_mlg", "moody": "moody_best"}[strategy]


def cmd_discriminate(args) -> int:
    problem = load_problem(args.problem)
    config = {"strategy": args.strategy, "N": problem.n, "d": problem.dim, "prior_q": problem.prior_q}
    if args.strategy in ("lg", "mlg"):
        ev = (run_lg if args.strategy == "lg" else run_mlg)(problem)
        payload = {
            "config": config,
            "success_probability": ev.success_probability,
            "per_round_error": ev.per_round_error,
            "prefix_success": ev.prefix_success.tolist(),
            "order": list(ev.order),
        }
        lines = [f"strategy={args.strategy} N={problem.n} d={problem.dim} q={problem.prior_q}"]
        lines.append(f"success probability: {ev.success_probability:.12f}")
        for j, (e, s) in enumerate(zip(ev.per_round_error, ev.prefix_success[1:]), start=1):
            lines.append(f"  round {j}: error along most likely path {e:.6f}, success after round {s:.6f}")
        _emit(args, "\n".join(lines), payload)
        return EXIT_OK
    mode = _dp_mode(args.strategy)
    actions = _action_space(problem, args) if mode == "moody_best" else None
    config.update({"mode": mode, "Q_p": args.q_p})
    if actions is not None:
        config["action_space"] = actions.to_descriptor()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        tables = build_risk_tables(problem, mode, actions, args.q_p)
    success = evaluate(tables, problem.prior_q)
    first = _first_action(tables, problem)
    payload = {"config": config, "success_probability": success, "first_action": first}
    text = (
        f"strategy={args.strategy} mode={mode} N={problem.n} d={problem.dim} q={problem.prior_q} Q_p={args.q_p}\n"
        f"success probability: {success:.12f}\n"
        f"first measured subsystem: {first['subsystem']}"
    )
    _emit(args, text, payload)
    return EXIT_OK


def _resolve_figure(name: str) -> str:
    fid = _FIGURE_ALIASES.get(name, name)
    if fid not in FIGURE_IDS:
        raise ParameterError(f"unknown figure id {name!r}; expected one of {FIGURE_IDS}")
    return fid


def cmd_figure(args) -> int:
    fid = _resolve_figure(args.figure_id)
    overrides = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {args.config}: {exc}") from None
        doc = {k: v for k, v in doc.items() if k not in ("figure_id", "paper_scale")}
        overrides.update(doc)
    overrides.update({"seed": args.seed, "n_trial": args.n_trial, "threads": args.threads})
    if args.distinct:
        overrides["distinct"] = True
    cfg = ExperimentConfig.for_figure(fid, args.paper_scale, **overrides)
    records = run_experiment(cfg)
    out = Path(args.out) if args.out else Path(f"{fid}.csv")
    comments = [cfg.describe()]
    if not cfg.paper_scale and fid in ("fig4_order_diff", "fig5_qutrit_succ", "fig6_qutrit_diff"):
        comments.append("scaled-down defaults; rerun with --paper-scale for the full study")
    emit_csv(records, out, comments)
    payload = {"config": cfg.to_dict(), "out": str(out), "records": len(records)}
    _emit(args, f"{cfg.describe()}\nwrote {len(records)} records to {out}", payload)
    return EXIT_OK


def cmd_policy_build(args) -> int:
    problem = load_problem(args.problem)
    mode = args.mode
    actions = _action_space(problem, args) if mode in ("moody_best", "moody_worst") else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        tables = build_risk_tables(problem, mode, actions, args.q_p)
    save_tables(tables, args.out)
    size = os.path.getsize(args.out)
    payload = {
        "mode": mode,
        "N": problem.n,
        "Q_p": args.q_p,
        "out": args.out,
        "bytes": size,
        "keyed_by_size": tables.keyed_by_size,
    }
    _emit(args, f"mode={mode} N={problem.n} Q_p={args.q_p} keyed_by_size={tables.keyed_by_size}\nwrote {args.out} ({size} bytes)", payload)
    return EXIT_OK


def cmd_policy_eval(args) -> int:
    problem = load_problem(args.problem)
    tables = load_tables(args.policy, problem)
    q = problem.prior_q if args.q is None else args.q
    success = evaluate(tables, q)
    _emit(args, f"mode={tables.mode} N={tables.n} Q_p={tables.q_p} q={q}\nsuccess probability: {success!r}", {"mode": tables.mode, "q": q, "success_probability": success})
    return EXIT_OK


def cmd_policy_inspect(args) -> int:
    problem = load_problem(args.problem) if args.problem else None
    tables = load_tables(args.policy, problem)
    rows = policy_map(tables)
    step = max(1, args.stride)
    shown = rows[::step]
    lines = [f"mode={tables.mode} N={tables.n} Q_p={tables.q_p} (first action over the belief grid)", "p,subsystem,action"]
    lines += [f"{p:.6g},{k},{a}" for p, k, a in shown]
    payload = {"mode": tables.mode, "N": tables.n, "Q_p": tables.q_p, "map": [list(r) for r in shown]}
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK


def cmd_bounds(args) -> int:
    problem = load_problem(args.problem)
    q = problem.prior_q if args.q is None else args.q
    reports = []
    try:
        reports.append(bnd.BoundReport(bnd.problem_joint_success(problem, q, dim_cap=args.dim_cap), "joint_helstrom"))
    except ResourceError as exc:
        reports.append(bnd.BoundReport(0.0, "joint_helstrom", False, f"omitted: {exc}"))
    if problem.pure:
        reports.append(bnd.BoundReport(bnd.theorem1(q, bnd.problem_overlap_angles(problem)), "theorem1"))
    else:
        reports.append(bnd.BoundReport(0.0, "theorem1", False, "requires pure states"))
    if problem.gammas:
        for j, (gp, gm) in enumerate(problem.gammas):
            reports.append(
                bnd.BoundReport(
                    bnd.corollary1_bound(q, gp, gm), "corollary1", True, f"subsystem {j}, gamma_min={min(gp, gm):g}"
                )
            )
        flat = {g for pair in problem.gammas for g in pair}
        if len(flat) == 1:
            g = flat.pop()
            reports.append(bnd.BoundReport(max(q, 1.0 - q, plateau_bound(g)), "plateau", True, f"LG ceiling, gamma={g:g}"))
        else:
            reports.append(bnd.BoundReport(0.0, "plateau", False, "needs one gamma shared by every subsystem"))
    else:
        reports.append(bnd.BoundReport(0.0, "corollary1", False, "depolarizing parameters unknown"))
        reports.append(bnd.BoundReport(0.0, "plateau", False, "depolarizing parameters unknown"))
    lines = [f"N={problem.n} d={problem.dim} q={q}"]
    for r in reports:
        val = f"{r.value:.12f}" if r.applicable else "n/a"
        note = f"  ({r.reason})" if r.reason else ""
        lines.append(f"{r.kind:>15}: {val}{note}")
    payload = {
        "config": {"N": problem.n, "d": problem.dim, "q": q},
        "bounds": [{"kind": r.kind, "value": r.value if r.applicable else None, "applicable": r.applicable, "reason": r.reason} for r in reports],
    }
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK


def _add_action_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q-p", type=int, default=DEFAULT_Q_P, help="belief grid size")
    p.add_argument("--q-phi", type=int, default=DEFAULT_Q_PHI, help="qubit measurement angles")
    p.add_argument("--r-vec", type=int, nargs="*", default=[2], help="qutrit icosphere subdivisions")
    p.add_argument("--q-quant", type=int, default=4, help="qutrit rotations per vertex")
    p.add_argument("--binary", action="store_true", help="qutrit: restrict to binary measurements")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes")
    parser = argparse.ArgumentParser(prog="statedisc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discriminate", parents=[common], help="success probability of one strategy")
    p.add_argument("problem")
    p.add_argument("--strategy", choices=("lg", "mlg", "order-mlg", "moody"), default="lg")
    _add_action_flags(p)
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("figure", parents=[common], help="regenerate figure data as CSV")
    p.add_argument("figure_id", help=f"one of {', '.join(FIGURE_IDS)} (fig1..fig6 accepted)")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-trial", type=int)
    p.add_argument("--paper-scale", action="store_true")
    p.add_argument("--distinct", action="store_true", help="fig1/fig2: independent pair per subsystem")
    p.add_argument("--config", help="JSON document with ExperimentConfig fields")
    p.set_defaults(func=cmd_figure)

    pol = sub.add_parser("policy", help="build, evaluate or inspect DP tables")
    psub = pol.add_subparsers(dest="policy_command", required=True)
    p = psub.add_parser("build", parents=[common])
    p.add_argument("problem")
    p.add_argument("--mode", choices=MODES, default="moody_best")
    p.add_argument("--out", required=True)
    _add_action_flags(p)
    p.set_defaults(func=cmd_policy_build)
    p = psub.add_parser("eval", parents=[common])
    p.add_argument("policy")
    p.add_argument("problem")
    p.add_argument("--q", type=float)
    p.set_defaults(func=cmd_policy_eval)
    p = psub.add_parser("inspect", parents=[common])
    p.add_argument("policy")
    p.add_argument("--problem", help="verify the policy against this problem")
    p.add_argument("--stride", type=int, default=1, help="print every k-th grid point")
    p.set_defaults(func=cmd_policy_inspect)

    p = sub.add_parser("bounds", parents=[common], help="reference values and bounds")
    p.add_argument("problem")
    p.add_argument("--q", type=float)
    p.add_argument("--dim-cap", type=int, default=DEFAULT_DIM_CAP)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StalePolicyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STALE
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ParameterError, PolicyFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
