"""Command-line driver.

    drgame run --scenario builtin:ieee34-s1 --mode grid --out results/
    drgame validate my_case.json
    drgame oracle --scenario builtin:ieee34-s1 --mode paper
    drgame compare builtin:ieee34-s1 builtin:ieee34-s2
    drgame export builtin:ieee69-s1 > ieee69.json

Scenarios are file paths or ``builtin:NAME``. Exit status is 0 on success,
1 when validation or an oracle check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from drgame import report
from drgame.eu import best_response, brute_force_best_response
from drgame.errors import DomainError, NumericError, ScenarioError
from drgame.model import SolveMode, validate_scenario
from drgame.scenario_io import load_scenario, save_scenario
from drgame.uc import run_event


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


class _UsageError(Exception):
    pass


def _override(scenario, args):
    changes = {}
    if getattr(args, "step", None) is not None:
        changes["price_step"] = args.step
    if getattr(args, "epsilon", None) is not None:
        changes["epsilon"] = args.epsilon
    if getattr(args, "max_price", None) is not None:
        changes["max_price"] = args.max_price
    if getattr(args, "mode", None) is not None:
        changes["mode"] = SolveMode(args.mode)
    if getattr(args, "faithful_stop", False):
        changes["faithful_stop"] = True
    if not changes:
        return scenario
    return dataclasses.replace(scenario, algorithm=dataclasses.replace(scenario.algorithm, **changes))


def _load(source, args=None):
    scenario = load_scenario(source, validate=False)
    if args is not None:
        scenario = _override(scenario, args)
    issues = validate_scenario(scenario)
    if issues:
        raise ScenarioError(f"scenario {scenario.name!r} is invalid", [str(i) for i in issues])
    return scenario


def _summary(result) -> str:
    lines = [f"{result.scenario_name}: mode={result.mode.value} uc_profit={report.fmt(result.uc_profit)} "
             f"iterations={result.iterations} converged={result.converged} "
             f"max_kkt_residual={result.max_kkt_residual:.3g}"]
    for iv in result.intervals:
        prices = ", ".join(f"{pr.program_id}={report.fmt(pr.lambda_dr)}" for pr in iv.program_responses)
        lines.append(f"  {iv.label}: lambda_dr[{prices}] total_dr={report.fmt(iv.total_dr)} "
                     f"uc_profit={report.fmt(iv.uc_profit)}")
    return "\n".join(lines)


def cmd_run(args) -> int:
    scenario = _load(args.scenario, args)
    result = run_event(scenario, jobs=args.jobs)
    print(_summary(result))
    if args.out:
        paths = report.emit_tables(report.build_bundle(result), args.format, args.out)
        for p in paths:
            print(f"wrote {p}")
    return 0


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario, validate=False)
    issues = validate_scenario(scenario)
    if issues:
        for issue in issues:
            print(f"invalid: {issue}", file=sys.stderr)
        return 1
    print(f"{scenario.name}: ok")
    return 0


def cmd_oracle(args) -> int:
    """Diff the configured solver against the exhaustive grid and the inner oracle."""
    scenario = _load(args.scenario, args)
    cfg = scenario.algorithm
    solved = run_event(scenario, jobs=args.jobs)
    grid = run_event(scenario, mode=SolveMode.GRID, jobs=args.jobs)
    ok = True
    print(f"{scenario.name}: solver mode={solved.mode.value} vs grid")
    for s_iv, g_iv in zip(solved.intervals, grid.intervals):
        gap = g_iv.uc_profit - s_iv.uc_profit
        steps = max(abs(a - b) for a, b in zip(s_iv.lambda_dr, g_iv.lambda_dr)) / cfg.price_step if s_iv.lambda_dr else 0.0
        dominated = s_iv.uc_profit <= g_iv.uc_profit + cfg.epsilon
        ok &= dominated
        print(f"  {s_iv.label}: solver={report.fmt(s_iv.uc_profit)} grid={report.fmt(g_iv.uc_profit)} "
              f"gap={gap:.6g} max_price_diff_steps={steps:.3g} {'ok' if dominated else 'GRID BEATEN'}")
    n = cfg.oracle_grid_points
    worst = 0.0
    for iv in solved.intervals:
        for pr in iv.program_responses:
            for er in pr.eu_responses:
                price = pr.lambda_dr * pr.hours
                diff = abs(best_response(price, er.p_max, cfg.solver_tol)
                           - brute_force_best_response(price, er.p_max, n))
                bound = er.p_max / n + cfg.solver_tol * er.p_max
                worst = max(worst, diff / bound if bound > 0 else 0.0)
                if diff > bound:
                    ok = False
                    print(f"  EU {er.eu_id} {iv.label}: best response off by {diff:.3g} kW (bound {bound:.3g})")
    print(f"  inner oracle: worst error / bound = {worst:.3g}")
    print("oracle: ok" if ok else "oracle: FAILED")
    return 0 if ok else 1


def cmd_compare(args) -> int:
    a = run_event(_load(args.first, args), jobs=args.jobs)
    b = run_event(_load(args.second, args), jobs=args.jobs)
    changes = report.compare_results(a, b)
    if args.format == "json":
        sys.stdout.write(report.changes_json(a.scenario_name, b.scenario_name, changes))
    else:
        sys.stdout.write(report.render_changes(a.scenario_name, b.scenario_name, changes))
    if args.out:
        for p in report.emit_series([a, b], args.out):
            print(f"wrote {p}", file=sys.stderr)
    return 0


def cmd_export(args) -> int:
    sys.stdout.write(save_scenario(load_scenario(args.scenario)))
    return 0


def _solver_flags(p):
    p.add_argument("--mode", choices=[m.value for m in SolveMode], help="outer price search")
    p.add_argument("--step", type=float, help="price step, cents/kWh")
    p.add_argument("--epsilon", type=float, help="profit change threshold, cents")
    p.add_argument("--max-price", dest="max_price", type=float, help="price cap, cents/kWh")
    p.add_argument("--faithful-stop", action="store_true", help="stop the lockstep sweep at the first small step")
    p.add_argument("--jobs", type=int, default=1, help="worker processes over intervals")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drgame", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="solve a scenario and write result tables")
    p.add_argument("--scenario", required=True)
    _solver_flags(p)
    p.add_argument("--out", help="directory for eu_table, provider_table, series, kkt_report")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check a scenario against all invariants")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="diff the solver against the grid and brute-force oracles")
    p.add_argument("--scenario", required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="direction of change between two scenarios")
    p.add_argument("first")
    p.add_argument("second")
    _solver_flags(p)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="directory for the paired series file")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("export", help="print a scenario as a canonical document")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_export)
    return parser


def run_cli(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise _UsageError("--jobs must be >= 1")
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if not exc.issues else 1
    except (DomainError, NumericError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
