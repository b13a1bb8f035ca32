"""Utility layer: UC profit terms and the outer price search.

The UC's profit separates over intervals. Within one interval it depends on
the vector of prices posted to the providers only through each program's
aggregate supply, so the search tabulates every program's supply curve on
the price lattice ``k * price_step`` once and then scans that table:

* ``paper``: all prices rise together from 0 until the profit change
  between two steps is within ``epsilon`` (or the price cap is passed);
* ``grid``: exhaustive scan of the Cartesian lattice, the reference answer;
* ``coordinate``: cyclic one-program-at-a-time scans until no single price
  move gains more than ``epsilon``.

The tabulated profit uses the same floating-point expression as
:func:`uc_profit_interval`, so the value a search selects is exactly the
value reported for the chosen prices.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from drgame.eu import KktRecord, verify_kkt
from drgame.errors import DomainError, NumericError, ScenarioError
from drgame.model import Scenario, SolveMode, UtilityParams, validate_scenario
from drgame.provider import ProgramResponse, aggregate_supply, solve_program

MAX_COORDINATE_SWEEPS = 1000


def generation_cost(p_g: float, params: UtilityParams) -> float:
    if p_g < 0.0:
        raise DomainError(f"negative generation {p_g!r}")
    return params.c0 + params.c1 * p_g + params.c2 * p_g * p_g


def operation_cost_reduction(p_pre: float, total_dr: float, params: UtilityParams) -> float:
    """Generation cost saved when ``total_dr`` kW of supply is displaced.

    Closed form of ``generation_cost(p_pre) - generation_cost(p_pre - total_dr)``;
    ``c0`` cancels.
    """
    if total_dr < 0.0 or total_dr > p_pre:
        raise DomainError(f"DR total {total_dr!r} outside [0, pre-DR supply {p_pre!r}]")
    return (params.c1 + 2.0 * params.c2 * p_pre) * total_dr - params.c2 * total_dr * total_dr


def bill_revenue(programs, responses, interval) -> float:
    """Retail revenue on the net (post-DR) consumption of every program."""
    total = 0
    for program, resp in zip(programs, responses, strict=True):
        total += program.retail_rate[interval.index] * (resp.base_total - resp.aggregate_dr) * interval.hours
    return total


def dr_payment(responses, interval=None) -> float:
    """UC payment to the providers for the DR they aggregate."""
    total = 0
    for resp in responses:
        hours = resp.hours if interval is None else interval.hours
        total += resp.lambda_dr * resp.aggregate_dr * hours
    return total


@dataclass(frozen=True)
class UcIntervalResult:
    t: int
    label: str
    hours: float
    lambda_dr: tuple[float, ...]
    program_responses: tuple[ProgramResponse, ...]
    total_dr: float
    delta_cg: float
    bill_revenue: float
    dr_payment: float
    uc_profit: float
    mode: SolveMode | None = None
    iterations: int = 1
    converged: bool = True

    def price_of(self, program_id: str) -> float:
        for r in self.program_responses:
            if r.program_id == program_id:
                return r.lambda_dr
        raise KeyError(program_id)

    def response_of(self, program_id: str) -> ProgramResponse:
        for r in self.program_responses:
            if r.program_id == program_id:
                return r
        raise KeyError(program_id)


@dataclass(frozen=True)
class EquilibriumResult:
    scenario_name: str
    mode: SolveMode
    intervals: tuple[UcIntervalResult, ...]
    uc_profit: float
    iterations: int
    converged: bool
    kkt: tuple[KktRecord, ...]

    @property
    def max_kkt_residual(self) -> float:
        return max((k.max_residual for k in self.kkt), default=0.0)


def uc_profit_interval(scenario: Scenario, lambda_dr_vector, t: int) -> UcIntervalResult:
    """UC profit in interval ``t`` when program ``i`` is offered ``lambda_dr_vector[i]``."""
    prices = tuple(float(x) for x in lambda_dr_vector)
    if len(prices) != len(scenario.programs):
        raise DomainError(f"need {len(scenario.programs)} prices, got {len(prices)}")
    if any(not p >= 0.0 for p in prices):
        raise DomainError(f"prices must be >= 0, got {prices}")
    interval = scenario.time_grid[t]
    cfg = scenario.algorithm
    responses = tuple(
        solve_program(p, scenario.members(p), price, interval, cfg)
        for p, price in zip(scenario.programs, prices)
    )
    total_dr = 0.0
    for r in responses:
        total_dr += r.aggregate_dr
    p_pre = scenario.utility.pre_dr_supply[t]
    if total_dr > p_pre:
        raise DomainError(f"interval {t}: DR total {total_dr} kW exceeds pre-DR supply {p_pre} kW")
    delta_cg = operation_cost_reduction(p_pre, total_dr, scenario.utility) * interval.hours
    revenue = bill_revenue(scenario.programs, responses, interval)
    payment = dr_payment(responses, interval)
    return UcIntervalResult(
        t, interval.label.value, interval.hours, prices, responses,
        total_dr, delta_cg, revenue, payment, revenue - payment + delta_cg,
    )


class _Lattice:
    """Per-program supply, bill and payment tables on the price lattice."""

    def __init__(self, scenario: Scenario, t: int):
        cfg = scenario.algorithm
        interval = scenario.time_grid[t]
        step = cfg.price_step
        n_steps = int(math.floor(scenario.price_cap() / step + 1e-9))
        self.prices = np.arange(n_steps + 1) * step
        self.hours = interval.hours
        self.p_pre = scenario.utility.pre_dr_supply[t]
        u = scenario.utility
        self.c2 = u.c2
        self.marginal = u.c1 + 2.0 * u.c2 * self.p_pre
        self.supply, self.bill, self.pay = [], [], []
        for program in scenario.programs:
            members = scenario.members(program)
            d = aggregate_supply(members, self.prices, interval, cfg.solver_tol)
            base = 0.0
            for e in members:
                base += e.base_load[t]
            self.supply.append(d)
            self.bill.append(program.retail_rate[t] * (base - d) * self.hours)
            self.pay.append(self.prices * d * self.hours)

    @property
    def n_programs(self) -> int:
        return len(self.supply)

    def evaluate(self, index) -> np.ndarray:
        """Profit at broadcast integer index arrays, one per program."""
        revenue, payment, total = 0, 0, 0.0
        for i, ix in enumerate(index):
            revenue = revenue + self.bill[i][ix]
            payment = payment + self.pay[i][ix]
            total = total + self.supply[i][ix]
        total = np.asarray(total)
        if np.any(total > self.p_pre):
            worst = np.unravel_index(int(np.argmax(total)), total.shape) if total.ndim else ()
            raise DomainError(
                f"DR total {float(np.max(total))} kW exceeds pre-DR supply {self.p_pre} kW "
                f"(prices {self._prices_at(index, worst)}); lower max_price"
            )
        with np.errstate(over="ignore", invalid="ignore"):
            delta = (self.marginal * total - self.c2 * total * total) * self.hours
            profit = np.asarray(revenue - payment + delta, dtype=float)
        if not np.all(np.isfinite(profit)):
            bad = np.unravel_index(int(np.argmin(np.isfinite(profit))), profit.shape) if profit.ndim else ()
            prices = self._prices_at(index, bad)
            raise NumericError(f"non-finite UC profit at prices {prices}", prices)
        return profit

    def _prices_at(self, index, position) -> tuple[float, ...]:
        out = []
        for ix in index:
            arr = np.broadcast_to(np.asarray(ix), np.broadcast_shapes(*(np.shape(i) for i in index)))
            out.append(float(self.prices[arr[position] if arr.ndim else arr]))
        return tuple(out)


def _paper_sweep(lat: _Lattice, epsilon: float, faithful: bool):
    n = lat.n_programs
    previous, previous_total = 0.0, 0.0
    iteration = 1
    best, best_k = -math.inf, 0
    converged = False
    k = 0
    for k in range(len(lat.prices)):
        iteration += 1
        profit = float(lat.evaluate([k] * n))
        total = sum(float(lat.supply[i][k]) for i in range(n))
        if profit > best:
            best, best_k = profit, k
        if abs(profit - previous) <= epsilon:
            if faithful or (total > 0.0 and previous_total > 0.0):
                converged = True
                break
        previous, previous_total = profit, total
    chosen = k if faithful else best_k
    return (chosen,) * n, iteration, converged


def _grid_search(lat: _Lattice):
    n, size = lat.n_programs, len(lat.prices)
    if n == 0:
        return (), 1
    best, best_index = -math.inf, None
    tail = min(n, 2)
    tail_axes = [np.arange(size).reshape((-1,) + (1,) * (tail - 1 - a)) for a in range(tail)]
    for lead in itertools.product(range(size), repeat=n - tail):
        values = lat.evaluate(list(lead) + tail_axes)
        flat = int(np.argmax(values))
        if values.flat[flat] > best:
            best = float(values.flat[flat])
            best_index = lead + np.unravel_index(flat, values.shape)
    return tuple(int(i) for i in best_index), size**n


def _coordinate_search(lat: _Lattice, epsilon: float):
    n, size = lat.n_programs, len(lat.prices)
    index = [0] * n
    current = float(lat.evaluate(index)) if n else 0.0
    axis = np.arange(size)
    improved = True
    sweeps = 0
    while improved and sweeps < MAX_COORDINATE_SWEEPS:
        sweeps += 1
        improved = False
        for i in range(n):
            values = lat.evaluate(index[:i] + [axis] + index[i + 1:])
            j = int(np.argmax(values))
            if values[j] > current + epsilon:
                index[i] = j
                current = float(values[j])
                improved = True
    return tuple(index), sweeps, not improved


def optimize_prices(scenario: Scenario, t: int, mode: SolveMode | str | None = None) -> UcIntervalResult:
    """Search the UC's prices for interval ``t`` and return the resulting interval."""
    cfg = scenario.algorithm
    mode = SolveMode(mode) if mode is not None else cfg.mode
    lat = _Lattice(scenario, t)
    if mode is SolveMode.PAPER:
        index, iterations, converged = _paper_sweep(lat, cfg.epsilon, cfg.faithful_stop)
    elif mode is SolveMode.GRID:
        index, iterations = _grid_search(lat)
        converged = True
    else:
        index, iterations, converged = _coordinate_search(lat, cfg.epsilon)
    prices = tuple(float(lat.prices[k]) for k in index)
    result = uc_profit_interval(scenario, prices, t)
    return UcIntervalResult(
        result.t, result.label, result.hours, result.lambda_dr, result.program_responses,
        result.total_dr, result.delta_cg, result.bill_revenue, result.dr_payment, result.uc_profit,
        mode, max(1, iterations), converged,
    )


def _optimize_job(args):
    scenario, t, mode = args
    return optimize_prices(scenario, t, mode)


def run_event(scenario: Scenario, mode: SolveMode | str | None = None, jobs: int = 1) -> EquilibriumResult:
    """Optimize every interval of the DR event and attach KKT certificates.

    Intervals are independent; ``jobs > 1`` solves them in worker processes.
    Results are assembled in interval order, so output does not depend on
    ``jobs``.
    """
    issues = validate_scenario(scenario)
    if issues:
        raise ScenarioError(f"scenario {scenario.name!r} is invalid", [str(i) for i in issues])
    mode = SolveMode(mode) if mode is not None else scenario.algorithm.mode
    tasks = [(scenario, t, mode) for t in range(len(scenario.time_grid))]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            intervals = tuple(pool.map(_optimize_job, tasks))
    else:
        intervals = tuple(_optimize_job(task) for task in tasks)
    total = 0.0
    for r in intervals:
        total += r.uc_profit
    kkt = tuple(
        verify_kkt(pr.lambda_dr, er)
        for r in intervals
        for pr in r.program_responses
        for er in pr.eu_responses
    )
    return EquilibriumResult(
        scenario.name, mode, intervals, total,
        sum(r.iterations for r in intervals), all(r.converged for r in intervals), kkt,
    )
