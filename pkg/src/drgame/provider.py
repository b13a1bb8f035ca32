"""Provider layer: aggregate EU best responses and provider profit.

The reduced provider problem has no cross-EU terms, so a program's response
to a UC price is the collection of its members' independent best
responses. The competition among EUs enters only through the UC's choice
of price, which reacts to the program's aggregate quantity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from drgame.eu import EuResponse, best_response_array, dr_upper_bound, respond
from drgame.errors import DomainError
from drgame.model import AlgorithmConfig, DrProgram, EndUser, TimeInterval


@dataclass(frozen=True)
class ProgramResponse:
    program_id: str
    t: int
    hours: float
    lambda_dr: float
    eu_responses: tuple[EuResponse, ...]
    aggregate_dr: float
    base_total: float
    provider_profit: float


def provider_profit(resp: ProgramResponse) -> float:
    """Margin earned by the provider: UC price minus EU price, per kWh bought."""
    total = 0.0
    for r in resp.eu_responses:
        if r.p_dr > 0.0:
            total += (resp.lambda_dr - r.lambda_eu) * r.p_dr * resp.hours
    return total


def member_capacities(members, t: int) -> list[float]:
    return [dr_upper_bound(e.willingness, e.base_load[t]) for e in members]


def solve_program(
    program: DrProgram,
    members: list[EndUser] | tuple[EndUser, ...],
    lambda_dr: float,
    interval: TimeInterval,
    cfg: AlgorithmConfig,
) -> ProgramResponse:
    """Responses of every member EU of ``program`` to UC price ``lambda_dr``."""
    if lambda_dr < 0.0:
        raise DomainError(f"program {program.id}: negative price {lambda_dr!r}")
    if not members:
        raise DomainError(f"program {program.id} has no members")
    t = interval.index
    responses = tuple(
        respond(e.id, t, lambda_dr, p_max, interval.hours, cfg.solver_tol)
        for e, p_max in zip(members, member_capacities(members, t))
    )
    aggregate = 0.0
    base = 0.0
    for e, r in zip(members, responses):
        aggregate += r.p_dr
        base += e.base_load[t]
    resp = ProgramResponse(program.id, t, interval.hours, lambda_dr, responses, aggregate, base, 0.0)
    return replace(resp, provider_profit=provider_profit(resp))


def aggregate_supply(
    members,
    prices: np.ndarray,
    interval: TimeInterval,
    tol: float,
) -> np.ndarray:
    """Aggregate DR of a program at each price in ``prices``.

    Bitwise equal to ``solve_program(...).aggregate_dr`` at each price; used
    by the outer search to tabulate supply curves.
    """
    t = interval.index
    caps = member_capacities(members, t)
    total = np.zeros(len(prices))
    energy_price = np.asarray(prices, dtype=float) * interval.hours
    for cap in caps:
        total = total + best_response_array(energy_price, cap, tol)
    return total
