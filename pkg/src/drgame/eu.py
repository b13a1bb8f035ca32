"""End-user layer: inconvenience cost, best response and KKT verification.

Each EU with DR capacity ``p_max`` sells ``p`` kW at price ``lambda_eu`` and
pays an inconvenience cost ``p / (p_max - p)``. Substituting the EU's
first-order condition into the provider's problem leaves, per EU and
interval, the strictly concave scalar problem

    maximize  lambda_dr * p - p_max * p / (p_max - p)**2   over 0 <= p < p_max

whose derivative is strictly decreasing, so its maximizer is found by
bisection on the derivative. The EU price is then recovered as
``p_max / (p_max - p)**2``.

Intervals longer than one hour scale revenue and payments by the duration
while the inconvenience cost is charged once per interval. The scalar
functions here are written for unit duration; callers pass the energy
price ``lambda * hours`` (see :func:`respond`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from drgame.errors import ContractError, DomainError


def dr_upper_bound(alpha: float, base_load: float) -> float:
    """DR capacity of an EU: willingness times base load."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"willingness {alpha!r} outside [0, 1]")
    if base_load < 0.0:
        raise DomainError(f"base load {base_load!r} is negative")
    return alpha * base_load


def _check_open_box(p_dr: float, p_max: float) -> None:
    if not (0.0 <= p_dr < p_max):
        raise DomainError(f"need 0 <= p_dr < p_max, got p_dr={p_dr!r}, p_max={p_max!r}")


def inconvenience_cost(p_dr: float, p_max: float) -> float:
    _check_open_box(p_dr, p_max)
    return p_dr / (p_max - p_dr)


def eu_profit(lambda_eu: float, p_dr: float, p_max: float, duration: float = 1.0) -> float:
    """Payment received for ``p_dr`` over ``duration`` hours minus inconvenience."""
    if p_dr == 0.0 and p_max >= 0.0:
        return 0.0
    return lambda_eu * p_dr * duration - inconvenience_cost(p_dr, p_max)


def leader_value(p_dr: float, lambda_dr: float, p_max: float) -> float:
    """Provider's reduced objective for one EU after eliminating the EU price."""
    _check_open_box(p_dr, p_max)
    return lambda_dr * p_dr - p_max * p_dr / (p_max - p_dr) ** 2


def marginal_leader_value(p_dr: float, lambda_dr: float, p_max: float) -> float:
    """Derivative of :func:`leader_value` in ``p_dr``; strictly decreasing."""
    _check_open_box(p_dr, p_max)
    return lambda_dr - p_max * (p_max + p_dr) / (p_max - p_dr) ** 3


def bisection_steps(tol: float) -> int:
    """Halvings needed to shrink ``[0, p_max]`` to width ``tol * p_max``."""
    if not tol > 0.0:
        raise DomainError(f"tolerance must be positive, got {tol!r}")
    return max(1, math.ceil(math.log2(1.0 / tol)))


def best_response(lambda_dr: float, p_max: float, tol: float = 1e-10) -> float:
    """Optimal DR quantity of one EU at provider price ``lambda_dr``.

    Returns exactly 0 when ``p_max == 0`` or ``lambda_dr <= 1 / p_max``
    (marginal value at zero is non-positive). Otherwise returns the root of
    :func:`marginal_leader_value` to within ``tol * p_max``; the result is
    always strictly below ``p_max``.
    """
    if lambda_dr < 0.0 or p_max < 0.0:
        raise DomainError(f"negative input: lambda_dr={lambda_dr!r}, p_max={p_max!r}")
    if p_max == 0.0 or lambda_dr <= 1.0 / p_max:
        return 0.0
    lo, hi = 0.0, p_max
    # fixed step count and explicit products keep this bitwise equal to
    # best_response_array (numpy may route ** through a different pow)
    for _ in range(bisection_steps(tol)):
        mid = 0.5 * (lo + hi)
        gap = p_max - mid
        if lambda_dr - p_max * (p_max + mid) / (gap * gap * gap) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def best_response_array(lambda_dr: np.ndarray, p_max: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Vectorized :func:`best_response` over broadcast arrays.

    Performs the same floating-point operations in the same order as the
    scalar version, so elementwise results are bitwise identical.
    """
    lam, cap = np.broadcast_arrays(np.asarray(lambda_dr, dtype=float), np.asarray(p_max, dtype=float))
    if np.any(lam < 0.0) or np.any(cap < 0.0):
        raise DomainError("negative price or capacity")
    with np.errstate(divide="ignore", invalid="ignore"):
        active = (cap > 0.0) & ~(lam <= 1.0 / cap)
    lo = np.zeros(lam.shape)
    hi = np.where(active, cap, 1.0)
    c = np.where(active, cap, 1.0)
    lm = np.where(active, lam, 0.0)
    for _ in range(bisection_steps(tol)):
        mid = 0.5 * (lo + hi)
        gap = c - mid
        up = lm - c * (c + mid) / (gap * gap * gap) > 0.0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return np.where(active, 0.5 * (lo + hi), 0.0)


def recover_eu_price(p_dr: float, p_max: float) -> float:
    """EU price consistent with the EU's own optimality at ``p_dr``."""
    _check_open_box(p_dr, p_max)
    return p_max / (p_max - p_dr) ** 2


def brute_force_best_response(lambda_dr: float, p_max: float, n_points: int) -> float:
    """Grid-search oracle for :func:`best_response`.

    Evaluates the reduced objective on ``n_points`` evenly spaced points of
    ``[0, p_max * (1 - 1/n_points)]`` and returns the first maximizer.
    """
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    if lambda_dr < 0.0 or p_max < 0.0:
        raise DomainError(f"negative input: lambda_dr={lambda_dr!r}, p_max={p_max!r}")
    if p_max == 0.0:
        return 0.0
    p = p_max * np.arange(n_points) / n_points
    values = lambda_dr * p - p_max * p / (p_max - p) ** 2
    return float(p[int(np.argmax(values))])


@dataclass(frozen=True)
class EuResponse:
    eu_id: str
    t: int
    p_max: float
    p_dr: float
    lambda_eu: float
    eu_profit: float
    hours: float = 1.0


def respond(eu_id: str, t: int, lambda_dr: float, p_max: float, hours: float = 1.0, tol: float = 1e-10) -> EuResponse:
    """Best response of one EU for one interval, with its recovered price.

    EUs that stay out (zero capacity or price at or below the participation
    threshold) report their reservation price ``1 / p_max`` (0 when
    ``p_max == 0``) for diagnostics; they earn nothing.
    """
    p = best_response(lambda_dr * hours, p_max, tol)
    if p > 0.0:
        lam_eu = recover_eu_price(p, p_max) / hours
        profit = eu_profit(lam_eu, p, p_max, hours)
    else:
        lam_eu = (1.0 / p_max) / hours if p_max > 0.0 else 0.0
        if not math.isfinite(lam_eu):  # subnormal capacity
            lam_eu = 0.0
        profit = 0.0
    return EuResponse(eu_id, t, p_max, p, lam_eu, profit, hours)


@dataclass(frozen=True)
class KktRecord:
    """Duals, binaries and residuals of the EU's KKT / big-M system.

    ``stationarity`` is the EU first-order residual, ``comp_lower`` and
    ``comp_upper`` the two complementary-slackness products, ``bounds`` the
    largest violation among the big-M box constraints. ``first_order`` is
    the provider's reduced first-order residual (zero at an interior optimum,
    non-positive at a corner) and is informational only.
    """

    eu_id: str
    t: int
    mu_lower: float
    mu_upper: float
    psi: int
    xi: int
    big_m: float
    stationarity: float
    comp_lower: float
    comp_upper: float
    bounds: float
    first_order: float
    degenerate: bool = False

    @property
    def max_residual(self) -> float:
        return max(abs(self.stationarity), abs(self.comp_lower), abs(self.comp_upper), self.bounds)


def verify_kkt(lambda_dr: float, response: EuResponse) -> KktRecord:
    """Rebuild the EU's KKT certificate at ``response`` and report residuals.

    Interior points use ``psi = xi = 1`` and zero duals. At ``p_dr == 0`` the
    lower-bound dual absorbs the gap ``1/p_max - lambda_eu``, with ``psi = 0``
    whenever that dual is positive. The big-M constant equals ``p_max``.
    """
    r = response
    if not (math.isfinite(r.p_dr) and math.isfinite(r.p_max) and math.isfinite(r.lambda_eu)):
        raise ContractError(f"EU {r.eu_id}: non-finite response")
    if r.p_max < 0.0 or r.p_dr < 0.0 or r.lambda_eu < 0.0 or r.hours <= 0.0:
        raise ContractError(f"EU {r.eu_id}: negative quantity, price or duration")
    if r.p_max == 0.0 or not math.isfinite(1.0 / r.p_max):
        if r.p_dr != 0.0:
            raise ContractError(f"EU {r.eu_id}: p_dr must be 0 when p_max is 0")
        return KktRecord(r.eu_id, r.t, 0.0, 0.0, 1, 1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, degenerate=True)
    if r.p_dr >= r.p_max:
        raise ContractError(f"EU {r.eu_id}: p_dr={r.p_dr} reaches capacity {r.p_max}")

    big_m = r.p_max
    price = r.lambda_eu * r.hours
    marginal_cost = r.p_max / (r.p_max - r.p_dr) ** 2
    mu_upper = 0.0
    xi = 1
    if r.p_dr == 0.0:
        mu_lower = 1.0 / r.p_max - price
        psi = 0 if mu_lower > 0.0 else 1
    else:
        mu_lower = 0.0
        psi = 1
    stationarity = price - marginal_cost + mu_lower - mu_upper
    comp_lower = r.p_dr * mu_lower
    comp_upper = (r.p_max - r.p_dr) * mu_upper
    slack = r.p_max - r.p_dr
    violations = (
        -r.p_dr,
        r.p_dr - psi * big_m,
        -mu_lower,
        mu_lower - (1 - psi) * big_m,
        -slack,
        slack - xi * big_m,
        -mu_upper,
        mu_upper - (1 - xi) * big_m,
    )
    bounds = max(0.0, *violations)
    first_order = lambda_dr * r.hours - r.p_max * (r.p_max + r.p_dr) / (r.p_max - r.p_dr) ** 3
    return KktRecord(
        r.eu_id, r.t, mu_lower, mu_upper, psi, xi, big_m,
        stationarity, comp_lower, comp_upper, bounds, first_order,
    )
