import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drgame.errors import DomainError
from drgame.model import AlgorithmConfig, DrProgram, EndUser, ProgramKind, TimeInterval
from drgame.provider import aggregate_supply, provider_profit, solve_program

CFG = AlgorithmConfig()
HOUR = TimeInterval(0, "peak", 1.0)


def program_of(members):
    return DrProgram("p", ProgramKind.BUSINESS, (10.0,), tuple(e.id for e in members))


def eus(*pairs):
    return [EndUser(str(k), "p", (base,), alpha) for k, (base, alpha) in enumerate(pairs)]


def test_higher_willingness_provides_and_earns_more():
    members = eus((230.0, 0.05), (230.0, 0.08))
    resp = solve_program(program_of(members), members, 5.0, HOUR, CFG)
    low, high = resp.eu_responses
    assert 0 < low.p_dr < high.p_dr
    assert 0 < low.eu_profit < high.eu_profit
    assert low.lambda_eu > high.lambda_eu


def test_zero_price():
    members = eus((100.0, 0.2), (50.0, 0.5))
    resp = solve_program(program_of(members), members, 0.0, HOUR, CFG)
    assert resp.aggregate_dr == 0.0
    assert resp.provider_profit == 0.0
    assert resp.base_total == 150.0
    assert [r.lambda_eu for r in resp.eu_responses] == pytest.approx([1 / 20.0, 1 / 25.0])


def test_single_eu_composition():
    members = eus((10.0, 1.0))
    resp = solve_program(program_of(members), members, 2.0, HOUR, CFG)
    assert resp.aggregate_dr == pytest.approx(5.716712392168546, abs=1e-8)
    assert resp.provider_profit == pytest.approx((2 - 0.5450615244401584) * 5.716712392168546, rel=1e-8)
    assert resp.provider_profit == pytest.approx(8.317, abs=1e-3)


def test_provider_profit_zero_and_doubling():
    one = eus((10.0, 1.0))
    two = eus((10.0, 1.0), (10.0, 1.0))
    r1 = solve_program(program_of(one), one, 2.0, HOUR, CFG)
    r2 = solve_program(program_of(two), two, 2.0, HOUR, CFG)
    assert provider_profit(r2) == 2 * provider_profit(r1)
    r0 = solve_program(program_of(one), one, 0.05, HOUR, CFG)
    assert provider_profit(r0) == 0.0


def test_errors():
    members = eus((10.0, 1.0))
    with pytest.raises(DomainError):
        solve_program(program_of(members), members, -1.0, HOUR, CFG)
    with pytest.raises(DomainError):
        solve_program(program_of(members), [], 1.0, HOUR, CFG)
    bad = eus((10.0, 1.5))
    with pytest.raises(DomainError):
        solve_program(program_of(bad), bad, 1.0, HOUR, CFG)


def test_supply_table_bitwise_equal():
    members = eus((230.0, 0.03), (75.0, 0.25), (1.2, 0.7), (40.0, 0.0))
    prices = np.arange(0, 1501) * 0.01
    table = aggregate_supply(members, prices, TimeInterval(0, "peak", 2.5), 1e-10)
    program = program_of(members)
    for k in range(0, 1501, 37):
        resp = solve_program(program, members, float(prices[k]), TimeInterval(0, "peak", 2.5), CFG)
        assert resp.aggregate_dr == table[k]


member_lists = st.lists(
    st.tuples(st.floats(0.0, 400.0), st.floats(0.0, 1.0)), min_size=1, max_size=6
)


@settings(max_examples=100, deadline=None)
@given(member_lists, st.floats(0.0, 20.0), st.floats(0.0, 20.0), st.floats(0.25, 4.0))
def test_separable_monotone_nonnegative(pairs, l1, l2, hours):
    members = eus(*pairs)
    program = program_of(members)
    interval = TimeInterval(0, "peak", hours)
    lo, hi = sorted((l1, l2))
    r_lo = solve_program(program, members, lo, interval, CFG)
    r_hi = solve_program(program, members, hi, interval, CFG)
    assert r_lo.aggregate_dr <= r_hi.aggregate_dr
    for r in (r_lo, r_hi):
        assert r.provider_profit >= 0.0
        assert all(e.eu_profit >= 0.0 for e in r.eu_responses)
        assert r.aggregate_dr == pytest.approx(sum(e.p_dr for e in r.eu_responses))
    for e, got in zip(members, r_hi.eu_responses):
        alone = solve_program(program_of([e]), [e], hi, interval, CFG).eu_responses[0]
        assert alone == got
