"""Built-in case studies on the IEEE 34-bus and 69-bus feeders.

Only the load placement, base loads, willingness parameters and generation
cost coefficients come from the published case studies. The published
hourly load profiles, retail tariffs and pre-DR supply are not available,
so every preset uses the same reconstructed two-interval day:

* one off-peak hour and one peak hour, base loads equal in both;
* retail rates shaped like a summer time-of-use tariff (placeholders);
* a pre-DR supply level per interval chosen so the UC's marginal
  generation cost exceeds the retail rate, which makes DR worth buying.

These placeholders are ordinary scenario fields. Write a preset out with
``drgame export builtin:NAME`` (or :func:`drgame.scenario_io.save_scenario`)
and edit the document to substitute real tariff or load data.
"""

from __future__ import annotations

from drgame.model import (
    AlgorithmConfig,
    DrProgram,
    EndUser,
    ProgramKind,
    Scenario,
    SolveMode,
    TimeGrid,
    UtilityParams,
)

# (label, hours) for the reconstructed day
TOU_DAY = (("off-peak", 1.0), ("peak", 1.0))

# cents/kWh, placeholder summer TOU shape: (off-peak, peak)
RESIDENTIAL_RATE = (7.0, 21.0)
BUSINESS_RATE = (6.0, 13.0)

IEEE34_COST = dict(c0=0.0, c1=-1088.2, c2=0.2024)
IEEE34_PRE_DR_SUPPLY = (3075.0, 3300.0)

IEEE69_COST = dict(c0=0.0, c1=-14.3, c2=0.004506)
IEEE69_PRE_DR_SUPPLY = (3600.0, 5600.0)

# program id -> (kind, rates, [(eu id, base kW, willingness)])
IEEE34_S1 = {
    "business": (ProgramKind.BUSINESS, BUSINESS_RATE, [
        ("17", 230.0, 0.03), ("18", 230.0, 0.05), ("19", 230.0, 0.08), ("20", 230.0, 0.10),
        ("21", 230.0, 0.12), ("22", 230.0, 0.15), ("23", 230.0, 0.17),
    ]),
    "residential": (ProgramKind.RESIDENTIAL, RESIDENTIAL_RATE, [
        ("28", 75.0, 0.20), ("29", 75.0, 0.22), ("30", 75.0, 0.25), ("31", 57.0, 0.29),
        ("32", 57.0, 0.30), ("33", 57.0, 0.33), ("34", 57.0, 0.35),
    ]),
}
IEEE34_S2_CHANGES = {"18": 0.08, "30": 0.40}

# buses 30-32, 38, 42, 44 and 47 carry no load and have no EU
IEEE69_S1 = {
    "residential-1": (ProgramKind.RESIDENTIAL, RESIDENTIAL_RATE, [
        ("28", 26.0, 0.15), ("29", 26.0, 0.24), ("33", 14.0, 0.28), ("34", 19.5, 0.21),
        ("35", 6.0, 0.32),
    ]),
    "residential-2": (ProgramKind.RESIDENTIAL, RESIDENTIAL_RATE, [
        ("36", 26.0, 0.46), ("37", 26.0, 0.51), ("39", 24.0, 0.55), ("40", 24.0, 0.59),
        ("41", 1.2, 0.7), ("43", 6.0, 0.64), ("45", 39.22, 0.4), ("46", 39.22, 0.36),
    ]),
    "business": (ProgramKind.BUSINESS, BUSINESS_RATE, [
        ("48", 79.0, 0.03), ("49", 384.7, 0.02), ("50", 384.7, 0.01),
    ]),
}
IEEE69_S2_CHANGES = {"34": 0.30, "36": 0.57, "50": 0.06}

IEEE34_ALGORITHM = AlgorithmConfig(price_step=0.01, epsilon=0.001, max_price=20.0, mode=SolveMode.GRID)
IEEE69_ALGORITHM = AlgorithmConfig(price_step=0.01, epsilon=0.001, max_price=6.0, mode=SolveMode.GRID)


def _build(name, layout, cost, supply, algorithm) -> Scenario:
    grid = TimeGrid.from_pairs(TOU_DAY)
    n = len(grid)
    programs, eus = [], []
    for program_id, (kind, rates, members) in layout.items():
        programs.append(DrProgram(program_id, kind, tuple(rates), tuple(m[0] for m in members)))
        for eu_id, base, alpha in members:
            eus.append(EndUser(eu_id, program_id, (base,) * n, alpha))
    utility = UtilityParams(pre_dr_supply=tuple(supply), **cost)
    return Scenario(name, grid, tuple(programs), tuple(eus), utility, algorithm)


def _ieee34_s1() -> Scenario:
    return _build("ieee34-s1", IEEE34_S1, IEEE34_COST, IEEE34_PRE_DR_SUPPLY, IEEE34_ALGORITHM)


def _ieee69_s1() -> Scenario:
    return _build("ieee69-s1", IEEE69_S1, IEEE69_COST, IEEE69_PRE_DR_SUPPLY, IEEE69_ALGORITHM)


def _renamed(s: Scenario, name: str) -> Scenario:
    return Scenario(name, s.time_grid, s.programs, s.eus, s.utility, s.algorithm)


BUILTINS = {
    "ieee34-s1": _ieee34_s1,
    "ieee34-s2": lambda: _renamed(_ieee34_s1().replace_willingness(IEEE34_S2_CHANGES), "ieee34-s2"),
    "ieee69-s1": _ieee69_s1,
    "ieee69-s2": lambda: _renamed(_ieee69_s1().replace_willingness(IEEE69_S2_CHANGES), "ieee69-s2"),
}


def builtin_scenario(name: str) -> Scenario:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin scenario {name!r}; choose from {sorted(BUILTINS)}") from None
    return factory()
