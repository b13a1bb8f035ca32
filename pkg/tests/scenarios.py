"""Small synthetic scenarios shared by the tests."""

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


def make_scenario(
    programs,
    *,
    rates=None,
    grid=(("peak", 1.0),),
    c=(0.0, 2.0, 0.01),
    supply=None,
    mode=SolveMode.GRID,
    max_price=20.0,
    step=0.01,
    name="synthetic",
):
    """``programs`` maps program id -> list of (eu id, base kW, willingness).

    Base loads and rates are constant over the grid unless ``rates`` gives a
    per-program tuple.
    """
    tg = TimeGrid.from_pairs(grid)
    n = len(tg)
    progs, eus = [], []
    for k, (pid, members) in enumerate(programs.items()):
        rate = (rates or {}).get(pid, (10.0,) * n)
        kind = ProgramKind.BUSINESS if k % 2 == 0 else ProgramKind.RESIDENTIAL
        progs.append(DrProgram(pid, kind, tuple(rate), tuple(m[0] for m in members)))
        for eu_id, base, alpha in members:
            eus.append(EndUser(eu_id, pid, (float(base),) * n, alpha))
    utility = UtilityParams(c[0], c[1], c[2], tuple(supply or (1000.0,) * n))
    cfg = AlgorithmConfig(price_step=step, epsilon=0.001, max_price=max_price, mode=mode)
    return Scenario(name, tg, tuple(progs), tuple(eus), utility, cfg)


ONE_PROGRAM = {"p1": [("a", 100.0, 0.1), ("b", 80.0, 0.2), ("c", 50.0, 0.3)]}
TWO_PROGRAMS = {
    "p1": [("a", 100.0, 0.1), ("b", 80.0, 0.2), ("c", 50.0, 0.3)],
    "p2": [("d", 60.0, 0.25), ("e", 40.0, 0.4)],
}
