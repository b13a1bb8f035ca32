"""Domain types and scenario-wide validation.

Units throughout: power in kW, prices in cents/kWh, durations in hours and
money in cents. Per-interval quantities are tuples aligned with the order of
``TimeGrid.intervals``.

Constructors do not validate. A scenario with out-of-range values can be
built (and loaded from disk) so that :func:`validate_scenario` can report
every problem at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class IntervalLabel(str, Enum):
    PEAK = "peak"
    OFF_PEAK = "off-peak"
    SUPER_OFF_PEAK = "super-off-peak"


class ProgramKind(str, Enum):
    RESIDENTIAL = "residential"
    BUSINESS = "business"


class SolveMode(str, Enum):
    """Outer price search used by the utility."""

    PAPER = "paper"  # lockstep upward sweep with the |dR| <= eps stop
    GRID = "grid"  # exhaustive Cartesian grid, the oracle
    COORDINATE = "coordinate"  # cyclic per-program 1D sweeps


@dataclass(frozen=True)
class TimeInterval:
    index: int
    label: IntervalLabel
    hours: float


@dataclass(frozen=True)
class TimeGrid:
    intervals: tuple[TimeInterval, ...]

    @classmethod
    def from_pairs(cls, pairs) -> TimeGrid:
        """Build a grid from ``(label, hours)`` pairs in order."""
        return cls(
            tuple(
                TimeInterval(t, IntervalLabel(label), float(hours))
                for t, (label, hours) in enumerate(pairs)
            )
        )

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, t: int) -> TimeInterval:
        return self.intervals[t]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(iv.label.value for iv in self.intervals)


@dataclass(frozen=True)
class EndUser:
    id: str
    program_id: str
    base_load: tuple[float, ...]
    willingness: float


@dataclass(frozen=True)
class DrProgram:
    id: str
    kind: ProgramKind
    retail_rate: tuple[float, ...]
    eu_ids: tuple[str, ...]


@dataclass(frozen=True)
class UtilityParams:
    """Quadratic generation cost ``c0 + c1*P + c2*P**2`` and pre-DR supply."""

    c0: float
    c1: float
    c2: float
    pre_dr_supply: tuple[float, ...]


@dataclass(frozen=True)
class AlgorithmConfig:
    """Settings for the outer price search.

    ``max_price=None`` means ten times the largest retail rate of the
    scenario; see :meth:`Scenario.price_cap`. ``faithful_stop`` makes the
    lockstep sweep stop at the first iteration whose profit change is within
    ``epsilon`` (including the flat stretch before any EU participates)
    instead of reporting the best price seen.
    """

    price_step: float = 0.01
    epsilon: float = 0.001
    max_price: float | None = None
    mode: SolveMode = SolveMode.PAPER
    solver_tol: float = 1e-10
    oracle_grid_points: int = 100_000
    faithful_stop: bool = False


@dataclass(frozen=True)
class Scenario:
    name: str
    time_grid: TimeGrid
    programs: tuple[DrProgram, ...]
    eus: tuple[EndUser, ...]
    utility: UtilityParams
    algorithm: AlgorithmConfig = field(default_factory=AlgorithmConfig)

    def program(self, program_id: str) -> DrProgram:
        for p in self.programs:
            if p.id == program_id:
                return p
        raise KeyError(program_id)

    def eu(self, eu_id: str) -> EndUser:
        for e in self.eus:
            if e.id == eu_id:
                return e
        raise KeyError(eu_id)

    def members(self, program: DrProgram) -> tuple[EndUser, ...]:
        """Member EUs of ``program`` in the program's declared order."""
        by_id = {e.id: e for e in self.eus}
        return tuple(by_id[i] for i in program.eu_ids)

    def price_cap(self) -> float:
        if self.algorithm.max_price is not None:
            return self.algorithm.max_price
        rates = [r for p in self.programs for r in p.retail_rate]
        return 10.0 * max(rates, default=0.0)

    def replace_willingness(self, changes: dict[str, float]) -> Scenario:
        """Copy of this scenario with some EUs' willingness replaced."""
        unknown = set(changes) - {e.id for e in self.eus}
        if unknown:
            raise KeyError(sorted(unknown))
        eus = tuple(
            EndUser(e.id, e.program_id, e.base_load, changes[e.id]) if e.id in changes else e
            for e in self.eus
        )
        return Scenario(self.name, self.time_grid, self.programs, eus, self.utility, self.algorithm)


@dataclass(frozen=True)
class ValidationIssue:
    entity: str
    invariant: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.invariant}"


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _check_series(values, n: int, entity: str, what: str, *, positive: bool = False):
    issues = []
    if len(values) != n:
        issues.append(ValidationIssue(entity, f"{what} must have {n} values, got {len(values)}"))
    for t, v in enumerate(values):
        if not _finite(v):
            issues.append(ValidationIssue(entity, f"{what}[{t}] must be a finite number"))
        elif positive and v <= 0:
            issues.append(ValidationIssue(entity, f"{what}[{t}] must be > 0"))
        elif v < 0:
            issues.append(ValidationIssue(entity, f"{what}[{t}] must be >= 0"))
    return issues


def _check_grid(grid: TimeGrid) -> list[ValidationIssue]:
    issues = []
    if len(grid.intervals) == 0:
        issues.append(ValidationIssue("time_grid", "at least one interval required"))
    for t, iv in enumerate(grid.intervals):
        name = f"time_grid[{t}]"
        if not isinstance(iv.label, IntervalLabel):
            issues.append(ValidationIssue(name, f"label {iv.label!r} not in {[x.value for x in IntervalLabel]}"))
        if not _finite(iv.hours) or iv.hours <= 0:
            issues.append(ValidationIssue(name, "duration must be a positive finite number of hours"))
        if iv.index != t:
            issues.append(ValidationIssue(name, f"index must be {t}"))
    return issues


def _check_algorithm(cfg: AlgorithmConfig) -> list[ValidationIssue]:
    issues = []
    if not _finite(cfg.price_step) or cfg.price_step <= 0:
        issues.append(ValidationIssue("algorithm", "price_step must be > 0"))
    if not _finite(cfg.epsilon) or cfg.epsilon <= 0:
        issues.append(ValidationIssue("algorithm", "epsilon must be > 0"))
    if cfg.max_price is not None and (not _finite(cfg.max_price) or cfg.max_price <= 0):
        issues.append(ValidationIssue("algorithm", "max_price must be > 0"))
    if not _finite(cfg.solver_tol) or not 0 < cfg.solver_tol <= 1e-4:
        issues.append(ValidationIssue("algorithm", "solver_tol must lie in (0, 1e-4]"))
    if isinstance(cfg.oracle_grid_points, bool) or not isinstance(cfg.oracle_grid_points, int) or cfg.oracle_grid_points < 2:
        issues.append(ValidationIssue("algorithm", "oracle_grid_points must be an integer >= 2"))
    if not isinstance(cfg.mode, SolveMode):
        issues.append(ValidationIssue("algorithm", f"mode {cfg.mode!r} not in {[m.value for m in SolveMode]}"))
    return issues


def validate_scenario(s: Scenario) -> list[ValidationIssue]:
    """Check every domain invariant of ``s``; an empty list means valid.

    Never raises on a structurally decodable scenario. Issues come out in a
    fixed order (grid, utility, programs, EUs, cross references, algorithm).
    """
    issues = _check_grid(s.time_grid)
    n = len(s.time_grid.intervals)

    u = s.utility
    for name in ("c0", "c1", "c2"):
        if not _finite(getattr(u, name)):
            issues.append(ValidationIssue("utility", f"{name} must be finite"))
    issues += _check_series(u.pre_dr_supply, n, "utility", "pre_dr_supply", positive=True)

    program_ids = [p.id for p in s.programs]
    eu_ids = [e.id for e in s.eus]
    for dup in sorted({i for i in program_ids if program_ids.count(i) > 1}):
        issues.append(ValidationIssue(f"program {dup}", "identifier must be unique"))
    for dup in sorted({i for i in eu_ids if eu_ids.count(i) > 1}):
        issues.append(ValidationIssue(f"EU {dup}", "identifier must be unique"))

    for p in s.programs:
        entity = f"program {p.id}"
        if not isinstance(p.kind, ProgramKind):
            issues.append(ValidationIssue(entity, f"kind {p.kind!r} not in {[k.value for k in ProgramKind]}"))
        if len(p.eu_ids) == 0:
            issues.append(ValidationIssue(entity, "must have at least one member EU"))
        issues += _check_series(p.retail_rate, n, entity, "retail_rate")
        for member in p.eu_ids:
            if member not in eu_ids:
                issues.append(ValidationIssue(entity, f"member EU {member} is not defined"))
        for dup in sorted({i for i in p.eu_ids if p.eu_ids.count(i) > 1}):
            issues.append(ValidationIssue(entity, f"member EU {dup} listed more than once"))

    for e in s.eus:
        entity = f"EU {e.id}"
        if not _finite(e.willingness) or not 0 <= e.willingness <= 1:
            issues.append(ValidationIssue(entity, f"willingness {e.willingness!r} outside [0, 1]"))
        issues += _check_series(e.base_load, n, entity, "base_load")
        owners = [p.id for p in s.programs if p.id == e.program_id]
        if len(owners) != 1:
            issues.append(ValidationIssue(entity, f"program_id {e.program_id} must resolve to exactly one program"))
        else:
            if e.id not in s.program(e.program_id).eu_ids:
                issues.append(ValidationIssue(entity, f"not listed as a member of program {e.program_id}"))
        claimed = [p.id for p in s.programs if e.id in p.eu_ids]
        for other in claimed:
            if other != e.program_id:
                issues.append(ValidationIssue(entity, f"listed by program {other} but owned by {e.program_id}"))

    issues += _check_algorithm(s.algorithm)
    return issues
