"""Scenario documents: JSON load/save with a strict schema.

Document layout (schema_version 1)::

    {
      "schema_version": 1,
      "name": "...",
      "time_grid": [{"label": "off-peak", "hours": 1.0}, ...],
      "utility": {"c0": .., "c1": .., "c2": .., "pre_dr_supply": [..]},
      "programs": [
        {"id": "..", "kind": "residential", "retail_rate": [..],
         "eus": [{"id": "..", "base_load": [..], "willingness": ..}, ...]}
      ],
      "algorithm": {"mode": "grid", "price_step": .., "epsilon": ..,
                    "max_price": .., "solver_tol": .., "oracle_grid_points": ..,
                    "faithful_stop": false}
    }

Per-interval lists follow ``time_grid`` order. Unknown keys are rejected.
Every key of ``algorithm`` is optional; ``max_price`` may be omitted or
``null`` to use ten times the largest retail rate.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from drgame.errors import ScenarioError
from drgame.model import (
    AlgorithmConfig,
    DrProgram,
    EndUser,
    IntervalLabel,
    ProgramKind,
    Scenario,
    SolveMode,
    TimeGrid,
    TimeInterval,
    UtilityParams,
    validate_scenario,
)
from drgame.presets import BUILTINS, builtin_scenario

SCHEMA_VERSION = 1

_TOP_KEYS = ("schema_version", "name", "time_grid", "utility", "programs", "algorithm")
_INTERVAL_KEYS = ("label", "hours")
_UTILITY_KEYS = ("c0", "c1", "c2", "pre_dr_supply")
_PROGRAM_KEYS = ("id", "kind", "retail_rate", "eus")
_EU_KEYS = ("id", "base_load", "willingness")
_ALGORITHM_KEYS = (
    "mode", "price_step", "epsilon", "max_price", "solver_tol", "oracle_grid_points", "faithful_stop",
)


class _Reader:
    """Walks a decoded document, collecting every schema problem."""

    def __init__(self):
        self.issues: list[str] = []

    def mapping(self, value, where: str, keys, required=None) -> dict:
        if not isinstance(value, dict):
            self.issues.append(f"{where}: expected an object")
            return {}
        for k in value:
            if k not in keys:
                self.issues.append(f"{where}: unknown key {k!r}")
        for k in keys if required is None else required:
            if k not in value:
                self.issues.append(f"{where}: missing key {k!r}")
        return value

    def number(self, obj: dict, key: str, where: str, default=None):
        if key not in obj:
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.issues.append(f"{where}.{key}: expected a number, got {v!r}")
            return default
        return float(v)

    def integer(self, obj: dict, key: str, where: str, default=None):
        if key not in obj:
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.issues.append(f"{where}.{key}: expected an integer, got {v!r}")
            return default
        return v

    def text(self, obj: dict, key: str, where: str, default=""):
        if key not in obj:
            return default
        v = obj[key]
        if not isinstance(v, str):
            self.issues.append(f"{where}.{key}: expected a string, got {v!r}")
            return default
        return v

    def numbers(self, obj: dict, key: str, where: str) -> tuple[float, ...]:
        if key not in obj:
            return ()
        v = obj[key]
        if not isinstance(v, list):
            self.issues.append(f"{where}.{key}: expected a list of numbers")
            return ()
        out = []
        for i, x in enumerate(v):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                self.issues.append(f"{where}.{key}[{i}]: expected a number, got {x!r}")
            else:
                out.append(float(x))
        return tuple(out)

    def items(self, obj: dict, key: str, where: str) -> list:
        if key not in obj:
            return []
        v = obj[key]
        if not isinstance(v, list):
            self.issues.append(f"{where}.{key}: expected a list")
            return []
        return v

    def enum(self, obj: dict, key: str, where: str, kind, default=None):
        if key not in obj:
            return default
        try:
            return kind(obj[key])
        except (ValueError, TypeError):
            choices = [m.value for m in kind]
            self.issues.append(f"{where}.{key}: {obj[key]!r} not one of {choices}")
            return default


def _reject_constant(token: str):
    raise ValueError(f"non-finite number {token} is not allowed")


def _decode(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except ValueError as exc:
        raise ScenarioError(f"syntax error: {exc}") from None


def _named(kind: str, raw, fallback: str) -> str:
    """Locate an entity by its id when it has a usable one."""
    if isinstance(raw, dict) and isinstance(raw.get("id"), str) and raw["id"]:
        return f"{kind} {raw['id']!r}"
    return fallback


def scenario_from_dict(doc) -> Scenario:
    """Build a Scenario from a decoded document; raises on schema problems only."""
    rd = _Reader()
    top = rd.mapping(doc, "document", _TOP_KEYS)
    version = rd.integer(top, "schema_version", "document")
    if version is not None and version != SCHEMA_VERSION:
        rd.issues.append(f"document.schema_version: expected {SCHEMA_VERSION}, got {version}")
    name = rd.text(top, "name", "document")

    intervals = []
    for t, raw in enumerate(rd.items(top, "time_grid", "document")):
        where = f"time_grid[{t}]"
        iv = rd.mapping(raw, where, _INTERVAL_KEYS)
        label = rd.enum(iv, "label", where, IntervalLabel, IntervalLabel.PEAK)
        intervals.append(TimeInterval(t, label, rd.number(iv, "hours", where, math.nan)))

    u = rd.mapping(top.get("utility", {}), "utility", _UTILITY_KEYS)
    utility = UtilityParams(
        rd.number(u, "c0", "utility", math.nan),
        rd.number(u, "c1", "utility", math.nan),
        rd.number(u, "c2", "utility", math.nan),
        rd.numbers(u, "pre_dr_supply", "utility"),
    )

    programs, eus = [], []
    for i, raw in enumerate(rd.items(top, "programs", "document")):
        where = _named("program", raw, f"programs[{i}]")
        p = rd.mapping(raw, where, _PROGRAM_KEYS)
        pid = rd.text(p, "id", where)
        members = []
        for j, raw_eu in enumerate(rd.items(p, "eus", where)):
            ewhere = _named("EU", raw_eu, f"{where}.eus[{j}]")
            e = rd.mapping(raw_eu, ewhere, _EU_KEYS)
            eid = rd.text(e, "id", ewhere)
            eus.append(EndUser(eid, pid, rd.numbers(e, "base_load", ewhere), rd.number(e, "willingness", ewhere, math.nan)))
            members.append(eid)
        programs.append(
            DrProgram(
                pid,
                rd.enum(p, "kind", where, ProgramKind, ProgramKind.RESIDENTIAL),
                rd.numbers(p, "retail_rate", where),
                tuple(members),
            )
        )

    a = rd.mapping(top.get("algorithm", {}), "algorithm", _ALGORITHM_KEYS, required=())
    defaults = AlgorithmConfig()
    max_price = None if a.get("max_price") is None else rd.number(a, "max_price", "algorithm")
    faithful = a.get("faithful_stop", defaults.faithful_stop)
    if not isinstance(faithful, bool):
        rd.issues.append(f"algorithm.faithful_stop: expected true or false, got {faithful!r}")
        faithful = defaults.faithful_stop
    algorithm = AlgorithmConfig(
        price_step=rd.number(a, "price_step", "algorithm", defaults.price_step),
        epsilon=rd.number(a, "epsilon", "algorithm", defaults.epsilon),
        max_price=max_price,
        mode=rd.enum(a, "mode", "algorithm", SolveMode, defaults.mode),
        solver_tol=rd.number(a, "solver_tol", "algorithm", defaults.solver_tol),
        oracle_grid_points=rd.integer(a, "oracle_grid_points", "algorithm", defaults.oracle_grid_points),
        faithful_stop=faithful,
    )
    if rd.issues:
        raise ScenarioError("scenario document does not match the schema", rd.issues)
    return Scenario(name, TimeGrid(tuple(intervals)), tuple(programs), tuple(eus), utility, algorithm)


def _read_source(source) -> str:
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    text = str(source)
    if text.lstrip().startswith("{"):
        return text
    return Path(text).read_text(encoding="utf-8")


def load_scenario(source, *, validate: bool = True) -> Scenario:
    """Load a scenario from a path, a JSON string or ``builtin:NAME``.

    With ``validate`` (the default) domain-invariant violations raise a
    :class:`ScenarioError` listing every issue.
    """
    if isinstance(source, str) and source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        if name not in BUILTINS:
            raise ScenarioError(f"unknown builtin scenario {name!r}; choose from {sorted(BUILTINS)}")
        scenario = builtin_scenario(name)
    else:
        try:
            text = _read_source(source)
        except OSError as exc:
            raise ScenarioError(f"cannot read scenario {source}: {exc.strerror or exc}") from None
        scenario = scenario_from_dict(_decode(text))
    if validate:
        issues = validate_scenario(scenario)
        if issues:
            raise ScenarioError(f"scenario {scenario.name!r} is invalid", [str(i) for i in issues])
    return scenario


def scenario_to_dict(s: Scenario) -> dict:
    algorithm = {
        "mode": s.algorithm.mode.value,
        "price_step": s.algorithm.price_step,
        "epsilon": s.algorithm.epsilon,
        "max_price": s.algorithm.max_price,
        "solver_tol": s.algorithm.solver_tol,
        "oracle_grid_points": s.algorithm.oracle_grid_points,
        "faithful_stop": s.algorithm.faithful_stop,
    }
    if algorithm["max_price"] is None:
        del algorithm["max_price"]
    return {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "time_grid": [{"label": iv.label.value, "hours": iv.hours} for iv in s.time_grid],
        "utility": {
            "c0": s.utility.c0,
            "c1": s.utility.c1,
            "c2": s.utility.c2,
            "pre_dr_supply": list(s.utility.pre_dr_supply),
        },
        "programs": [
            {
                "id": p.id,
                "kind": p.kind.value,
                "retail_rate": list(p.retail_rate),
                "eus": [
                    {"id": e.id, "base_load": list(e.base_load), "willingness": e.willingness}
                    for e in s.members(p)
                ],
            }
            for p in s.programs
        ],
        "algorithm": algorithm,
    }


def save_scenario(s: Scenario) -> str:
    """Canonical JSON text: fixed key order, shortest round-trip floats.

    Raises ``ValueError`` if any number is NaN or infinite.
    """
    doc = scenario_to_dict(s)
    return json.dumps(doc, indent=2, allow_nan=False, ensure_ascii=False) + "\n"
