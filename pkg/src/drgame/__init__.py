"""Three-layer utility / DR provider / end-user pricing game.

The utility company (UC) posts a DR price to each third-party provider, each
provider buys DR quantity from its end users (EUs), and every EU trades its
payment against an inconvenience cost that diverges at its DR capacity.
"""

from drgame.errors import ContractError, DomainError, NumericError, ScenarioError
from drgame.model import (
    AlgorithmConfig,
    DrProgram,
    EndUser,
    Scenario,
    TimeGrid,
    TimeInterval,
    UtilityParams,
    ValidationIssue,
    validate_scenario,
)

__all__ = [
    "AlgorithmConfig",
    "ContractError",
    "DomainError",
    "DrProgram",
    "EndUser",
    "NumericError",
    "Scenario",
    "ScenarioError",
    "TimeGrid",
    "TimeInterval",
    "UtilityParams",
    "ValidationIssue",
    "validate_scenario",
]

__version__ = "0.1.0"
