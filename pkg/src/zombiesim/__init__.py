"""Agent-based zombie epidemic simulator on a 1 km population raster."""

from .behavior import BehaviorTable, InteractionOutcome
from .engine import RunOutcome, Winner, run
from .intervention import PolicyKind, ScenarioPolicy
from .movement import MovementParams
from .worldmap import Cell, GridWorld, SyntheticSpec, load_raster, synthetic_world

__version__ = "0.1.0"

__all__ = [
    "BehaviorTable",
    "Cell",
    "GridWorld",
    "InteractionOutcome",
    "MovementParams",
    "PolicyKind",
    "RunOutcome",
    "ScenarioPolicy",
    "SyntheticSpec",
    "Winner",
    "load_raster",
    "run",
    "synthetic_world",
]
