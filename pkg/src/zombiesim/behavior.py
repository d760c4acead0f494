"""Fight/Flight/Freeze reaction model for a single zombie-human encounter."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "BehaviorTable",
    "Reaction",
    "InteractionOutcome",
    "interaction_outcome_probabilities",
    "conditional_defeat_probability",
    "resolve_interaction",
    "resolve_interaction_detailed",
]

PROB_TOL = 1e-12


class Reaction(enum.IntEnum):
    FIGHT = 0
    FLIGHT = 1
    FREEZE = 2


class InteractionOutcome(enum.IntEnum):
    ZOMBIE_KILLED = 0
    HUMAN_INFECTED = 1
    HUMAN_ESCAPED = 2


@dataclass(frozen=True)
class BehaviorTable:
    p_fight: float = 0.25
    p_flight: float = 0.55
    p_freeze: float = 0.20
    p_win_fight: float = 0.5
    p_escape: float = 0.70
    p_win_caught: float = 0.10
    p_win_freeze: float = 0.05

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{name}={value} is not a probability")
        total = self.p_fight + self.p_flight + self.p_freeze
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"reaction probabilities sum to {total!r}, expected 1")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.p_fight, self.p_flight, self.p_freeze, self.p_win_fight,
             self.p_escape, self.p_win_caught, self.p_win_freeze],
            dtype=np.float64,
        )


def interaction_outcome_probabilities(t: BehaviorTable) -> tuple[float, float, float]:
    """Marginal ``(p_zombie_dies, p_human_turns, p_escape)`` of one encounter."""
    caught = t.p_flight * (1.0 - t.p_escape)
    p_zdie = t.p_fight * t.p_win_fight + caught * t.p_win_caught + t.p_freeze * t.p_win_freeze
    p_hturn = (
        t.p_fight * (1.0 - t.p_win_fight)
        + caught * (1.0 - t.p_win_caught)
        + t.p_freeze * (1.0 - t.p_win_freeze)
    )
    p_escape = t.p_flight * t.p_escape
    return p_zdie, p_hturn, p_escape


def conditional_defeat_probability(t: BehaviorTable) -> float:
    """Probability the zombie dies given that the encounter ends in a fight."""
    p_zdie, p_hturn, _ = interaction_outcome_probabilities(t)
    denom = p_zdie + p_hturn
    if denom <= 0.0:
        raise ValueError("every encounter is an escape; no decisive fights occur")
    return p_zdie / denom


def resolve_interaction_detailed(
    rng: np.random.Generator, t: BehaviorTable
) -> tuple[Reaction, InteractionOutcome]:
    # Draw order (reaction, escape?, fight) is mirrored by the engine kernel.
    u = rng.random()
    if u < t.p_fight:
        won = rng.random() < t.p_win_fight
        reaction = Reaction.FIGHT
    elif u < t.p_fight + t.p_flight:
        reaction = Reaction.FLIGHT
        if rng.random() < t.p_escape:
            return reaction, InteractionOutcome.HUMAN_ESCAPED
        won = rng.random() < t.p_win_caught
    else:
        reaction = Reaction.FREEZE
        won = rng.random() < t.p_win_freeze
    return reaction, (InteractionOutcome.ZOMBIE_KILLED if won else InteractionOutcome.HUMAN_INFECTED)


def resolve_interaction(rng: np.random.Generator, t: BehaviorTable) -> InteractionOutcome:
    """Sample one encounter: a reaction first, then the fight or escape it leads to."""
    return resolve_interaction_detailed(rng, t)[1]
