"""Quarantine scenario policies and border-crossing adjudication."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .worldmap import GridWorld, in_quarantine

__all__ = ["PolicyKind", "AgentKind", "CrossingVerdict", "ScenarioPolicy", "adjudicate_crossing"]


class PolicyKind(enum.IntEnum):
    NONE = 0
    STRICT = 1
    LEAKY = 2

    @classmethod
    def parse(cls, text: str) -> "PolicyKind":
        aliases = {
            "none": cls.NONE, "no-intervention": cls.NONE, "nointervention": cls.NONE, "1": cls.NONE,
            "strict": cls.STRICT, "2": cls.STRICT,
            "leaky": cls.LEAKY, "partial": cls.LEAKY, "3": cls.LEAKY,
        }
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown scenario kind {text!r} (none|strict|leaky)") from None


class AgentKind(enum.IntEnum):
    HUMAN = 0
    INCUBATING = 1
    ZOMBIE = 2


class CrossingVerdict(enum.IntEnum):
    ALLOW = 0
    STOP = 1
    KILL = 2


@dataclass(frozen=True)
class ScenarioPolicy:
    kind: PolicyKind = PolicyKind.NONE
    activation_step: int = 14
    leak_probability: float = 0.001

    def __post_init__(self):
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if self.activation_step < 0:
            raise ValueError("activation_step must be >= 0")
        if not 0.0 <= self.leak_probability <= 1.0:
            raise ValueError("leak_probability must lie in [0, 1]")

    def active(self, step: int) -> bool:
        return self.kind != PolicyKind.NONE and step >= self.activation_step


def adjudicate_crossing(
    policy: ScenarioPolicy,
    step: int,
    agent_kind: AgentKind,
    src: Sequence[int],
    dst: Sequence[int],
    world: GridWorld,
    rng: np.random.Generator | None = None,
) -> CrossingVerdict:
    """Verdict for one movement attempt ``src -> dst`` during hour ``step``.

    Only a leaky outbound attempt consumes a random draw.
    """
    if not policy.active(step):
        return CrossingVerdict.ALLOW
    inside_src = in_quarantine(world, src)
    if inside_src == in_quarantine(world, dst):
        return CrossingVerdict.ALLOW
    if not inside_src:
        return CrossingVerdict.STOP
    if policy.kind == PolicyKind.LEAKY:
        if rng is None:
            raise ValueError("leaky policy needs a random stream")
        if rng.random() < policy.leak_probability:
            return CrossingVerdict.ALLOW
    return CrossingVerdict.KILL if agent_kind == AgentKind.ZOMBIE else CrossingVerdict.STOP
