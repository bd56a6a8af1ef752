"""Agent preference orders over branching games.

Each agent kind defines a total preorder on valid games via
:func:`compare`.  Four kinds are provided:

* ``dtbr`` ranks games by expected value, the weight-weighted mean reward.
* ``egalitarian`` ranks by expected value first and breaks exact ties in
  favour of the smaller support reward spread.
* ``optimist`` ranks by the largest reward on the support and does not
  resolve ties among games sharing that largest reward.
* ``stoic`` is indifferent between all games.  Its ``max_reward`` bound is
  descriptive only (the reward scale is taken as capped at that value); no
  comparison depends on it.

Comparisons return one of three verdicts and never raise on valid input,
so every kind is a total preorder by construction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import (
    Game,
    RationalLike,
    as_rational,
    expected_value,
    largest_reward,
    reward_range,
)


class Preference(enum.Enum):
    """Outcome of comparing a left game against a right game."""

    PrefersLeft = "PrefersLeft"
    PrefersRight = "PrefersRight"
    Indifferent = "Indifferent"

    def flipped(self) -> "Preference":
        if self is Preference.PrefersLeft:
            return Preference.PrefersRight
        if self is Preference.PrefersRight:
            return Preference.PrefersLeft
        return Preference.Indifferent


AGENT_KINDS = ("dtbr", "egalitarian", "optimist", "stoic")


@dataclass(frozen=True)
class Agent:
    """A named preference order of one of the four supported kinds."""

    name: str
    kind: str
    max_reward: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.kind not in AGENT_KINDS:
            raise ValueError(
                f"unknown agent kind {self.kind!r}; expected one of {AGENT_KINDS}"
            )
        if self.max_reward is not None and self.kind != "stoic":
            raise ValueError(f"max_reward only applies to stoic agents, not {self.kind}")

    @classmethod
    def of(cls, name: str, kind: str, max_reward: RationalLike | None = None) -> "Agent":
        bound = as_rational(max_reward) if max_reward is not None else None
        return cls(name, kind, bound)


def _rank(sign: Fraction) -> Preference:
    if sign > 0:
        return Preference.PrefersLeft
    if sign < 0:
        return Preference.PrefersRight
    return Preference.Indifferent


def compare(agent: Agent, left: Game, right: Game) -> Preference:
    """Rank two valid games under the agent's preference order."""
    if agent.kind == "dtbr":
        return _rank(expected_value(left) - expected_value(right))
    if agent.kind == "egalitarian":
        by_value = _rank(expected_value(left) - expected_value(right))
        if by_value is not Preference.Indifferent:
            return by_value
        # On an exact expected-value tie the smaller spread wins.
        return _rank(reward_range(right) - reward_range(left))
    if agent.kind == "optimist":
        return _rank(largest_reward(left) - largest_reward(right))
    # stoic: every game is as good as every other.
    return Preference.Indifferent


def strictly_prefers(agent: Agent, left: Game, right: Game) -> bool:
    return compare(agent, left, right) is Preference.PrefersLeft


def weakly_prefers(agent: Agent, left: Game, right: Game) -> bool:
    return compare(agent, left, right) is not Preference.PrefersRight
