"""Exhaustive enumeration of small diachronic scenario spaces.

The grid fixes a reward menu and a weight menu; every game whose weights
come from the menu and sum exactly to 1 is in play.  Root-branch rewards
are pinned to 0 throughout: adding the same root reward to both compounds
shifts their expected values equally and their reward ranges not at all,
so it can neither create nor destroy a violation, and dropping that axis
shrinks the space substantially.

Enumeration order is documented and stable, which makes runs reproducible
and lets a returned violation be identified by its index:

* scenarios are grouped by root branch count, ascending;
* within a group, root weight tuples follow menu product order (rightmost
  position varies fastest);
* the 2k option slots (first_1, second_1, ..., first_k, second_k) then run
  through the option-game pool in odometer order, last slot fastest;
* the option pool itself lists games by branch count ascending, then
  weight tuple, then reward tuple, in the same product order.

The projected scenario count is checked against a cap before any work
happens; set BRANCHGAMES_SCENARIO_CAP to raise or lower it.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .agents import Agent
from .axioms import AxiomReport, DiachronicScenario, Verdict, check_diachronic
from .core import Branch, Game, GameError, RationalLike, as_rational

DEFAULT_SCENARIO_CAP = 2_000_000
CAP_ENV_VAR = "BRANCHGAMES_SCENARIO_CAP"


class GridTooLargeError(GameError):
    """The grid would enumerate more scenarios than the configured cap."""


@dataclass(frozen=True)
class GridSpec:
    """Menus and size limits defining one enumeration space."""

    reward_grid: tuple[Fraction, ...]
    weight_grid: tuple[Fraction, ...]
    max_root_branches: int
    max_option_branches: int

    def __post_init__(self) -> None:
        if not self.reward_grid:
            raise ValueError("reward grid is empty")
        if not self.weight_grid:
            raise ValueError("weight grid is empty")
        if len(set(self.reward_grid)) != len(self.reward_grid):
            raise ValueError("reward grid has duplicates")
        if len(set(self.weight_grid)) != len(self.weight_grid):
            raise ValueError("weight grid has duplicates")
        for w in self.weight_grid:
            if w <= 0 or w > 1:
                raise ValueError(f"weight {w} outside (0, 1]")
        if self.max_root_branches < 1 or self.max_option_branches < 1:
            raise ValueError("branch limits must be at least 1")

    @classmethod
    def of(
        cls,
        rewards: list[RationalLike] | tuple[RationalLike, ...],
        weights: list[RationalLike] | tuple[RationalLike, ...],
        max_root_branches: int,
        max_option_branches: int,
    ) -> "GridSpec":
        return cls(
            tuple(as_rational(r) for r in rewards),
            tuple(as_rational(w) for w in weights),
            max_root_branches,
            max_option_branches,
        )


@dataclass(frozen=True)
class ViolationHit:
    """A violating scenario, its position in the stream, and its report."""

    index: int
    scenario: DiachronicScenario
    report: AxiomReport


def _weight_tuples(
    grid: tuple[Fraction, ...], length: int
) -> list[tuple[Fraction, ...]]:
    # Product order with the rightmost slot varying fastest; exact-sum filter.
    return [
        combo
        for combo in itertools.product(grid, repeat=length)
        if sum(combo) == 1
    ]


def _option_pool(spec: GridSpec) -> list[Game]:
    pool = []
    for size in range(1, spec.max_option_branches + 1):
        for weights in _weight_tuples(spec.weight_grid, size):
            for rewards in itertools.product(spec.reward_grid, repeat=size):
                pool.append(
                    Game(
                        f"O{len(pool)}",
                        tuple(Branch(r, w) for r, w in zip(rewards, weights)),
                    )
                )
    return pool


def _root_games(spec: GridSpec) -> list[Game]:
    zero = Fraction(0)
    roots = []
    for size in range(1, spec.max_root_branches + 1):
        for weights in _weight_tuples(spec.weight_grid, size):
            roots.append(
                Game(
                    f"R{len(roots)}",
                    tuple(Branch(zero, w) for w in weights),
                )
            )
    return roots


def scenario_count(spec: GridSpec) -> int:
    """Exact size of the stream, computed without enumerating it."""
    option_count = sum(
        len(_weight_tuples(spec.weight_grid, size)) * len(spec.reward_grid) ** size
        for size in range(1, spec.max_option_branches + 1)
    )
    total = 0
    for size in range(1, spec.max_root_branches + 1):
        root_tuples = len(_weight_tuples(spec.weight_grid, size))
        total += root_tuples * option_count ** (2 * size)
    return total


def _cap() -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return DEFAULT_SCENARIO_CAP
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{CAP_ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{CAP_ENV_VAR} must be positive")
    return value


def enumerate_scenarios(spec: GridSpec) -> Iterator[DiachronicScenario]:
    """Yield every grid scenario exactly once, in the documented order."""
    projected = scenario_count(spec)
    cap = _cap()
    if projected > cap:
        raise GridTooLargeError(
            f"grid projects {projected} scenarios, over the cap of {cap} "
            f"(set {CAP_ENV_VAR} to override)"
        )
    options = _option_pool(spec)
    for root in _root_games(spec):
        size = len(root.branches)
        for slots in itertools.product(options, repeat=2 * size):
            pairs = tuple(
                (slots[2 * i], slots[2 * i + 1]) for i in range(size)
            )
            yield DiachronicScenario(root, pairs)


def find_violation(
    agent: Agent, spec: GridSpec, axiom: str = "diachronic"
) -> Optional[ViolationHit]:
    """First scenario in the stream the agent violates, or None when clean."""
    if axiom != "diachronic":
        raise ValueError(f"unsupported axiom {axiom!r}")
    for index, scenario in enumerate(enumerate_scenarios(spec)):
        report = check_diachronic(agent, scenario)
        if report.verdict is Verdict.VIOLATED:
            return ViolationHit(index, scenario, report)
    return None
