"""Exact model of branching games.

A game is a finite branching event with a monetary reward attached to each
outcome branch, and a weight on each branch.  All numbers are exact
rationals (``fractions.Fraction``): the preference orders built on top of
this module turn on exact ties, which floating point would corrupt.

Composition follows a single rule: rewards add along a path, weights
multiply.  Zero-weight branches are legal and preserved as written, because
an agent may care about the difference between "an outcome with weight zero"
and "an outcome not listed at all".  The *support* of a game is the set of
branches with strictly positive weight; it is nonempty for every valid game.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

Rational = Fraction

RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"^-?\d+(?:/\d+)?$")


class GameError(Exception):
    """Base class for structural errors in games and their combinations."""


class EmptyGameError(GameError):
    """A game (or its support) has no branches."""


class WeightRangeError(GameError):
    """A branch weight lies outside [0, 1]."""


class WeightSumError(GameError):
    """Branch weights do not sum exactly to 1."""


class EventMismatchError(GameError):
    """Games claimed to share one branching event have different weights."""


class AlphabetMismatchError(GameError):
    """A reward does not belong to the reward alphabet in use."""


def as_rational(value: RationalLike) -> Fraction:
    """Coerce an int, ``p/q`` string, or Fraction to an exact rational.

    String literals follow the scenario-file grammar: an optional minus
    sign, digits, and an optional ``/posint`` suffix.  Decimal and float
    forms are rejected; they would smuggle binary-float ambiguity into an
    exact model.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.match(text):
            raise ValueError(f"not a rational literal: {value!r}")
        numerator, slash, denominator = text.partition("/")
        if slash:
            bottom = int(denominator)
            if bottom == 0:
                raise ValueError(f"zero denominator: {value!r}")
            return Fraction(int(numerator), bottom)
        return Fraction(int(numerator))
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


@dataclass(frozen=True, slots=True)
class Branch:
    """One outcome of a game: a reward and the weight of its branch."""

    reward: Fraction
    weight: Fraction


@dataclass(frozen=True, slots=True)
class Game:
    """A finite branching event with a reward attached to each outcome.

    Weights must each lie in [0, 1] and sum exactly to 1 (see
    :func:`validate_game`).  Zero-weight branches are kept as written
    rather than normalised away.
    """

    name: str
    branches: tuple[Branch, ...]

    @classmethod
    def of(cls, name: str, *branches: tuple[RationalLike, RationalLike]) -> "Game":
        """Build and validate a game from ``(reward, weight)`` pairs."""
        built = cls(
            name,
            tuple(Branch(as_rational(r), as_rational(w)) for r, w in branches),
        )
        validate_game(built)
        return built

    def support(self) -> tuple[Branch, ...]:
        """Branches with strictly positive weight."""
        return tuple(b for b in self.branches if b.weight > 0)

    def __str__(self) -> str:
        inner = ", ".join(f"{b.reward}@{b.weight}" for b in self.branches)
        return f"{self.name}{{{inner}}}"


@dataclass(frozen=True, slots=True)
class CompoundGame:
    """A root game with one continuation game per root branch."""

    root: Game
    continuations: tuple[Game, ...]

    def __post_init__(self) -> None:
        if len(self.continuations) != len(self.root.branches):
            raise ValueError(
                f"compound on {self.root.name!r}: {len(self.root.branches)} root "
                f"branches but {len(self.continuations)} continuations"
            )


@dataclass(frozen=True)
class RewardAlphabet:
    """The ordered set of reward values a family of games may mention.

    Fixes the coordinate system for weight vectors, and with them the
    distance between games and the unknowns of a utility fit.
    """

    rewards: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.rewards:
            raise ValueError("alphabet must contain at least one reward")
        if any(a >= b for a, b in zip(self.rewards, self.rewards[1:])):
            raise ValueError("alphabet rewards must be strictly increasing")

    @classmethod
    def of(cls, values: Iterable[RationalLike]) -> "RewardAlphabet":
        return cls(tuple(sorted({as_rational(v) for v in values})))

    @classmethod
    def from_games(cls, *games: Game) -> "RewardAlphabet":
        return cls.of(b.reward for g in games for b in g.branches)

    def index(self, reward: Fraction) -> int:
        try:
            return self.rewards.index(reward)
        except ValueError:
            raise AlphabetMismatchError(
                f"reward {reward} not in alphabet {self}"
            ) from None

    def __contains__(self, reward: object) -> bool:
        return reward in self.rewards

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.rewards)

    def __len__(self) -> int:
        return len(self.rewards)

    def __str__(self) -> str:
        return "{" + ", ".join(str(r) for r in self.rewards) + "}"


def validate_game(game: Game) -> None:
    """Check the game invariants; raise a :class:`GameError` subclass if broken.

    A valid game has at least one branch, every weight in [0, 1], and
    weights summing exactly to 1.
    """
    if not game.branches:
        raise EmptyGameError(f"game {game.name!r} has no branches")
    total = ZERO
    for b in game.branches:
        if b.weight < 0 or b.weight > 1:
            raise WeightRangeError(
                f"game {game.name!r}: weight {b.weight} outside [0, 1]"
            )
        total += b.weight
    if total != 1:
        raise WeightSumError(
            f"game {game.name!r}: weights sum to {total}, expected 1"
        )


def expected_value(game: Game) -> Fraction:
    """Weight-weighted sum of rewards; zero-weight branches contribute nothing."""
    total = ZERO
    for b in game.branches:
        total += b.weight * b.reward
    return total


def largest_reward(game: Game) -> Fraction:
    """Largest reward on the support (branches with weight > 0 only)."""
    sup = game.support()
    if not sup:
        raise EmptyGameError(f"game {game.name!r} has empty support")
    return max(b.reward for b in sup)


def reward_range(game: Game) -> Fraction:
    """Spread of the support rewards: largest minus smallest."""
    sup = game.support()
    if not sup:
        raise EmptyGameError(f"game {game.name!r} has empty support")
    rewards = [b.reward for b in sup]
    return max(rewards) - min(rewards)


def flatten(
    compound: CompoundGame, name: str | None = None, *, validate: bool = True
) -> Game:
    """Collapse a root game plus per-branch continuations into one game.

    Produces one branch per (root branch i, continuation branch j) pair
    with reward ``root_i + cont_j`` and weight ``root_i * cont_j``.  The
    result is always a valid game when the inputs are.  ``validate=False``
    skips re-validating inputs a caller has already validated.
    """
    if validate:
        validate_game(compound.root)
        for cont in compound.continuations:
            validate_game(cont)
    branches = []
    for root_branch, cont in zip(compound.root.branches, compound.continuations):
        for b in cont.branches:
            branches.append(
                Branch(root_branch.reward + b.reward, root_branch.weight * b.weight)
            )
    return Game(
        name if name is not None else f"{compound.root.name}*",
        tuple(branches),
    )


def combine_on_shared_event(first: Game, second: Game, name: str | None = None) -> Game:
    """Add two games that resolve on the same branching event.

    Branch i of the result keeps the shared weight and pays the sum of the
    two rewards.  Raises :class:`EventMismatchError` unless the weight
    lists agree branch for branch.
    """
    if [b.weight for b in first.branches] != [b.weight for b in second.branches]:
        raise EventMismatchError(
            f"{first.name!r} and {second.name!r} do not share a branching event"
        )
    branches = tuple(
        Branch(a.reward + b.reward, a.weight)
        for a, b in zip(first.branches, second.branches)
    )
    return Game(name if name is not None else f"{first.name}+{second.name}", branches)


def weight_vector(game: Game, alphabet: RewardAlphabet) -> tuple[Fraction, ...]:
    """Total weight per alphabet reward, merging equal-reward branches.

    Raises :class:`AlphabetMismatchError` if the game mentions a reward
    outside the alphabet (zero-weight branches included).
    """
    totals = [ZERO] * len(alphabet)
    for b in game.branches:
        totals[alphabet.index(b.reward)] += b.weight
    return tuple(totals)


def game_distance(first: Game, second: Game, alphabet: RewardAlphabet) -> Fraction:
    """Largest componentwise gap between the two games' weight vectors.

    A pseudometric: games differing only by branch order, or by splitting
    a branch into equal-reward pieces, are at distance 0.
    """
    v = weight_vector(first, alphabet)
    w = weight_vector(second, alphabet)
    return max(abs(a - b) for a, b in zip(v, w))
