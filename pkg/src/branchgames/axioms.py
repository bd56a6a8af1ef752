"""Rationality axiom checkers and the Dutch-book analyzer.

Two axioms are mechanized over the game model:

* Diachronic consistency ties an agent's ranking of two compound games to
  the branch-local rankings of the agent's descendants, who share the
  agent's kind.  The checker decides each scenario exactly and returns a
  replayable witness on violation.

* Solution continuity demands that a strict preference survive all
  sufficiently small perturbations of either game.  A sampler cannot
  certify a claim that quantifies over every nearby game, so the checker
  is falsification-only: it reports ``violated`` when every probed radius
  admits a counterexample, and ``no_violation_found`` otherwise.

The Dutch-book analyzer combines games riding on one shared branching
event and asks whether an agent who accepts each part also accepts a
package that loses on every branch.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .agents import Agent, Preference, compare
from .core import (
    Branch,
    CompoundGame,
    EventMismatchError,
    Game,
    GameError,
    RewardAlphabet,
    combine_on_shared_event,
    flatten,
    game_distance,
    validate_game,
    weight_vector,
)


class ScenarioError(GameError):
    """A diachronic scenario breaks its structural invariants."""


class NotStrictPreferenceError(GameError):
    """Continuity was asked about a pair the agent does not strictly rank."""


class Verdict(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    NO_VIOLATION_FOUND = "no_violation_found"


@dataclass(frozen=True)
class DiachronicScenario:
    """A root game plus, per root branch, the descendant's two options.

    Every root branch must carry positive weight: a weight-zero branch has
    no descendant, and letting one vote would manufacture spurious
    violations.
    """

    root: Game
    options: tuple[tuple[Game, Game], ...]

    def __post_init__(self) -> None:
        if len(self.options) != len(self.root.branches):
            raise ScenarioError(
                f"scenario on {self.root.name!r}: {len(self.root.branches)} root "
                f"branches but {len(self.options)} option pairs"
            )
        for b in self.root.branches:
            if b.weight <= 0:
                raise ScenarioError(
                    f"scenario on {self.root.name!r}: root branch with weight "
                    f"{b.weight} has no descendant"
                )


@dataclass(frozen=True)
class DiachronicWitness:
    """Everything needed to replay a diachronic verdict by hand.

    ``descendant_preferences[i]`` is the branch-i comparison of the first
    option against the second; the two compounds are the flattened games
    the senior agent actually ranks.
    """

    clause: str
    descendant_preferences: tuple[Preference, ...]
    strict_branches: tuple[int, ...]
    left_compound: Game
    right_compound: Game
    compound_preference: Preference


@dataclass(frozen=True)
class ContinuityLevel:
    """Outcome of probing one perturbation radius.

    The perturbed pair and its comparison are present exactly when a
    counterexample was found at this radius.
    """

    delta: Fraction
    left_perturbed: Optional[Game]
    right_perturbed: Optional[Game]
    preference: Optional[Preference]

    @property
    def falsified(self) -> bool:
        return self.preference is not None


@dataclass(frozen=True)
class ContinuityWitness:
    levels: tuple[ContinuityLevel, ...]

    def smallest_falsified(self) -> Optional[ContinuityLevel]:
        hit = None
        for level in self.levels:
            if level.falsified and (hit is None or level.delta < hit.delta):
                hit = level
        return hit


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    verdict: Verdict
    witness: object | None


def _flatten_with(root: Game, continuations: Sequence[Game], name: str) -> Game:
    # Caller has already validated root and continuations.
    return flatten(CompoundGame(root, tuple(continuations)), name=name, validate=False)


def check_diachronic(agent: Agent, scenario: DiachronicScenario) -> AxiomReport:
    """Decide diachronic consistency for one agent and scenario.

    With descendant preferences p_i = compare(first_i, second_i) and the
    flattened compounds L (root followed by first options) and R (root
    followed by second options):

    * clause i: if no p_i is PrefersRight, the agent must not rank R
      strictly above L;
    * clause ii: if additionally some p_i is PrefersLeft, the agent must
      rank L strictly above R.
    """
    validate_game(scenario.root)
    for first, second in scenario.options:
        validate_game(first)
        validate_game(second)

    descendant = tuple(
        compare(agent, first, second) for first, second in scenario.options
    )
    left = _flatten_with(
        scenario.root, [pair[0] for pair in scenario.options], "compound_first"
    )
    right = _flatten_with(
        scenario.root, [pair[1] for pair in scenario.options], "compound_second"
    )
    strict = tuple(
        i for i, p in enumerate(descendant) if p is Preference.PrefersLeft
    )

    none_prefer_second = all(p is not Preference.PrefersRight for p in descendant)
    clause_i_broken = (
        none_prefer_second
        and compare(agent, right, left) is Preference.PrefersLeft
    )
    forward = compare(agent, left, right)
    clause_ii_broken = (
        none_prefer_second
        and bool(strict)
        and forward is not Preference.PrefersLeft
    )

    if clause_i_broken or clause_ii_broken:
        witness = DiachronicWitness(
            clause="i" if clause_i_broken else "ii",
            descendant_preferences=descendant,
            strict_branches=strict,
            left_compound=left,
            right_compound=right,
            compound_preference=forward,
        )
        return AxiomReport("diachronic", Verdict.VIOLATED, witness)
    return AxiomReport("diachronic", Verdict.SATISFIED, None)


def _game_from_vector(
    name: str, alphabet: RewardAlphabet, vector: Sequence[Fraction]
) -> Game:
    return Game(
        name,
        tuple(Branch(r, w) for r, w in zip(alphabet.rewards, vector)),
    )


def _perturbations(
    game: Game,
    alphabet: RewardAlphabet,
    delta: Fraction,
    rng: random.Random,
    samples: int,
) -> list[Game]:
    """Candidate games within ``delta`` of ``game``, original first.

    Always includes every axis-aligned extreme move (shift min(delta, w_i)
    of weight from a support component i to another component j), then
    ``samples`` seeded random two-component moves.  All candidates stay on
    the alphabet and remain valid games.
    """
    vector = list(weight_vector(game, alphabet))
    size = len(vector)
    candidates = [game]
    if size < 2:
        return candidates
    for i in range(size):
        if vector[i] <= 0:
            continue
        amount = min(delta, vector[i])
        for j in range(size):
            if j == i:
                continue
            moved = list(vector)
            moved[i] -= amount
            moved[j] += amount
            candidates.append(
                _game_from_vector(
                    f"{game.name}[{i}->{j}@{delta}]", alphabet, moved
                )
            )
    support = [i for i in range(size) if vector[i] > 0]
    for s in range(samples):
        i = rng.choice(support)
        j = rng.choice([m for m in range(size) if m != i])
        amount = min(delta, vector[i]) * Fraction(rng.randint(1, 8), 8)
        moved = list(vector)
        moved[i] -= amount
        moved[j] += amount
        candidates.append(
            _game_from_vector(f"{game.name}[rand{s}@{delta}]", alphabet, moved)
        )
    return candidates


def check_continuity(
    agent: Agent,
    left: Game,
    right: Game,
    alphabet: RewardAlphabet,
    deltas: Sequence[Fraction],
    samples_per_delta: int,
    seed: int,
) -> AxiomReport:
    """Probe whether the strict preference for ``left`` survives nearby games.

    Requires compare(agent, left, right) = PrefersLeft; the axiom only
    constrains strict preferences.  For each radius delta (given strictly
    decreasing) the checker tests perturbed pairs (left', right') with
    both games within delta of the originals; finding a pair the agent no
    longer strictly ranks falsifies that radius.  The verdict is
    ``violated`` only when every radius is falsified, and the witness
    records one counterexample per radius; otherwise the verdict is
    ``no_violation_found``.  Deterministic for a fixed seed.
    """
    validate_game(left)
    validate_game(right)
    if not deltas:
        raise ValueError("deltas must be a nonempty decreasing sequence")
    for d in deltas:
        if d <= 0:
            raise ValueError(f"delta {d} is not positive")
    if any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise ValueError("deltas must be strictly decreasing")
    if samples_per_delta < 1:
        raise ValueError("samples_per_delta must be at least 1")
    if compare(agent, left, right) is not Preference.PrefersLeft:
        raise NotStrictPreferenceError(
            f"agent {agent.name!r} does not strictly prefer {left.name!r} "
            f"to {right.name!r}"
        )

    levels = []
    for delta in deltas:
        # One RNG per radius, seeded by a stable string, so results do not
        # depend on process hash seeds or on which radii were probed before.
        rng = random.Random(f"{seed}:{delta}")
        left_candidates = _perturbations(
            left, alphabet, delta, rng, samples_per_delta
        )
        right_candidates = _perturbations(
            right, alphabet, delta, rng, samples_per_delta
        )
        hit = None
        for lp in left_candidates:
            for rp in right_candidates:
                if game_distance(left, lp, alphabet) > delta:
                    continue
                if game_distance(right, rp, alphabet) > delta:
                    continue
                verdict = compare(agent, lp, rp)
                if verdict is not Preference.PrefersLeft:
                    hit = (lp, rp, verdict)
                    break
            if hit:
                break
        if hit:
            levels.append(ContinuityLevel(delta, hit[0], hit[1], hit[2]))
        else:
            levels.append(ContinuityLevel(delta, None, None, None))

    witness = ContinuityWitness(tuple(levels))
    if all(level.falsified for level in levels):
        return AxiomReport("continuity", Verdict.VIOLATED, witness)
    return AxiomReport("continuity", Verdict.NO_VIOLATION_FOUND, witness)


@dataclass(frozen=True)
class DutchBookReport:
    """Verdicts for a package of games riding on one branching event."""

    individual_preferences: tuple[Preference, ...]
    combined: Game
    null: Game
    combined_preference: Preference
    sure_loss: bool
    exposure: bool
    weak_exposure: bool


def analyze_dutch_book(
    agent: Agent, games: Sequence[Game], null: Game | None = None
) -> DutchBookReport:
    """Check whether accepting every game in the package is a sure loss.

    All games must share one branching event (identical weight lists).
    ``null`` is the zero-reward game on that event and is built when not
    supplied.  ``sure_loss`` holds when every support reward of the
    combined game is negative.  ``exposure`` requires the agent to accept
    each game strictly (preferred to null), to weakly accept the combined
    game, and sure_loss.  ``weak_exposure`` relaxes individual acceptance
    to weak preference, covering agents who are indifferent to everything.
    """
    if not games:
        raise ValueError("need at least one game")
    for g in games:
        validate_game(g)
    weights = [b.weight for b in games[0].branches]
    for g in games[1:]:
        if [b.weight for b in g.branches] != weights:
            raise EventMismatchError(
                f"{g.name!r} does not ride the same event as {games[0].name!r}"
            )
    if null is None:
        null = Game("null", tuple(Branch(Fraction(0), w) for w in weights))
    else:
        validate_game(null)
        if [b.weight for b in null.branches] != weights:
            raise EventMismatchError(
                f"null game {null.name!r} does not ride the shared event"
            )
        if any(b.reward != 0 for b in null.branches):
            raise ValueError(f"null game {null.name!r} must pay 0 on every branch")

    combined = games[0]
    for g in games[1:]:
        combined = combine_on_shared_event(combined, g)

    individual = tuple(compare(agent, g, null) for g in games)
    combined_pref = compare(agent, combined, null)
    sure_loss = all(b.reward < 0 for b in combined.support())
    accepts_each = all(p is Preference.PrefersLeft for p in individual)
    weakly_accepts_each = all(p is not Preference.PrefersRight for p in individual)
    accepts_package = combined_pref is not Preference.PrefersRight
    return DutchBookReport(
        individual_preferences=individual,
        combined=combined,
        null=null,
        combined_preference=combined_pref,
        sure_loss=sure_loss,
        exposure=accepts_each and accepts_package and sure_loss,
        weak_exposure=weakly_accepts_each and accepts_package and sure_loss,
    )
