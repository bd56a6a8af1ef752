"""Expected-utility representability of finite preference instances.

Given an agent's full comparison matrix over a finite set of games, decide
whether some utility function u on the reward alphabet reproduces every
comparison through expected utility: the agent prefers g to h exactly when
E_u(g) > E_u(h), where E_u weights u(reward) by branch weight.

Strict comparisons become gap constraints E_u(winner) - E_u(loser) >= 1
rather than open inequalities: feasible utilities are closed under positive
scaling, so the unit gap loses nothing and keeps the system solvable by
exact rational variable elimination.  Indifference becomes equality.  On
infeasible instances the solver returns an irreducible certificate: a
subset of the recorded comparisons that is itself unsatisfiable and stays
unsatisfiable under no further deletion.

Uniqueness is meant up to positive affine rescaling.  The fit is flagged
unique exactly when the indifference equations pin the solution space down
to that rescaling freedom: rank |alphabet| - 2 with strict comparisons
present (free scale and shift around a non-constant solution), or rank
|alphabet| - 1 without (constants only).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .agents import Agent, Preference, compare
from .core import Game, GameError, RewardAlphabet, validate_game, weight_vector

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"

_ZERO = Fraction(0)
_ONE = Fraction(1)


class InconsistentPreorderError(GameError):
    """The comparison matrix is not a total preorder."""


class DegenerateNormalizationError(GameError):
    """The fitted utility cannot be rescaled to 0/1 at the requested anchors."""


@dataclass(frozen=True)
class ComparisonConstraint:
    """One recorded comparison, by game index into the instance."""

    left: int
    right: int
    preference: Preference


@dataclass(frozen=True)
class PreferenceInstance:
    """An alphabet, games over it, and the full pairwise comparison matrix."""

    alphabet: RewardAlphabet
    games: tuple[Game, ...]
    comparisons: tuple[tuple[Preference, ...], ...]

    def constraint_list(self) -> tuple[ComparisonConstraint, ...]:
        """All unordered-pair comparisons, in (i, j) index order with i < j."""
        out = []
        for i in range(len(self.games)):
            for j in range(i + 1, len(self.games)):
                out.append(ComparisonConstraint(i, j, self.comparisons[i][j]))
        return tuple(out)


@dataclass(frozen=True)
class UtilityFit:
    verdict: str
    u: Optional[dict[Fraction, Fraction]]
    certificate: Optional[tuple[ComparisonConstraint, ...]]
    unique: Optional[bool]

    @property
    def feasible(self) -> bool:
        return self.verdict == FEASIBLE


def build_instance(
    agent: Agent, games: Sequence[Game], alphabet: RewardAlphabet
) -> PreferenceInstance:
    """Fill the comparison matrix by running the agent on every pair."""
    games = tuple(games)
    for g in games:
        validate_game(g)
        weight_vector(g, alphabet)  # raises AlphabetMismatchError if outside
    matrix = tuple(
        tuple(compare(agent, g, h) for h in games) for g in games
    )
    return PreferenceInstance(alphabet, games, matrix)


def _check_preorder(instance: PreferenceInstance) -> None:
    games = instance.games
    m = instance.comparisons
    n = len(games)
    if len(m) != n or any(len(row) != n for row in m):
        raise InconsistentPreorderError("comparison matrix is not square")
    for i in range(n):
        if m[i][i] is not Preference.Indifferent:
            raise InconsistentPreorderError(
                f"game {games[i].name!r} is not indifferent to itself"
            )
        for j in range(n):
            if m[i][j] is not m[j][i].flipped():
                raise InconsistentPreorderError(
                    f"asymmetric entries for {games[i].name!r} and {games[j].name!r}"
                )
    # Transitivity of the weak relation (i at-least-as-good-as j).
    at_least = [
        [m[i][j] is not Preference.PrefersRight for j in range(n)] for i in range(n)
    ]
    for i in range(n):
        for j in range(n):
            if not at_least[i][j]:
                continue
            for k in range(n):
                if at_least[j][k] and not at_least[i][k]:
                    raise InconsistentPreorderError(
                        f"intransitive ranking among {games[i].name!r}, "
                        f"{games[j].name!r}, {games[k].name!r}"
                    )


Row = tuple[tuple[Fraction, ...], Fraction]  # coeffs . u <= bound


def _normalize_row(row: Row) -> Row:
    coeffs, bound = row
    for c in coeffs:
        if c != 0:
            scale = abs(c)
            return (tuple(x / scale for x in coeffs), bound / scale)
    return row


def _clean(rows: list[Row]) -> Optional[list[Row]]:
    """Normalize, deduplicate, drop trivial rows; None on a constant contradiction."""
    seen = {}
    for row in rows:
        coeffs, bound = _normalize_row(row)
        if all(c == 0 for c in coeffs):
            if bound < 0:
                return None
            continue
        seen.setdefault((coeffs, bound), None)
    return list(seen.keys())


def _eliminate(rows: list[Row], var: int) -> list[Row]:
    upper = []
    lower = []
    kept = []
    for coeffs, bound in rows:
        c = coeffs[var]
        if c > 0:
            upper.append((coeffs, bound))
        elif c < 0:
            lower.append((coeffs, bound))
        else:
            kept.append((coeffs, bound))
    for ucoeffs, ubound in upper:
        for lcoeffs, lbound in lower:
            a = ucoeffs[var]
            b = -lcoeffs[var]
            coeffs = tuple(
                u * b + l * a for u, l in zip(ucoeffs, lcoeffs)
            )
            kept.append((coeffs, ubound * b + lbound * a))
    return kept


def _solve_rows(rows: list[Row], nvars: int) -> Optional[list[Fraction]]:
    """Exact feasibility by variable elimination; a witness point or None.

    Variables are eliminated from the highest index down, so the snapshot
    kept before eliminating variable k mentions variables 0..k only.  Back
    substitution then assigns variables in ascending order: midpoint when
    boxed between bounds, the single bound when one-sided, 0 when free.
    """
    current = _clean(rows)
    if current is None:
        return None
    snapshots: list[tuple[int, list[Row]]] = []
    for k in range(nvars - 1, -1, -1):
        snapshots.append((k, current))
        current = _clean(_eliminate(current, k))
        if current is None:
            return None
    values: list[Optional[Fraction]] = [None] * nvars
    for k, rows_k in reversed(snapshots):
        low = None
        high = None
        for coeffs, bound in rows_k:
            c = coeffs[k]
            if c == 0:
                continue
            rest = bound
            for m in range(k):
                if coeffs[m]:
                    rest -= coeffs[m] * values[m]
            limit = rest / c
            if c > 0:
                high = limit if high is None else min(high, limit)
            else:
                low = limit if low is None else max(low, limit)
        if low is not None and high is not None:
            values[k] = (low + high) / 2
        elif low is not None:
            values[k] = low
        elif high is not None:
            values[k] = high
        else:
            values[k] = _ZERO
    return values  # type: ignore[return-value]


def _constraint_rows(
    instance: PreferenceInstance, constraints: Sequence[ComparisonConstraint]
) -> list[Row]:
    vectors = [weight_vector(g, instance.alphabet) for g in instance.games]
    rows: list[Row] = []
    for c in constraints:
        diff = tuple(
            a - b for a, b in zip(vectors[c.left], vectors[c.right])
        )
        if c.preference is Preference.Indifferent:
            rows.append((diff, _ZERO))
            rows.append((tuple(-d for d in diff), _ZERO))
        elif c.preference is Preference.PrefersLeft:
            rows.append((tuple(-d for d in diff), -_ONE))
        else:
            rows.append((diff, -_ONE))
    return rows


def _equality_rank(
    instance: PreferenceInstance, constraints: Sequence[ComparisonConstraint]
) -> int:
    vectors = [weight_vector(g, instance.alphabet) for g in instance.games]
    pivots: dict[int, list[Fraction]] = {}
    for c in constraints:
        if c.preference is not Preference.Indifferent:
            continue
        row = [a - b for a, b in zip(vectors[c.left], vectors[c.right])]
        while True:
            lead = next((i for i, x in enumerate(row) if x != 0), None)
            if lead is None:
                break
            if lead not in pivots:
                pivots[lead] = row
                break
            pivot = pivots[lead]
            factor = row[lead] / pivot[lead]
            row = [x - factor * y for x, y in zip(row, pivot)]
    return len(pivots)


def _irreducible_certificate(
    instance: PreferenceInstance, constraints: tuple[ComparisonConstraint, ...]
) -> tuple[ComparisonConstraint, ...]:
    """Shrink an infeasible constraint set until every member is load-bearing.

    Deletion scan runs from the most recently declared constraint backward,
    so the surviving certificate favors the earliest declarations.
    """
    kept = list(constraints)
    for candidate in reversed(constraints):
        trial = [c for c in kept if c is not candidate]
        nvars = len(instance.alphabet)
        if _solve_rows(_constraint_rows(instance, trial), nvars) is None:
            kept = trial
    return tuple(kept)


def fit_utility(instance: PreferenceInstance) -> UtilityFit:
    """Decide representability; return a witness utility or a certificate."""
    _check_preorder(instance)
    constraints = instance.constraint_list()
    nvars = len(instance.alphabet)
    rows = _constraint_rows(instance, constraints)
    solution = _solve_rows(rows, nvars)
    if solution is None:
        return UtilityFit(
            verdict=INFEASIBLE,
            u=None,
            certificate=_irreducible_certificate(instance, constraints),
            unique=None,
        )
    u = {r: solution[i] for i, r in enumerate(instance.alphabet.rewards)}
    has_strict = any(
        c.preference is not Preference.Indifferent for c in constraints
    )
    expected_rank = nvars - 2 if has_strict else nvars - 1
    unique = _equality_rank(instance, constraints) == expected_rank
    return UtilityFit(verdict=FEASIBLE, u=u, certificate=None, unique=unique)


def verify_fit(
    instance: PreferenceInstance, u: Mapping[Fraction, Fraction]
) -> bool:
    """Independently confirm that u reproduces every recorded comparison."""
    for r in instance.alphabet:
        if r not in u:
            return False

    def eu(game: Game) -> Fraction:
        total = _ZERO
        for b in game.branches:
            total += b.weight * u[b.reward]
        return total

    for i, g in enumerate(instance.games):
        for j, h in enumerate(instance.games):
            gap = eu(g) - eu(h)
            recorded = instance.comparisons[i][j]
            if gap > 0 and recorded is not Preference.PrefersLeft:
                return False
            if gap < 0 and recorded is not Preference.PrefersRight:
                return False
            if gap == 0 and recorded is not Preference.Indifferent:
                return False
    return True


def normalize_fit(
    fit: UtilityFit, r_lo: Fraction, r_hi: Fraction
) -> UtilityFit:
    """Rescale a feasible fit so u(r_lo) = 0 and u(r_hi) = 1.

    Only positive affine rescalings preserve a fit, so the anchors must
    already satisfy u(r_lo) < u(r_hi); a constant fit (the degenerate
    case) admits no such anchors.
    """
    if not fit.feasible or fit.u is None:
        raise ValueError("cannot normalize an infeasible fit")
    if r_lo not in fit.u or r_hi not in fit.u:
        raise ValueError("anchor rewards are outside the fitted alphabet")
    lo = fit.u[r_lo]
    hi = fit.u[r_hi]
    if hi <= lo:
        raise DegenerateNormalizationError(
            f"u({r_lo}) = {lo} and u({r_hi}) = {hi} admit no increasing rescaling"
        )
    scale = hi - lo
    rescaled = {r: (v - lo) / scale for r, v in fit.u.items()}
    return UtilityFit(
        verdict=fit.verdict,
        u=rescaled,
        certificate=fit.certificate,
        unique=fit.unique,
    )
