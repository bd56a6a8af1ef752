"""Core model: validation, statistics, flattening, combination, distance."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchgames import (
    AlphabetMismatchError,
    Branch,
    CompoundGame,
    EmptyGameError,
    EventMismatchError,
    Game,
    RewardAlphabet,
    WeightRangeError,
    WeightSumError,
    as_rational,
    combine_on_shared_event,
    expected_value,
    flatten,
    game_distance,
    largest_reward,
    reward_range,
    validate_game,
    weight_vector,
)
from conftest import REWARD_POOL, compounds, games

F = Fraction

A = Game.of("A", (2, F(1, 2)), (3, F(1, 2)))
B = Game.of("B", (1, F(1, 2)), (4, F(1, 2)))
B0 = Game.of("B0", (1, 0), (0, 1))
CERTAIN1 = Game.of("certain1", (1, 1))


class TestValidation:
    def test_two_branch_game_is_valid(self):
        validate_game(A)

    def test_single_certain_branch_is_valid(self):
        validate_game(CERTAIN1)

    def test_zero_weight_branch_is_legal_and_kept(self):
        validate_game(B0)
        assert len(B0.branches) == 2
        assert B0.support() == (Branch(F(0), F(1)),)

    def test_empty_game_rejected(self):
        with pytest.raises(EmptyGameError):
            Game.of("empty")

    def test_all_zero_weights_rejected(self):
        # sum is 0, not 1; also the support would be empty
        with pytest.raises(WeightSumError):
            Game.of("null", (1, 0), (2, 0))

    def test_weights_must_sum_to_one(self):
        with pytest.raises(WeightSumError):
            Game.of("short", (1, F(1, 2)), (2, F(1, 3)))

    def test_negative_weight_rejected(self):
        with pytest.raises(WeightRangeError):
            Game.of("neg", (1, F(-1, 2)), (2, F(3, 2)))

    def test_weight_above_one_rejected(self):
        with pytest.raises(WeightRangeError):
            Game.of("big", (1, F(3, 2)), (2, F(-1, 2)))

    def test_validate_rejects_hand_built_invalid_game(self):
        bad = Game("bad", (Branch(F(1), F(1, 2)),))
        with pytest.raises(WeightSumError):
            validate_game(bad)


class TestRationalParsing:
    def test_integer_and_fraction_strings(self):
        assert as_rational("3") == F(3)
        assert as_rational("-2") == F(-2)
        assert as_rational("1/3") == F(1, 3)
        assert as_rational("-7/2") == F(-7, 2)

    def test_existing_rationals_and_ints_pass_through(self):
        assert as_rational(F(5, 4)) == F(5, 4)
        assert as_rational(7) == F(7)

    def test_decimal_notation_rejected(self):
        with pytest.raises(ValueError):
            as_rational("0.5")

    def test_exponent_notation_rejected(self):
        with pytest.raises(ValueError):
            as_rational("1e-3")

    def test_float_rejected(self):
        with pytest.raises(TypeError):
            as_rational(0.5)

    def test_zero_denominator_rejected(self):
        with pytest.raises(ValueError):
            as_rational("1/0")


class TestStatistics:
    def test_expected_value(self):
        assert expected_value(A) == F(5, 2)
        assert expected_value(B) == F(5, 2)
        assert expected_value(B0) == F(0)

    def test_expected_value_single_branch(self):
        assert expected_value(Game.of("seven", (7, 1))) == F(7)

    def test_largest_reward_ignores_zero_weight_branches(self):
        assert largest_reward(B) == F(4)
        assert largest_reward(B0) == F(0)

    def test_largest_reward_with_negative_rewards(self):
        g = Game.of("losses", (-5, F(1, 2)), (-1, F(1, 2)))
        assert largest_reward(g) == F(-1)

    def test_reward_range_over_support(self):
        assert reward_range(A) == F(1)
        assert reward_range(B) == F(3)
        assert reward_range(B0) == F(0)
        assert reward_range(CERTAIN1) == F(0)


class TestFlatten:
    def test_rewards_add_and_weights_multiply(self):
        root = Game.of("root", (1, F(1, 2)), (2, F(1, 2)))
        conts = (
            Game.of("c1", (10, F(1, 2)), (20, F(1, 2))),
            Game.of("c2", (0, 1)),
        )
        flat = flatten(CompoundGame(root, conts), name="flat")
        assert flat.name == "flat"
        assert flat.branches == (
            Branch(F(11), F(1, 4)),
            Branch(F(21), F(1, 4)),
            Branch(F(2), F(1, 2)),
        )

    def test_certain_continuations(self):
        root = Game.of("flip", (0, F(1, 2)), (0, F(1, 2)))
        conts = (Game.of("two", (2, 1)), Game.of("three", (3, 1)))
        flat = flatten(CompoundGame(root, conts))
        assert weight_vector(flat, RewardAlphabet.of([2, 3])) == (F(1, 2), F(1, 2))

    def test_zero_weight_root_branch_propagates(self):
        root = Game.of("r", (1, 0), (0, 1))
        conts = (Game.of("c", (5, 1)), Game.of("d", (7, 1)))
        flat = flatten(CompoundGame(root, conts))
        assert flat.branches == (Branch(F(6), F(0)), Branch(F(7), F(1)))
        validate_game(flat)

    def test_flatten_validates_by_default(self):
        bad_root = Game("bad", (Branch(F(0), F(1, 2)),))
        compound = CompoundGame(bad_root, (CERTAIN1,))
        with pytest.raises(WeightSumError):
            flatten(compound)

    def test_continuation_count_must_match(self):
        with pytest.raises(ValueError):
            CompoundGame(A, (CERTAIN1,))


class TestCombine:
    def test_mirror_bets_lock_in_a_loss(self):
        heads = Game.of("heads", (1, F(1, 2)), (-2, F(1, 2)))
        tails = Game.of("tails", (-2, F(1, 2)), (1, F(1, 2)))
        both = combine_on_shared_event(heads, tails, name="both")
        assert both.name == "both"
        assert both.branches == (Branch(F(-1), F(1, 2)), Branch(F(-1), F(1, 2)))

    def test_null_game_is_identity(self):
        null = Game.of("null", (0, F(1, 2)), (0, F(1, 2)))
        assert combine_on_shared_event(A, null).branches == A.branches

    def test_default_name_joins_the_operands(self):
        assert combine_on_shared_event(A, B).name == "A+B"

    def test_combining_a_game_with_itself_doubles_rewards(self):
        doubled = combine_on_shared_event(B, B)
        assert doubled.branches == (Branch(F(2), F(1, 2)), Branch(F(8), F(1, 2)))

    def test_weight_profiles_must_match(self):
        skew = Game.of("skew", (1, F(1, 3)), (4, F(2, 3)))
        with pytest.raises(EventMismatchError):
            combine_on_shared_event(B, skew)

    def test_branch_counts_must_match(self):
        with pytest.raises(EventMismatchError):
            combine_on_shared_event(A, CERTAIN1)


class TestWeightVectors:
    def test_equal_rewards_merge(self):
        g = Game.of("g", (1, F(1, 4)), (1, F(1, 4)), (0, F(1, 2)))
        alphabet = RewardAlphabet.of([0, 1])
        assert weight_vector(g, alphabet) == (F(1, 2), F(1, 2))

    def test_zero_weight_reward_outside_alphabet_rejected(self):
        alphabet = RewardAlphabet.of([0])
        with pytest.raises(AlphabetMismatchError):
            weight_vector(B0, alphabet)

    def test_distance_examples(self):
        alphabet = RewardAlphabet.of([0, 1])
        b_eps = Game.of("beps", (1, F(1, 100)), (0, F(99, 100)))
        certain1 = Game.of("c1", (1, 1), (0, 0))
        assert game_distance(certain1, b_eps, alphabet) == F(99, 100)
        assert game_distance(certain1, certain1, alphabet) == F(0)
        assert game_distance(certain1, B0, alphabet) == F(1)


class TestRewardAlphabet:
    def test_duplicates_collapse_and_order_is_sorted(self):
        alphabet = RewardAlphabet.of([3, 1, 1, 2])
        assert list(alphabet) == [F(1), F(2), F(3)]

    def test_from_games_collects_all_rewards(self):
        alphabet = RewardAlphabet.from_games(A, B0)
        assert list(alphabet) == [F(0), F(1), F(2), F(3)]

    def test_index_and_membership(self):
        alphabet = RewardAlphabet.of([0, 1])
        assert alphabet.index(F(1)) == 1
        assert F(0) in alphabet
        assert F(2) not in alphabet
        with pytest.raises(AlphabetMismatchError):
            alphabet.index(F(2))

    def test_must_not_be_empty(self):
        with pytest.raises(ValueError):
            RewardAlphabet.of([])

    def test_hand_built_unsorted_alphabet_rejected(self):
        with pytest.raises(ValueError):
            RewardAlphabet((F(2), F(1)))


class TestProperties:
    @given(compounds())
    def test_expected_value_adds_along_paths(self, compound):
        flat = flatten(compound)
        direct = expected_value(compound.root) + sum(
            (
                branch.weight * expected_value(cont)
                for branch, cont in zip(compound.root.branches, compound.continuations)
            ),
            F(0),
        )
        assert expected_value(flat) == direct

    @given(compounds())
    def test_flatten_output_is_always_valid(self, compound):
        validate_game(flatten(compound))

    @given(games(name="x"), st.lists(st.sampled_from(REWARD_POOL), min_size=1, max_size=8))
    def test_combine_adds_expected_values(self, left, rewards):
        # share the left game's event structure, vary only the rewards
        paired = Game(
            "paired",
            tuple(
                Branch(rewards[i % len(rewards)], branch.weight)
                for i, branch in enumerate(left.branches)
            ),
        )
        combined = combine_on_shared_event(left, paired)
        assert expected_value(combined) == expected_value(left) + expected_value(paired)
        assert largest_reward(combined) <= largest_reward(left) + largest_reward(paired)

    @given(games(name="g"), st.randoms(use_true_random=False))
    def test_expected_value_is_branch_order_invariant(self, game, rng):
        shuffled = list(game.branches)
        rng.shuffle(shuffled)
        other = Game("shuffled", tuple(shuffled))
        assert expected_value(other) == expected_value(game)
        assert largest_reward(other) == largest_reward(game)
        assert reward_range(other) == reward_range(game)

    @given(games(name="g"), st.integers(0, 3))
    def test_splitting_a_branch_preserves_statistics(self, game, quarters):
        branch = game.branches[0]
        first = branch.weight * F(quarters, 4)
        rest = branch.weight - first
        split = Game(
            "split",
            (Branch(branch.reward, first), Branch(branch.reward, rest))
            + game.branches[1:],
        )
        validate_game(split)
        assert expected_value(split) == expected_value(game)
        alphabet = RewardAlphabet.from_games(game)
        assert weight_vector(split, alphabet) == weight_vector(game, alphabet)

    @given(
        games(name="x"),
        games(name="y"),
        games(name="z"),
    )
    @settings(max_examples=60)
    def test_distance_is_a_pseudometric(self, x, y, z):
        alphabet = RewardAlphabet.of(REWARD_POOL)
        assert game_distance(x, x, alphabet) == F(0)
        assert game_distance(x, y, alphabet) == game_distance(y, x, alphabet)
        assert game_distance(x, z, alphabet) <= (
            game_distance(x, y, alphabet) + game_distance(y, z, alphabet)
        )
