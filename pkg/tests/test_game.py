from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_links
from wcgpot import (
    CapacityError,
    DomainError,
    GameInstance,
    InvalidReferenceError,
    generate_random,
    latency,
    load_profile,
    player_cost,
    social_cost,
    tau_congestedness,
)
from wcgpot.game import iter_states, player_costs, social_cost_by_players, social_cost_by_resources

seeds = st.integers(min_value=0, max_value=10_000)


def small_random(seed: int) -> GameInstance:
    return generate_random(seed, 3, 3, 3, 3, 2)


class TestConstruction:
    def test_max_degree_is_largest_degree(self):
        g = GameInstance.build([1], [(1, 1), (2, 3), (1, 2)], [[[0, 1, 2]]])
        assert g.max_degree == 3

    def test_duplicate_strategies_removed(self):
        g = GameInstance.build([1], [(1, 1), (1, 1)], [[[0, 1], [1, 0], [0], [1, 0]]])
        assert g.strategies == (((0, 1), (0,)),)

    def test_strategies_sorted(self):
        g = GameInstance.build([1], [(1, 1)] * 3, [[[2, 0]]])
        assert g.strategies[0][0] == (0, 2)

    @pytest.mark.parametrize("weight", [0, -1, "0/1"])
    def test_non_positive_weight(self, weight):
        with pytest.raises(DomainError, match="weight"):
            GameInstance.build([weight], [(1, 1)], [[[0]]])

    def test_non_positive_coefficient(self):
        with pytest.raises(DomainError, match="coefficient"):
            GameInstance.build([1], [(0, 1)], [[[0]]])

    def test_degree_below_one(self):
        with pytest.raises(DomainError, match="degree"):
            GameInstance.build([1], [(1, 0)], [[[0]]])

    def test_unknown_resource(self):
        with pytest.raises(InvalidReferenceError, match="unknown resource"):
            GameInstance.build([1], [(1, 1)], [[[1]]])

    def test_empty_strategy(self):
        with pytest.raises(DomainError, match="non-empty"):
            GameInstance.build([1], [(1, 1)], [[[]]])

    def test_empty_strategy_set(self):
        with pytest.raises(DomainError, match="non-empty"):
            GameInstance.build([1], [(1, 1)], [[]])

    def test_float_weight_refused(self):
        with pytest.raises(TypeError):
            GameInstance.build([0.5], [(1, 1)], [[[0]]])

    def test_immutable_and_hashable(self, links):
        with pytest.raises(AttributeError):
            links.players = ()  # type: ignore[misc]
        assert hash(links) == hash(two_links())

    def test_state_validation(self, links):
        with pytest.raises(InvalidReferenceError):
            links.check_state((0, 2))
        with pytest.raises(InvalidReferenceError):
            links.check_state((0,))


class TestLatency:
    def test_linear(self):
        g = GameInstance.build([2, 3], [(1, 1)], [[[0]], [[0]]])
        assert latency(g, 0, {0, 1}) == 5

    def test_quadratic(self):
        g = GameInstance.build([1, 1, 1], [(2, 2)], [[[0]]] * 3)
        assert latency(g, 0, {0, 1, 2}) == 18

    def test_empty_set(self):
        g = GameInstance.build([1], [(7, 3)], [[[0]]])
        assert latency(g, 0, set()) == 0

    def test_unknown_resource(self, links):
        with pytest.raises(InvalidReferenceError):
            latency(links, 5, {0})

    @given(seeds, st.data())
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_users(self, seed, data):
        g = small_random(seed)
        e = data.draw(st.integers(0, g.n_resources - 1))
        users = data.draw(st.sets(st.integers(0, g.n_players - 1)))
        extra = data.draw(st.integers(0, g.n_players - 1))
        assert latency(g, e, users | {extra}) >= latency(g, e, users)


class TestPlayerCost:
    def test_shared_linear(self):
        g = GameInstance.build([1, 2], [(1, 1)], [[[0]], [[0]]])
        assert player_cost(g, (0, 0), 0) == 3

    def test_two_quadratic_resources(self):
        g = GameInstance.build([2], [(1, 2), (1, 2)], [[[0, 1]]])
        assert player_cost(g, (0,), 0) == 8

    def test_three_units_quadratic(self):
        g = GameInstance.build([1, 1, 1], [(1, 2)], [[[0]]] * 3)
        assert [player_cost(g, (0, 0, 0), i) for i in range(3)] == [9, 9, 9]

    def test_unknown_player(self, links):
        with pytest.raises(InvalidReferenceError):
            player_cost(links, (0, 0), 2)

    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_strictly_positive(self, seed):
        g = small_random(seed)
        for state in iter_states(g):
            assert all(c > 0 for c in player_costs(g, state))


class TestSocialCost:
    def test_shared_linear(self):
        g = GameInstance.build([1, 2], [(1, 1)], [[[0]], [[0]]])
        assert social_cost(g, (0, 0)) == 9

    def test_unused_resource_contributes_nothing(self):
        g = GameInstance.build([1, 2], [(1, 1), (5, 3)], [[[0]], [[0]]])
        assert social_cost(g, (0, 0)) == 9

    def test_split_quadratic(self):
        g = two_links(degree=2)
        assert social_cost(g, (0, 1)) == 2

    @given(seeds)
    @settings(max_examples=40, deadline=None)
    def test_player_and_resource_forms_agree(self, seed):
        g = small_random(seed)
        for state in iter_states(g):
            assert social_cost_by_players(g, state) == social_cost_by_resources(g, state)

    def test_ordering_does_not_matter(self):
        g = small_random(11)
        for state in iter_states(g):
            costs = player_costs(g, state)
            terms = [w * c for w, c in zip(g.weights, costs)]
            assert sum(reversed(terms), Fraction(0)) == social_cost(g, state)


class TestLoadProfile:
    def test_users_and_congestion(self):
        g = GameInstance.build([1, Fraction(3, 2)], [(1, 1), (1, 1)], [[[0, 1]], [[1]]])
        profile = load_profile(g, (0, 0))
        assert profile.users == (frozenset({0}), frozenset({0, 1}))
        assert profile.congestion == (1, Fraction(5, 2))


def tau_by_forced_users(g: GameInstance) -> Fraction | None:
    """Closed form: the lightest crowd a user of ``e`` can face is made of
    the players every one of whose strategies contains ``e``."""
    best = None
    for i in range(g.n_players):
        for e in set().union(*g.strategies[i]):
            others = sum(
                (g.weights[j] for j in range(g.n_players) if j != i and all(e in s for s in g.strategies[j])),
                Fraction(0),
            )
            if others == 0:
                return None
            ratio = others / (g.resources[e].degree * g.weights[i])
            best = ratio if best is None or ratio < best else best
    return best


class TestTauCongestedness:
    def test_three_units_quadratic(self):
        g = GameInstance.build([1, 1, 1], [(1, 2)], [[[0]]] * 3)
        assert tau_congestedness(g) == 1

    def test_two_units_linear(self):
        g = GameInstance.build([1, 1], [(1, 1)], [[[0]]] * 2)
        assert tau_congestedness(g) == 1

    def test_player_can_be_alone(self, links):
        assert tau_congestedness(links) is None

    def test_capacity(self):
        g = GameInstance.build([1] * 4, [(1, 1)] * 4, [[[e] for e in range(4)]] * 4)
        with pytest.raises(CapacityError) as info:
            tau_congestedness(g, cap=100)
        assert info.value.size == 256

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_closed_form(self, seed):
        from wcgpot import generate_tau_congested

        g = generate_tau_congested(seed, Fraction(1, 2) * (1 + seed % 3), 6, 1 + seed % 2)
        assert tau_congestedness(g) == tau_by_forced_users(g)

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_closed_form_random(self, seed):
        g = small_random(seed)
        assert tau_congestedness(g) == tau_by_forced_users(g)
