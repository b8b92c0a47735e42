from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wcgpot import (
    CapacityError,
    DomainError,
    GameInstance,
    GammaProfile,
    InvalidReferenceError,
    certify_potential,
    generate_random,
    guaranteed_factor,
    local_ratio,
    potential_value,
    reduced_ratio,
    resource_potential,
    social_cost,
    verify_potential_on_graph,
)
from wcgpot.game import Resource, iter_states


def expanded_ratio(x: Fraction, h: int, beta: Fraction) -> Fraction:
    """Binomial expansion of the denominator, with the ``x^(h+1)`` terms cancelled by hand."""
    den = 1 + beta * sum(Fraction(comb(h, t), h + 1 - t) * x**t for t in range(1, h + 1))
    return (1 + x) ** h / den


rationals = st.fractions(min_value=0, max_value=50, max_denominator=20)
positive_weights = st.lists(st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=8), min_size=1, max_size=6)


class TestGammaProfile:
    def setup_method(self):
        self.g = GameInstance.build([1, 1], [(1, 1), (1, 3), (2, 2)], [[[0], [1, 2]]] * 2)

    def test_all_ones(self):
        assert GammaProfile.all_ones(self.g).gamma == (1, 1, 1)

    def test_social(self):
        assert GammaProfile.social(self.g).gamma == (2, 4, 3)

    @pytest.mark.parametrize("delta,expected", [(0, (2, 3, 3)), (Fraction(1, 2), (2, Fraction(7, 2), 3)), (1, (2, 4, 3))])
    def test_pos(self, delta, expected):
        assert GammaProfile.pos(self.g, delta).gamma == expected

    @pytest.mark.parametrize("delta", [-1, Fraction(3, 2)])
    def test_pos_delta_out_of_range(self, delta):
        with pytest.raises(DomainError):
            GammaProfile.pos(self.g, delta)

    def test_custom_out_of_range(self):
        with pytest.raises(DomainError, match="gamma"):
            GammaProfile.custom(self.g, [1, 5, 1])
        with pytest.raises(DomainError):
            GammaProfile.custom(self.g, [Fraction(1, 2), 1, 1])

    def test_length_mismatch(self):
        with pytest.raises(InvalidReferenceError):
            GammaProfile.custom(self.g, [1, 1])

    def test_unknown_name(self):
        with pytest.raises(DomainError, match="unknown profile"):
            GammaProfile.named(self.g, "harmonic")

    def test_guaranteed_factors(self):
        d = self.g.max_degree
        assert guaranteed_factor(self.g, GammaProfile.all_ones(self.g)) == d
        assert guaranteed_factor(self.g, GammaProfile.social(self.g)) == d + 1
        for delta in (0, Fraction(1, 2), 1):
            assert guaranteed_factor(self.g, GammaProfile.pos(self.g, delta)) == d + delta


class TestResourcePotential:
    def test_two_users_linear(self):
        assert resource_potential(Resource(0, 1, 1), 1, [1, 2]) == 7

    def test_rosenthal_three_units(self):
        assert resource_potential(Resource(0, 1, 1), 1, [1, 1, 1]) == 6

    @pytest.mark.parametrize("n", range(1, 9))
    def test_rosenthal_closed_form(self, n):
        assert resource_potential(Resource(0, 1, 1), 1, [1] * n) == n * (n + 1) // 2

    def test_empty(self):
        assert resource_potential(Resource(0, 1, 3), 2, []) == 0

    @given(st.fractions(min_value=Fraction(1, 8), max_value=8), st.integers(1, 5), st.data())
    @settings(max_examples=60)
    def test_singleton_is_weight_power(self, w, k, data):
        gamma = data.draw(st.fractions(min_value=1, max_value=k + 1))
        assert resource_potential(Resource(0, 1, k), gamma, [w]) == w ** (k + 1)

    @given(positive_weights, st.integers(1, 4))
    @settings(max_examples=60)
    def test_social_gamma_is_load_power(self, weights, k):
        assert resource_potential(Resource(0, 1, k), k + 1, weights) == sum(weights) ** (k + 1)

    @given(positive_weights, st.integers(1, 4), st.data())
    @settings(max_examples=60)
    def test_telescoping(self, weights, k, data):
        """Adding users one at a time sums marginals back to the whole."""
        gamma = data.draw(st.fractions(min_value=1, max_value=k + 1, max_denominator=6))
        r = Resource(0, 1, k)
        marginals = [
            resource_potential(r, gamma, weights[: j + 1]) - resource_potential(r, gamma, weights[:j])
            for j in range(len(weights))
        ]
        assert sum(marginals) == resource_potential(r, gamma, weights)

    def test_gamma_out_of_range(self):
        with pytest.raises(DomainError):
            resource_potential(Resource(0, 1, 1), 3, [1])


class TestPotentialValue:
    def test_single_player_quadratic(self):
        g = GameInstance.build([2], [(1, 2)], [[[0]]])
        assert potential_value(g, GammaProfile.all_ones(g), (0,)) == 8

    def test_shared_linear(self):
        g = GameInstance.build([1, 2], [(1, 1)], [[[0]], [[0]]])
        assert potential_value(g, GammaProfile.all_ones(g), (0, 0)) == 7

    def test_coefficient_scales(self):
        g = GameInstance.build([1, 2], [(3, 1)], [[[0]], [[0]]])
        assert potential_value(g, GammaProfile.all_ones(g), (0, 0)) == 21

    @pytest.mark.parametrize("seed", range(15))
    def test_social_profile_is_social_cost(self, seed):
        g = generate_random(seed, 3, 3, 3, 3, 2)
        profile = GammaProfile.social(g)
        for state in iter_states(g):
            assert potential_value(g, profile, state) == social_cost(g, state)

    @pytest.mark.parametrize("seed", range(15))
    @pytest.mark.parametrize("delta", [0, Fraction(1, 2), 1])
    def test_sandwich(self, seed, delta):
        g = generate_random(seed, 3, 3, 4, 3, 3)
        d = g.max_degree
        profile = GammaProfile.pos(g, delta)
        for state in iter_states(g):
            phi = potential_value(g, profile, state)
            assert phi <= social_cost(g, state) <= Fraction(d + 1, 1) / (d + delta) * phi


class TestReducedRatio:
    def test_zero_load(self):
        assert reduced_ratio(0, 3, 2) == 1

    def test_linear_all_ones_is_one(self):
        for x in (0, Fraction(1, 3), 1, 7, 100):
            assert reduced_ratio(x, 1, 1) == 1

    def test_quadratic_at_one(self):
        assert reduced_ratio(1, 2, 1) == Fraction(4, 3)

    def test_social_gamma_at_one(self):
        # (1+1)^2 / ((1+1)^3 - 1^3)
        assert reduced_ratio(1, 2, 3) == Fraction(4, 7)

    @pytest.mark.parametrize("x,h,beta", [(-1, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, -2)])
    def test_domain(self, x, h, beta):
        with pytest.raises(DomainError):
            reduced_ratio(x, h, beta)

    def test_float_refused(self):
        with pytest.raises(TypeError):
            reduced_ratio(0.5, 2, 1)

    @given(rationals, st.integers(1, 6), st.fractions(min_value=Fraction(1, 4), max_value=8, max_denominator=12))
    @settings(max_examples=300)
    def test_matches_expanded_form(self, x, h, beta):
        assert reduced_ratio(x, h, beta) == expanded_ratio(x, h, beta)

    @given(rationals, st.integers(1, 6), st.data())
    @settings(max_examples=300)
    def test_range(self, x, h, data):
        beta = data.draw(st.fractions(min_value=1, max_value=h + 1, max_denominator=12))
        value = reduced_ratio(x, h, beta)
        assert 1 / beta <= value <= max(Fraction(1), h / beta)


class TestLocalRatio:
    def test_linear_all_ones(self):
        g = GameInstance.build([1, 2], [(1, 1)], [[[0]], [[0]]])
        assert local_ratio(g, 0, {0, 1}, 0, 1) == 1

    def test_quadratic_equal_weights(self):
        g = GameInstance.build([1, 1], [(1, 2)], [[[0]], [[0]]])
        assert local_ratio(g, 0, {0, 1}, 1, 1) == Fraction(4, 3)

    def test_alone(self):
        g = GameInstance.build([3], [(5, 4)], [[[0]]])
        assert local_ratio(g, 0, {0}, 0, 2) == 1

    def test_player_outside_users(self):
        g = GameInstance.build([1, 1], [(1, 2)], [[[0]], [[0]]])
        with pytest.raises(DomainError):
            local_ratio(g, 0, {0}, 1, 1)

    def test_unknown_references(self):
        g = GameInstance.build([1], [(1, 2)], [[[0]]])
        with pytest.raises(InvalidReferenceError):
            local_ratio(g, 1, {0}, 0, 1)
        with pytest.raises(InvalidReferenceError):
            local_ratio(g, 0, {0, 4}, 0, 1)

    @pytest.mark.parametrize("seed", range(10))
    def test_equals_expanded_form(self, seed):
        g = generate_random(seed, 4, 2, 4, 2, 2)
        w = g.weights
        users = frozenset(range(g.n_players))
        for e, r in enumerate(g.resources):
            for i in users:
                x = (sum(w) - w[i]) / w[i]
                assert local_ratio(g, e, users, i, 1) == expanded_ratio(x, r.degree, Fraction(1))


class TestCertificate:
    def test_linear_is_exact(self):
        g = generate_random(3, 4, 3, 1, 2, 2)
        cert = certify_potential(g, GammaProfile.all_ones(g))
        assert cert.implied_factor == 1
        assert cert.complete and not cert.reachable_only

    def test_quadratic_two_units(self):
        g = GameInstance.build([1, 1], [(1, 2)], [[[0]], [[0]]])
        cert = certify_potential(g, GammaProfile.all_ones(g))
        assert (cert.low, cert.high) == (1, Fraction(4, 3))
        assert cert.implied_factor == Fraction(4, 3)
        assert cert.triples == 4
        assert cert.high_witness.users == frozenset({0, 1})

    def test_subset_cap_marks_incomplete(self):
        g = GameInstance.build([1, 1, 1], [(1, 2)], [[[0]]] * 3)
        cert = certify_potential(g, GammaProfile.all_ones(g), subset_cap=2)
        assert not cert.complete
        assert cert.triples == 3 + 2 * 3

    def test_triple_cap(self):
        g = GameInstance.build([1] * 8, [(1, 2)], [[[0]]] * 8)
        with pytest.raises(CapacityError):
            certify_potential(g, GammaProfile.all_ones(g), triple_cap=100)

    def test_reachable_only_skips_impossible_sets(self):
        g = GameInstance.build([1, 1], [(1, 2), (1, 2)], [[[0]], [[1]]])
        cert = certify_potential(g, GammaProfile.all_ones(g), reachable_only=True)
        assert cert.implied_factor == 1
        assert cert.triples == 2

    @pytest.mark.parametrize("seed", range(20))
    def test_ranges_within_closed_form(self, seed):
        g = generate_random(seed, 4, 3, 4, 2, 2)
        for profile in (GammaProfile.all_ones(g), GammaProfile.social(g), GammaProfile.pos(g, Fraction(1, 2))):
            cert = certify_potential(g, profile)
            for rng, r, gamma in zip(cert.per_resource, g.resources, profile.gamma):
                assert 1 / gamma <= rng.low <= rng.high <= max(Fraction(1), r.degree / gamma)
            assert cert.implied_factor <= guaranteed_factor(g, profile)

    @pytest.mark.parametrize("seed", range(20))
    def test_certificate_is_sound(self, seed):
        """The oracle finds no violating edge at the certified factor."""
        g = generate_random(seed, 3, 3, 3, 3, 2)
        profile = GammaProfile.all_ones(g)
        cert = certify_potential(g, profile)
        assert verify_potential_on_graph(g, profile, cert.implied_factor).passed
