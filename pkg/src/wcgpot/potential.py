"""The scaled-polynomial potential family and its local ratio certificate.

For a scaling vector ``gamma`` with ``1 <= gamma_e <= k_e + 1`` every resource
contributes

    a_e * ( gamma_e/(k_e+1) * W(P)**(k_e+1) + (1 - gamma_e/(k_e+1)) * sum_j w_j**(k_e+1) )

where ``W(P)`` is the total weight of the users ``P``.  ``gamma_e = 1``
everywhere gives the degree-bounded potential, ``gamma_e = k_e + 1`` gives
the social cost itself.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import CapacityError, DomainError, InvalidReferenceError, WcgError
from .game import DEFAULT_STATE_CAP, GameInstance, Resource, as_fraction, iter_states, load_profile

DEFAULT_TRIPLE_CAP = 1_000_000


@dataclass(frozen=True)
class GammaProfile:
    """Per-resource scaling factors.

    Use the named constructors; they validate ``1 <= gamma_e <= k_e + 1``
    against the instance.
    """

    gamma: tuple[Fraction, ...]
    name: str = "custom"

    @classmethod
    def custom(cls, instance: GameInstance, values: Sequence[object], name: str = "custom") -> GammaProfile:
        gamma = tuple(as_fraction(v, "gamma") for v in values)
        profile = cls(gamma, name)
        profile.check(instance)
        return profile

    @classmethod
    def all_ones(cls, instance: GameInstance) -> GammaProfile:
        return cls(tuple(Fraction(1) for _ in instance.resources), "all-ones")

    @classmethod
    def social(cls, instance: GameInstance) -> GammaProfile:
        return cls(tuple(Fraction(r.degree + 1) for r in instance.resources), "social")

    @classmethod
    def pos(cls, instance: GameInstance, delta: object) -> GammaProfile:
        """``gamma_e = min(k_e + 1, d + delta)`` for ``delta`` in [0, 1]."""
        delta = as_fraction(delta, "delta")
        if not 0 <= delta <= 1:
            raise DomainError(f"delta must lie in [0, 1], got {delta}")
        cut = instance.max_degree + delta
        return cls(tuple(min(Fraction(r.degree + 1), cut) for r in instance.resources), f"pos({delta})")

    @classmethod
    def named(cls, instance: GameInstance, name: str, delta: object = 0) -> GammaProfile:
        key = name.lower().replace("_", "-")
        if key == "all-ones":
            return cls.all_ones(instance)
        if key == "social":
            return cls.social(instance)
        if key == "pos":
            return cls.pos(instance, delta)
        raise DomainError(f"unknown profile {name!r}; expected all-ones, social or pos")

    def check(self, instance: GameInstance) -> None:
        if len(self.gamma) != instance.n_resources:
            raise InvalidReferenceError(
                f"profile has {len(self.gamma)} entries, game has {instance.n_resources} resources"
            )
        for r, g in zip(instance.resources, self.gamma):
            _check_gamma(r, g)

    @property
    def max_gamma(self) -> Fraction:
        return max(self.gamma)


def _check_gamma(resource: Resource, gamma: Fraction) -> None:
    if not 1 <= gamma <= resource.degree + 1:
        raise DomainError(f"resource {resource.id}: gamma must lie in [1, {resource.degree + 1}], got {gamma}")


def guaranteed_factor(instance: GameInstance, profile: GammaProfile) -> Fraction:
    """Approximation factor the range bound certifies for ``profile``.

    Each resource ratio lies in ``[1/gamma_e, max(1, k_e/gamma_e)]``; the
    quotient of the extreme ends over all resources is the factor.  For the
    all-ones profile this is ``d``, for ``min(k_e+1, d+delta)`` it is
    ``d + delta`` and for the social profile ``d + 1``.
    """
    profile.check(instance)
    upper = max(max(Fraction(1), r.degree / g) for r, g in zip(instance.resources, profile.gamma))
    return upper * profile.max_gamma


def resource_potential(resource: Resource, gamma: object, weights: Iterable[Fraction]) -> Fraction:
    """Unscaled per-resource potential of a multiset of user weights."""
    gamma = as_fraction(gamma, "gamma")
    _check_gamma(resource, gamma)
    weights = list(weights)
    if not weights:
        return Fraction(0)
    k = resource.degree
    blend = gamma / (k + 1)
    return blend * sum(weights, Fraction(0)) ** (k + 1) + (1 - blend) * sum(w ** (k + 1) for w in weights)


def potential_value(instance: GameInstance, profile: GammaProfile, state: Sequence[int]) -> Fraction:
    profile.check(instance)
    loads = load_profile(instance, state)
    w = instance.weights
    total = Fraction(0)
    for r, g, users in zip(instance.resources, profile.gamma, loads.users):
        if users:
            total += r.coefficient * resource_potential(r, g, (w[i] for i in users))
    return total


def reduced_ratio(x: object, h: int, beta: object) -> Fraction:
    """``(1+x)^h / (b(1+x)^(h+1) + (1 - b) - b x^(h+1))`` with ``b = beta/(h+1)``.

    For ``beta >= 1`` the value lies in ``[1/beta, max(1, h/beta)]``.
    """
    x = as_fraction(x, "x")
    beta = as_fraction(beta, "beta")
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")
    if isinstance(h, bool) or not isinstance(h, int) or h < 1:
        raise DomainError(f"h must be an integer >= 1, got {h!r}")
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    b = beta / (h + 1)
    denominator = b * (1 + x) ** (h + 1) + (1 - b) - b * x ** (h + 1)
    if denominator <= 0:
        raise WcgError(f"non-positive denominator {denominator} for x={x}, h={h}, beta={beta}")
    return (1 + x) ** h / denominator


def local_ratio(instance: GameInstance, resource: int, users: Iterable[int], player: int, gamma: object) -> Fraction:
    """Latency share of ``player`` over its marginal potential on ``resource``.

    Computed twice, from the raw marginal potential and from the reduced
    form in the relative load of the other users, and the two must agree.
    """
    instance.check_resource(resource)
    users = frozenset(users)
    for i in users:
        instance.check_player(i)
    if player not in users:
        raise DomainError(f"player {player} is not in the user set {sorted(users)}")
    r = instance.resources[resource]
    gamma = as_fraction(gamma, "gamma")
    _check_gamma(r, gamma)
    w = instance.weights
    load = sum((w[j] for j in users), Fraction(0))
    marginal = resource_potential(r, gamma, (w[j] for j in users)) - resource_potential(
        r, gamma, (w[j] for j in users if j != player)
    )
    if marginal <= 0:
        raise WcgError(f"non-positive marginal potential {marginal}")
    raw = w[player] * r.coefficient * load**r.degree / (r.coefficient * marginal)
    reduced = reduced_ratio((load - w[player]) / w[player], r.degree, gamma)
    if raw != reduced:
        raise WcgError(f"local ratio forms disagree: {raw} != {reduced}")
    return raw


@dataclass(frozen=True)
class Witness:
    resource: int
    users: frozenset[int]
    player: int


@dataclass(frozen=True)
class RatioRange:
    resource: int
    low: Fraction
    high: Fraction
    low_witness: Witness
    high_witness: Witness


@dataclass(frozen=True)
class RatioCertificate:
    """Observed extremes of the local ratio.

    ``implied_factor`` is the overall maximum over the overall minimum; the
    profile is an ``implied_factor``-approximate potential whenever the
    enumeration covered every set the ratio condition quantifies over.
    """

    per_resource: tuple[RatioRange | None, ...]
    low: Fraction
    high: Fraction
    implied_factor: Fraction
    low_witness: Witness
    high_witness: Witness
    triples: int
    complete: bool
    reachable_only: bool


def _all_subsets(n: int, max_size: int) -> Iterator[frozenset[int]]:
    for size in range(1, max_size + 1):
        for combo in itertools.combinations(range(n), size):
            yield frozenset(combo)


def _reachable_sets(instance: GameInstance, state_cap: int) -> list[set[frozenset[int]]]:
    seen: list[set[frozenset[int]]] = [set() for _ in instance.resources]
    for state in iter_states(instance, state_cap):
        for e, users in enumerate(load_profile(instance, state).users):
            if users:
                seen[e].add(users)
    return seen


def certify_potential(
    instance: GameInstance,
    profile: GammaProfile,
    subset_cap: int | None = None,
    *,
    reachable_only: bool = False,
    triple_cap: int = DEFAULT_TRIPLE_CAP,
    state_cap: int = DEFAULT_STATE_CAP,
) -> RatioCertificate:
    """Enumerate ``(resource, users, player)`` triples and bound the local ratio.

    By default every non-empty player subset of size at most ``subset_cap``
    (all sizes when ``None``) is used on every resource.  With
    ``reachable_only`` only user sets that actually occur in some state are
    considered, which is what the congestion-restricted bound relies on.
    """
    profile.check(instance)
    n = instance.n_players
    max_size = n if subset_cap is None else min(subset_cap, n)
    if max_size < 1:
        raise DomainError(f"subset_cap must be >= 1, got {subset_cap}")

    if reachable_only:
        families = [sorted(s, key=lambda u: (len(u), sorted(u))) for s in _reachable_sets(instance, state_cap)]
        families = [[u for u in fam if len(u) <= max_size] for fam in families]
        triples = sum(len(u) for fam in families for u in fam)
        complete = max_size == n
    else:
        per_resource = sum(size * comb(n, size) for size in range(1, max_size + 1))
        triples = per_resource * instance.n_resources
        complete = max_size == n
        families = None
    if triples > triple_cap:
        raise CapacityError(f"certificate needs {triples} ratio evaluations, cap is {triple_cap}", size=triples, cap=triple_cap)

    ranges: list[RatioRange | None] = []
    for e, g in enumerate(profile.gamma):
        sets = families[e] if families is not None else _all_subsets(n, max_size)
        low = high = None
        low_w = high_w = None
        for users in sets:
            for i in sorted(users):
                value = local_ratio(instance, e, users, i, g)
                if low is None or value < low:
                    low, low_w = value, Witness(e, users, i)
                if high is None or value > high:
                    high, high_w = value, Witness(e, users, i)
        if low is None:
            ranges.append(None)
        else:
            ranges.append(RatioRange(e, low, high, low_w, high_w))

    present = [r for r in ranges if r is not None]
    if not present:
        raise DomainError("no resource has any user set to certify")
    lowest = min(present, key=lambda r: r.low)
    highest = max(present, key=lambda r: r.high)
    return RatioCertificate(
        per_resource=tuple(ranges),
        low=lowest.low,
        high=highest.high,
        implied_factor=highest.high / lowest.low,
        low_witness=lowest.low_witness,
        high_witness=highest.high_witness,
        triples=triples,
        complete=complete,
        reachable_only=reachable_only,
    )
