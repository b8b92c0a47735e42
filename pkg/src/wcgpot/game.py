"""Weighted congestion games with polynomial latencies.

All quantities are exact: weights and coefficients are ``Fraction`` values
and every derived cost is computed without rounding.  A state is a plain
tuple holding, for each player, the index of the strategy it plays.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .errors import CapacityError, DomainError, InvalidReferenceError, WcgError

State = tuple[int, ...]

DEFAULT_STATE_CAP = 100_000


def as_fraction(value: object, what: str = "value") -> Fraction:
    """Convert ints, ``Fraction`` objects and ``"num/den"`` strings exactly.

    Floats are refused: they rarely hold the value the caller meant.
    """
    if isinstance(value, bool):
        raise TypeError(f"{what} must be rational, got bool")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"{what}: malformed rational {value!r}") from exc
    raise TypeError(f"{what} must be an int, Fraction or 'num/den' string, got {type(value).__name__}")


@dataclass(frozen=True)
class Player:
    id: int
    weight: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "weight", as_fraction(self.weight, "weight"))
        if self.weight <= 0:
            raise DomainError(f"player {self.id}: weight must be > 0, got {self.weight}")


@dataclass(frozen=True)
class Resource:
    """A resource with latency ``coefficient * load ** degree``."""

    id: int
    coefficient: Fraction
    degree: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficient", as_fraction(self.coefficient, "coefficient"))
        if self.coefficient <= 0:
            raise DomainError(f"resource {self.id}: coefficient must be > 0, got {self.coefficient}")
        if isinstance(self.degree, bool) or not isinstance(self.degree, int) or self.degree < 1:
            raise DomainError(f"resource {self.id}: degree must be an integer >= 1, got {self.degree!r}")


@dataclass(frozen=True)
class LoadProfile:
    """Users and congestion of every resource in one state."""

    users: tuple[frozenset[int], ...]
    congestion: tuple[Fraction, ...]


@dataclass(frozen=True)
class GameInstance:
    """Immutable weighted congestion game.

    Strategies are stored as sorted tuples of resource ids; duplicates in a
    player's strategy list are dropped at construction (first occurrence
    wins, so surviving strategies keep their relative order).
    """

    players: tuple[Player, ...]
    resources: tuple[Resource, ...]
    strategies: tuple[tuple[tuple[int, ...], ...], ...]
    name: str | None = field(default=None, compare=False)
    metadata: tuple[tuple[str, str], ...] = field(default=(), compare=False)
    max_degree: int = field(init=False)
    _strategy_sets: tuple[tuple[frozenset[int], ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        players = tuple(self.players)
        resources = tuple(self.resources)
        if not players:
            raise DomainError("a game needs at least one player")
        if not resources:
            raise DomainError("a game needs at least one resource")
        for pos, p in enumerate(players):
            if p.id != pos:
                raise InvalidReferenceError(f"player ids must be 0..n-1 in order, found {p.id} at position {pos}")
        for pos, r in enumerate(resources):
            if r.id != pos:
                raise InvalidReferenceError(f"resource ids must be 0..m-1 in order, found {r.id} at position {pos}")
        if len(self.strategies) != len(players):
            raise InvalidReferenceError(
                f"expected strategy lists for {len(players)} players, got {len(self.strategies)}"
            )
        m = len(resources)
        normalized = []
        for i, strategy_list in enumerate(self.strategies):
            seen: set[tuple[int, ...]] = set()
            kept = []
            for strategy in strategy_list:
                ids = tuple(sorted(set(strategy)))
                if not ids:
                    raise DomainError(f"player {i}: strategies must be non-empty")
                for e in ids:
                    if isinstance(e, bool) or not isinstance(e, int) or not 0 <= e < m:
                        raise InvalidReferenceError(f"player {i}: unknown resource id {e!r}")
                if ids not in seen:
                    seen.add(ids)
                    kept.append(ids)
            if not kept:
                raise DomainError(f"player {i}: strategy set must be non-empty")
            normalized.append(tuple(kept))
        object.__setattr__(self, "players", players)
        object.__setattr__(self, "resources", resources)
        object.__setattr__(self, "strategies", tuple(normalized))
        object.__setattr__(self, "metadata", tuple(self.metadata))
        object.__setattr__(self, "max_degree", max(r.degree for r in resources))
        object.__setattr__(
            self, "_strategy_sets", tuple(tuple(frozenset(s) for s in lst) for lst in normalized)
        )

    @classmethod
    def build(
        cls,
        weights: Sequence[object],
        resources: Sequence[tuple[object, int]],
        strategies: Sequence[Iterable[Iterable[int]]],
        name: str | None = None,
        metadata: Iterable[tuple[str, str]] = (),
    ) -> GameInstance:
        """Build from bare weights, ``(coefficient, degree)`` pairs and strategy lists."""
        return cls(
            players=tuple(Player(i, w) for i, w in enumerate(weights)),
            resources=tuple(Resource(e, a, k) for e, (a, k) in enumerate(resources)),
            strategies=tuple(tuple(tuple(s) for s in lst) for lst in strategies),
            name=name,
            metadata=tuple(metadata),
        )

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def n_resources(self) -> int:
        return len(self.resources)

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(p.weight for p in self.players)

    def state_count(self) -> int:
        return math.prod(len(s) for s in self.strategies)

    def strategy_of(self, state: State, player: int) -> frozenset[int]:
        return self._strategy_sets[player][state[player]]

    def strategy_set(self, player: int, index: int) -> frozenset[int]:
        return self._strategy_sets[player][index]

    def check_player(self, player: int) -> None:
        if isinstance(player, bool) or not isinstance(player, int) or not 0 <= player < self.n_players:
            raise InvalidReferenceError(f"unknown player id {player!r}")

    def check_resource(self, resource: int) -> None:
        if isinstance(resource, bool) or not isinstance(resource, int) or not 0 <= resource < self.n_resources:
            raise InvalidReferenceError(f"unknown resource id {resource!r}")

    def check_state(self, state: Sequence[int]) -> State:
        state = tuple(state)
        if len(state) != self.n_players:
            raise InvalidReferenceError(f"state has {len(state)} entries, game has {self.n_players} players")
        for i, j in enumerate(state):
            if isinstance(j, bool) or not isinstance(j, int) or not 0 <= j < len(self.strategies[i]):
                raise InvalidReferenceError(f"player {i}: strategy index {j!r} out of range")
        return state

    def with_state(self, state: State, player: int, index: int) -> State:
        """The state ``[s_-i, s]`` where ``player`` switches to strategy ``index``."""
        return state[:player] + (index,) + state[player + 1:]


def iter_states(instance: GameInstance, cap: int = DEFAULT_STATE_CAP) -> Iterator[State]:
    """All states in lexicographic order of strategy indices."""
    size = instance.state_count()
    if size > cap:
        raise CapacityError(f"state space has {size} states, cap is {cap}", size=size, cap=cap)
    return itertools.product(*(range(len(s)) for s in instance.strategies))


def users_of(instance: GameInstance, state: State, resource: int) -> frozenset[int]:
    return frozenset(i for i in range(instance.n_players) if resource in instance.strategy_of(state, i))


def load_profile(instance: GameInstance, state: Sequence[int]) -> LoadProfile:
    state = instance.check_state(state)
    users: list[set[int]] = [set() for _ in instance.resources]
    congestion = [Fraction(0)] * instance.n_resources
    for i, p in enumerate(instance.players):
        for e in instance.strategy_of(state, i):
            users[e].add(i)
            congestion[e] += p.weight
    return LoadProfile(tuple(frozenset(u) for u in users), tuple(congestion))


def latency(instance: GameInstance, resource: int, users: Iterable[int]) -> Fraction:
    """``a_e * (total weight of users) ** k_e``; zero for an empty user set."""
    instance.check_resource(resource)
    users = frozenset(users)
    for i in users:
        instance.check_player(i)
    if not users:
        return Fraction(0)
    r = instance.resources[resource]
    load = sum((instance.players[i].weight for i in users), Fraction(0))
    return r.coefficient * load**r.degree


def _resource_latency(r: Resource, load: Fraction) -> Fraction:
    return r.coefficient * load**r.degree if load else Fraction(0)


def player_cost(instance: GameInstance, state: Sequence[int], player: int) -> Fraction:
    instance.check_player(player)
    profile = load_profile(instance, state)
    state = tuple(state)
    return sum(
        (_resource_latency(instance.resources[e], profile.congestion[e]) for e in instance.strategy_of(state, player)),
        Fraction(0),
    )


def player_costs(instance: GameInstance, state: Sequence[int]) -> tuple[Fraction, ...]:
    """Costs of all players at once; one pass over the load profile."""
    profile = load_profile(instance, state)
    state = tuple(state)
    lat = [_resource_latency(r, profile.congestion[r.id]) for r in instance.resources]
    return tuple(
        sum((lat[e] for e in instance.strategy_of(state, i)), Fraction(0)) for i in range(instance.n_players)
    )


def deviation_cost(instance: GameInstance, state: State, player: int, index: int, congestion: Sequence[Fraction]) -> Fraction:
    """Cost of ``player`` in ``[s_-i, S_i[index]]`` given the congestion of ``state``."""
    current = instance.strategy_of(state, player)
    w = instance.players[player].weight
    total = Fraction(0)
    for e in instance.strategy_set(player, index):
        load = congestion[e] if e in current else congestion[e] + w
        total += _resource_latency(instance.resources[e], load)
    return total


def social_cost_by_players(instance: GameInstance, state: Sequence[int]) -> Fraction:
    costs = player_costs(instance, state)
    return sum((p.weight * c for p, c in zip(instance.players, costs)), Fraction(0))


def social_cost_by_resources(instance: GameInstance, state: Sequence[int]) -> Fraction:
    profile = load_profile(instance, state)
    return sum(
        (r.coefficient * profile.congestion[r.id] ** (r.degree + 1) for r in instance.resources),
        Fraction(0),
    )


def social_cost(instance: GameInstance, state: Sequence[int]) -> Fraction:
    """Weighted sum of player costs, cross-checked against the per-resource form."""
    by_players = social_cost_by_players(instance, state)
    by_resources = social_cost_by_resources(instance, state)
    if by_players != by_resources:
        raise WcgError(f"social cost forms disagree: {by_players} != {by_resources}")
    return by_players


def tau_congestedness(instance: GameInstance, cap: int = DEFAULT_STATE_CAP) -> Fraction | None:
    """Largest tau for which the game is tau-congested, by full enumeration.

    Returns ``None`` when some state leaves a player alone on a resource,
    since no positive tau can then satisfy the condition.
    """
    best: Fraction | None = None
    w = instance.weights
    for state in iter_states(instance, cap):
        profile = load_profile(instance, state)
        for e, users in enumerate(profile.users):
            k = instance.resources[e].degree
            for i in users:
                others = profile.congestion[e] - w[i]
                if others <= 0:
                    return None
                ratio = others / (k * w[i])
                if best is None or ratio < best:
                    best = ratio
    return best
