"""Brute-force ground truth for desk-scale games.

Everything here enumerates the full state space once (see ``state_space``)
and answers equilibrium, optimum and improvement-graph questions by exact
comparison.  Results are cached per ``(instance, cap)``, so repeated queries
on the same game are cheap.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError
from .game import DEFAULT_STATE_CAP, GameInstance, State, as_fraction, iter_states, player_costs
from .potential import GammaProfile, potential_value


def check_alpha(alpha: object) -> Fraction:
    alpha = as_fraction(alpha, "alpha")
    if alpha < 1:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    return alpha


@dataclass(frozen=True)
class Deviation:
    """A unilateral move out of some state, with both costs of the mover."""

    player: int
    to_index: int
    target: int
    old_cost: Fraction
    new_cost: Fraction

    def improves(self, alpha: Fraction) -> bool:
        return alpha * self.new_cost < self.old_cost


class StateSpace:
    """All states of a game with player costs, social costs and deviations."""

    def __init__(self, instance: GameInstance, cap: int = DEFAULT_STATE_CAP):
        self.instance = instance
        self.states: list[State] = list(iter_states(instance, cap))
        sizes = [len(s) for s in instance.strategies]
        strides = [1] * len(sizes)
        for i in range(len(sizes) - 2, -1, -1):
            strides[i] = strides[i + 1] * sizes[i + 1]
        self._strides = strides
        self.costs: list[tuple[Fraction, ...]] = [player_costs(instance, s) for s in self.states]
        w = instance.weights
        self.social: list[Fraction] = [
            sum((wi * c for wi, c in zip(w, costs)), Fraction(0)) for costs in self.costs
        ]
        self.deviations: list[tuple[Deviation, ...]] = []
        for idx, state in enumerate(self.states):
            moves = []
            for i, current in enumerate(state):
                base = idx - current * strides[i]
                for j in range(sizes[i]):
                    if j == current:
                        continue
                    target = base + j * strides[i]
                    moves.append(Deviation(i, j, target, self.costs[idx][i], self.costs[target][i]))
            self.deviations.append(tuple(moves))
        self._potentials: dict[GammaProfile, list[Fraction]] = {}

    def __len__(self) -> int:
        return len(self.states)

    def index(self, state: Sequence[int]) -> int:
        state = self.instance.check_state(state)
        return sum(j * s for j, s in zip(state, self._strides))

    def potentials(self, profile: GammaProfile) -> list[Fraction]:
        if profile not in self._potentials:
            profile.check(self.instance)
            self._potentials[profile] = [potential_value(self.instance, profile, s) for s in self.states]
        return self._potentials[profile]

    def improving(self, idx: int, alpha: Fraction) -> Iterator[Deviation]:
        return (d for d in self.deviations[idx] if d.improves(alpha))

    def is_equilibrium(self, idx: int, alpha: Fraction) -> bool:
        return not any(True for _ in self.improving(idx, alpha))


def state_space(instance: GameInstance, cap: int = DEFAULT_STATE_CAP) -> StateSpace:
    return _cached_space(instance, cap)


@lru_cache(maxsize=32)
def _cached_space(instance: GameInstance, cap: int) -> StateSpace:
    return StateSpace(instance, cap)


def enumerate_states(instance: GameInstance, cap: int = DEFAULT_STATE_CAP) -> Iterator[State]:
    """Every state exactly once, lexicographic in strategy indices."""
    return iter_states(instance, cap)


def exact_optima(instance: GameInstance, cap: int = DEFAULT_STATE_CAP) -> tuple[list[State], Fraction]:
    space = state_space(instance, cap)
    best = min(space.social)
    return [s for s, c in zip(space.states, space.social) if c == best], best


def equilibrium_set(instance: GameInstance, alpha: object, cap: int = DEFAULT_STATE_CAP) -> frozenset[State]:
    alpha = check_alpha(alpha)
    space = state_space(instance, cap)
    return frozenset(s for idx, s in enumerate(space.states) if space.is_equilibrium(idx, alpha))


def exact_pos(instance: GameInstance, alpha: object, cap: int = DEFAULT_STATE_CAP) -> Fraction | None:
    """Cheapest alpha-equilibrium over the optimum; ``None`` when there is none."""
    alpha = check_alpha(alpha)
    space = state_space(instance, cap)
    eq_costs = [space.social[idx] for idx in range(len(space)) if space.is_equilibrium(idx, alpha)]
    if not eq_costs:
        return None
    return min(eq_costs) / min(space.social)


@dataclass(frozen=True)
class ImprovementEdge:
    source: State
    target: State
    player: int
    factor: Fraction


@dataclass(frozen=True)
class ImprovementGraph:
    alpha: Fraction
    nodes: tuple[State, ...]
    edges: tuple[ImprovementEdge, ...]


def improvement_graph(instance: GameInstance, alpha: object, cap: int = DEFAULT_STATE_CAP) -> ImprovementGraph:
    alpha = check_alpha(alpha)
    space = state_space(instance, cap)
    edges = tuple(
        ImprovementEdge(space.states[idx], space.states[d.target], d.player, d.old_cost / d.new_cost)
        for idx in range(len(space))
        for d in space.improving(idx, alpha)
    )
    return ImprovementGraph(alpha, tuple(space.states), edges)


@dataclass(frozen=True)
class PotentialCheck:
    """Outcome of testing strict potential decrease on every improvement edge."""

    passed: bool
    alpha: Fraction
    profile: str
    edges_checked: int
    witness: ImprovementEdge | None = None
    potential_before: Fraction | None = None
    potential_after: Fraction | None = None


def verify_potential_on_graph(
    instance: GameInstance, profile: GammaProfile, alpha: object, cap: int = DEFAULT_STATE_CAP
) -> PotentialCheck:
    alpha = check_alpha(alpha)
    space = state_space(instance, cap)
    values = space.potentials(profile)
    checked = 0
    for idx in range(len(space)):
        for d in space.improving(idx, alpha):
            checked += 1
            if not values[d.target] < values[idx]:
                edge = ImprovementEdge(space.states[idx], space.states[d.target], d.player, d.old_cost / d.new_cost)
                return PotentialCheck(False, alpha, profile.name, checked, edge, values[idx], values[d.target])
    return PotentialCheck(True, alpha, profile.name, checked)


def find_improvement_cycle(instance: GameInstance, alpha: object, cap: int = DEFAULT_STATE_CAP) -> list[State] | None:
    """A directed cycle ``[s0, s1, ..., sk]`` of alpha-improvement moves, or ``None``.

    Consecutive states are joined by an edge and ``sk -> s0`` closes the
    cycle.  ``None`` means every alpha-improvement sequence terminates.
    """
    alpha = check_alpha(alpha)
    space = state_space(instance, cap)
    succ = [sorted({d.target for d in space.improving(idx, alpha)}) for idx in range(len(space))]
    cycle = first_cycle(succ)
    return None if cycle is None else [space.states[k] for k in cycle]


def first_cycle(succ: Sequence[Sequence[int]]) -> list[int] | None:
    """Iterative depth-first search for a directed cycle in an adjacency list."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = [WHITE] * len(succ)
    for root in range(len(succ)):
        if colour[root] != WHITE:
            continue
        path = [root]
        iters = [iter(succ[root])]
        colour[root] = GREY
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                colour[path.pop()] = BLACK
                iters.pop()
            elif colour[nxt] == GREY:
                return path[path.index(nxt):]
            elif colour[nxt] == WHITE:
                colour[nxt] = GREY
                path.append(nxt)
                iters.append(iter(succ[nxt]))
    return None


@dataclass(frozen=True)
class OracleReport:
    """Exhaustive facts about one instance.

    ``exact_pos`` maps alpha to ``None`` where no alpha-equilibrium exists.
    ``improvement_edges`` counts alpha-improvement moves per alpha.
    """

    state_count: int
    optima: tuple[State, ...]
    optimum_cost: Fraction
    equilibria: dict[Fraction, frozenset[State]] = field(default_factory=dict)
    exact_pos: dict[Fraction, Fraction | None] = field(default_factory=dict)
    improvement_edges: dict[Fraction, int] = field(default_factory=dict)


def oracle_report(instance: GameInstance, alphas: Iterable[object], cap: int = DEFAULT_STATE_CAP) -> OracleReport:
    space = state_space(instance, cap)
    optima, best = exact_optima(instance, cap)
    equilibria, pos, edges = {}, {}, {}
    for a in sorted({check_alpha(a) for a in alphas}):
        equilibria[a] = equilibrium_set(instance, a, cap)
        pos[a] = exact_pos(instance, a, cap)
        edges[a] = sum(1 for idx in range(len(space)) for _ in space.improving(idx, a))
    return OracleReport(len(space), tuple(optima), best, equilibria, pos, edges)
