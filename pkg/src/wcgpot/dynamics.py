"""Alpha-improvement dynamics.

A move of player ``i`` to strategy ``s`` is an alpha-improvement move when
``alpha * c_i([s_-i, s]) < c_i(s)``; a move whose factor equals alpha exactly
does not qualify.  ``run_dynamics`` applies such moves until none remain or
the step budget runs out.  Non-convergence is a reportable outcome, never an
exception: below ``alpha = d`` nothing guarantees termination.
"""

from __future__ import annotations

import enum
import random
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, InvariantViolation
from .game import DEFAULT_STATE_CAP, GameInstance, State, as_fraction, deviation_cost, load_profile, social_cost
from .oracle import exact_optima
from .potential import GammaProfile, guaranteed_factor, potential_value

DEFAULT_MAX_STEPS = 1_000_000


class Policy(enum.Enum):
    BEST_RESPONSE = "best-response"
    MAX_GAIN = "max-gain"
    ROUND_ROBIN = "round-robin"
    RANDOM = "random"


@dataclass(frozen=True)
class Scheduler:
    """Which improvement move to apply next.

    * ``BEST_RESPONSE``: the lowest-id player with an improving move plays
      its cheapest deviation.
    * ``MAX_GAIN``: the move with the largest old/new cost ratio overall.
    * ``ROUND_ROBIN``: players take turns in cyclic order; the next player
      with an improving move plays its lowest-index improving strategy.
    * ``RANDOM``: a uniformly random improving move, seeded.

    Ties go to the lowest player id, then the lowest strategy index.
    """

    policy: Policy = Policy.BEST_RESPONSE
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.policy is Policy.RANDOM and self.seed is None:
            raise DomainError("the random scheduler needs a seed")

    @classmethod
    def parse(cls, text: str) -> Scheduler:
        """Parse ``best-response``, ``max-gain``, ``round-robin`` or ``random:<seed>``."""
        name, _, seed = text.strip().lower().replace("_", "-").partition(":")
        try:
            policy = Policy(name)
        except ValueError:
            raise DomainError(f"unknown scheduler {text!r}") from None
        if policy is Policy.RANDOM:
            if not seed:
                raise DomainError("random scheduler needs a seed, e.g. random:7")
            return cls(policy, int(seed))
        if seed:
            raise DomainError(f"scheduler {name} takes no seed")
        return cls(policy)

    def __str__(self) -> str:
        return f"{self.policy.value}:{self.seed}" if self.policy is Policy.RANDOM else self.policy.value


BEST_RESPONSE = Scheduler(Policy.BEST_RESPONSE)
MAX_GAIN = Scheduler(Policy.MAX_GAIN)
ROUND_ROBIN = Scheduler(Policy.ROUND_ROBIN)


@dataclass(frozen=True)
class Move:
    player: int
    from_index: int
    to_index: int
    old_cost: Fraction
    new_cost: Fraction

    @property
    def improvement_factor(self) -> Fraction:
        return self.old_cost / self.new_cost


@dataclass(frozen=True)
class Step:
    move: Move
    state: State
    social_cost: Fraction
    potential: Fraction | None = None


@dataclass(frozen=True)
class MoveTrace:
    """Log of one dynamics run.

    ``repeated_state`` is the first state visited twice, if any.  For the
    deterministic schedulers a repeat of the scheduler's full situation means
    the run would cycle forever, so it stops there with ``converged = False``.
    """

    initial_state: State
    alpha: Fraction
    scheduler: Scheduler
    steps: tuple[Step, ...]
    terminal: State
    converged: bool
    initial_social_cost: Fraction
    initial_potential: Fraction | None = None
    profile: str | None = None
    repeated_state: State | None = None

    @property
    def steps_taken(self) -> int:
        return len(self.steps)

    @property
    def terminal_social_cost(self) -> Fraction:
        return self.steps[-1].social_cost if self.steps else self.initial_social_cost


def _check_alpha(alpha: object) -> Fraction:
    alpha = as_fraction(alpha, "alpha")
    if alpha < 1:
        raise DomainError(f"alpha must be >= 1, got {alpha}")
    return alpha


def improving_moves(instance: GameInstance, state: Sequence[int], alpha: object) -> list[Move]:
    """Every strict alpha-improvement move, ordered by player then strategy index."""
    alpha = _check_alpha(alpha)
    state = instance.check_state(state)
    congestion = load_profile(instance, state).congestion
    moves = []
    for i, current in enumerate(state):
        if len(instance.strategies[i]) == 1:
            continue
        old = deviation_cost(instance, state, i, current, congestion)
        for j in range(len(instance.strategies[i])):
            if j == current:
                continue
            new = deviation_cost(instance, state, i, j, congestion)
            if alpha * new < old:
                moves.append(Move(i, current, j, old, new))
    return moves


def is_equilibrium(instance: GameInstance, state: Sequence[int], alpha: object) -> bool:
    return not improving_moves(instance, state, alpha)


def _pick(moves: list[Move], scheduler: Scheduler, rng: random.Random | None, turn: int, n: int) -> Move:
    policy = scheduler.policy
    if policy is Policy.BEST_RESPONSE:
        mover = moves[0].player
        return min((m for m in moves if m.player == mover), key=lambda m: (m.new_cost, m.to_index))
    if policy is Policy.MAX_GAIN:
        return max(moves, key=lambda m: (m.improvement_factor, -m.player, -m.to_index))
    if policy is Policy.ROUND_ROBIN:
        return min(moves, key=lambda m: ((m.player - turn) % n, m.to_index))
    return rng.choice(moves)


def run_dynamics(
    instance: GameInstance,
    start: Sequence[int],
    alpha: object,
    scheduler: Scheduler = BEST_RESPONSE,
    max_steps: int = DEFAULT_MAX_STEPS,
    profile: GammaProfile | None = None,
) -> MoveTrace:
    """Apply alpha-improvement moves from ``start`` until none remain.

    With a ``profile`` attached the potential is recorded after every step.
    If ``alpha`` is at least the factor the profile is guaranteed to achieve,
    each step must strictly decrease it, otherwise ``InvariantViolation``.
    """
    alpha = _check_alpha(alpha)
    state = instance.check_state(start)
    if max_steps < 1:
        raise DomainError(f"max_steps must be > 0, got {max_steps}")
    must_decrease = False
    potential = None
    if profile is not None:
        must_decrease = alpha >= guaranteed_factor(instance, profile)
        potential = potential_value(instance, profile, state)
    rng = random.Random(scheduler.seed) if scheduler.policy is Policy.RANDOM else None
    # the scheduler's next choice depends only on this key, so a repeated key is a cycle
    cycle_key = {
        Policy.BEST_RESPONSE: lambda s, t: s,
        Policy.MAX_GAIN: lambda s, t: s,
        Policy.ROUND_ROBIN: lambda s, t: (s, t),
    }.get(scheduler.policy)
    n = instance.n_players

    initial_cost = social_cost(instance, state)
    initial_potential = potential
    visited = {state}
    seen_keys = {cycle_key(state, 0)} if cycle_key else set()
    repeated = None
    steps: list[Step] = []
    turn = 0
    converged = False
    while True:
        moves = improving_moves(instance, state, alpha)
        if not moves:
            converged = True
            break
        if len(steps) >= max_steps:
            break
        move = _pick(moves, scheduler, rng, turn, n)
        turn = (move.player + 1) % n
        state = instance.with_state(state, move.player, move.to_index)
        new_potential = None
        if profile is not None:
            new_potential = potential_value(instance, profile, state)
            if must_decrease and not new_potential < potential:
                raise InvariantViolation(
                    f"{profile.name} potential did not decrease on a {alpha}-improvement move "
                    f"{move} ({potential} -> {new_potential})"
                )
            potential = new_potential
        steps.append(Step(move, state, social_cost(instance, state), new_potential))
        if state in visited and repeated is None:
            repeated = state
        visited.add(state)
        if cycle_key is not None:
            key = cycle_key(state, turn)
            if key in seen_keys:
                break
            seen_keys.add(key)

    return MoveTrace(
        initial_state=tuple(start),
        alpha=alpha,
        scheduler=scheduler,
        steps=tuple(steps),
        terminal=state,
        converged=converged,
        initial_social_cost=initial_cost,
        initial_potential=initial_potential,
        profile=profile.name if profile is not None else None,
        repeated_state=repeated,
    )


def converge_from_optimum(
    instance: GameInstance,
    delta: object,
    scheduler: Scheduler = BEST_RESPONSE,
    max_steps: int = DEFAULT_MAX_STEPS,
    cap: int = DEFAULT_STATE_CAP,
) -> MoveTrace:
    """Run ``(d + delta)``-improvement dynamics from a social optimum.

    The start is the lexicographically first optimum; the scaled potential
    with ``gamma_e = min(k_e + 1, d + delta)`` is attached and checked.
    """
    profile = GammaProfile.pos(instance, delta)
    optima, _ = exact_optima(instance, cap)
    alpha = instance.max_degree + as_fraction(delta, "delta")
    return run_dynamics(instance, optima[0], alpha, scheduler, max_steps, profile)
