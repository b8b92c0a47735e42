"""Instance documents, network games and seeded generators.

Document format (``.wcg``), line oriented, ``#`` starts a comment::

    wcg-instance 1

    [meta]
    name = two-links
    seed = 7
    generator = random

    [players]
    # id weight
    0 1/1
    1 3/2

    [resources]
    # id coefficient degree
    0 1/1 1
    1 2/1 2

    [strategies]
    # player: resource ids, one strategy per line, in index order
    0: 0
    0: 1
    1: 0 1

The ``[meta]`` section is optional.  Rationals are written ``num/den`` (a
bare integer is accepted on input).  ``serialize`` emits the canonical form:
no comments, ids ascending, rationals in lowest terms with an explicit
denominator, resource ids ascending inside each strategy.
"""

from __future__ import annotations

import math
import random
import re
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapacityError, GeneratorError, InfeasiblePlayerError, ParseError, WcgError
from .game import DEFAULT_STATE_CAP, GameInstance, Player, Resource, as_fraction, tau_congestedness

FORMAT_TAG = "wcg-instance"
FORMAT_VERSION = 1
META_KEYS = ("name", "seed", "generator")
SECTIONS = ("meta", "players", "resources", "strategies")

_RATIONAL = re.compile(r"^[+-]?\d+(?:/\d+)?$")
_INTEGER = re.compile(r"^[+-]?\d+$")


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _parse_rational(token: str, line: int, what: str) -> Fraction:
    if not _RATIONAL.match(token):
        raise ParseError(f"malformed rational {token!r}", line, what)
    num, _, den = token.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {token!r}", line, what)
    return Fraction(int(num), int(den) if den else 1)


def _parse_int(token: str, line: int, what: str) -> int:
    if not _INTEGER.match(token):
        raise ParseError(f"expected an integer, got {token!r}", line, what)
    return int(token)


def parse_instance(text: str) -> GameInstance:
    """Parse and validate a ``.wcg`` document."""
    lines = text.splitlines()
    content = []
    for number, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            content.append((number, stripped))
    if not content:
        raise ParseError("empty document")

    number, header = content[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != FORMAT_TAG:
        raise ParseError(f"expected header '{FORMAT_TAG} {FORMAT_VERSION}'", number, "header")
    if parts[1] != str(FORMAT_VERSION):
        raise ParseError(f"unsupported version {parts[1]!r}", number, "version")

    meta: dict[str, str] = {}
    players: dict[int, tuple[Fraction, int]] = {}
    resources: dict[int, tuple[Fraction, int, int]] = {}
    strategies: dict[int, list[tuple[list[int], int]]] = {}
    seen_sections: set[str] = set()
    section = None
    for number, line in content[1:]:
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {line!r}", number, "section")
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", number, "section")
            if section in seen_sections:
                raise ParseError(f"duplicate section [{section}]", number, "section")
            seen_sections.add(section)
            continue
        if section is None:
            raise ParseError("content before the first section", number)
        if section == "meta":
            key, eq, value = line.partition("=")
            key = key.strip()
            if not eq or key not in META_KEYS:
                raise ParseError(f"expected one of {', '.join(META_KEYS)} as 'key = value'", number, "meta")
            if key in meta:
                raise ParseError(f"duplicate meta key {key!r}", number, "meta")
            meta[key] = value.strip()
        elif section == "players":
            tokens = line.split()
            if len(tokens) != 2:
                raise ParseError("expected '<id> <weight>'", number, "players")
            pid = _parse_int(tokens[0], number, "player id")
            weight = _parse_rational(tokens[1], number, "weight")
            if weight <= 0:
                raise ParseError(f"weight must be > 0, got {tokens[1]}", number, "weight")
            if pid in players:
                raise ParseError(f"duplicate player id {pid}", number, "player id")
            players[pid] = (weight, number)
        elif section == "resources":
            tokens = line.split()
            if len(tokens) != 3:
                raise ParseError("expected '<id> <coefficient> <degree>'", number, "resources")
            rid = _parse_int(tokens[0], number, "resource id")
            coefficient = _parse_rational(tokens[1], number, "coefficient")
            if coefficient <= 0:
                raise ParseError(f"coefficient must be > 0, got {tokens[1]}", number, "coefficient")
            degree = _parse_int(tokens[2], number, "degree")
            if degree < 1:
                raise ParseError(f"degree must be >= 1, got {degree}", number, "degree")
            if rid in resources:
                raise ParseError(f"duplicate resource id {rid}", number, "resource id")
            resources[rid] = (coefficient, degree, number)
        else:
            head, colon, body = line.partition(":")
            if not colon:
                raise ParseError("expected '<player>: <resource ids>'", number, "strategies")
            pid = _parse_int(head.strip(), number, "player id")
            ids = [_parse_int(t, number, "resource id") for t in body.split()]
            if not ids:
                raise ParseError(f"player {pid}: empty strategy", number, "strategies")
            strategies.setdefault(pid, []).append((ids, number))

    for name in ("players", "resources", "strategies"):
        if name not in seen_sections:
            raise ParseError(f"missing section [{name}]", field=name)
    if not players:
        raise ParseError("no players", field="players")
    if not resources:
        raise ParseError("no resources", field="resources")
    if sorted(players) != list(range(len(players))):
        raise ParseError(f"player ids must be 0..{len(players) - 1}, got {sorted(players)}", field="player id")
    if sorted(resources) != list(range(len(resources))):
        raise ParseError(
            f"resource ids must be 0..{len(resources) - 1}, got {sorted(resources)}", field="resource id"
        )
    for pid, entries in strategies.items():
        if pid not in players:
            raise ParseError(f"strategy for unknown player {pid}", entries[0][1], "player id")
        for ids, number in entries:
            for rid in ids:
                if rid not in resources:
                    raise ParseError(f"player {pid}: unknown resource id {rid}", number, "resource id")
    for pid in range(len(players)):
        if pid not in strategies:
            raise ParseError(f"player {pid} has an empty strategy set", players[pid][1], "strategies")

    if "seed" in meta and not _INTEGER.match(meta["seed"]):
        raise ParseError(f"seed must be an integer, got {meta['seed']!r}", field="seed")
    return GameInstance(
        players=tuple(Player(i, players[i][0]) for i in range(len(players))),
        resources=tuple(Resource(e, resources[e][0], resources[e][1]) for e in range(len(resources))),
        strategies=tuple(tuple(tuple(ids) for ids, _ in strategies[i]) for i in range(len(players))),
        name=meta.get("name"),
        metadata=tuple((k, meta[k]) for k in META_KEYS if k in meta and k != "name"),
    )


def serialize(instance: GameInstance) -> str:
    """Canonical document text; ``parse_instance(serialize(g)) == g``."""
    meta = dict(instance.metadata)
    if instance.name is not None:
        meta["name"] = instance.name
    for key, value in meta.items():
        if "#" in value or "\n" in value or value != value.strip():
            raise WcgError(f"meta value for {key!r} cannot be written: {value!r}")
    out = [f"{FORMAT_TAG} {FORMAT_VERSION}", ""]
    if meta:
        out.append("[meta]")
        out.extend(f"{k} = {meta[k]}" for k in META_KEYS if k in meta)
        out.append("")
    out.append("[players]")
    out.extend(f"{p.id} {format_rational(p.weight)}" for p in instance.players)
    out.append("")
    out.append("[resources]")
    out.extend(f"{r.id} {format_rational(r.coefficient)} {r.degree}" for r in instance.resources)
    out.append("")
    out.append("[strategies]")
    for i, lst in enumerate(instance.strategies):
        out.extend(f"{i}: {' '.join(map(str, s))}" for s in lst)
    return "\n".join(out) + "\n"


def load_instance(path) -> GameInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(instance: GameInstance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(instance))


@dataclass(frozen=True)
class Arc:
    tail: object
    head: object
    coefficient: Fraction
    degree: int


@dataclass(frozen=True)
class Commuter:
    weight: Fraction
    source: object
    target: object


@dataclass(frozen=True)
class NetworkGameSpec:
    """A directed network: every arc is a resource, every path a strategy.

    Parallel arcs are allowed.  Node order in ``nodes`` fixes the order in
    which neighbours are explored, and hence the strategy indices.
    """

    nodes: tuple[object, ...]
    arcs: tuple[Arc, ...]
    players: tuple[Commuter, ...]
    path_cap: int = 1000
    name: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> NetworkGameSpec:
        """Build from the JSON layout used by ``wcgpot gen network``."""
        return cls(
            nodes=tuple(data["nodes"]),
            arcs=tuple(
                Arc(a["tail"], a["head"], as_fraction(a.get("coefficient", 1), "coefficient"), int(a.get("degree", 1)))
                for a in data["arcs"]
            ),
            players=tuple(
                Commuter(as_fraction(p.get("weight", 1), "weight"), p["source"], p["target"])
                for p in data["players"]
            ),
            path_cap=int(data.get("path_cap", 1000)),
            name=data.get("name"),
        )


def simple_paths(spec: NetworkGameSpec, source: object, target: object) -> list[tuple[int, ...]]:
    """All simple ``source -> target`` paths as arc-index tuples, DFS order."""
    position = {node: k for k, node in enumerate(spec.nodes)}
    for node in (source, target):
        if node not in position:
            raise WcgError(f"unknown node {node!r}")
    out_arcs: dict[object, list[int]] = {node: [] for node in spec.nodes}
    for idx, arc in enumerate(spec.arcs):
        if arc.tail not in position or arc.head not in position:
            raise WcgError(f"arc {idx} references an unknown node")
        out_arcs[arc.tail].append(idx)
    for node in out_arcs:
        out_arcs[node].sort(key=lambda idx: (position[spec.arcs[idx].head], idx))

    paths: list[tuple[int, ...]] = []
    on_path = {source}
    arcs: list[int] = []
    stack = [iter(out_arcs[source])]
    nodes = [source]
    while stack:
        idx = next(stack[-1], None)
        if idx is None:
            stack.pop()
            on_path.discard(nodes.pop())
            if arcs:
                arcs.pop()
            continue
        head = spec.arcs[idx].head
        if head == target:
            paths.append(tuple(arcs + [idx]))
            if len(paths) > spec.path_cap:
                raise CapacityError(
                    f"more than {spec.path_cap} paths from {source!r} to {target!r}", cap=spec.path_cap
                )
            continue
        if head in on_path:
            continue
        on_path.add(head)
        nodes.append(head)
        arcs.append(idx)
        stack.append(iter(out_arcs[head]))
    return paths


def compile_network_game(spec: NetworkGameSpec) -> GameInstance:
    strategies = []
    for i, p in enumerate(spec.players):
        if p.source == p.target:
            raise InfeasiblePlayerError(f"player {i}: source and target coincide")
        paths = simple_paths(spec, p.source, p.target)
        if not paths:
            raise InfeasiblePlayerError(f"player {i}: no path from {p.source!r} to {p.target!r}")
        strategies.append(paths)
    return GameInstance.build(
        [p.weight for p in spec.players],
        [(a.coefficient, a.degree) for a in spec.arcs],
        strategies,
        name=spec.name,
        metadata=(("generator", "network"),),
    )


def _random_weight(rng: random.Random, weight_range: tuple[Fraction, Fraction], denominators: int = 4) -> Fraction:
    lo, hi = weight_range
    den = rng.randint(1, denominators)
    low_num = math.ceil(lo * den)
    high_num = math.floor(hi * den)
    if low_num > high_num:
        return lo
    return Fraction(rng.randint(low_num, high_num), den)


def generate_random(
    seed: int,
    n_players: int,
    n_resources: int,
    max_degree: int,
    strategy_count: int,
    strategy_size: int,
    weight_range: tuple[object, object] = (1, 4),
    name: str | None = None,
) -> GameInstance:
    """Seeded random game.

    Degrees are drawn from ``1..max_degree`` with at least one resource of
    degree exactly ``max_degree``; coefficients are small positive
    rationals; weights are rationals with denominator at most 4 inside
    ``weight_range``.  Each player gets up to ``strategy_count`` distinct
    strategies of size ``1..strategy_size`` (fewer only if not enough
    distinct subsets exist).
    """
    for label, value in (
        ("n_players", n_players),
        ("n_resources", n_resources),
        ("max_degree", max_degree),
        ("strategy_count", strategy_count),
        ("strategy_size", strategy_size),
    ):
        if value < 1:
            raise GeneratorError(f"{label} must be >= 1, got {value}")
    lo, hi = (as_fraction(w, "weight bound") for w in weight_range)
    if not 0 < lo <= hi:
        raise GeneratorError(f"weight range must satisfy 0 < lo <= hi, got ({lo}, {hi})")
    rng = random.Random(seed)
    weights = [_random_weight(rng, (lo, hi)) for _ in range(n_players)]
    degrees = [rng.randint(1, max_degree) for _ in range(n_resources)]
    degrees[rng.randrange(n_resources)] = max_degree
    coefficients = [Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(n_resources)]
    size_cap = min(strategy_size, n_resources)
    available = sum(math.comb(n_resources, s) for s in range(1, size_cap + 1))
    want = min(strategy_count, available)
    strategies = []
    for _ in range(n_players):
        chosen: list[tuple[int, ...]] = []
        while len(chosen) < want:
            size = rng.randint(1, size_cap)
            subset = tuple(sorted(rng.sample(range(n_resources), size)))
            if subset not in chosen:
                chosen.append(subset)
        strategies.append(chosen)
    return GameInstance.build(
        weights,
        list(zip(coefficients, degrees)),
        strategies,
        name=name,
        metadata=(("seed", str(seed)), ("generator", "random")),
    )


def generate_tau_congested(
    seed: int,
    tau: object,
    n_players: int,
    degree: int,
    n_resources: int | None = None,
    strategy_count: int = 2,
    cap: int = DEFAULT_STATE_CAP,
) -> GameInstance:
    """Seeded unit-weight game that is at least ``tau``-congested.

    Every resource has a forced crowd of ``ceil(tau * degree) + 1`` players
    whose every strategy contains it, so in every state its other users
    weigh at least ``tau * degree``.  Players optionally add resources they
    are not forced onto.  The result is re-checked by exhaustive
    enumeration, not trusted by construction.
    """
    tau = as_fraction(tau, "tau")
    if tau <= 0:
        raise GeneratorError(f"tau must be > 0, got {tau}")
    if degree < 1 or n_players < 1:
        raise GeneratorError("degree and n_players must be >= 1")
    crowd = math.ceil(tau * degree) + 1
    if crowd > n_players:
        raise GeneratorError(
            f"tau={tau} with degree {degree} needs {crowd} co-users per resource, only {n_players} players"
        )
    if n_resources is None:
        n_resources = max(2, n_players // 2)
    rng = random.Random(seed)
    degrees = [rng.randint(1, degree) for _ in range(n_resources)]
    degrees[rng.randrange(n_resources)] = degree
    coefficients = [Fraction(rng.randint(1, 4), rng.randint(1, 3)) for _ in range(n_resources)]
    forced: list[set[int]] = [set() for _ in range(n_players)]
    for e in range(n_resources):
        for i in rng.sample(range(n_players), crowd):
            forced[i].add(e)
    strategies = []
    for i in range(n_players):
        optional = [e for e in range(n_resources) if e not in forced[i]]
        base = tuple(sorted(forced[i]))
        chosen: list[tuple[int, ...]] = []
        if base:
            chosen.append(base)
        attempts = 0
        while len(chosen) < strategy_count and optional and attempts < 50:
            attempts += 1
            extra = rng.sample(optional, rng.randint(1, len(optional)))
            candidate = tuple(sorted(set(base) | set(extra)))
            if candidate not in chosen:
                chosen.append(candidate)
        if not chosen:
            raise GeneratorError(f"player {i} ended up with no strategy")
        strategies.append(chosen)
    instance = GameInstance.build(
        [1] * n_players,
        list(zip(coefficients, degrees)),
        strategies,
        name=None,
        metadata=(("seed", str(seed)), ("generator", f"tau-congested tau={format_rational(tau)}")),
    )
    measured = tau_congestedness(instance, cap)
    if measured is None or measured < tau:
        raise GeneratorError(f"generated instance is only {measured}-congested, wanted {tau}")
    return instance


@dataclass(frozen=True)
class SweepSpec:
    """Parameter ranges for a family of random desk-scale instances."""

    seed: int = 0
    players: tuple[int, int] = (2, 4)
    resources: tuple[int, int] = (2, 5)
    max_degree: tuple[int, int] = (1, 4)
    strategies: tuple[int, int] = (2, 4)
    strategy_size: int = 3
    weight_range: tuple[object, object] = (1, 4)


def sweep_instances(spec: SweepSpec, trials: int) -> list[GameInstance]:
    """``trials`` instances, each generated from its own derived seed."""
    rng = random.Random(spec.seed)
    out = []
    for t in range(trials):
        trial_seed = rng.randrange(2**31)
        out.append(
            generate_random(
                trial_seed,
                n_players=rng.randint(*spec.players),
                n_resources=rng.randint(*spec.resources),
                max_degree=rng.randint(*spec.max_degree),
                strategy_count=rng.randint(*spec.strategies),
                strategy_size=spec.strategy_size,
                weight_range=spec.weight_range,
                name=f"sweep-{spec.seed}-{t}",
            )
        )
    return out
