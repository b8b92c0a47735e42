"""Command line front end: ``wcgpot {rho,verify,pos,sweep,gen,fmt}``.

Exit status is 0 on success, 1 when a guaranteed bound was violated and 2
on operational errors (bad input, capacity exceeded).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import experiments
from .dynamics import DEFAULT_MAX_STEPS, Scheduler
from .errors import CapacityError, WcgError
from .game import DEFAULT_STATE_CAP, GameInstance, as_fraction
from .instances import (
    NetworkGameSpec,
    SweepSpec,
    compile_network_game,
    generate_random,
    generate_tau_congested,
    load_instance,
    parse_instance,
    serialize,
)

STATE_CAP_ENV = "WCGPOT_STATE_CAP"
MAX_STEPS_ENV = "WCGPOT_MAX_STEPS"


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise WcgError(f"environment variable {name} must be an integer, got {raw!r}") from None


@dataclass
class ExperimentConfig:
    """Resolved options of one CLI invocation."""

    command: str
    instance_path: str | None = None
    generator: str | None = None
    generator_args: dict = field(default_factory=dict)
    alpha: Fraction | None = None
    deltas: tuple[Fraction, ...] = ()
    profile: str = "all-ones"
    scheduler: Scheduler = field(default_factory=Scheduler)
    state_cap: int = DEFAULT_STATE_CAP
    max_steps: int = DEFAULT_MAX_STEPS
    output: str | None = None

    def validate(self) -> None:
        if self.command in ("verify", "pos"):
            if (self.instance_path is None) == (self.generator is None):
                raise WcgError("give exactly one instance source: a file path or --generate")
        for delta in self.deltas:
            if not 0 <= delta <= 1:
                raise WcgError(f"delta must lie in [0, 1], got {delta}")

    def load(self) -> GameInstance:
        if self.instance_path is not None:
            return load_instance(self.instance_path)
        return build_generated(self.generator, self.generator_args, self.state_cap)


def build_generated(kind: str, args: dict, state_cap: int = DEFAULT_STATE_CAP) -> GameInstance:
    if kind == "random":
        return generate_random(
            args["seed"],
            args["players"],
            args["resources"],
            args["max_degree"],
            args["strategies"],
            args["strategy_size"],
            (args["weight_min"], args["weight_max"]),
        )
    if kind == "tau":
        return generate_tau_congested(
            args["seed"], args["tau"], args["players"], args["max_degree"],
            n_resources=args["resources"], strategy_count=args["strategies"], cap=state_cap,
        )
    if kind == "network":
        if not args.get("network"):
            raise WcgError("--network FILE.json is required for network games")
        with open(args["network"], encoding="utf-8") as fh:
            return compile_network_game(NetworkGameSpec.from_dict(json.load(fh)))
    raise WcgError(f"unknown generator {kind!r}")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (WcgError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text: str) -> tuple[Fraction, ...]:
    return tuple(_rational(t) for t in text.split(",") if t.strip())


def _int_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if hi else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or N-M, got {text!r}") from None
    if lo_i > hi_i:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo_i, hi_i


def _add_caps(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state-cap", type=int, default=None,
                   help=f"maximum states to enumerate (default ${STATE_CAP_ENV} or {DEFAULT_STATE_CAP})")
    p.add_argument("-o", "--output", help="write results here instead of standard output")


def _add_generator(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("generator")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--players", type=int, default=3)
    g.add_argument("--resources", type=int, default=3)
    g.add_argument("--max-degree", type=int, default=2, help="maximum degree (degree for tau games)")
    g.add_argument("--strategies", type=int, default=2, help="strategies per player")
    g.add_argument("--strategy-size", type=int, default=2, help="largest strategy size")
    g.add_argument("--weight-min", type=_rational, default=Fraction(1))
    g.add_argument("--weight-max", type=_rational, default=Fraction(4))
    g.add_argument("--tau", type=_rational, default=Fraction(1))
    g.add_argument("--network", help="JSON network description for --generate network")


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", nargs="?", help="instance file (.wcg)")
    p.add_argument("--generate", choices=("random", "tau", "network"),
                   help="generate the instance instead of reading a file")
    _add_generator(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wcgpot",
        description="Approximate potentials, improvement dynamics and exact oracles for weighted congestion games.",
        epilog="exit status: 0 ok, 1 a guaranteed bound was violated, 2 bad input or capacity exceeded",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rho", help="tabulate rho(d), optionally restricted to tau-congested loads")
    p.add_argument("--d-max", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--tau", type=_rational, default=None)
    p.add_argument("-o", "--output")

    p = sub.add_parser("verify", help="check strict potential decrease on every improvement edge")
    _add_source(p)
    p.add_argument("--profile", default="all-ones", choices=("all-ones", "social", "pos"))
    p.add_argument("--delta", type=_rational, default=Fraction(0), help="delta for --profile pos")
    p.add_argument("--alpha", type=_rational, default=None, help="default: the profile's guaranteed factor")
    _add_caps(p)

    p = sub.add_parser("pos", help="dynamics from an optimum against the (d+1)/(d+delta) bound")
    _add_source(p)
    p.add_argument("--delta", type=_rational_list, default=(Fraction(0), Fraction(1, 2), Fraction(1)),
                   help="comma separated, e.g. 0,1/2,1")
    p.add_argument("--scheduler", type=Scheduler.parse, default=Scheduler())
    p.add_argument("--max-steps", type=int, default=None)
    _add_caps(p)

    p = sub.add_parser("sweep", help="random instances x alpha grid: equilibria and cycles")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-grid", default="d", help="comma separated; d, d+1/2, 3/2 ...")
    p.add_argument("--players", type=_int_range, default=(2, 4), help="N or N-M")
    p.add_argument("--resources", type=_int_range, default=(2, 5))
    p.add_argument("--max-degree", type=_int_range, default=(1, 4))
    p.add_argument("--strategies", type=_int_range, default=(2, 4))
    p.add_argument("--strategy-size", type=int, default=3)
    _add_caps(p)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("kind", choices=("random", "tau", "network"))
    _add_generator(p)
    p.add_argument("--name")
    p.add_argument("-o", "--output")

    p = sub.add_parser("fmt", help="rewrite instance files in canonical form")
    p.add_argument("files", nargs="+")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--check", action="store_true", help="exit 1 if any file is not canonical")
    mode.add_argument("--in-place", action="store_true")
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args: argparse.Namespace) -> ExperimentConfig:
    gen_args = {
        key: getattr(args, key)
        for key in ("seed", "players", "resources", "max_degree", "strategies", "strategy_size",
                    "weight_min", "weight_max", "tau", "network")
        if hasattr(args, key)
    }
    deltas = getattr(args, "delta", ())
    if isinstance(deltas, Fraction):
        deltas = (deltas,)
    config = ExperimentConfig(
        command=args.command,
        instance_path=getattr(args, "instance", None),
        generator=getattr(args, "generate", None),
        generator_args=gen_args,
        alpha=getattr(args, "alpha", None),
        deltas=tuple(deltas),
        profile=getattr(args, "profile", "all-ones"),
        scheduler=getattr(args, "scheduler", None) or Scheduler(),
        state_cap=getattr(args, "state_cap", None) or _env_int(STATE_CAP_ENV, DEFAULT_STATE_CAP),
        max_steps=getattr(args, "max_steps", None) or _env_int(MAX_STEPS_ENV, DEFAULT_MAX_STEPS),
        output=getattr(args, "output", None),
    )
    config.validate()
    return config


def _report(violations: list[str]) -> int:
    for v in violations:
        print(f"VIOLATION: {v}", file=sys.stderr)
    return 1 if violations else 0


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = _config(args)

    if config.command == "rho":
        rows, violations = experiments.rho_rows(args.d_max, args.tol, args.tau)
        _emit(experiments.to_csv(rows), config.output)
        return _report(violations)

    if config.command == "verify":
        instance = config.load()
        delta = config.deltas[0] if config.deltas else 0
        rows, violations = experiments.verify_rows(instance, config.profile, config.alpha, delta, config.state_cap)
        _emit(experiments.to_csv(rows), config.output)
        return _report(violations)

    if config.command == "pos":
        instance = config.load()
        rows, violations = experiments.pos_rows(
            instance, config.deltas, config.scheduler, config.max_steps, config.state_cap
        )
        _emit(experiments.to_csv(rows), config.output)
        return _report(violations)

    if config.command == "sweep":
        spec = SweepSpec(
            seed=args.seed,
            players=args.players,
            resources=args.resources,
            max_degree=args.max_degree,
            strategies=args.strategies,
            strategy_size=args.strategy_size,
        )
        grid = [t for t in args.alpha_grid.split(",") if t.strip()]
        rows, violations = experiments.sweep_rows(spec, args.trials, grid, config.state_cap)
        _emit(experiments.to_csv(rows), config.output)
        return _report(violations)

    if config.command == "gen":
        instance = build_generated(args.kind, config.generator_args, config.state_cap)
        if args.name:
            instance = GameInstance(instance.players, instance.resources, instance.strategies,
                                    name=args.name, metadata=instance.metadata)
        _emit(serialize(instance), config.output)
        return 0

    if config.command == "fmt":
        status = 0
        for path in args.files:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
            canonical = serialize(parse_instance(text))
            if args.check:
                if text != canonical:
                    print(f"{path}: not canonical", file=sys.stderr)
                    status = 1
            elif args.in_place:
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(canonical)
            else:
                sys.stdout.write(canonical)
        return status

    raise AssertionError(config.command)


def main(argv: list[str] | None = None) -> int:
    try:
        return run(argv)
    except CapacityError as exc:
        print(f"error: {exc}; raise --state-cap or set {STATE_CAP_ENV}", file=sys.stderr)
        return 2
    except (WcgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
