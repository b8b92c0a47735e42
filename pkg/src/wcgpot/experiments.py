"""Reproducible checks behind the CLI, returning rows of results.

Each function returns ``(rows, violations)``: the rows go to CSV, and
``violations`` lists human-readable descriptions of guaranteed bounds that
failed.  Exploratory findings (for instance cycles below ``alpha = d``) are
rows, not violations.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .dynamics import BEST_RESPONSE, Scheduler, converge_from_optimum
from .errors import DomainError
from .game import DEFAULT_STATE_CAP, GameInstance, State, as_fraction
from .instances import SweepSpec, format_rational, sweep_instances
from .oracle import equilibrium_set, exact_optima, exact_pos, find_improvement_cycle, verify_potential_on_graph
from .potential import GammaProfile, certify_potential, guaranteed_factor
from .rho import rho_bound, rho_bound_tau

CSV_HEADER = ("instance", "d", "param", "param_value", "metric", "exact", "float", "witness")


@dataclass(frozen=True)
class ResultRow:
    """One measured quantity.

    ``exact`` is ``num/den`` for rational quantities and empty for
    quantities that are only known as floats (such as rho).
    """

    instance: str
    d: int | str
    param: str
    param_value: str
    metric: str
    exact: str
    value: float
    witness: str = ""

    @classmethod
    def rational(cls, instance, d, param, param_value, metric, value: Fraction, witness: str = "") -> ResultRow:
        value = Fraction(value)
        return cls(instance, d, param, param_value, metric, format_rational(value), float(value), witness)

    @classmethod
    def floating(cls, instance, d, param, param_value, metric, value: float, witness: str = "") -> ResultRow:
        return cls(instance, d, param, param_value, metric, "", float(value), witness)

    def as_tuple(self) -> tuple[str, ...]:
        return (
            self.instance,
            str(self.d),
            self.param,
            self.param_value,
            self.metric,
            self.exact,
            repr(self.value),
            self.witness,
        )


def to_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_tuple())
    return buf.getvalue()


def format_state(state: Sequence[int]) -> str:
    return "(" + " ".join(map(str, state)) + ")"


def format_cycle(cycle: Sequence[State]) -> str:
    return " > ".join(format_state(s) for s in cycle)


def instance_label(instance: GameInstance, fallback: str = "instance") -> str:
    return instance.name or fallback


def resolve_alpha(token: str, d: int) -> Fraction:
    """``"3/2"`` is literal; ``"d"``, ``"d+1/2"``, ``"d-1"`` are relative to ``d``."""
    token = token.strip().replace(" ", "")
    if token.startswith("d"):
        rest = token[1:]
        if not rest:
            alpha = Fraction(d)
        elif rest[0] in "+-":
            offset = as_fraction(rest[1:], "alpha offset")
            alpha = d + offset if rest[0] == "+" else d - offset
        else:
            raise DomainError(f"malformed alpha {token!r}")
    else:
        alpha = as_fraction(token, "alpha")
    if alpha < 1:
        raise DomainError(f"alpha {token!r} resolves to {alpha} < 1 for d = {d}")
    return alpha


def rho_rows(d_max: int, tol: float = 1e-9, tau: object | None = None) -> tuple[list[ResultRow], list[str]]:
    """``rho(d)`` for ``d = 1..d_max`` (restricted to ``x >= tau * k`` when ``tau`` is given)."""
    if d_max < 1:
        raise DomainError(f"d_max must be >= 1, got {d_max}")
    rows, violations = [], []
    param, param_value = ("tau", format_rational(as_fraction(tau, "tau"))) if tau is not None else ("", "")
    for d in range(1, d_max + 1):
        if tau is None:
            res = rho_bound(d, tol)
            bound, bound_name = float(d), "d"
        else:
            res = rho_bound_tau(d, float(as_fraction(tau, "tau")), tol)
            bound, bound_name = math.exp(1 / float(as_fraction(tau, "tau"))), "exp(1/tau)"
        rows.append(ResultRow.floating("rho", d, param, param_value, "rho", res.rho, f"x={res.argmax_x!r}"))
        rows.append(ResultRow.floating("rho", d, param, param_value, "argmax_x", res.argmax_x))
        rows.append(ResultRow.floating("rho", d, param, param_value, "tolerance", res.tolerance))
        if res.rho > bound + res.tolerance:
            violations.append(f"rho({d}) = {res.rho} exceeds {bound_name} = {bound}")
    return rows, violations


def verify_rows(
    instance: GameInstance,
    profile_name: str = "all-ones",
    alpha: object | None = None,
    delta: object = 0,
    cap: int = DEFAULT_STATE_CAP,
) -> tuple[list[ResultRow], list[str]]:
    """Strict potential decrease on every alpha-improvement edge.

    ``alpha`` defaults to the factor the profile is guaranteed to achieve.
    A failure only counts as a violation when ``alpha`` is at least that
    factor.
    """
    profile = GammaProfile.named(instance, profile_name, delta)
    factor = guaranteed_factor(instance, profile)
    alpha = factor if alpha is None else as_fraction(alpha, "alpha")
    check = verify_potential_on_graph(instance, profile, alpha, cap)
    label = instance_label(instance)
    d = instance.max_degree
    a = format_rational(alpha)
    witness = ""
    if check.witness is not None:
        e = check.witness
        witness = f"{format_state(e.source)} -> {format_state(e.target)} player {e.player} factor {format_rational(e.factor)}"
    rows = [
        ResultRow.rational(label, d, "alpha", a, f"passed[{profile.name}]", Fraction(int(check.passed)), witness),
        ResultRow.rational(label, d, "alpha", a, "edges_checked", Fraction(check.edges_checked)),
        ResultRow.rational(label, d, "alpha", a, "guaranteed_factor", factor),
    ]
    violations = []
    if not check.passed and alpha >= factor:
        violations.append(f"{label}: {profile.name} potential fails at alpha={a}: {witness}")
    return rows, violations


def pos_rows(
    instance: GameInstance,
    deltas: Sequence[object] = (0, Fraction(1, 2), 1),
    scheduler: Scheduler = BEST_RESPONSE,
    max_steps: int = 1_000_000,
    cap: int = DEFAULT_STATE_CAP,
) -> tuple[list[ResultRow], list[str]]:
    """Dynamics from an optimum against the ``(d+1)/(d+delta)`` bound, plus the exact PoS."""
    label = instance_label(instance)
    d = instance.max_degree
    _, optimum = exact_optima(instance, cap)
    rows, violations = [], []
    for delta in deltas:
        delta = as_fraction(delta, "delta")
        if not 0 <= delta <= 1:
            raise DomainError(f"delta must lie in [0, 1], got {delta}")
        dv = format_rational(delta)
        trace = converge_from_optimum(instance, delta, scheduler, max_steps, cap)
        bound = Fraction(d + 1) / (d + delta)
        terminal = trace.terminal_social_cost
        ratio = terminal / optimum
        pos = exact_pos(instance, d + delta, cap)
        rows += [
            ResultRow.rational(label, d, "delta", dv, "optimum_cost", optimum, format_state(trace.initial_state)),
            ResultRow.rational(label, d, "delta", dv, "terminal_cost", terminal, format_state(trace.terminal)),
            ResultRow.rational(label, d, "delta", dv, "ratio", ratio),
            ResultRow.rational(label, d, "delta", dv, "bound", bound),
            ResultRow.rational(label, d, "delta", dv, "steps", Fraction(trace.steps_taken)),
        ]
        if pos is None:
            rows.append(ResultRow(label, d, "delta", dv, "exact_pos", "undefined", float("nan")))
            violations.append(f"{label}: no ({d}+{dv})-approximate equilibrium exists")
        else:
            rows.append(ResultRow.rational(label, d, "delta", dv, "exact_pos", pos))
            if pos > bound:
                violations.append(f"{label}: exact PoS {pos} exceeds bound {bound} at delta={dv}")
        if not trace.converged:
            violations.append(f"{label}: dynamics from the optimum did not converge at delta={dv}")
        if ratio > bound:
            violations.append(f"{label}: ratio {ratio} exceeds bound {bound} at delta={dv}")
        if delta == 1 and ratio != 1:
            violations.append(f"{label}: optimum is not a (d+1)-equilibrium (ratio {ratio})")
    return rows, violations


def sweep_rows(
    spec: SweepSpec, trials: int, alpha_grid: Sequence[str] = ("d",), cap: int = DEFAULT_STATE_CAP
) -> tuple[list[ResultRow], list[str]]:
    """Per trial and alpha: equilibrium existence and cycle witnesses.

    Each trial also reports the exact certificate factor of the all-ones
    profile.  A cycle at ``alpha >= d`` is a violation; below ``d`` it is
    recorded only.
    """
    rows, violations = [], []
    for instance in sweep_instances(spec, trials):
        label = instance_label(instance)
        d = instance.max_degree
        cert = certify_potential(instance, GammaProfile.all_ones(instance), state_cap=cap)
        w = cert.high_witness
        rows.append(
            ResultRow.rational(
                label, d, "", "", "certificate_factor", cert.implied_factor,
                f"resource {w.resource} users {sorted(w.users)} player {w.player}",
            )
        )
        for token in alpha_grid:
            alpha = resolve_alpha(token, d)
            a = format_rational(alpha)
            eq = equilibrium_set(instance, alpha, cap)
            cycle = find_improvement_cycle(instance, alpha, cap)
            rows.append(ResultRow.rational(label, d, "alpha", a, "equilibria", Fraction(len(eq))))
            rows.append(ResultRow.rational(label, d, "alpha", a, "equilibrium_exists", Fraction(int(bool(eq)))))
            rows.append(
                ResultRow.rational(
                    label, d, "alpha", a, "cycle", Fraction(int(cycle is not None)),
                    format_cycle(cycle) if cycle else "",
                )
            )
            if cycle is not None and alpha >= d:
                violations.append(f"{label}: improvement cycle at alpha={a} >= d={d}: {format_cycle(cycle)}")
    return rows, violations
