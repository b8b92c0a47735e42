"""Numeric supremum of the all-ones local ratio.

The ratio for degree ``k`` at relative load ``x`` is evaluated in the
expanded form

    (1+x)^k / (1 + sum_{t=1..k} binom(k,t) / (k+1-t) * x^t)

which avoids the cancellation between ``(1+x)^(k+1)`` and ``x^(k+1)`` at
large ``x``.  The search brackets the maximum on a geometric grid and then
refines it by golden-section search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, NumericError

GRID_START = 1e-3
GRID_END = 1e6
MAX_ITERATIONS = 500
_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class RhoResult:
    """Supremum of the ratio over ``x >= lower`` and all degrees up to ``degree``.

    ``tolerance`` is widened above the requested one when the grid did not
    look unimodal and the grid maximum was reported instead.
    """

    degree: int
    rho: float
    argmax_x: float
    tolerance: float
    attained_degree: int
    lower: float = 0.0
    unimodal: bool = True
    per_degree: tuple[float, ...] = field(default=(), repr=False)


def ratio(x: float, k: int, beta: float = 1.0) -> float:
    """Local ratio at relative load ``x`` for degree ``k`` and scaling ``beta``."""
    num = (1.0 + x) ** k
    den = 1.0 + sum(beta / (k + 1 - t) * math.comb(k, t) * x**t for t in range(1, k + 1))
    return num / den


def _is_unimodal(values: list[float], peak: int) -> bool:
    slack = 1e-12
    rising = all(values[j + 1] >= values[j] - slack for j in range(peak))
    falling = all(values[j + 1] <= values[j] + slack for j in range(peak, len(values) - 1))
    return rising and falling


def _golden(f, a: float, b: float, tol: float) -> float:
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(MAX_ITERATIONS):
        if b - a <= tol * max(1.0, abs(a)):
            return (a + b) / 2
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    raise NumericError(f"golden-section search did not converge on [{a}, {b}]")


def _sup_one_degree(k: int, lower: float, tol: float) -> tuple[float, float, float, bool]:
    """Returns ``(value, argmax, tolerance, unimodal)`` for a single degree."""
    f = lambda x: ratio(x, k)  # noqa: E731
    start = lower if lower > 0 else GRID_START
    grid = [0.0] if lower == 0 else []
    x = start
    while x <= max(GRID_END, 4 * start):
        grid.append(x)
        x *= 2
    values = [f(x) for x in grid]
    peak = max(range(len(values)), key=values.__getitem__)
    if k == 1 or max(values) - min(values) <= tol:
        # flat to within tolerance: the ratio is identically 1 for k = 1
        return max(values), grid[peak], tol, True
    if peak == len(grid) - 1:
        raise NumericError(f"degree {k}: supremum not bracketed below x = {grid[-1]:g}")
    if not _is_unimodal(values, peak):
        left = values[peak - 1] if peak > 0 else values[peak]
        widened = max(tol, values[peak] - min(left, values[peak + 1]))
        return values[peak], grid[peak], widened, False
    a = grid[peak - 1] if peak > 0 else grid[0]
    b = grid[peak + 1]
    x_star = _golden(f, a, b, tol)
    best = max((f(x_star), x_star), (values[peak], grid[peak]))
    return best[0], best[1], tol, True


def rho_bound_tau(d: int, tau: float, tol: float = 1e-9) -> RhoResult:
    """Supremum over ``x >= tau * k`` and ``1 <= k <= d``."""
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise DomainError(f"d must be an integer >= 1, got {d!r}")
    tau = float(tau)
    if tau < 0:
        raise DomainError(f"tau must be >= 0, got {tau}")
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    results = [_sup_one_degree(k, tau * k, tol) for k in range(1, d + 1)]
    best_k = max(range(d), key=lambda j: results[j][0])
    value, arg, used_tol, unimodal = results[best_k]
    return RhoResult(
        degree=d,
        rho=value,
        argmax_x=arg,
        tolerance=used_tol,
        attained_degree=best_k + 1,
        lower=tau * (best_k + 1),
        unimodal=all(r[3] for r in results),
        per_degree=tuple(r[0] for r in results),
    )


def rho_bound(d: int, tol: float = 1e-9) -> RhoResult:
    """``rho(d)``: supremum over ``x >= 0`` of the ratio, maximised over degrees ``<= d``."""
    return rho_bound_tau(d, 0.0, tol)
