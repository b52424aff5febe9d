"""Invariant checks run by ``cvbell verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bell import (
    TSIRELSON,
    closed_form_biqv_mp,
    closed_form_correlators,
    correlators_observable_picture,
    correlators_state_picture,
    maximal_bell_value,
    nodege_expression,
)
from .fock import ModeCutoff, auto_cutoff, commutator
from .parity import QuadratureScheme, parity_f_closed, parity_f_quadrature, position_parity_triple
from .pseudospin import FULL, Direction, format_level, make_pseudospin, spin_projection, support_projector
from .squeeze import truncation_weight

__all__ = ["CheckResult", "VerifyContext", "CHECKS", "run_checks", "su2_errors", "DEFAULT_ZETAS"]

DEFAULT_ZETAS = (0.1, 0.3, 0.5, 0.8, 1.2)
PARITY_ZETAS = (0.25, 0.5, 1.0, 1.5)
PARITY_TOL = 1e-6
RATIO_WINDOW = (0.845, 0.855)
PEAK_ZETA_WINDOW = (0.45, 0.60)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


@dataclass
class VerifyContext:
    tolerance: float = 1e-8
    cutoff: int | None = None  # None means automatic per zeta
    zetas: tuple = DEFAULT_ZETAS
    seed: int = 2024
    notes: list = field(default_factory=list)

    def cutoff_for(self, zeta: float) -> ModeCutoff:
        return auto_cutoff(zeta) if self.cutoff is None else ModeCutoff(self.cutoff)

    def truncation_tol(self, zeta: float) -> float:
        return max(self.tolerance, 10.0 * truncation_weight(zeta, self.cutoff_for(zeta)))


def su2_errors(z, plus, minus) -> tuple[float, float, float]:
    """Max-entry violations of ``[z, +] = 2(+)``, ``[z, -] = -2(-)``, ``[+, -] = z``."""
    def c(x, y):
        return x @ y - y @ x

    return (
        float(np.abs(c(z, plus) - 2 * plus).max()),
        float(np.abs(c(z, minus) + 2 * minus).max()),
        float(np.abs(c(plus, minus) - z).max()),
    )


def _check_su2_pseudospin(ctx: VerifyContext) -> CheckResult:
    cutoff = ctx.cutoff_for(max(ctx.zetas))
    worst = 0.0
    for level in (0, 1, 2, 3, FULL):
        t = make_pseudospin(level, cutoff)
        worst = max(
            worst,
            (commutator(t.sz, t.s_plus) - 2 * t.s_plus).max_abs(),
            (commutator(t.sz, t.s_minus) + 2 * t.s_minus).max_abs(),
            (commutator(t.s_plus, t.s_minus) - t.sz).max_abs(),
        )
    return CheckResult("su2_pseudospin", worst < ctx.tolerance, f"max violation {worst:.3g} (levels 0-3, inf; n_max={cutoff.n_max})")


def _check_involution(ctx: VerifyContext) -> CheckResult:
    rng = np.random.default_rng(ctx.seed)
    cutoff = ctx.cutoff_for(max(ctx.zetas))
    worst = 0.0
    for _ in range(50):
        d = Direction(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        for level in (0, 1, 2, 3, FULL):
            t = make_pseudospin(level, cutoff)
            p = spin_projection(d, t)
            worst = max(worst, ((p @ p) - support_projector(t)).max_abs())
    tol = min(ctx.tolerance, 1e-10)
    return CheckResult("involution", worst < tol, f"max |(u.s)^2 - P| = {worst:.3g} over 50 directions")


def _check_su2_parity(ctx: VerifyContext) -> CheckResult:
    t = position_parity_triple(QuadratureScheme())
    errs = su2_errors(t.z, t.plus, t.minus)
    tol = max(ctx.tolerance, PARITY_TOL)
    return CheckResult("su2_parity", max(errs) < tol, f"max violation {max(errs):.3g} on the position grid")


def _check_full_correlators(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for z in ctx.zetas:
        pair = correlators_state_picture(z, FULL, ctx.cutoff_for(z))
        worst = max(worst, abs(pair.i_corr - 1.0), abs(pair.f_corr - math.tanh(2 * z)))
    return CheckResult("full_correlators", worst < ctx.tolerance, f"max |I-1|, |F-tanh 2z| = {worst:.3g}")


def _check_nodeg(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for z in ctx.zetas:
        k = math.tanh(z)
        pair = correlators_state_picture(z, 0, ctx.cutoff_for(z))
        ch2 = math.cosh(z) ** 2
        worst = max(worst, abs(pair.i_corr - (1 + k * k) / ch2), abs(pair.f_corr - 2 * k / ch2))
        biqv = maximal_bell_value(pair)[0].value
        worst = max(worst, abs((biqv / 2) ** 2 - nodege_expression(z)))
    return CheckResult("no_degeneracy_closed_form", worst < ctx.tolerance, f"max deviation {worst:.3g}")


def _check_closed_vs_matrix(ctx: VerifyContext) -> CheckResult:
    worst, ok = 0.0, True
    for z in ctx.zetas:
        tol = ctx.truncation_tol(z)
        for level in (0, 1, 2, 3, FULL):
            m = correlators_state_picture(z, level, ctx.cutoff_for(z))
            c = closed_form_correlators(z, level)
            gap = max(abs(m.i_corr - c.i_corr), abs(m.f_corr - c.f_corr))
            worst = max(worst, gap)
            ok = ok and gap <= tol
    return CheckResult("closed_form_vs_matrix", ok, f"max deviation {worst:.3g}")


def _check_pictures(ctx: VerifyContext) -> CheckResult:
    rng = np.random.default_rng(ctx.seed + 1)
    worst, ok = 0.0, True
    zmax = max(ctx.zetas)
    for _ in range(10):
        z = float(rng.uniform(0.0, zmax))
        level = int(rng.integers(0, 4))
        cutoff = ctx.cutoff_for(z)
        s = correlators_state_picture(z, level, cutoff)
        o = correlators_observable_picture(z, level, cutoff)
        gap = max(abs(s.i_corr - o.i_corr), abs(s.f_corr - o.f_corr))
        worst = max(worst, gap)
        ok = ok and gap <= ctx.truncation_tol(z)
    return CheckResult("picture_equivalence", ok, f"max state/observable gap {worst:.3g}")


def _check_normal_ordered(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for z in ctx.zetas:
        for level in (0, 1, 2, 3):
            cutoff = ctx.cutoff_for(z)
            a = correlators_observable_picture(z, level, cutoff, route="normal_ordered")
            b = correlators_observable_picture(z, level, cutoff, route="exponential")
            worst = max(worst, abs(a.i_corr - b.i_corr), abs(a.f_corr - b.f_corr))
    tol = max(ctx.tolerance, 1e-10)
    return CheckResult("normal_ordered_route", worst < tol, f"max gap {worst:.3g}")


def _check_cutoff_convergence(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    for z in ctx.zetas:
        cutoff = ctx.cutoff_for(z)
        a = maximal_bell_value(correlators_state_picture(z, FULL, cutoff))[0].value
        b = maximal_bell_value(correlators_state_picture(z, FULL, ModeCutoff(cutoff.n_max + 10)))[0].value
        worst = max(worst, abs(a - b))
    return CheckResult("cutoff_convergence", worst < ctx.tolerance, f"max change n_max -> n_max+10: {worst:.3g}")


def _check_parity_routes(ctx: VerifyContext) -> CheckResult:
    worst = 0.0
    below = []
    for z in PARITY_ZETAS:
        cutoff = None if ctx.cutoff is None else ModeCutoff(ctx.cutoff)
        f = parity_f_quadrature(z, tol=max(ctx.tolerance, PARITY_TOL), cutoff=cutoff)
        worst = max(worst, abs(f - parity_f_closed(z)))
        below.append(math.tanh(2 * z) > f)
    if all(below):
        order = "observed tanh(2z) > (2/pi)arctan(sinh 2z) at every sampled z (opposite to the inequality as printed)"
    elif not any(below):
        order = "observed tanh(2z) <= (2/pi)arctan(sinh 2z) at every sampled z"
    else:
        order = "ordering of tanh(2z) and (2/pi)arctan(sinh 2z) changes across sampled z"
    ctx.notes.append(order)
    tol = max(ctx.tolerance, PARITY_TOL)
    return CheckResult("parity_closed_form", worst < tol, f"max |F_quad - F_closed| = {worst:.3g}; {order}")


def _check_peak_ratio(ctx: VerifyContext) -> CheckResult:
    grid = np.round(np.arange(0.0, 3.0 + 1e-12, 0.005), 10)
    ratios = [maximal_bell_value(closed_form_correlators(z, 0))[0].ratio_to_tsirelson for z in grid]
    i = int(np.argmax(ratios))
    ok = RATIO_WINDOW[0] <= ratios[i] <= RATIO_WINDOW[1] and PEAK_ZETA_WINDOW[0] <= grid[i] <= PEAK_ZETA_WINDOW[1]
    return CheckResult("peak_ratio_level0", ok, f"max ratio {ratios[i]:.5f} at zeta={grid[i]:.3f}")


def _check_degeneracy_ordering(ctx: VerifyContext) -> CheckResult:
    grid = np.linspace(0.0, 3.0, 121)[1:]
    levels = (0, 1, 2, 3, FULL)
    ok, worst_excess = True, -math.inf
    for z in grid:
        exact = [closed_form_biqv_mp(z, lv) for lv in levels]
        ok = ok and all(a < b for a, b in zip(exact, exact[1:]))
        vals = [maximal_bell_value(closed_form_correlators(z, lv))[0].value for lv in levels]
        ok = ok and all(a <= b for a, b in zip(vals, vals[1:]))
        worst_excess = max(worst_excess, max(vals) - TSIRELSON * (1 + 1e-10))
    return CheckResult("degeneracy_ordering", ok and worst_excess <= 0, "levels 0<1<2<3<inf strictly ordered on (0, 3]; all <= 2 sqrt 2")


def _check_limits(ctx: VerifyContext) -> CheckResult:
    at_zero = [maximal_bell_value(closed_form_correlators(0.0, lv))[0].value for lv in (0, 1, 2, 3, FULL)]
    at_zero_matrix = maximal_bell_value(correlators_state_picture(0.0, FULL, ctx.cutoff_for(0.0)))[0].value
    gap0 = max(abs(v - 2.0) for v in at_zero + [at_zero_matrix])
    full3 = maximal_bell_value(closed_form_correlators(3.0, FULL))[0].value
    rel = 1.0 - full3 / TSIRELSON
    ok = gap0 < 1e-10 and 0 <= rel < 5e-3
    return CheckResult("limits", ok, f"max |biqv(0) - 2| = {gap0:.3g}; 1 - biqv_inf(3)/(2 sqrt 2) = {rel:.3g}")


CHECKS: list[tuple[str, Callable[[VerifyContext], CheckResult]]] = [
    ("su2_pseudospin", _check_su2_pseudospin),
    ("involution", _check_involution),
    ("su2_parity", _check_su2_parity),
    ("full_correlators", _check_full_correlators),
    ("no_degeneracy_closed_form", _check_nodeg),
    ("closed_form_vs_matrix", _check_closed_vs_matrix),
    ("picture_equivalence", _check_pictures),
    ("normal_ordered_route", _check_normal_ordered),
    ("cutoff_convergence", _check_cutoff_convergence),
    ("parity_closed_form", _check_parity_routes),
    ("peak_ratio_level0", _check_peak_ratio),
    ("degeneracy_ordering", _check_degeneracy_ordering),
    ("limits", _check_limits),
]


def run_checks(ctx: VerifyContext) -> list[CheckResult]:
    """Run every check; a check that raises is reported as failed."""
    results = []
    for name, fn in CHECKS:
        try:
            results.append(fn(ctx))
        except Exception as exc:  # noqa: BLE001 - every failure is reported, not raised
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results
