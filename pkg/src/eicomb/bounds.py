"""Extremal bounds for Phi(rho(a)) under one linear constraint, and
randomized checkers for the catalog of check-convolution inequalities.

Under a fixed value of Phi in {H, B}, the first channel moment is largest
for the BSC (gamma_1 <= f_Phi^{-1}(phi0)^2, with equality exactly there),
and the moment sequence of a BEC is constant.  Jensen-type arguments then
give, for polynomials rho with rho(0) = 0:

  * upper bound  rho(1) - rho(1 - phi0)  attained by BEC(phi0), valid when
    rho is convex on [0, f_Phi^{-1}(phi0)^2];
  * lower bound  rho(1) - rho(f_Phi^{-1}(phi0)^2), valid when rho is
    increasing on that range;
  * under fixed error probability eps, BEC(2*eps) minimizes and BSC(eps)
    maximizes Phi(rho(a)) when rho is increasing on [0, 1 - 2*eps].

Reports never declare a bound violated unless its hypothesis verifiably
holds; hypothesis failures are flagged inconclusive instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channel import Channel, bec, bsc, mix
from .convolution import check_convolve, check_power, phi_of_poly_convolved
from .functionals import Functional, complement, evaluate, kernel, kernel_inv
from .series import (Polynomial, complement_of_convolution, phi_of_poly,
                     poly_convex_on, poly_increasing_on)

# Default slack tolerances: exact-convolution checks are trusted to
# rounding level, series-evaluated sweeps to the series tolerance.
EXACT_SLACK_TOL = 1e-12
SWEEP_SLACK_TOL = 1e-9
SWEEP_PHI_TOL = 1e-11

MAX_RAW_SUPPORT = 5

CSV_HEADER = "kind,params,lhs,rhs,slack,hypothesis_ok,seed"


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound instance, oriented so slack >= 0 means it holds."""

    kind: str
    params: str
    lhs: float
    rhs: float
    hypothesis_ok: bool = True
    seed: int | None = None
    witnesses: tuple[Channel, ...] = ()

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def violated(self, tol: float) -> bool:
        """A bound counts as violated only when its hypothesis holds."""
        return self.hypothesis_ok and self.slack < -tol

    def csv_row(self) -> str:
        return (
            f"{self.kind},{self.params},{self.lhs!r},{self.rhs!r},"
            f"{self.slack!r},{int(self.hypothesis_ok)},"
            f"{'' if self.seed is None else self.seed}"
        )


@dataclass(frozen=True)
class ExtremalBound:
    """A bound value plus the channel attaining it and its hypothesis state."""

    kind: str  # "upper" or "lower"
    tag: Functional
    rho: Polynomial
    constraint: Functional
    level: float
    bound: float
    hypothesis_ok: bool
    extremal: Channel

    def report(self, value: float, params: str = "", seed: int | None = None,
               witnesses: tuple[Channel, ...] = ()) -> BoundReport:
        if self.kind == "upper":
            lhs, rhs = value, self.bound
        else:
            lhs, rhs = self.bound, value
        return BoundReport(
            kind=self.kind,
            params=params,
            lhs=lhs,
            rhs=rhs,
            hypothesis_ok=self.hypothesis_ok,
            seed=seed,
            witnesses=witnesses,
        )


def convexity_upper_bound(tag: Functional, rho: Polynomial, phi0: float) -> ExtremalBound:
    """Upper bound rho(1) - rho(1-phi0) on Phi(rho(a)) at Phi(a) = phi0.

    Attained by BEC(phi0); requires rho convex on [0, f_Phi^{-1}(phi0)^2].
    """
    if not 0.0 <= phi0 <= 1.0:
        raise ValueError(f"constraint level must lie in [0, 1], got {phi0!r}")
    reach = kernel_inv(tag, phi0) ** 2
    return ExtremalBound(
        kind="upper",
        tag=tag,
        rho=rho,
        constraint=tag,
        level=phi0,
        bound=rho(1.0) - rho(1.0 - phi0),
        hypothesis_ok=poly_convex_on(rho, reach),
        extremal=bec(phi0),
    )


def monotone_lower_bound(tag: Functional, rho: Polynomial, phi0: float) -> ExtremalBound:
    """Lower bound rho(1) - rho(f_Phi^{-1}(phi0)^2) on Phi(rho(a)).

    Requires rho increasing on [0, f_Phi^{-1}(phi0)^2]; the bound feeds the
    area-margin analysis.
    """
    if not 0.0 <= phi0 <= 1.0:
        raise ValueError(f"constraint level must lie in [0, 1], got {phi0!r}")
    reach = kernel_inv(tag, phi0) ** 2
    eps_match = (1.0 - kernel_inv(tag, phi0)) / 2.0
    return ExtremalBound(
        kind="lower",
        tag=tag,
        rho=rho,
        constraint=tag,
        level=phi0,
        bound=rho(1.0) - rho(reach),
        hypothesis_ok=poly_increasing_on(rho, reach),
        extremal=bsc(eps_match),
    )


def fixed_error_extremes(
    tag: Functional, rho: Polynomial, eps: float
) -> tuple[ExtremalBound, ExtremalBound]:
    """(minimum, maximum) of Phi(rho(a)) over channels with E(a) = eps.

    BEC(2*eps) attains the minimum and BSC(eps) the maximum when rho is
    increasing on [0, 1 - 2*eps].
    """
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"error probability must lie in [0, 1/2], got {eps!r}")
    hyp = poly_increasing_on(rho, 1.0 - 2.0 * eps)
    lo_channel = bec(2.0 * eps)
    hi_channel = bsc(eps)
    lower = ExtremalBound(
        kind="lower",
        tag=tag,
        rho=rho,
        constraint=Functional.E,
        level=eps,
        bound=phi_of_poly_convolved(tag, rho, lo_channel),
        hypothesis_ok=hyp,
        extremal=lo_channel,
    )
    upper = ExtremalBound(
        kind="upper",
        tag=tag,
        rho=rho,
        constraint=Functional.E,
        level=eps,
        bound=phi_of_poly_convolved(tag, rho, hi_channel),
        hypothesis_ok=hyp,
        extremal=hi_channel,
    )
    return lower, upper


# ----------------------------------------------------------------------
# Inequality catalog


@dataclass(frozen=True)
class InequalityInfo:
    code: int
    name: str
    channels: int
    needs_power: bool
    needs_alpha: bool
    statement: str


INEQUALITIES: dict[int, InequalityInfo] = {
    info.code: info
    for info in (
        InequalityInfo(4, "product_lower", 2, False, False,
                       "1-Phi(a*b) >= (1-Phi(a))(1-Phi(b))"),
        InequalityInfo(5, "power_budget", 1, True, False,
                       "Phi(a^d) <= Phi(a)(d - Phi(a) - ... - Phi(a^(d-1)))"),
        InequalityInfo(6, "self_sqrt", 1, False, False,
                       "1-Phi(a) <= sqrt(1-Phi(a*a))"),
        InequalityInfo(7, "cross_self_sqrt", 2, False, False,
                       "1-Phi(a*b) <= sqrt(1-Phi(a*a)) sqrt(1-Phi(b*b))"),
        InequalityInfo(8, "lopsided_sqrt", 2, False, False,
                       "1-Phi(a*b) <= sqrt(1-Phi(a*a*b)) sqrt(1-Phi(b))"),
        InequalityInfo(9, "mixture_power", 2, True, True,
                       "Phi((alpha a + beta b)^d) >= alpha Phi(a^d) + beta Phi(b^d)"),
        InequalityInfo(10, "root_mixture", 2, True, True,
                       "(1-Phi(mix^d))^(1/d) <= alpha (1-Phi(a^d))^(1/d) + beta (1-Phi(b^d))^(1/d)"),
        InequalityInfo(11, "kernel_cap", 1, False, False,
                       "Phi(a) <= f_Phi(1-2E(a))"),
        InequalityInfo(12, "error_damping", 2, False, False,
                       "1-Phi(a*b) <= (1-Phi(a))(1-2E(b))"),
    )
}


def check_inequality(
    code: int,
    channels: Sequence[Channel],
    tag: Functional,
    alpha: float | None = None,
    power: int | None = None,
    seed: int | None = None,
) -> BoundReport:
    """Evaluate both sides of catalog inequality `code` by exact convolution.

    Orientation: lhs <= rhs, so slack = rhs - lhs is nonnegative when the
    inequality holds.
    """
    info = INEQUALITIES.get(code)
    if info is None:
        raise ValueError(f"unknown inequality code {code!r}")
    if tag not in (Functional.H, Functional.B):
        raise ValueError("inequalities are stated for the H and B functionals")
    if len(channels) != info.channels:
        raise ValueError(
            f"inequality {code} takes {info.channels} channel(s), got {len(channels)}"
        )
    if info.needs_power:
        if power is None or power < 2:
            raise ValueError(f"inequality {code} needs a power d >= 2")
    elif power is not None:
        raise ValueError(f"inequality {code} does not take a power")
    if info.needs_alpha:
        if alpha is None or not 0.0 <= alpha <= 1.0:
            raise ValueError(f"inequality {code} needs a mixture weight in [0, 1]")
    elif alpha is not None:
        raise ValueError(f"inequality {code} does not take a mixture weight")

    # Quantities of the form 1 - Phi(.) go through the cancellation-free
    # complements: per-point ones for single channels, the moment-domain
    # series for convolutions (explicit convolution points near eps = 1/2
    # cannot represent tiny complements at full relative precision).
    phi = lambda ch: evaluate(tag, ch)
    comp = lambda ch: complement(tag, ch)
    comp_conv = lambda *facs: complement_of_convolution(tag, facs)
    a = channels[0]
    b = channels[1] if info.channels == 2 else None

    if code == 4:
        lhs = comp(a) * comp(b)
        rhs = comp_conv((a, 1), (b, 1))
    elif code == 5:
        values = []
        p = a
        for _ in range(power):
            values.append(phi(p))
            p = check_convolve(p, a)
        lhs = values[power - 1]
        rhs = values[0] * (power - sum(values[: power - 1]))
    elif code == 6:
        lhs = comp(a)
        rhs = math.sqrt(comp_conv((a, 2)))
    elif code == 7:
        lhs = comp_conv((a, 1), (b, 1))
        rhs = math.sqrt(comp_conv((a, 2))) * math.sqrt(comp_conv((b, 2)))
    elif code == 8:
        lhs = comp_conv((a, 1), (b, 1))
        rhs = math.sqrt(comp_conv((a, 2), (b, 1))) * math.sqrt(comp(b))
    elif code == 9:
        mixed = mix(a, b, alpha)
        lhs = alpha * phi(check_power(a, power)) + (1.0 - alpha) * phi(check_power(b, power))
        rhs = phi(check_power(mixed, power))
    elif code == 10:
        mixed = mix(a, b, alpha)
        root = 1.0 / power
        lhs = comp_conv((mixed, power)) ** root
        rhs = alpha * comp_conv((a, power)) ** root + (
            1.0 - alpha
        ) * comp_conv((b, power)) ** root
    elif code == 11:
        lhs = phi(a)
        rhs = kernel(tag, max(0.0, 1.0 - 2.0 * evaluate(Functional.E, a)))
    else:  # code == 12
        lhs = comp_conv((a, 1), (b, 1))
        rhs = comp(a) * float(np.dot(b.w, 1.0 - 2.0 * b.eps))

    params = f"name={info.name};tag={tag.value}"
    if info.needs_power:
        params += f";d={power}"
    if info.needs_alpha:
        params += f";alpha={alpha!r}"
    return BoundReport(
        kind=f"ineq{code}",
        params=params,
        lhs=lhs,
        rhs=rhs,
        seed=seed,
        witnesses=tuple(channels),
    )


# ----------------------------------------------------------------------
# Random channel generation


def trial_rng(*key: int) -> np.random.Generator:
    """Deterministic PCG64 generator keyed by (seed, indices...)."""
    return np.random.default_rng(key)


def random_channel(rng: np.random.Generator, max_support: int = MAX_RAW_SUPPORT) -> Channel:
    """Raw random channel: 1..max_support points, eps uniform on [0, 1/2],
    weights from normalized independent exponentials."""
    m = int(rng.integers(1, max_support + 1))
    eps = rng.random(m) * 0.5
    w = rng.standard_exponential(m)
    return Channel(eps, w / w.sum())


def random_channel_with_value(
    rng: np.random.Generator,
    tag: Functional,
    target: float,
    max_support: int = MAX_RAW_SUPPORT,
) -> Channel:
    """Random channel with the selected functional pinned exactly to target.

    Draws a raw channel and mixes it with the perfect channel (value 0) or
    the useless channel (value 1, or 1/2 for E); linearity of the
    functionals makes the level exact.
    """
    top = 0.5 if tag is Functional.E else 1.0
    if not 0.0 <= target <= top:
        raise ValueError(f"target {target!r} out of range for {tag.value}")
    raw = random_channel(rng, max_support)
    v = evaluate(tag, raw)
    if v == target:
        return raw
    if v > target:
        return mix(raw, bsc(0.0), target / v)
    return mix(raw, bsc(0.5), (top - target) / (top - v))


# ----------------------------------------------------------------------
# Randomized suites


@dataclass
class SuiteSummary:
    name: str
    trials: int = 0
    violations: int = 0
    inconclusive: int = 0
    min_slack: float = math.inf

    def absorb(self, report: BoundReport, tol: float) -> None:
        self.trials += 1
        if not report.hypothesis_ok:
            self.inconclusive += 1
            return
        self.min_slack = min(self.min_slack, report.slack)
        if report.violated(tol):
            self.violations += 1

    @property
    def ok(self) -> bool:
        return self.violations == 0


DEFAULT_SWEEP_LEVELS = tuple(round(0.1 * k, 1) for k in range(1, 10))
DEFAULT_SWEEP_RHOS = (
    Polynomial.monomial(2),
    Polynomial.monomial(3),
    Polynomial.monomial(6),
    Polynomial((0.0, 0.0, 0.0, 0.0, 1.0, -0.75)),  # x^5 - 0.75 x^6
)
SERIES_TAGS = (Functional.H, Functional.B)


def inequality_suite(
    seed: int,
    trials: int,
    codes: Iterable[int] | None = None,
    tol: float = EXACT_SLACK_TOL,
) -> tuple[list[BoundReport], dict[int, SuiteSummary]]:
    """Run `trials` random instances of each catalog inequality.

    Trial t of inequality c draws its own generator from (seed, c, t), so
    results do not depend on execution order.
    """
    codes = sorted(INEQUALITIES if codes is None else codes)
    reports: list[BoundReport] = []
    summaries: dict[int, SuiteSummary] = {}
    for code in codes:
        info = INEQUALITIES[code]
        summary = SuiteSummary(name=f"ineq{code}")
        for t in range(trials):
            rng = trial_rng(seed, code, t)
            tag = Functional.H if rng.integers(2) == 0 else Functional.B
            chans = [random_channel(rng) for _ in range(info.channels)]
            power = int(rng.integers(2, 7)) if info.needs_power else None
            alpha = float(rng.random()) if info.needs_alpha else None
            report = check_inequality(code, chans, tag, alpha=alpha, power=power, seed=seed)
            reports.append(report)
            summary.absorb(report, tol)
        summaries[code] = summary
    return reports, summaries


def _sweep(
    name: str,
    seed: int,
    bound_factory,
    levels: Sequence[float],
    rhos: Sequence[Polynomial],
    tags: Sequence[Functional],
    per_cell: int,
    tol: float,
    phi_tol: float,
) -> tuple[list[BoundReport], SuiteSummary]:
    reports: list[BoundReport] = []
    summary = SuiteSummary(name=name)
    for ri, rho in enumerate(rhos):
        for tag in tags:
            for li, level in enumerate(levels):
                for item in bound_factory(tag, rho, level):
                    for t in range(per_cell):
                        rng = trial_rng(seed, ri, ord(tag.value), li, t)
                        a = random_channel_with_value(rng, item.constraint, level)
                        value = phi_of_poly(tag, rho, a, tol=phi_tol).value
                        params = f"rho={rho};tag={tag.value};level={level!r};trial={t}"
                        report = item.report(value, params=params, seed=seed, witnesses=(a,))
                        reports.append(report)
                        summary.absorb(report, tol)
    return reports, summary


def upper_bound_sweep(
    seed: int,
    levels: Sequence[float] = DEFAULT_SWEEP_LEVELS,
    rhos: Sequence[Polynomial] = DEFAULT_SWEEP_RHOS,
    tags: Sequence[Functional] = SERIES_TAGS,
    per_cell: int = 500,
    tol: float = SWEEP_SLACK_TOL,
    phi_tol: float = SWEEP_PHI_TOL,
) -> tuple[list[BoundReport], SuiteSummary]:
    """Fixed-Phi channels against the convexity upper bound."""
    factory = lambda tag, rho, level: (convexity_upper_bound(tag, rho, level),)
    return _sweep("upper", seed, factory, levels, rhos, tags, per_cell, tol, phi_tol)


def lower_bound_sweep(
    seed: int,
    levels: Sequence[float] = DEFAULT_SWEEP_LEVELS,
    rhos: Sequence[Polynomial] = DEFAULT_SWEEP_RHOS,
    tags: Sequence[Functional] = SERIES_TAGS,
    per_cell: int = 500,
    tol: float = SWEEP_SLACK_TOL,
    phi_tol: float = SWEEP_PHI_TOL,
) -> tuple[list[BoundReport], SuiteSummary]:
    """Fixed-Phi channels against the monotone lower bound."""
    factory = lambda tag, rho, level: (monotone_lower_bound(tag, rho, level),)
    return _sweep("lower", seed, factory, levels, rhos, tags, per_cell, tol, phi_tol)


DEFAULT_ERROR_LEVELS = tuple(round(0.05 * k, 2) for k in range(1, 10))


def fixed_error_sweep(
    seed: int,
    levels: Sequence[float] = DEFAULT_ERROR_LEVELS,
    rhos: Sequence[Polynomial] = DEFAULT_SWEEP_RHOS,
    tags: Sequence[Functional] = SERIES_TAGS,
    per_cell: int = 500,
    tol: float = SWEEP_SLACK_TOL,
    phi_tol: float = SWEEP_PHI_TOL,
) -> tuple[list[BoundReport], SuiteSummary]:
    """Fixed-E channels against the BEC-minimum / BSC-maximum bracket."""
    return _sweep(
        "fixed_error", seed, fixed_error_extremes, levels, rhos, tags, per_cell, tol, phi_tol
    )


def bsc_minimizer_counterexamples(
    tag: Functional,
    rho: Polynomial,
    phi0: float,
    seed: int,
    trials: int,
    tol: float = SWEEP_SLACK_TOL,
    phi_tol: float = SWEEP_PHI_TOL,
) -> list[BoundReport]:
    """Probe the conjecture that the BSC minimizes Phi(rho(a)) at fixed Phi.

    This is an open question, so the returned counterexample reports (cases
    strictly below the matched-BSC value) are evidence, never an assertion.
    """
    eps_match = (1.0 - kernel_inv(tag, phi0)) / 2.0
    reference = phi_of_poly_convolved(tag, rho, bsc(eps_match))
    out: list[BoundReport] = []
    for t in range(trials):
        rng = trial_rng(seed, 99, t)
        a = random_channel_with_value(rng, tag, phi0)
        value = phi_of_poly(tag, rho, a, tol=phi_tol).value
        if value < reference - tol:
            out.append(
                BoundReport(
                    kind="bsc_min_conjecture",
                    params=f"rho={rho};tag={tag.value};phi0={phi0!r};trial={t}",
                    lhs=reference,
                    rhs=value,
                    seed=seed,
                    witnesses=(a,),
                )
            )
    return out
