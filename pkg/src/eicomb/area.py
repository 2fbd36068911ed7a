"""Area margin of regular LDPC ensembles under check-node combining.

For a (var_degree, check_degree) = (l, r) regular ensemble and a channel a
of entropy h, the area expression

    A(a, h) = -h - (l - 1 - l/r) H(a^[r]) + (l - 1) H(a^[r-1])

collapses, through kappa = (l - 1 - l/r)/(l - 1) and the sparse polynomial
rho(X) = X^(r-1) - kappa X^r, to  A = -h + (l - 1) H(rho(a)).  The
monotone lower bound on H(rho(a)) then yields two sufficient conditions
for A >= c0 to hold for every channel of entropy h:

    (i)   (1 - 2 h2_inv(h))^2 <= (c0 / (l-1))^(1/(r-1))
    (ii)  h <= l/r - 2 c0

and with c0 = (l-1) exp(-sqrt(r-1)) the certified entropies contain, for
large degrees, an interval [h2(K/sqrt(r)), l/r - 2 c0].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import random_channel_with_value, trial_rng
from .channel import Channel
from .convolution import phi_of_poly_convolved, projected_power_support
from .functionals import Functional, evaluate, h2, h2_inv
from .series import Polynomial, phi_series

# Caller-supplied entropy must match the channel this closely.
ENTROPY_MATCH_TOL = 1e-6
# Explicit-convolution cross-check of the series value kicks in below this
# projected support.
CROSS_CHECK_SUPPORT = 5000
CROSS_CHECK_TOL = 1e-8

AREA_CSV_HEADER = "d_l,d_r,h,c0,cond_i,cond_ii,min_observed_area,bound,margin"


@dataclass(frozen=True)
class EnsembleParams:
    """Degrees (var_degree, check_degree) of a regular LDPC ensemble."""

    var_degree: int
    check_degree: int

    def __post_init__(self):
        l, r = self.var_degree, self.check_degree
        if not (isinstance(l, int) and isinstance(r, int)):
            raise ValueError("ensemble degrees must be integers")
        if l < 2 or r < 3:
            raise ValueError(f"need var_degree >= 2 and check_degree >= 3, got ({l}, {r})")
        if l >= r:
            raise ValueError(f"need var_degree/check_degree < 1, got ({l}, {r})")

    @property
    def kappa(self) -> float:
        l, r = self.var_degree, self.check_degree
        return (l - 1 - l / r) / (l - 1)

    @property
    def design_rate(self) -> float:
        return 1.0 - self.var_degree / self.check_degree

    @property
    def area_poly(self) -> Polynomial:
        """X^(r-1) - kappa X^r; satisfies (l-1)(1-kappa) = l/r."""
        r = self.check_degree
        coeffs = [0.0] * r
        coeffs[r - 2] = 1.0
        coeffs[r - 1] = -self.kappa
        return Polynomial(tuple(coeffs))

    def default_margin(self) -> float:
        """The margin choice c0 = (l-1) exp(-sqrt(r-1))."""
        return (self.var_degree - 1) * math.exp(-math.sqrt(self.check_degree - 1))


def area_quantity(
    a: Channel,
    params: EnsembleParams,
    h: float,
    tol: float = 1e-10,
    cross_check: bool = True,
) -> float:
    """The area expression -h - (l-1-l/r) H(a^[r]) + (l-1) H(a^[r-1]).

    Series-evaluated; when the explicit convolution stays small it is also
    computed exactly and the two routes must agree to CROSS_CHECK_TOL.
    """
    if abs(evaluate(Functional.H, a) - h) > ENTROPY_MATCH_TOL:
        raise ValueError(
            f"channel entropy {evaluate(Functional.H, a)!r} does not match h={h!r}"
        )
    l, r = params.var_degree, params.check_degree
    high = phi_series(Functional.H, a, r, tol=tol).value
    low = phi_series(Functional.H, a, r - 1, tol=tol).value
    value = -h - (l - 1 - l / r) * high + (l - 1) * low
    if cross_check and projected_power_support(a.size, r) <= CROSS_CHECK_SUPPORT:
        exact = -h + (l - 1) * phi_of_poly_convolved(Functional.H, params.area_poly, a)
        if abs(value - exact) > CROSS_CHECK_TOL:
            raise ArithmeticError(
                f"series/convolution mismatch in area expression: {value!r} vs {exact!r}"
            )
    return value


def margin_conditions(params: EnsembleParams, h: float, c0: float) -> tuple[bool, bool]:
    """The two sufficient conditions for the area expression to be >= c0."""
    if c0 <= 0.0:
        raise ValueError(f"margin must be positive, got {c0!r}")
    l, r = params.var_degree, params.check_degree
    cond_i = (1.0 - 2.0 * h2_inv(h)) ** 2 <= (c0 / (l - 1)) ** (1.0 / (r - 1))
    cond_ii = h <= l / r - 2.0 * c0
    return cond_i, cond_ii


def rho_at_max_moment(params: EnsembleParams, h: float) -> float:
    """(l-1) * rho((1 - 2 h2_inv(h))^2), the loss term the conditions cap.

    Vanishes at h = 1 and equals l/r at h = 0; condition (i) caps it by c0.
    """
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"entropy must lie in [0, 1], got {h!r}")
    q = (1.0 - 2.0 * h2_inv(h)) ** 2
    return (params.var_degree - 1) * params.area_poly(q)


@dataclass(frozen=True)
class CertifiedInterval:
    """Entropy interval with a certification sweep of the margin conditions."""

    left: float
    right: float
    c0: float
    valid: bool
    checked_points: int


def certified_interval(
    params: EnsembleParams, k_const: float = 1.0, grid_points: int = 101
) -> CertifiedInterval:
    """Candidate interval [h2(K/sqrt(r)), l/r - 2*c0] with a validity flag.

    The flag reports whether every grid entropy inside the interval
    actually satisfies both margin conditions at c0 = (l-1) exp(-sqrt(r-1));
    at small degrees the interval is typically empty or uncertified.
    """
    r = params.check_degree
    arg = k_const / math.sqrt(r)
    if arg >= 0.5:
        raise ValueError(f"K/sqrt(check_degree) = {arg!r} must stay below 1/2")
    c0 = params.default_margin()
    left = h2(arg)
    right = params.var_degree / r - 2.0 * c0
    if left > right:
        return CertifiedInterval(left, right, c0, False, 0)
    step = (right - left) / (grid_points - 1) if grid_points > 1 else 0.0
    grid = [left + i * step for i in range(grid_points)]
    valid = all(all(margin_conditions(params, h, c0)) for h in grid)
    return CertifiedInterval(left, right, c0, valid, len(grid))


def bec_minimizer_condition(
    params: EnsembleParams, h: float, literal_form: bool = False
) -> bool:
    """Condition under which BEC(h) minimizes the area expression at entropy h.

    The literal variant compares against (kappa-2)/(r*kappa), which is
    negative for every valid ensemble and therefore never holds; the
    default uses (r-2)/(kappa*r), the convexity range of the area
    polynomial.  Both are kept so the discrepancy stays visible.
    """
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"entropy must lie in [0, 1], got {h!r}")
    kappa = params.kappa
    r = params.check_degree
    threshold = (kappa - 2.0) / (r * kappa) if literal_form else (r - 2.0) / (kappa * r)
    return (1.0 - 2.0 * h2_inv(h)) ** 2 <= threshold


@dataclass(frozen=True)
class AreaSweepRow:
    h: float
    c0: float
    cond_i: bool
    cond_ii: bool
    checked: int
    min_area: float

    @property
    def margin(self) -> float:
        return self.min_area - self.c0

    def csv_row(self, params: EnsembleParams) -> str:
        return (
            f"{params.var_degree},{params.check_degree},{self.h!r},{self.c0!r},"
            f"{int(self.cond_i)},{int(self.cond_ii)},{self.min_area!r},"
            f"{self.c0!r},{self.margin!r}"
        )


def area_margin_sweep(
    params: EnsembleParams,
    seed: int,
    c0: float | None = None,
    grid_points: int = 50,
    channels_per_point: int = 200,
    series_tol: float = 1e-10,
) -> list[AreaSweepRow]:
    """Randomized check that the margin conditions do their job.

    For every grid entropy where both conditions hold, samples channels
    pinned to that entropy and records the minimum observed area value;
    rows with `checked == 0` mark grid points outside the certified range.
    """
    if c0 is None:
        c0 = params.default_margin()
    rows: list[AreaSweepRow] = []
    for gi in range(grid_points):
        h = gi / (grid_points - 1) if grid_points > 1 else 0.0
        cond_i, cond_ii = margin_conditions(params, h, c0)
        if not (cond_i and cond_ii):
            rows.append(AreaSweepRow(h, c0, cond_i, cond_ii, 0, math.nan))
            continue
        lo = math.inf
        for t in range(channels_per_point):
            rng = trial_rng(seed, gi, t)
            a = random_channel_with_value(rng, Functional.H, h)
            lo = min(lo, area_quantity(a, params, h, tol=series_tol, cross_check=False))
        rows.append(AreaSweepRow(h, c0, cond_i, cond_ii, channels_per_point, lo))
    return rows
