"""Series expansions of H and B over channel moments, with tail control.

Both kernels expand as f_Phi(x) = 1 - sum_{n>=1} a_{Phi,n} x^{2n} with
positive weights summing to 1:

    a_{H,n} = 1 / (2 ln(2) n (2n-1))        a_{B,n} = C(2n,n) / ((2n-1) 4^n)

Writing gamma_{a,n} = sum_i w_i (1-2*eps_i)^{2n} for the channel moments,

    1 - Phi(a^[d]) = sum_n a_{Phi,n} gamma_{a,n}^d
    Phi(rho(a))    = rho(1) - sum_n a_{Phi,n} rho(gamma_{a,n})

where a^[d] is the d-fold check convolution and Phi(rho(a)) abbreviates
sum_k c_k Phi(a^[k]) for a polynomial rho with rho(0) = 0.  Truncations
here carry rigorous tail bounds: the H tail uses the telescoping majorant
1/(n(2n-1)) <= 1/(2n(n-1)), and the B tail is exact because the weights
telescope against central binomial ratios, sum_{n>N} a_{B,n} = C(2N,N)/4^N.
Mass at eps=0 contributes a constant subsequence to every moment; it is
summed in closed form through sum_n a_{Phi,n} = 1 so that e.g. BEC values
come out exact instead of converging at the tail rate.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .channel import Channel
from .functionals import Functional

LN2 = math.log(2.0)

# Adaptive truncation gives up after this many terms and reports the
# tail bound it actually achieved.
DEFAULT_TERM_CAP = 10**5

# Safety inflation on the B tail so that partial sum + tail >= 1 survives
# floating-point summation of the partial sums.
_B_TAIL_SLACK = 1e-9

# Cache of t_n = C(2n,n)/4^n starting at t_0 = 1; a_{B,n} = t_{n-1}/(2n).
_B_TAIL_CACHE: list[float] = [1.0]


def _b_tail_raw(n: int) -> float:
    while len(_B_TAIL_CACHE) <= n:
        m = len(_B_TAIL_CACHE)
        _B_TAIL_CACHE.append(_B_TAIL_CACHE[-1] * (2 * m - 1) / (2 * m))
    return _B_TAIL_CACHE[n]


def coefficient(tag: Functional, n: int) -> float:
    """Series weight a_{Phi,n} for Phi in {H, B}; positive, sums to 1 over n."""
    if n < 1:
        raise ValueError(f"coefficient index must be >= 1, got {n!r}")
    if tag is Functional.H:
        return 1.0 / (2.0 * LN2 * n * (2 * n - 1))
    if tag is Functional.B:
        return _b_tail_raw(n - 1) / (2 * n)
    raise ValueError("the error-probability functional has no series weights")


def coefficient_tail(tag: Functional, n: int) -> float:
    """Rigorous upper bound on sum_{m>n} a_{Phi,m}; decreasing, -> 0.

    H uses the telescoping majorant 1/(4 ln(2) n); B uses the exact tail
    C(2n,n)/4^n (inflated by a hair against rounding of partial sums).
    """
    if n < 1:
        raise ValueError(f"tail index must be >= 1, got {n!r}")
    if tag is Functional.H:
        return 1.0 / (4.0 * LN2 * n)
    if tag is Functional.B:
        return _b_tail_raw(n) * (1.0 + _B_TAIL_SLACK)
    raise ValueError("the error-probability functional has no series weights")


def moment(a: Channel, n: int) -> float:
    """n-th moment sum_i w_i (1 - 2*eps_i)^(2n); decreasing in n."""
    if n < 1:
        raise ValueError(f"moment index must be >= 1, got {n!r}")
    x = 1.0 - 2.0 * a.eps
    return float(np.dot(a.w, x ** (2 * n)))


def moments(a: Channel, count: int) -> np.ndarray:
    """Moments 1..count as an array (decreasing, within [0, 1])."""
    if count < 1:
        raise ValueError(f"moment count must be >= 1, got {count!r}")
    y = (1.0 - 2.0 * a.eps) ** 2
    powers = y[:, None] ** np.arange(1, count + 1)[None, :]
    return a.w @ powers


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial rho(X) = sum_{k>=1} c_k X^k with rho(0) = 0."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        while c and c[-1] == 0.0:
            c = c[:-1]
        if not c:
            raise ValueError("polynomial must have degree >= 1")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    @property
    def terms(self) -> tuple[tuple[int, float], ...]:
        """Nonzero (exponent, coefficient) pairs, ascending exponent."""
        return tuple((k + 1, c) for k, c in enumerate(self.coeffs) if c != 0.0)

    def __call__(self, x: float) -> float:
        return float(sum(c * x**k for k, c in self.terms))

    def eval_abs(self, x: float) -> float:
        """sum_k |c_k| x^k, the coefficient-wise absolute value at x >= 0."""
        return float(sum(abs(c) * x**k for k, c in self.terms))

    def as_array(self) -> np.ndarray:
        """Ascending coefficient array including the zero constant term."""
        return np.array((0.0,) + self.coeffs)

    @classmethod
    def monomial(cls, d: int) -> "Polynomial":
        if d < 1:
            raise ValueError(f"monomial degree must be >= 1, got {d!r}")
        return cls((0.0,) * (d - 1) + (1.0,))

    def __str__(self) -> str:
        parts = []
        for k, c in self.terms:
            term = f"x^{k}" if k > 1 else "x"
            if c == 1.0:
                parts.append(f"+ {term}")
            elif c == -1.0:
                parts.append(f"- {term}")
            else:
                sign = "-" if c < 0 else "+"
                parts.append(f"{sign} {abs(c):g}*{term}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:] if text.startswith("- ") else text


_TERM_RE = re.compile(r"^(?P<coef>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)(?P<var>x)?(?:\^(?P<exp>\d+))?$")


def poly_from_string(text: str) -> Polynomial:
    """Parse `c*x^k` terms joined by +/-, e.g. ``x^5 - 0.75*x^6``.

    Constant terms are rejected so that rho(0) = 0 holds structurally.
    """
    compact = text.replace(" ", "").replace("*", "").lower()
    if not compact:
        raise ValueError("empty polynomial expression")
    pieces = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(pieces) != compact:
        raise ValueError(f"could not tokenize polynomial {text!r}")
    coeffs: dict[int, float] = {}
    for piece in pieces:
        m = _TERM_RE.match(piece)
        if not m or (m.group("exp") and not m.group("var")):
            raise ValueError(f"bad polynomial term {piece!r} in {text!r}")
        if not m.group("var"):
            raise ValueError(f"constant term {piece!r} not allowed (rho(0) must be 0)")
        coef_text = m.group("coef")
        if coef_text in ("", "+"):
            coef = 1.0
        elif coef_text == "-":
            coef = -1.0
        else:
            coef = float(coef_text)
        exp = int(m.group("exp") or 1)
        if exp < 1:
            raise ValueError(f"exponent must be >= 1 in {piece!r}")
        coeffs[exp] = coeffs.get(exp, 0.0) + coef
    degree = max(coeffs)
    return Polynomial(tuple(coeffs.get(k, 0.0) for k in range(1, degree + 1)))


_SIGN_GRID = 4097
_ROOT_REFINE_TOL = 1e-12


def _roots_on(coeffs: np.ndarray, lo: float, hi: float) -> list[float]:
    """Real roots of the ascending-coefficient polynomial inside [lo, hi].

    Sign-change isolation on a dense grid, refined by bisection; roots of
    even multiplicity without a sign change are invisible here, which the
    callers compensate for by also scanning grid values directly.
    """
    if hi <= lo or not np.any(coeffs[1:]):
        return []
    grid = np.linspace(lo, hi, _SIGN_GRID)
    vals = npoly.polyval(grid, coeffs)
    roots = [float(g) for g, v in zip(grid, vals) if v == 0.0]
    idx = np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]
    for i in idx:
        a, b = float(grid[i]), float(grid[i + 1])
        fa = float(npoly.polyval(a, coeffs))
        while b - a > _ROOT_REFINE_TOL:
            m = 0.5 * (a + b)
            fm = float(npoly.polyval(m, coeffs))
            if fm == 0.0:
                a = b = m
                break
            if (fa < 0.0) == (fm < 0.0):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return roots


def _nonneg_on(coeffs: np.ndarray, x_max: float, tol: float) -> bool:
    """Whether the polynomial stays >= -tol on [0, x_max].

    Checks a dense grid (endpoints included) plus the refined roots of the
    derivative, where interior minima live.
    """
    grid = np.linspace(0.0, x_max, _SIGN_GRID)
    if float(npoly.polyval(grid, coeffs).min()) < -tol:
        return False
    deriv = npoly.polyder(coeffs) if len(coeffs) > 1 else np.zeros(1)
    for r in _roots_on(deriv, 0.0, x_max):
        if float(npoly.polyval(r, coeffs)) < -tol:
            return False
    return True


def poly_increasing_on(rho: Polynomial, x_max: float, tol: float = 1e-12) -> bool:
    """True iff rho' >= -tol everywhere on [0, x_max]."""
    if not 0.0 <= x_max <= 1.0:
        raise ValueError(f"interval end must lie in [0, 1], got {x_max!r}")
    return _nonneg_on(npoly.polyder(rho.as_array()), x_max, tol)


def poly_convex_on(rho: Polynomial, x_max: float, tol: float = 1e-12) -> bool:
    """True iff rho'' >= -tol everywhere on [0, x_max]."""
    if not 0.0 <= x_max <= 1.0:
        raise ValueError(f"interval end must lie in [0, 1], got {x_max!r}")
    return _nonneg_on(npoly.polyder(rho.as_array(), 2), x_max, tol)


@dataclass(frozen=True)
class SeriesValue:
    """A truncated-series value together with its rigorous tail bound."""

    value: float
    error_bound: float
    terms: int

    def __float__(self) -> float:
        return self.value


def _series_tag(tag: Functional) -> Functional:
    if tag not in (Functional.H, Functional.B):
        raise ValueError("series evaluation is defined for H and B only")
    return tag


def _phi_terms(
    tag: Functional,
    a: Channel,
    terms: Sequence[tuple[int, float]],
    tol: float,
    term_cap: int,
) -> SeriesValue:
    """Shared adaptive evaluator for Phi(rho(a)) given rho's nonzero terms.

    Mass at eps = 0 (x = 1) makes the moments converge to a constant
    `atom`; that constant subseries is summed exactly via sum_n a_n = 1,
    and only the geometrically decaying remainder is truncated:

        Phi(rho(a)) = rho(1) - rho(atom) - sum_n a_n (rho(gamma_n) - rho(atom))

    Truncation after N terms is bounded by
    coefficient_tail(N) * (rho_abs(gamma_{N+1}) - rho_abs(atom)).
    """
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    x = 1.0 - 2.0 * a.eps
    atom = float(a.w[x == 1.0].sum())
    active = (x > 0.0) & (x < 1.0)
    rho_one = float(sum(c for _, c in terms))
    rho_atom = float(sum(c * atom**k for k, c in terms))
    if not np.any(active):
        return SeriesValue(rho_one - rho_atom, 0.0, 0)
    rho_abs_atom = float(sum(abs(c) * atom**k for k, c in terms))
    y = x[active] ** 2
    wa = a.w[active]
    z = y.copy()
    gamma = atom + float(np.dot(wa, z))
    acc = 0.0
    n = 1
    while True:
        acc += coefficient(tag, n) * (
            sum(c * gamma**k for k, c in terms) - rho_atom
        )
        z *= y
        gamma_next = atom + float(np.dot(wa, z))
        bound = coefficient_tail(tag, n) * (
            sum(abs(c) * gamma_next**k for k, c in terms) - rho_abs_atom
        )
        if bound <= tol or n >= term_cap:
            break
        gamma = gamma_next
        n += 1
    return SeriesValue(rho_one - rho_atom - acc, max(bound, 0.0), n)


def phi_series(
    tag: Functional,
    a: Channel,
    power: int,
    tol: float = 1e-10,
    term_cap: int = DEFAULT_TERM_CAP,
) -> SeriesValue:
    """Phi(a^[power]) by moment series, within tol (or the reported bound)."""
    if power < 1:
        raise ValueError(f"power must be a positive integer, got {power!r}")
    return _phi_terms(_series_tag(tag), a, ((power, 1.0),), tol, term_cap)


def phi_of_poly(
    tag: Functional,
    rho: Polynomial,
    a: Channel,
    tol: float = 1e-10,
    term_cap: int = DEFAULT_TERM_CAP,
) -> SeriesValue:
    """Phi(rho(a)) = sum_k c_k Phi(a^[k]) by moment series, within tol."""
    return _phi_terms(_series_tag(tag), a, rho.terms, tol, term_cap)


# ----------------------------------------------------------------------
# complements of convolutions, in the x = 1 - 2*eps domain

_COEF_ARRAYS: dict[Functional, np.ndarray] = {}


def _coefficient_block(tag: Functional, n0: int, n1: int) -> np.ndarray:
    """Weights a_{Phi,n} for n in [n0, n1) from a geometrically grown cache."""
    arr = _COEF_ARRAYS.get(tag)
    if arr is None or arr.size < n1 - 1:
        size = max(1024, n1 - 1)
        if arr is not None:
            size = max(size, 2 * arr.size)
        n = np.arange(1, size + 1, dtype=float)
        if tag is Functional.H:
            full = 1.0 / (2.0 * LN2 * n * (2.0 * n - 1.0))
        else:
            _b_tail_raw(size)  # ensure the tail cache reaches far enough
            tails = np.asarray(_B_TAIL_CACHE[: size + 1])
            full = tails[:-1] / (2.0 * n)
        _COEF_ARRAYS[tag] = arr = full
    return arr[n0 - 1 : n1 - 1]


_COMPLEMENT_BLOCK = 512


def complement_of_convolution(
    tag: Functional,
    factors: Sequence[tuple[Channel, int]],
    rel_tol: float = 1e-14,
    term_cap: int = 10**6,
) -> float:
    """1 - Phi of a convolution of channel powers, to relative accuracy.

    Evaluates sum_n a_{Phi,n} prod_i gamma_{a_i,n}^{d_i} directly from the
    factors' moments, so the result keeps full relative precision even when
    it underflows the absolute resolution that explicit convolution points
    near eps = 1/2 could represent.  Factor mass at eps = 0 contributes a
    constant floor summed in closed form.
    """
    tag = _series_tag(tag)
    atoms: list[float] = []
    degrees: list[int] = []
    ys: list[np.ndarray] = []
    ws: list[np.ndarray] = []
    for ch, d in factors:
        if d < 1:
            raise ValueError(f"power must be a positive integer, got {d!r}")
        x = 1.0 - 2.0 * ch.eps
        atoms.append(float(ch.w[x == 1.0].sum()))
        degrees.append(d)
        active = (x > 0.0) & (x < 1.0)
        ys.append(x[active] ** 2)
        ws.append(ch.w[active])
    atom_prod = math.prod(a**d for a, d in zip(atoms, degrees))
    if all(y.size == 0 for y in ys):
        return atom_prod
    total = atom_prod
    zs = [y.copy() for y in ys]
    n = 1
    while True:
        count = min(_COMPLEMENT_BLOCK, term_cap - n + 1)
        prod_block = np.ones(count)
        for i, (atom, d, y, w) in enumerate(zip(atoms, degrees, ys, ws)):
            if y.size == 0:
                gamma = np.full(count, atom)
            else:
                # rows of powers are y^n .. y^(n+count-1)
                steps = np.broadcast_to(y[:, None], (y.size, count)).copy()
                steps[:, 0] = zs[i]
                powers = np.cumprod(steps, axis=1)
                gamma = atom + w @ powers
                zs[i] = powers[:, -1] * y
            prod_block *= gamma**d if d > 1 else gamma
        coefs = _coefficient_block(tag, n, n + count)
        total += float(np.dot(coefs, prod_block - atom_prod))
        n += count
        bound = coefficient_tail(tag, n - 1) * (float(prod_block[-1]) - atom_prod)
        if bound <= rel_tol * total or n > term_cap:
            break
    return total
