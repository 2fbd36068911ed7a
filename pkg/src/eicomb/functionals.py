"""Channel quality functionals E/H/B and the kernels they factor through.

E is the error probability, H the entropy and B the Bhattacharyya value of
a channel; all three are linear in the weight measure, equal 0 for the
perfect channel and reach their maximum (1/2 for E, 1 for H and B) exactly
for the useless channel.  H and B factor through decreasing kernels on
[0, 1]:

    f_H(x) = h2((1 - x) / 2)        f_B(x) = sqrt(1 - x^2)

so that Phi(BSC(eps)) = f_Phi(1 - 2*eps).  E has no such kernel.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .channel import Channel

# Bisection for h2_inv: iteration cap comfortably past double-precision
# resolution of [0, 1/2]; the loop exits early once the midpoint collapses.
_BISECT_MAX_ITER = 120


class Functional(enum.Enum):
    """Selector for the error-probability, entropy or Bhattacharyya value."""

    E = "E"
    H = "H"
    B = "B"


def h2(x: float) -> float:
    """Binary entropy in bits, with h2(0) = h2(1) = 0 by continuity."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"h2 argument must lie in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def h2_vec(x: np.ndarray) -> np.ndarray:
    """Vectorized binary entropy with the same endpoint convention."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    out[inner] = -xi * np.log2(xi) - (1.0 - xi) * np.log2(1.0 - xi)
    return out


def h2_inv(y: float) -> float:
    """Unique x in [0, 1/2] with h2(x) = y, by bisection.

    The residual |h2(h2_inv(y)) - y| stays below 1e-12 across [0, 1].
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"h2_inv argument must lie in [0, 1], got {y!r}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if h2(mid) < y:
            lo = mid
        else:
            hi = mid
    return lo if abs(h2(lo) - y) <= abs(h2(hi) - y) else hi


def kernel(tag: Functional, x: float) -> float:
    """The kernel f_Phi(x) on [0, 1] for Phi in {H, B}; decreasing, 1 -> 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"kernel argument must lie in [0, 1], got {x!r}")
    if tag is Functional.H:
        return h2((1.0 - x) / 2.0)
    if tag is Functional.B:
        return math.sqrt(max(0.0, 1.0 - x * x))
    raise ValueError("the error-probability functional has no kernel")


def kernel_inv(tag: Functional, y: float) -> float:
    """Inverse kernel on [0, 1]: f_H^{-1}(y) = 1 - 2*h2_inv(y), f_B is self-inverse."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"kernel_inv argument must lie in [0, 1], got {y!r}")
    if tag is Functional.H:
        return 1.0 - 2.0 * h2_inv(y)
    if tag is Functional.B:
        return math.sqrt(max(0.0, 1.0 - y * y))
    raise ValueError("the error-probability functional has no kernel")


def evaluate(tag: Functional, a: Channel) -> float:
    """Closed-form value of the selected functional on a discrete channel."""
    if tag is Functional.E:
        return float(np.dot(a.w, a.eps))
    if tag is Functional.H:
        return float(np.dot(a.w, h2_vec(a.eps)))
    if tag is Functional.B:
        return float(np.dot(a.w, 2.0 * np.sqrt(a.eps * (1.0 - a.eps))))
    raise ValueError(f"unknown functional {tag!r}")


_LN2 = math.log(2.0)


def _h2_complement(eps: float) -> float:
    """1 - h2(eps) without cancellation near eps = 1/2.

    Uses 1 - h2((1-x)/2) = sum_{n>=1} x^(2n) / (2 ln(2) n (2n-1)), which
    converges geometrically at rate x^2; for x above 1/2 the direct
    subtraction is already well conditioned.
    """
    x = 1.0 - 2.0 * eps
    if abs(x) >= 0.5:
        return 1.0 - h2(eps)
    x2 = x * x
    if x2 == 0.0:
        return 0.0
    term = x2
    total = 0.0
    n = 1
    while True:
        total += term / (n * (2 * n - 1))
        if term < 1e-17 * total or n > 300:
            break
        term *= x2
        n += 1
    return total / (2.0 * _LN2)


def _b_complement(eps: float) -> float:
    """1 - 2 sqrt(eps (1-eps)) via the exact square identity; stable."""
    x = 1.0 - 2.0 * eps
    root = x / (math.sqrt(1.0 - eps) + math.sqrt(eps))
    return root * root


def complement(tag: Functional, a: Channel) -> float:
    """1 - Phi(a) (the capacity when Phi = H), computed without the
    catastrophic cancellation the direct subtraction suffers for channels
    close to useless."""
    if tag is Functional.H:
        return float(sum(w * _h2_complement(e) for e, w in zip(a.eps, a.w)))
    if tag is Functional.B:
        return float(sum(w * _b_complement(e) for e, w in zip(a.eps, a.w)))
    raise ValueError("the complement is defined for the H and B functionals")
