"""Entropies of distributions and entropy floors at fixed index of coincidence.

The index of coincidence (IC) of a distribution is its collision probability
``c = sum_i p_i^2``.  At fixed ``c`` the possible entropy values form a band;
the functions here evaluate lower edges of that band:

* :func:`q_alpha_estimate` -- convex lower estimate of the Renyi entropy of
  order ``alpha >= 2`` (exact at ``alpha = 2`` and ``alpha = inf``).
* :func:`q_one_estimate` -- piecewise-linear chord estimate for the Shannon
  entropy, exact at integer-inverse coincidence values ``c = 1/n``.
* :func:`shannon_floor_h` -- the exact Shannon lower boundary for a single
  distribution.
* :func:`shannon_floor_multi` -- the optimal lower bound on a sum of Shannon
  entropies given only the total coincidence budget, built by repeatedly
  steepening one distribution at a time.

Two distinct ``(p_a, p_b)`` parameterisations appear: the Renyi estimate uses
one copy of ``p_a`` and ``l - 1`` copies of ``p_b``, whereas the Shannon floor
uses ``n - 1`` copies of ``p_a`` and one ``p_b``.  They are intentionally kept
in separate functions and never shared.

All logarithms are base 2 and ``0 * log 0 == 0``.  Reciprocals within 1e-9 of
an integer are snapped before floor/ceil so breakpoint inputs are classified
stably (the formulas are continuous across breakpoints, so snapping only
removes floating-point jitter).  Infinite order is the symbolic ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmat import ValidationError

__all__ = [
    "IcValue",
    "index_of_coincidence",
    "renyi_entropy",
    "shannon_entropy",
    "binary_entropy",
    "q_alpha_estimate",
    "q_one_estimate",
    "shannon_floor_h",
    "shannon_floor_multi",
]

INTEGER_SNAP_TOL = 1e-9
_RANGE_TOL = 1e-12


def _xlog2(x: float) -> float:
    """``x * log2(x)`` with the ``0 log 0 = 0`` convention."""
    return x * math.log2(x) if x > 0.0 else 0.0


def _snap(x: float) -> float:
    """Round to the nearest integer when within the snap tolerance."""
    r = round(x)
    return float(r) if abs(x - r) <= INTEGER_SNAP_TOL else x


@dataclass(frozen=True)
class IcValue:
    """Index of coincidence ``c`` of a length-``length`` distribution."""

    c: float
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValidationError("distribution length must be positive")
        lo = 1.0 / self.length - _RANGE_TOL
        if not (lo <= self.c <= 1.0 + _RANGE_TOL):
            raise ValidationError(
                f"index of coincidence {self.c!r} outside [1/{self.length}, 1]"
            )

    def __float__(self) -> float:
        return float(self.c)


def index_of_coincidence(p) -> IcValue:
    """Collision probability ``sum_i p_i^2`` of a probability vector."""
    arr = np.asarray(p, dtype=float).ravel()
    return IcValue(float(arr @ arr), arr.size)


def renyi_entropy(p, alpha: float) -> float:
    """Renyi entropy of order ``alpha > 0`` in bits.

    ``alpha = 1`` gives the Shannon entropy, ``alpha = math.inf`` the
    min-entropy ``-log2 max_i p_i``.
    """
    if not alpha > 0.0:
        raise ValidationError(f"Renyi order must be positive, got {alpha!r}")
    arr = np.asarray(p, dtype=float).ravel()
    arr = np.clip(arr, 0.0, None)
    if math.isinf(alpha):
        return -math.log2(float(arr.max()))
    nz = arr[arr > 0.0]
    if alpha == 1.0:
        return float(-np.sum(nz * np.log2(nz)))
    return math.log2(float(np.sum(nz**alpha))) / (1.0 - alpha)


def shannon_entropy(p) -> float:
    return renyi_entropy(p, 1.0)


def binary_entropy(p: float) -> float:
    """``-p log2 p - (1-p) log2 (1-p)`` for ``p`` in [0, 1]."""
    if not (-_RANGE_TOL <= p <= 1.0 + _RANGE_TOL):
        raise ValidationError(f"binary entropy argument {p!r} outside [0, 1]")
    p = min(max(p, 0.0), 1.0)
    return -(_xlog2(p) + _xlog2(1.0 - p))


def _coerce_ic(c, l: int) -> float:
    """Accept a float or an :class:`IcValue`; clamp into ``[1/l, 1]``."""
    c = float(c)
    if not (1.0 / l - _RANGE_TOL <= c <= 1.0 + _RANGE_TOL):
        raise ValidationError(f"index of coincidence {c!r} outside [1/{l}, 1]")
    return min(max(c, 1.0 / l), 1.0)


def q_alpha_estimate(l: int, c, alpha: float) -> float:
    """Convex lower estimate of the order-``alpha`` Renyi entropy at IC ``c``.

    Only orders ``alpha >= 2`` (or infinite) are supported; the boundary of
    the IC-entropy band is attained by distributions of the form
    ``(p_a, p_b, ..., p_b)`` there.  At ``alpha = 2`` the value is exactly
    ``-log2 c``; at infinite order it is ``-log2 p_a``.
    """
    if l < 2:
        raise ValidationError("outcome count must be at least 2")
    if not math.isinf(alpha) and alpha < 2.0:
        raise ValidationError(f"Renyi order {alpha!r} below 2 is not supported here")
    c = _coerce_ic(c, l)
    lc1 = max(l * c - 1.0, 0.0)
    p_a = (1.0 + math.sqrt(lc1 * (l - 1))) / l
    p_b = (1.0 - math.sqrt(lc1 / (l - 1))) / l
    if math.isinf(alpha):
        return -math.log2(p_a)
    t = (l - 1) ** (2.0 / alpha)
    ratio = (p_b / p_a) ** 2
    return (alpha * math.log2(p_a)) / (1.0 - alpha) + (
        math.log2(l) * math.log1p(t * ratio) / math.log1p(t)
    ) / (1.0 - alpha)


def q_one_estimate(c) -> float:
    """Piecewise-linear Shannon lower estimate at IC ``c``.

    With ``n = floor(1/c)`` this is the chord joining ``(1/(n+1), log2(n+1))``
    and ``(1/n, log2 n)``; it equals ``log2 n`` exactly at ``c = 1/n``.
    """
    c = float(c)
    if not (_RANGE_TOL < c <= 1.0 + _RANGE_TOL):
        raise ValidationError(f"index of coincidence {c!r} outside (0, 1]")
    c = min(c, 1.0)
    n = int(math.floor(_snap(1.0 / c)))
    return math.log2(n) - (n + 1) * (n * c - 1.0) * math.log2(1.0 + 1.0 / n)


def shannon_floor_h(c) -> float:
    """Exact minimum Shannon entropy over distributions with IC ``c``.

    The minimiser has ``n - 1`` entries ``p_a`` and one entry ``p_b`` with
    ``n = ceil(1/c)``; the floor is continuous, strictly decreasing, and
    equals ``log2 k`` at every integer-inverse point ``c = 1/k``.
    """
    c = float(c)
    if not (_RANGE_TOL < c <= 1.0 + _RANGE_TOL):
        raise ValidationError(f"index of coincidence {c!r} outside (0, 1]")
    c = min(c, 1.0)
    n = int(math.ceil(_snap(1.0 / c)))
    if n <= 1:
        return 0.0
    cn1 = max(c * n - 1.0, 0.0)
    p_a = (1.0 + math.sqrt(cn1 / (n - 1))) / n
    p_b = max((1.0 - math.sqrt(cn1 * (n - 1))) / n, 0.0)
    return -(n - 1) * _xlog2(p_a) - _xlog2(p_b)


def shannon_floor_multi(theta: int, l: int, c_tot: float) -> float:
    """Optimal lower bound on a sum of ``theta`` Shannon entropies.

    Given only the total coincidence budget ``c_tot`` over ``theta``
    length-``l`` distributions, the minimising configuration consists of
    ``theta - k - 1`` uniform distributions over ``n`` outcomes, ``k`` over
    ``n - 1`` outcomes, and one interpolating distribution absorbing the
    remainder, where ``n = ceil(theta / c_tot)`` and
    ``k = floor(n (n-1) (c_tot - theta/n))``.

    Equals ``theta * log2 l`` at the minimum budget ``c_tot = theta / l`` and
    decreases monotonically to 0 at ``c_tot = theta``.
    """
    if theta < 2:
        raise ValidationError("need at least two distributions")
    if l < 2:
        raise ValidationError("outcome count must be at least 2")
    lo = theta / l - INTEGER_SNAP_TOL
    hi = theta + INTEGER_SNAP_TOL
    if not (lo <= c_tot <= hi):
        raise ValidationError(f"total IC {c_tot!r} outside [{theta}/{l}, {theta}]")
    c_tot = min(max(float(c_tot), theta / l), float(theta))
    n = int(math.ceil(_snap(theta / c_tot)))
    if n <= 1:
        return 0.0
    k = int(math.floor(_snap(n * (n - 1) * (c_tot - theta / n))))
    k = min(max(k, 0), theta - 1)
    c_rem = c_tot - (theta - k - 1) / n - (k / (n - 1) if k else 0.0)
    val = (theta - k - 1) * math.log2(n) + shannon_floor_h(c_rem)
    if k:
        val += k * math.log2(n - 1)
    return val
