"""Critical angles, kappa constants and the analytic q_n(lambda), n = 1, 2, 3.

For each order the interesting range of ``lam`` is ``[lam_lo(n), lam_hi(n)]``
with ``lam_lo(n) = n / (2(n+1))``.  Below ``lam_lo`` the supremum defining
``q_n`` sits at ``x -> 0+`` and ``q_n(lam) = 1 - lam``; between the two ends
it is attained at the unique interior root ``theta_n(lam)`` of a
transcendental equation, and ``q_n`` is obtained in closed form there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError
from .remainder import (
    SERIES_THRESHOLD,
    deviation_slope_sign,
    normalized_deviation,
    scaled_remainder,
)

ANALYTIC_ORDERS = (1, 2, 3)
ROOT_XTOL = 1e-14
#: Points in the scan that brackets the maximizer of the deviation.
SCAN_POINTS = 10_000
SCAN_UPPER = 2 * math.pi
# log-spaced points below the first linear grid node; the maximizer
# approaches 0 as lam decreases to lam_lo(n)
_SCAN_SMALL = np.geomspace(1e-8, SCAN_UPPER / SCAN_POINTS, 60, endpoint=False)
_SCAN_GRID = np.concatenate(
    [_SCAN_SMALL, np.linspace(SCAN_UPPER / SCAN_POINTS, SCAN_UPPER, SCAN_POINTS)]
)


_BRACKET_LO = 1e-6


def _theta1_equation(x):
    return x * math.sin(x) + math.cos(x) - 1.0


def _theta3_equation(x):
    return x * x + 2.0 * x * math.sin(x) + 6.0 * (math.cos(x) - 1.0)


@dataclass(frozen=True)
class CriticalConstants:
    theta1_star: float
    theta3_star: float
    kappa1: float
    kappa3: float
    lambda_star_lower: dict
    lambda_star_upper: dict

    def q_min(self, n):
        return q_min(n)


@lru_cache(maxsize=1)
def critical_constants() -> CriticalConstants:
    """Solve for the critical angles once and derive everything else.

    ``theta1_star`` is the root of ``x sin x + cos x - 1`` in ``(0, pi)``
    and ``theta3_star`` the root of ``x^2 + 2x sin x + 6(cos x - 1)`` in
    ``(0, 2pi)``.  Both functions change sign on the brackets used below
    (checked by brentq itself).
    """
    t1 = brentq(_theta1_equation, 1.0, math.pi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    t3 = brentq(_theta3_equation, math.pi, 2 * math.pi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    kappa1 = math.sin(t1)
    kappa3 = (t3 - math.sin(t3)) / (3.0 * t3 * t3)
    lower = {n: n / (2.0 * (n + 1)) for n in ANALYTIC_ORDERS}
    upper = {
        1: math.sin(t1) / t1,
        2: 4.0 / math.pi**2,
        3: 6.0 * (t3 - math.sin(t3)) / t3**3,
    }
    return CriticalConstants(t1, t3, kappa1, kappa3, lower, upper)


def lambda_lower(n) -> float:
    """Largest lam with ``lam + q_n(lam) = 1``: ``n / (2(n+1))``."""
    return n / (2.0 * (n + 1))


def lambda_lower_exact(n) -> Fraction:
    return Fraction(n, 2 * (n + 1))


def lambda_upper(n) -> float:
    """Smallest minimizer of ``q_n``."""
    _check_analytic(n)
    return critical_constants().lambda_star_upper[n]


def _check_analytic(n):
    if n not in ANALYTIC_ORDERS:
        raise DomainError(
            f"closed forms exist for n in {ANALYTIC_ORDERS} only; use the oracle for n={n}"
        )


def _check_lambda(n, lam):
    _check_analytic(n)
    hi = lambda_upper(n)
    if not (0.0 <= lam <= hi):
        raise DomainError(
            f"lambda={lam!r} outside [0, {hi:.12g}] where the analytic q_{n} is known; "
            "use verifier.q_oracle beyond lambda^*"
        )


# --- defining equations of theta_n(lam), exactly as stated for each order ---

def theta_equation(n, lam, x):
    """Left side of the equation whose root in the lemma interval is theta_n.

    These are positive multiples of the slope of the deviation:
    ``x^6 G`` for n=3, ``x^4 G`` for n=2 and ``x^2 G`` for n=1, where
    ``G`` is :func:`~sharpchf.remainder.deviation_slope_sign`.
    """
    c, s = math.cos(x), math.sin(x)
    if n == 3:
        return (
            2 * c * (lam * x**4 - 18 * x**2 + 36)
            - 6 * x * s * (x**2 * (lam + 1) - 12)
            - (3 - 4 * lam) * x**4
            - 72
        )
    if n == 2:
        return x * (8 - lam * x * x) * s + 4 * (lam * x * x + x * x - 4) * math.sin(x / 2) ** 2 - 4 * x * x
    if n == 1:
        return c * (2 - lam * x * x) + (1 + lam) * x * s - 2
    _check_analytic(n)


def closed_form_q(n, lam, x):
    """The closed form for q_n evaluated at a candidate maximizer ``x``.

    Small ``x`` go through the scaled tail series: the closed forms are the
    modulus of the same complex number, written out in cos/sin.
    """
    if x < SERIES_THRESHOLD:
        return abs(complex(scaled_remainder(n, x)) - lam)
    c, s = math.cos(x), math.sin(x)
    if n == 3:
        return 6.0 / x**3 * math.hypot(c - 1 + x * x / 2, s - x + lam * x**3 / 6)
    if n == 2:
        return 2.0 * math.hypot((c - 1 + lam * x * x / 2) / (x * x), (x - s) / (x * x))
    if n == 1:
        return math.hypot((c - 1) / x, (s - lam * x) / x)
    _check_analytic(n)


def _scan_bracket(n, lam):
    values = normalized_deviation(n, lam, _SCAN_GRID)
    i = int(np.argmax(values))
    lo = float(_SCAN_GRID[max(i - 1, 0)])
    hi = float(_SCAN_GRID[min(i + 1, len(_SCAN_GRID) - 1)])
    return lo, hi


def _locate_theta(n, lam, scan=False):
    def slope(x):
        return deviation_slope_sign(n, lam, x)

    # On (0, 2pi) the slope has a single sign change, from + to -, at
    # theta_n(lam); check the ends and fall back to a dense scan otherwise.
    lo, hi = _BRACKET_LO, SCAN_UPPER
    if scan or not (slope(lo) > 0.0 > slope(hi)):
        lo, hi = _scan_bracket(n, lam)
        if slope(lo) <= 0.0:
            # maximizer below the smallest scan node; lam is within rounding of lam_lo
            return lo
        while slope(hi) >= 0.0 and hi < 2 * SCAN_UPPER:
            hi += SCAN_UPPER / SCAN_POINTS
    return brentq(slope, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


@lru_cache(maxsize=65536)
def _theta_cached(n, lam):
    if lam <= lambda_lower(n):
        return 0.0
    return _locate_theta(n, lam)


def theta_n(n, lam) -> float:
    """Maximizer of the normalized deviation; 0 on the flat branch.

    The root of the deviation slope on ``(0, 2pi)`` is refined by Brent's
    bracketed method.  When the slope does not change sign across that
    interval (lam within rounding of lam_lo) the bracket comes from a dense
    scan of the deviation instead.
    """
    _check_lambda(n, lam)
    return _theta_cached(n, float(lam))


@dataclass(frozen=True)
class QEvaluation:
    q: float
    theta: float
    branch: str  # "flat" or "interior"
    method: str  # "analytic" or "oracle"
    tol: float = 0.0


def q(n, lam) -> QEvaluation:
    """Analytic ``q_n(lam)`` for n in {1, 2, 3} and ``0 <= lam <= lam_hi(n)``."""
    _check_lambda(n, lam)
    lam = float(lam)
    if lam <= lambda_lower(n):
        return QEvaluation(1.0 - lam, 0.0, "flat", "analytic")
    theta = _theta_cached(n, lam)
    return QEvaluation(closed_form_q(n, lam, theta), theta, "interior", "analytic")


def q_min(n) -> float:
    """``min_lam q_n(lam) = q_n(lam_hi(n))``: kappa1, 2/pi and 6 kappa3."""
    return q(n, lambda_upper(n)).q
