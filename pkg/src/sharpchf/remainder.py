"""Taylor remainder of the complex exponent and the normalized deviation.

The remainder after ``n`` terms is

    r_n(x) = exp(ix) - sum_{k<n} (ix)^k / k!

and most of the package works with its scaled form

    E_n(x) = n! r_n(x) / (ix)^n = sum_{j>=0} n! (ix)^j / (n+j)!,

which tends to 1 as x -> 0.  With it the normalized deviation reads
``|E_n(x) - lam|``.  Near the origin everything is summed from the tail
series, so no digits are lost to cancellation.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from .exceptions import DomainError

#: Below this |x| the tail series is used instead of direct subtraction.
SERIES_THRESHOLD = 0.5
#: Relative truncation level of the tail series.
SERIES_RTOL = 1e-18


def _check_order(n):
    if int(n) != n or n < 1:
        raise DomainError(f"order must be an integer >= 1, got {n!r}")
    return int(n)


@lru_cache(maxsize=None)
def _series_terms(n, xmax):
    # smallest J with |x|^J n!/(n+J)! < SERIES_RTOL on |x| <= xmax
    term, j = 1.0, 0
    while term >= SERIES_RTOL:
        j += 1
        term *= xmax / (n + j)
    return j + 1


def _scaled_series(n, x):
    """sum_j n! (ix)^j / (n+j)! by Horner, for |x| < SERIES_THRESHOLD."""
    m = _series_terms(n, SERIES_THRESHOLD)
    ix = 1j * x
    acc = np.ones_like(ix)
    for j in range(m, 0, -1):
        acc = 1.0 + acc * ix / (n + j)
    return acc


def _scaled_direct(n, x):
    ix = 1j * x
    half = np.sin(0.5 * x)
    # exp(ix) - 1 without the cancellation in cos(x) - 1
    acc = -2.0 * half * half + 1j * np.sin(x)
    term = np.ones_like(ix)
    for k in range(1, n):
        term = term * ix / k
        acc = acc - term
    term = term * ix / n
    return acc / term


def _scaled_scalar(n, x):
    if abs(x) < SERIES_THRESHOLD:
        ix = 1j * x
        acc = 1.0
        for j in range(_series_terms(n, SERIES_THRESHOLD), 0, -1):
            acc = 1.0 + acc * ix / (n + j)
        return complex(acc)
    ix = 1j * x
    half = math.sin(0.5 * x)
    acc = complex(-2.0 * half * half, math.sin(x))
    term = 1.0 + 0j
    for k in range(1, n):
        term = term * ix / k
        acc -= term
    return acc / (term * ix / n)


@lru_cache(maxsize=None)
def _diff_coefficients(n):
    # E_{n-1} - E_n = sum_{j>=1} j (n-1)! (ix)^j / (n+j)!
    m = _series_terms(n, SERIES_THRESHOLD) + 1
    return tuple(j * math.factorial(n - 1) / math.factorial(n + j) for j in range(1, m))


def _diff_scalar(n, x, en):
    # E_{n-1}(x) - E_n(x)
    if abs(x) < SERIES_THRESHOLD:
        ix = 1j * x
        acc = 0j
        for c in reversed(_diff_coefficients(n)):
            acc = (acc + c) * ix
        return acc
    prev = cmath.exp(1j * x) if n == 1 else _scaled_scalar(n - 1, x)
    return prev - en


def scaled_remainder(n, x):
    """``E_n(x) = n! r_n(x) / (ix)^n``, with ``E_n(0) = 1``.

    Accepts a scalar or an array; returns complex of the same shape.
    """
    n = _check_order(n)
    if isinstance(x, (float, int)):
        if not math.isfinite(x):
            raise DomainError("x must be finite")
        return _scaled_scalar(n, float(x))
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("x must be finite")
    out = np.empty(xa.shape, dtype=complex)
    small = np.abs(xa) < SERIES_THRESHOLD
    if np.any(small):
        out[small] = _scaled_series(n, xa[small])
    if not np.all(small):
        big = ~small
        out[big] = _scaled_direct(n, xa[big])
    return out[()] if out.ndim == 0 else out


def remainder(n, x):
    """``r_n(x) = exp(ix) - sum_{k<n} (ix)^k/k!``.

    Small arguments go through the tail series so the result keeps full
    relative precision all the way down to ``x = 0``.
    """
    n = _check_order(n)
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("x must be finite")
    scale = (1j * xa) ** n / math.factorial(n)
    out = scale * scaled_remainder(n, xa)
    return complex(out) if np.ndim(out) == 0 else out


def remainder_direct(n, x):
    """Naive ``exp(ix)`` minus the partial sum; kept for cross-checks."""
    n = _check_order(n)
    partial = sum((1j * x) ** k / math.factorial(k) for k in range(n))
    return np.exp(1j * np.asarray(x, dtype=float)) - partial


def normalized_deviation(n, lam, x):
    """``(n!/x^n) |r_n(x) - lam (ix)^n/n!|`` for ``x > 0``.

    Vectorized over ``x``.  As ``x -> 0+`` the value tends to
    :func:`limit_at_zero`, as ``x -> inf`` to :func:`limit_at_infinity`.
    """
    if lam < 0:
        raise DomainError("lambda must be nonnegative")
    if isinstance(x, (float, int)):
        if x <= 0:
            raise DomainError("normalized deviation is defined for x > 0 only")
        return abs(scaled_remainder(n, x) - lam)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("normalized deviation is defined for x > 0 only")
    out = np.abs(scaled_remainder(n, xa) - lam)
    return float(out) if out.ndim == 0 else out


def limit_at_zero(lam):
    return abs(1.0 - lam)


def limit_at_infinity(lam):
    return float(lam)


def deviation_slope_sign(n, lam, x):
    """A function with the sign of ``d/dx normalized_deviation``.

    Returns ``Re(conj(E_n - lam) (E_{n-1} - E_n))``; the derivative of the
    squared deviation equals ``2n/x`` times this.  The difference
    ``E_{n-1} - E_n`` is summed from its own series near zero.
    """
    n = _check_order(n)
    if isinstance(x, (float, int)):
        en = _scaled_scalar(n, float(x))
        return ((en - lam).conjugate() * _diff_scalar(n, float(x), en)).real
    xa = np.asarray(x, dtype=float)
    en = scaled_remainder(n, xa)
    small = np.abs(xa) < SERIES_THRESHOLD
    diff = np.empty(xa.shape, dtype=complex)
    if np.any(small):
        ix = 1j * xa[small]
        acc = np.zeros_like(ix)
        for c in reversed(_diff_coefficients(n)):
            acc = (acc + c) * ix
        diff[small] = acc
    if not np.all(small):
        big = ~small
        prev = np.exp(1j * xa[big]) if n == 1 else scaled_remainder(n - 1, xa[big])
        diff[big] = prev - en[big]
    out = (np.conj(en - lam) * diff).real
    return float(out) if out.ndim == 0 else out


def prawitz_residual(n, x):
    """Right side minus left side of Prawitz's rearranged remainder bound.

    ``(n+2)/(2(n+1)) |x|^n/n! - |r_n(x) - n/(2(n+1)) (ix)^n/n!|``; never
    negative beyond rounding.
    """
    n = _check_order(n)
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("x must be finite")
    shift = n / (2 * (n + 1))
    scale = np.abs(xa) ** n / math.factorial(n)
    inner = np.abs(scaled_remainder(n, xa) - shift)
    out = scale * ((n + 2) / (2 * (n + 1)) - inner)
    return float(out) if out.ndim == 0 else out


def tail_bound(n, lam, x):
    """Upper bound ``lam + 2n/x`` for the normalized deviation on ``[x, inf)``.

    Follows from ``|r_n(y)| <= 2 y^(n-1)/(n-1)!``.
    """
    n = _check_order(n)
    if x <= 0:
        raise DomainError("tail bound needs x > 0")
    return lam + 2.0 * n / x
