"""Third-moment ratio bound A(b), its extremal law, and gamma_n(b).

``A(b)`` (written ``c(b)`` in some sources) is the sharp bound for
``|E X^3| / E|X|^3`` over laws with ``E X = 0``, ``E X^2 = 1`` and
``E|X|^3 = b``.  ``gamma_n(b)`` minimizes ``lam A(b) + q_n(lam)`` over
``[lam_lo(n), lam_hi(n)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from fractions import Fraction

from . import constants
from .exceptions import DomainError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
LAMBDA_TOL = 1e-10

#: b column of the published table; the last entry is the b -> inf limit.
TABLE1_B = (
    "1", "1.0001", "1.001", "1.005", "1.01", "1.05", "1.10", "1.20", "1.30",
    "1.40", "1.50", "1.60", "1.70", "1.79", "1.90", "2.00", "3.00", "4.00",
    "5.00", "inf",
)
TABLE1_HEADER = ("b", "gamma1", "lambda1", "q1", "gamma2", "lambda2", "q2",
                 "gamma3", "lambda3", "q3")


def _check_b(b):
    if not (b >= 1.0) or math.isnan(b):
        raise DomainError(f"b = E|X|^3 of a standardized law is >= 1, got {b!r}")


def big_a(b) -> float:
    """``sqrt(sqrt(1 + 8/b^2)/2 + 1/2 - 2/b^2)``, evaluated without cancellation.

    With ``s = sqrt(1 + 8/b^2)`` the radicand equals
    ``2 (b^2 - 1)(1 + s) / (b^2 (3 + s))``, which stays accurate for b near 1.
    """
    _check_b(b)
    if math.isinf(b):
        return 1.0
    s = math.sqrt(1.0 + 8.0 / (b * b))
    return math.sqrt(2.0 * (b - 1.0) * (b + 1.0) * (1.0 + s) / (b * b * (3.0 + s)))


def big_a_literal(b) -> float:
    """The textbook form of :func:`big_a`; loses digits as b -> 1."""
    return math.sqrt(max(0.5 * math.sqrt(1.0 + 8.0 / b**2) + 0.5 - 2.0 / b**2, 0.0))


c_of_b = big_a


@dataclass(frozen=True)
class TwoPointLaw:
    u: float
    atom_pos: float
    atom_neg: float
    weight_pos: float
    weight_neg: float

    def atoms(self):
        return [(self.atom_neg, self.weight_neg), (self.atom_pos, self.weight_pos)]


def extremal_two_point(b) -> TwoPointLaw:
    """Two-atom standardized law with ``E|X|^3 = b`` attaining ``|E X^3| = A(b) b``.

    ``u = sqrt(b sqrt(b^2 + 8)/2 - b^2/2 - 1)``; the positive atom
    ``sqrt((1-u)/(1+u))`` carries weight ``(1+u)/2`` and the negative atom
    ``-sqrt((1+u)/(1-u))`` carries ``(1-u)/2``.  Mean zero forces the two
    atoms to have opposite signs.
    """
    _check_b(b)
    if math.isinf(b):
        raise DomainError("no two-point law with infinite third moment")
    w = math.sqrt(b * b + 8.0)
    # radicand rewritten as 8(b^2-1)/((w+b)(w+3b)) to avoid cancellation
    d = (w + b) * (w + 3.0 * b)
    u = math.sqrt(8.0 * (b - 1.0) * (b + 1.0) / d)
    # 1 - u^2 = 4 (4 + 8b/(w+b)) / d, so 1 - u keeps full precision for large b
    one_minus_u = 4.0 * (4.0 + 8.0 * b / (w + b)) / d / (1.0 + u)
    assert u < 1.0 and one_minus_u > 0.0
    return TwoPointLaw(
        u=u,
        atom_pos=math.sqrt(one_minus_u / (1.0 + u)),
        atom_neg=-math.sqrt((1.0 + u) / one_minus_u),
        weight_pos=(1.0 + u) / 2.0,
        weight_neg=one_minus_u / 2.0,
    )


def golden_section(f, lo, hi, tol=LAMBDA_TOL):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    The ends are compared against the final interior point so that a
    minimum sitting on the boundary is returned exactly.
    """
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    best = min((f1, x1), (f2, x2))
    for end in (lo, hi):
        fe = f(end)
        if fe < best[0]:
            best = (fe, end)
    return best[1], best[0]


@dataclass(frozen=True)
class GammaResult:
    b: float
    n: int
    gamma: float
    lambda_n: float
    q_at_lambda: float


def minimize_lambda(n, slope):
    """``min (lam * slope + q_n(lam))`` over ``[lam_lo(n), lam_hi(n)]``.

    Returns ``(lam, q_n(lam), value)``.  The objective is convex, so golden
    section finds the minimizer.
    """
    lo, hi = constants.lambda_lower(n), constants.lambda_upper(n)

    def objective(lam):
        return lam * slope + constants.q(n, lam).q

    lam, value = golden_section(objective, lo, hi)
    return lam, constants.q(n, lam).q, value


def gamma(n, b) -> GammaResult:
    """``gamma_n(b) = min (lam A(b) + q_n(lam))`` with its minimizer."""
    constants._check_analytic(n)
    _check_b(b)
    if math.isinf(b):
        lam = constants.lambda_lower(n)
        return GammaResult(b, n, 1.0, lam, 1.0 - lam)
    a = big_a(b)
    lam, qv, _ = minimize_lambda(n, a)
    return GammaResult(b, n, lam * a + qv, lam, qv)


def round_up(x, digits) -> str:
    """``x`` rounded towards +inf at ``digits`` decimals, as fixed-point text."""
    return format(_round(x, digits, ROUND_CEILING), "f")


def round_down(x, digits) -> str:
    return format(_round(x, digits, ROUND_FLOOR), "f")


def _round(x, digits, mode):
    # values within 1e-12 of a printed grid point keep those digits
    quantum = Decimal(1).scaleb(-digits)
    nearest = Decimal(repr(x)).quantize(quantum)
    if abs(float(nearest) - x) < 1e-12:
        return nearest
    return Decimal(repr(x)).quantize(quantum, rounding=mode)


def _fraction_text(fr: Fraction):
    return str(fr.numerator) if fr.denominator == 1 else f"{fr.numerator}/{fr.denominator}"


def table1_row(b_text):
    """One table row as strings: b, then (gamma, lam, q) for n = 1, 2, 3.

    gamma and q are rounded up to 6 and 4 decimals, lam down to 4.  The
    ``inf`` row holds the exact limits ``1, n/(2(n+1)), 1 - n/(2(n+1))``.
    """
    b = float(b_text)
    _check_b(b)
    cells = [b_text]
    for n in constants.ANALYTIC_ORDERS:
        if math.isinf(b):
            lam = constants.lambda_lower_exact(n)
            cells += ["1", _fraction_text(lam), _fraction_text(1 - lam)]
            continue
        res = gamma(n, b)
        cells += [
            round_up(res.gamma, 6),
            round_down(res.lambda_n, 4),
            round_up(res.q_at_lambda, 4),
        ]
    return cells


def table1(b_list=TABLE1_B):
    """Rows for every b; an invalid b yields ``[b, "error: ..."]`` and the rest go on."""
    rows = []
    for b_text in b_list:
        b_text = str(b_text)
        try:
            rows.append(table1_row(b_text))
        except (DomainError, ValueError) as exc:
            rows.append([b_text, f"error: {exc}"])
    return rows
