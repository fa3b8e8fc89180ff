"""Brute-force oracle for q_n(lam) and numerical checks of the moment bounds.

Every ``check_*`` function returns :class:`BoundReport` objects whose
``slack`` is right side minus left side.  Left sides are evaluated atom by
atom from the Taylor remainder, e.g.

    f(t) - sum_{k<n} alpha_k (it)^k / k! = sum_j w_j r_n(t x_j),

so no digits are lost for small ``t``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import constants
from .constants import QEvaluation
from .distributions import (
    DiscreteDistribution,
    from_two_point,
    is_standardized,
    moments,
    random_law,
    standardize,
    symmetric_three_point,
)
from .exceptions import DomainError, PreconditionError
from .moment_bounds import big_a, extremal_two_point, gamma, minimize_lambda
from .remainder import normalized_deviation, remainder, tail_bound

SLACK_TOL = -1e-12
EQUALITY_TOL = 1e-9
GRID_STEP = 1e-3
ZOOM_POINTS = 21
ZOOM_CANDIDATES = 8
X_MAX_START = 4 * math.pi
X_MAX_CAP = 4 * math.pi * 2**7

BOUND_IDS = (
    "eq6", "eq7", "eq9", "eq10", "eq11", "eq12",
    "cor_gamma3", "cor_gamma2", "cor_gamma1", "cor_kappa1",
    "combined_fp", "combined_fpp", "thm2",
)


# --------------------------------------------------------------------------
# grid supremum


def _zoom(f, lo, hi, width_tol):
    """Refine a local maximum inside [lo, hi] by repeated 10x finer grids."""
    best_x, best_v = None, -math.inf
    while True:
        xs = np.linspace(lo, hi, ZOOM_POINTS)
        if xs[0] <= 0.0:
            xs = xs[1:]
        vs = f(xs)
        i = int(np.argmax(vs))
        if vs[i] > best_v:
            best_x, best_v = float(xs[i]), float(vs[i])
        step = (hi - lo) / (ZOOM_POINTS - 1)
        if step < width_tol * max(1.0, best_x):
            return best_x, best_v
        lo, hi = max(float(xs[i]) - step, 0.0), float(xs[i]) + step


def _local_maxima(vs, k):
    inner = np.flatnonzero((vs[1:-1] >= vs[:-2]) & (vs[1:-1] >= vs[2:])) + 1
    cand = np.concatenate([[0], inner, [len(vs) - 1]])
    order = np.argsort(vs[cand])[::-1]
    return cand[order[:k]]


def grid_supremum(f, tail, tol, step=GRID_STEP, x_max=X_MAX_START, x_cap=X_MAX_CAP):
    """Supremum of ``f`` over ``x > 0`` by coarse grid plus zoom refinement.

    ``tail(x)`` must bound ``f`` on ``[x, inf)``; the search range doubles
    until the tail bound drops below the best value found minus ``tol``,
    or ``x_cap`` is hit.  Returns ``(sup, argmax, achieved_tol)`` where
    ``achieved_tol`` is the remaining gap to the tail bound (0 when the
    truncation is certified).
    """
    xs = np.arange(1, int(round(x_max / step)) + 1) * step
    vs = f(xs)
    while tail(float(xs[-1])) >= float(vs.max()) - tol and xs[-1] < x_cap:
        more = xs[-1] + np.arange(1, len(xs) + 1) * step
        xs = np.concatenate([xs, more])
        vs = np.concatenate([vs, f(more)])
    best_x, best_v = None, -math.inf
    for i in _local_maxima(vs, ZOOM_CANDIDATES):
        lo = float(xs[i - 1]) if i > 0 else 0.0
        hi = float(xs[min(i + 1, len(xs) - 1)])
        x, v = _zoom(f, lo, hi, 1e-10)
        if v > best_v:
            best_x, best_v = x, v
    gap = max(0.0, tail(float(xs[-1])) - best_v)
    achieved = 0.0 if gap <= tol else gap
    return best_v, best_x, achieved


def q_oracle(n, lam, tol=1e-9) -> QEvaluation:
    """``sup_{x>0} normalized_deviation(n, lam, x)`` by exhaustive search.

    Works for any order.  The supremum at ``x -> 0+`` (flat branch) is
    approached by zooming towards the origin, never by substituting the
    limit value.
    """
    if tol < 1e-12:
        raise DomainError("oracle tolerance must be >= 1e-12")
    if lam < 0:
        raise DomainError("lambda must be nonnegative")
    value, x, achieved = grid_supremum(
        lambda xs: normalized_deviation(n, lam, xs),
        lambda x: tail_bound(n, lam, x),
        tol,
    )
    # supremum approached inside the first grid cell: the x -> 0+ branch
    branch = "flat" if x <= GRID_STEP else "interior"
    return QEvaluation(value, x, branch, "oracle", tol=max(tol, achieved))


def single_component_supremum(n, tol=1e-12):
    """Supremum of ``n!/x^n`` times |Re r_n(x)| (odd n) or |Im r_n(x)| (even n)."""
    part = np.real if n % 2 else np.imag
    scale = float(math.factorial(n))

    def f(xs):
        return scale * np.abs(part(remainder(n, xs))) / xs**n

    value, _, _ = grid_supremum(f, lambda x: 2.0 * n / x, tol)
    return value


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    slack: float
    at_t: float
    law_digest: str
    detail: str = ""

    @property
    def passed(self):
        return self.slack >= SLACK_TOL

    def to_dict(self):
        return asdict(self)


def _remainder_sum(dist, k, ell, t, lam=0.0):
    """``sum_j w_j (i x_j)^ell (r_k(t x_j) - lam (i t x_j)^k / k!)``."""
    x, w = dist._values, dist._weights
    y = t * x
    terms = w * (1j * x) ** ell * (remainder(k, y) - lam * (1j * y) ** k / math.factorial(k))
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def check_theorem1(dist, n, ell, lam, t) -> BoundReport:
    """Derivative ``ell`` of f minus its Taylor polynomial with the ``lam`` correction.

    ``ell = 0`` is the plain characteristic-function bound, ``ell >= 1``
    the derivative bound with ``q_{n-ell}``.
    """
    if not (0 <= ell <= n - 1):
        raise DomainError("need 0 <= ell <= n - 1")
    k = n - ell
    beta_n = moments(dist, n).beta[n - 1]
    lhs = abs(_remainder_sum(dist, k, ell, t, lam))
    rhs = constants.q(k, lam).q * beta_n * abs(t) ** k / math.factorial(k)
    bound_id = "eq6" if ell == 0 else "eq7"
    return BoundReport(bound_id, rhs - lhs, t, dist.digest(), f"n={n},ell={ell},lam={lam:.12g}")


@dataclass
class _LawCoefficients:
    """t-independent right-side factors, computed once per law."""

    m: object
    ratio3: float
    min3: float
    min2: float
    min1_3: float
    min1_1: float
    gammas: dict = field(default_factory=dict)


def _law_coefficients(dist, with_gamma):
    m = moments(dist, 3)
    b1, b3 = m.beta[0], m.beta[2]
    ratio3 = abs(m.alpha[2]) / b3 if b3 > 0 else 0.0
    ratio1 = abs(m.alpha[0]) / b1 if b1 > 0 else 0.0
    # min over lam of (lam |alpha| + q(lam) beta) = beta * min(lam ratio + q)
    c = _LawCoefficients(
        m=m,
        ratio3=ratio3,
        min3=minimize_lambda(3, ratio3)[2],
        min2=minimize_lambda(2, ratio3)[2],
        min1_3=minimize_lambda(1, ratio3)[2],
        min1_1=minimize_lambda(1, ratio1)[2],
    )
    if with_gamma:
        c.gammas = {n: gamma(n, max(b3, 1.0)).gamma for n in (1, 2, 3)}
    return c


def check_specialized(dist, t, coeffs=None):
    """The four n = 1, 2, 3 bounds with the inner minimum over lam."""
    c = coeffs or _law_coefficients(dist, with_gamma=False)
    b1, b3 = c.m.beta[0], c.m.beta[2]
    at = abs(t)
    digest = dist.digest()
    # f - 1 - i a1 t + a2 t^2/2 = sum w r_3(tx)
    lhs9 = abs(_remainder_sum(dist, 3, 0, t))
    # f' - i a1 + a2 t = sum w (ix) r_2(tx)
    lhs10 = abs(_remainder_sum(dist, 2, 1, t))
    # f'' + a2 = sum w (ix)^2 r_1(tx)
    lhs11 = abs(_remainder_sum(dist, 1, 2, t))
    lhs12 = abs(_remainder_sum(dist, 1, 0, t))
    return [
        BoundReport("eq9", c.min3 * b3 * at**3 / 6 - lhs9, t, digest),
        BoundReport("eq10", c.min2 * b3 * at**2 / 2 - lhs10, t, digest),
        BoundReport("eq11", c.min1_3 * b3 * at - lhs11, t, digest),
        BoundReport("eq12", c.min1_1 * b1 * at - lhs12, t, digest),
    ]


def _require_standardized(dist):
    if not is_standardized(dist):
        raise PreconditionError("law must have mean 0 and variance 1")


def check_corollary(dist, t, coeffs=None):
    """gamma_n(b) bounds for a standardized law, plus the kappa1 bound."""
    _require_standardized(dist)
    c = coeffs or _law_coefficients(dist, with_gamma=True)
    if not c.gammas:
        c.gammas = {n: gamma(n, max(c.m.beta[2], 1.0)).gamma for n in (1, 2, 3)}
    a1, a2 = c.m.alpha[0], c.m.alpha[1]
    b1, b = c.m.beta[0], c.m.beta[2]
    at = abs(t)
    digest = dist.digest()
    kappa1 = constants.critical_constants().kappa1
    # exact identities; the alpha terms vanish for an exactly standardized law
    lhs3 = abs(_remainder_sum(dist, 3, 0, t) + 1j * a1 * t - (a2 - 1) * t * t / 2)
    lhs2 = abs(_remainder_sum(dist, 2, 1, t) + 1j * a1 - (a2 - 1) * t)
    lhs1 = abs(_remainder_sum(dist, 1, 2, t) - (a2 - 1))
    lhsk = abs(_remainder_sum(dist, 1, 0, t))
    g = c.gammas
    return [
        BoundReport("cor_gamma3", b * g[3] * at**3 / 6 - lhs3, t, digest),
        BoundReport("cor_gamma2", b * g[2] * t * t / 2 - lhs2, t, digest),
        BoundReport("cor_gamma1", b * g[1] * at - lhs1, t, digest),
        BoundReport("cor_kappa1", kappa1 * at * b1 - lhsk, t, digest),
    ]


def combined_lhs(dist, t):
    """``(|f(t) + f'(t)/t|, |f(t) + f''(t)|)`` evaluated without cancellation."""
    x, w = dist._values, dist._weights
    m = moments(dist, 2)
    a1, a2 = m.alpha
    y = t * x
    r1, r2 = remainder(1, y), remainder(2, y)
    s1 = w * r2 * (1 + 1j * x / t)
    s2 = w * (1 - x * x) * r1
    fp = (1 - a2) + 1j * a1 * (t + 1 / t) + complex(math.fsum(s1.real.tolist()), math.fsum(s1.imag.tolist()))
    fpp = (1 - a2) + complex(math.fsum(s2.real.tolist()), math.fsum(s2.imag.tolist()))
    return abs(fp), abs(fpp)


def check_combined(dist, t, coeffs=None):
    """The two bounds that stay bounded for large t and large b."""
    if t == 0:
        raise DomainError("t must be nonzero")
    _require_standardized(dist)
    c = coeffs or _law_coefficients(dist, with_gamma=True)
    if not c.gammas:
        c.gammas = {n: gamma(n, max(c.m.beta[2], 1.0)).gamma for n in (1, 2, 3)}
    b = c.m.beta[2]
    at = abs(t)
    lhs_fp, lhs_fpp = combined_lhs(dist, t)
    rhs_fp = min(2 * math.sin(min(b * at / 4, math.pi / 2)), c.gammas[2] * b * at / 2 + t * t / 2)
    rhs_fpp = min(2 * math.sin(min(b * at / 2, math.pi / 2)), c.gammas[1] * b * at + t * t / 2)
    digest = dist.digest()
    return [
        BoundReport("combined_fp", rhs_fp - lhs_fp, t, digest),
        BoundReport("combined_fpp", rhs_fpp - lhs_fpp, t, digest),
    ]


def check_theorem2(dist) -> BoundReport:
    """``A(b) b - |E X^3|`` with ``b = E|X|^3``."""
    _require_standardized(dist)
    m = moments(dist, 3)
    b = max(m.beta[2], 1.0)
    return BoundReport("thm2", big_a(b) * m.beta[2] - abs(m.alpha[2]), 0.0, dist.digest())


# --------------------------------------------------------------------------
# equality attainment

EQUALITY_CASES = ("eq9_theta3", "eq10_pi", "eq11_theta1", "eq12_theta1")


def _case_theta(case):
    cc = constants.critical_constants()
    return {
        "eq9_theta3": cc.theta3_star,
        "eq10_pi": math.pi,
        "eq11_theta1": cc.theta1_star,
        "eq12_theta1": cc.theta1_star,
    }[case]


def equality_deviations(case, t_grid):
    """``|LHS - RHS|`` for each t on the symmetric three-point family."""
    if case not in EQUALITY_CASES:
        raise DomainError(f"unknown case {case!r}")
    theta = _case_theta(case)
    index = {"eq9_theta3": 0, "eq10_pi": 1, "eq11_theta1": 2, "eq12_theta1": 3}[case]
    out = []
    for t in t_grid:
        if not (0 < abs(t) <= theta):
            raise DomainError(f"t={t} outside (0, {theta}]")
        dist = symmetric_three_point(theta, t)
        rep = check_specialized(dist, t)[index]
        out.append(abs(rep.slack))
    return out


def equality_attainment(case, t_grid) -> float:
    return max(equality_deviations(case, t_grid))


def default_equality_grid(case, points=20):
    theta = _case_theta(case)
    return list(np.linspace(theta / points, theta, points))


# --------------------------------------------------------------------------
# harness


def t_grid_for(b, points=20):
    """Log grid over |t| in [1e-3, 10] with alternating signs, plus
    ``theta1*/b``, ``pi/b`` and ``theta3*/b``."""
    cc = constants.critical_constants()
    k = points - 3
    base = np.geomspace(1e-3, 10.0, k) * np.where(np.arange(k) % 2, -1.0, 1.0)
    extra = [cc.theta1_star / b, math.pi / b, cc.theta3_star / b]
    return [float(v) for v in base] + extra


def _theorem1_cases():
    lo, hi = constants.lambda_lower, constants.lambda_upper
    cases = [(n, 0, lam) for n in (1, 2, 3) for lam in (lo(n), hi(n))]
    cases += [(3, ell, lam) for ell in (1, 2) for lam in (lo(3 - ell), hi(3 - ell))]
    return cases


def check_law(dist, t_values=None):
    """Every bound for one standardized law over a grid of t."""
    _require_standardized(dist)
    c = _law_coefficients(dist, with_gamma=True)
    if t_values is None:
        t_values = t_grid_for(max(c.m.beta[2], 1.0))
    reports = [check_theorem2(dist)]
    for t in t_values:
        for n, ell, lam in _theorem1_cases():
            reports.append(check_theorem1(dist, n, ell, lam, t))
        reports += check_specialized(dist, t, c)
        reports += check_corollary(dist, t, c)
        reports += check_combined(dist, t, c)
    return reports


def harness_laws(seed, cases):
    """``cases`` standardized random laws derived deterministically from ``seed``."""
    rng = np.random.default_rng(seed)
    sizes = rng.integers(2, 17, cases)
    seeds = rng.integers(0, 2**63 - 1, cases)
    return [standardize(random_law(int(s), int(k))) for s, k in zip(seeds, sizes)]


def _check_law_job(atoms):
    return check_law(DiscreteDistribution(atoms))


def thread_cap():
    try:
        return max(1, int(os.environ.get("SHARPCHF_THREADS", "1")))
    except ValueError:
        return 1


def run_harness(seed, cases, laws=None, workers=None):
    """Run :func:`check_law` over random laws (or the given ones).

    Reports are sorted by (bound_id, law_digest, at_t, detail) so the
    output is independent of how the work was split.
    """
    if cases < 1:
        raise DomainError("cases must be >= 1")
    if laws is None:
        laws = harness_laws(seed, cases)
    workers = workers or thread_cap()
    if workers > 1 and len(laws) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_check_law_job, [d.atoms() for d in laws], chunksize=8))
    else:
        chunks = [check_law(d) for d in laws]
    reports = [r for chunk in chunks for r in chunk]
    reports.sort(key=lambda r: (r.bound_id, r.law_digest, r.at_t, r.detail))
    return reports


def worst_by_bound(reports):
    worst = {}
    for r in reports:
        if r.bound_id not in worst or r.slack < worst[r.bound_id].slack:
            worst[r.bound_id] = r
    return dict(sorted(worst.items(), key=lambda kv: BOUND_IDS.index(kv[0])))


def oracle_agreement(n, lambdas, tol=1e-9):
    """Largest ``|q_oracle - q|`` over ``lambdas``."""
    return max(abs(q_oracle(n, lam, tol).q - constants.q(n, lam).q) for lam in lambdas)


def extremal_two_point_gap(b):
    """``| |alpha_3| - A(b) beta_3 |`` on the extremal two-point law."""
    m = moments(from_two_point(extremal_two_point(b)), 3)
    return abs(abs(m.alpha[2]) - big_a(b) * m.beta[2])
