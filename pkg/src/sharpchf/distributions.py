"""Finite discrete distributions with exact moments and characteristic function."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DegenerateDistributionError, DomainError

WEIGHT_TOL = 1e-12
MAX_RANDOM_ATOMS = 16


@dataclass(frozen=True)
class MomentProfile:
    """``alpha[k-1] = E X^k`` and ``beta[k-1] = E|X|^k`` for k = 1..n_max."""

    alpha: tuple
    beta: tuple

    def a(self, k):
        return self.alpha[k - 1]

    def abs_moment(self, k):
        return self.beta[k - 1]

    @property
    def b(self):
        return self.beta[2]


class DiscreteDistribution:
    """Atoms ``x_j`` with positive weights ``w_j`` summing to one.

    Zero weights are dropped and repeated values merged on construction.
    Instances are immutable.
    """

    __slots__ = ("_values", "_weights")

    def __init__(self, atoms: Sequence[tuple[float, float]]):
        merged: dict[float, float] = {}
        for value, weight in atoms:
            value, weight = float(value), float(weight)
            if not math.isfinite(value) or not math.isfinite(weight):
                raise DomainError("atom values and weights must be finite")
            if weight < 0:
                raise DomainError(f"negative weight {weight}")
            if weight == 0:
                continue
            merged[value] = merged.get(value, 0.0) + weight
        if not merged:
            raise DomainError("a distribution needs at least one atom")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DomainError(f"weights sum to {total!r}, not 1")
        values = sorted(merged)
        self._values = np.array(values)
        self._weights = np.array([merged[v] for v in values])

    @property
    def values(self):
        return self._values.copy()

    @property
    def weights(self):
        return self._weights.copy()

    def atoms(self):
        return list(zip(self._values.tolist(), self._weights.tolist()))

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f"DiscreteDistribution({self.atoms()!r})"

    def __eq__(self, other):
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return self.atoms() == other.atoms()

    def __hash__(self):
        return hash(tuple(self.atoms()))

    def digest(self):
        """Short stable identifier of the atom list."""
        blob = json.dumps(self.atoms(), separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def to_json(self):
        return json.dumps({"atoms": [[v, w] for v, w in self.atoms()]})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        try:
            atoms = [(float(v), float(w)) for v, w in data["atoms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed law: {exc}") from exc
        return cls(atoms)


def _wsum(terms):
    return math.fsum(terms.tolist())


def moments(dist: DiscreteDistribution, n_max: int = 3) -> MomentProfile:
    """Exact weighted power sums, accumulated with compensated summation."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    x, w = dist._values, dist._weights
    alpha, beta = [], []
    for k in range(1, n_max + 1):
        alpha.append(_wsum(w * x**k))
        beta.append(_wsum(w * np.abs(x) ** k))
    return MomentProfile(tuple(alpha), tuple(beta))


def is_standardized(dist, tol=1e-9):
    m = moments(dist, 2)
    return abs(m.alpha[0]) <= tol and abs(m.alpha[1] - 1.0) <= tol


def standardize(dist: DiscreteDistribution) -> DiscreteDistribution:
    """Law of ``(X - E X) / sd(X)``."""
    x, w = dist._values, dist._weights
    mean = _wsum(w * x)
    centred = x - mean
    var = _wsum(w * centred**2)
    if len(x) < 2 or var <= 0.0:
        raise DegenerateDistributionError("cannot standardize a law with zero variance")
    return DiscreteDistribution(zip((centred / math.sqrt(var)).tolist(), w.tolist()))


def chf(dist: DiscreteDistribution, ell: int, t: float) -> complex:
    """``d^ell/dt^ell E exp(itX) = sum_j w_j (i x_j)^ell exp(i t x_j)``."""
    if ell < 0:
        raise DomainError("derivative order must be >= 0")
    x, w = dist._values, dist._weights
    terms = w * (1j * x) ** ell * np.exp(1j * t * x)
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def rademacher() -> DiscreteDistribution:
    return DiscreteDistribution([(-1.0, 0.5), (1.0, 0.5)])


def degenerate(value=0.0) -> DiscreteDistribution:
    return DiscreteDistribution([(value, 1.0)])


def symmetric_three_point(theta, t) -> DiscreteDistribution:
    """``P(|X| = theta/|t|) = t^2/theta^2 = 1 - P(X = 0)``.

    Standardized, symmetric, with ``E|X| = |t|/theta`` and
    ``E|X|^3 = theta/|t|``.
    """
    t = abs(t)
    if theta <= 0 or t == 0 or t > theta:
        raise DomainError(f"need 0 < |t| <= theta, got t={t}, theta={theta}")
    p = (t / theta) ** 2
    a = theta / t
    return DiscreteDistribution([(-a, p / 2), (0.0, 1.0 - p), (a, p / 2)])


def from_two_point(law) -> DiscreteDistribution:
    """Wrap a :class:`~sharpchf.moment_bounds.TwoPointLaw`."""
    return DiscreteDistribution(law.atoms())


def random_law(seed: int, n_atoms: int) -> DiscreteDistribution:
    """Reproducible random law (not standardized).

    Generator: PCG64 seeded through SeedSequence(seed) (numpy's
    ``default_rng``).  Draws, in order:

    1. ``u``: n_atoms uniforms on [-5, 5];
    2. ``heavy``: n_atoms Bernoulli(0.3) flags (uniform < 0.3);
    3. ``p``: n_atoms uniforms on [0, 0.999);
    4. weights: Dirichlet(1, ..., 1), i.e. a flat draw on the simplex.

    A flagged atom is replaced by ``sign(u) ((1 - p)^(-1/2) - 1)``, a
    Pareto-type value in [0, 30.6); the others keep ``u``.
    """
    if not (2 <= n_atoms <= MAX_RANDOM_ATOMS):
        raise DomainError(f"n_atoms must be in [2, {MAX_RANDOM_ATOMS}]")
    rng = np.random.default_rng(seed)
    u = rng.uniform(-5.0, 5.0, n_atoms)
    heavy = rng.uniform(0.0, 1.0, n_atoms) < 0.3
    p = rng.uniform(0.0, 0.999, n_atoms)
    weights = rng.dirichlet(np.ones(n_atoms))
    values = np.where(heavy, np.sign(u) * ((1.0 - p) ** -0.5 - 1.0), u)
    weights = weights / math.fsum(weights.tolist())
    return DiscreteDistribution(zip(values.tolist(), weights.tolist()))


def random_standardized_law(seed: int, n_atoms: int) -> DiscreteDistribution:
    return standardize(random_law(seed, n_atoms))
