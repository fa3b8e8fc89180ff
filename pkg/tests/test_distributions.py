import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpchf import constants as C
from sharpchf.distributions import (
    DiscreteDistribution,
    chf,
    degenerate,
    is_standardized,
    moments,
    rademacher,
    random_law,
    random_standardized_law,
    standardize,
    symmetric_three_point,
)
from sharpchf.exceptions import DegenerateDistributionError, DomainError

atom_values = st.floats(-20, 20, allow_nan=False, allow_infinity=False)


@st.composite
def laws(draw, min_atoms=1, symmetric=False, values=atom_values):
    k = draw(st.integers(min_atoms, 8))
    values = draw(st.lists(values, min_size=k, max_size=k))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
    total = math.fsum(raw)
    weights = [r / total for r in raw]
    weights[-1] = 1.0 - math.fsum(weights[:-1])
    if symmetric:
        atoms = [(v, w / 2) for v, w in zip(values, weights)] + [(-v, w / 2) for v, w in zip(values, weights)]
        return DiscreteDistribution(atoms)
    return DiscreteDistribution(zip(values, weights))


def test_construction_merges_and_drops():
    d = DiscreteDistribution([(1.0, 0.25), (0.0, 0.0), (1.0, 0.25), (-1.0, 0.5)])
    assert d.atoms() == [(-1.0, 0.5), (1.0, 0.5)]
    assert d == rademacher()


@pytest.mark.parametrize(
    "atoms",
    [[], [(1.0, 0.5)], [(math.inf, 1.0)], [(1.0, -0.5), (2.0, 1.5)], [(math.nan, 1.0)]],
)
def test_construction_rejects(atoms):
    with pytest.raises(DomainError):
        DiscreteDistribution(atoms)


def test_moment_examples():
    m = moments(rademacher(), 3)
    assert m.alpha == (0.0, 1.0, 0.0) and m.beta == (1.0, 1.0, 1.0)
    m = moments(degenerate(0.0), 3)
    assert m.alpha == m.beta == (0.0, 0.0, 0.0)
    cc = C.critical_constants()
    m = moments(symmetric_three_point(cc.theta3_star, 1.0), 3)
    assert m.alpha[1] == pytest.approx(1.0, abs=1e-12)
    assert m.b == pytest.approx(cc.theta3_star, abs=1e-12)
    with pytest.raises(DomainError):
        moments(rademacher(), 0)


def test_standardize_examples():
    assert standardize(DiscreteDistribution([(0.0, 0.5), (2.0, 0.5)])) == rademacher()
    law = random_standardized_law(3, 6)
    again = standardize(law)
    assert np.allclose(law.values, again.values, atol=1e-15, rtol=0)
    with pytest.raises(DegenerateDistributionError):
        standardize(degenerate(3.0))
    for seed in range(50):
        assert moments(random_standardized_law(seed, 5), 3).b >= 1 - 1e-12


def test_chf_examples():
    assert chf(degenerate(0.0), 0, 1.7) == 1 + 0j
    for t in (0.0, 0.4, 2.5):
        assert chf(rademacher(), 0, t) == pytest.approx(math.cos(t), abs=1e-15)
        assert chf(rademacher(), 2, t) == pytest.approx(-math.cos(t), abs=1e-15)
    for t in (0.3, 1.0, math.pi):
        d = symmetric_three_point(math.pi, t)
        assert chf(d, 0, t) == pytest.approx(1 - 2 * t * t / math.pi**2, abs=1e-15)
    with pytest.raises(DomainError):
        chf(rademacher(), -1, 0.0)


def test_three_point_examples():
    assert symmetric_three_point(math.pi, math.pi).atoms() == [(-1.0, 0.5), (1.0, 0.5)]
    cc = C.critical_constants()
    m = moments(symmetric_three_point(cc.theta1_star, 1.0), 3)
    assert m.beta[0] == pytest.approx(0.42897790896417926, abs=1e-12)
    for bad_t in (0.0, 4.0, -4.0):
        with pytest.raises(DomainError):
            symmetric_three_point(math.pi, bad_t)


@given(theta=st.floats(0.1, 10.0), frac=st.floats(0.01, 1.0), sign=st.sampled_from([-1, 1]))
def test_three_point_moment_list(theta, frac, sign):
    t = sign * frac * theta
    m = moments(symmetric_three_point(theta, t), 3)
    assert abs(m.alpha[0]) < 1e-12 and abs(m.alpha[2]) < 1e-12 * max(1.0, m.beta[2])
    assert abs(m.alpha[1] - 1) < 1e-12
    assert m.beta[0] == pytest.approx(abs(t) / theta, abs=1e-12)
    assert m.beta[2] == pytest.approx(theta / abs(t), rel=1e-12)


def test_random_law_examples():
    assert random_law(7, 4) == random_law(7, 4)
    assert random_law(7, 4) != random_law(8, 4)
    assert is_standardized(standardize(random_law(7, 4)), tol=1e-12)
    for bad in (1, 17):
        with pytest.raises(DomainError):
            random_law(0, bad)


@pytest.mark.parametrize("seed,k", [(7, 4), (0, 2), (123, 16)])
def test_random_law_follows_documented_algorithm(seed, k):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    u = rng.uniform(-5.0, 5.0, k)
    heavy = rng.uniform(0.0, 1.0, k) < 0.3
    p = rng.uniform(0.0, 0.999, k)
    w = rng.dirichlet(np.ones(k))
    values = [math.copysign(1 / math.sqrt(1 - pj) - 1, uj) if hj else uj for uj, hj, pj in zip(u, heavy, p)]
    expected = sorted(zip(values, w / w.sum()))
    got = random_law(seed, k).atoms()
    assert [v for v, _ in got] == pytest.approx([v for v, _ in expected], rel=1e-14)
    assert [x for _, x in got] == pytest.approx([x for _, x in expected], rel=1e-14)


@given(laws(), st.floats(-30, 30))
@settings(max_examples=200)
def test_chf_modulus_and_origin(d, t):
    assert abs(chf(d, 0, t)) <= 1 + 1e-12
    m = moments(d, 3)
    for ell in (1, 2, 3):
        assert chf(d, ell, 0.0) == pytest.approx(1j**ell * m.a(ell), abs=1e-12 * max(1.0, m.beta[ell - 1]))


@given(laws(symmetric=True), st.floats(-30, 30))
def test_symmetric_chf_is_real(d, t):
    assert abs(chf(d, 0, t).imag) < 1e-14


@given(laws(values=st.floats(-3, 3)), st.floats(-5, 5))
@settings(max_examples=100)
def test_chf_derivatives_match_finite_differences(d, t):
    # central-difference truncation error is about h^2 |x|^(ell+2) / 6, below 1e-6 for |x| <= 3
    h = 1e-4
    for ell in (1, 2, 3):
        fd = (chf(d, ell - 1, t + h) - chf(d, ell - 1, t - h)) / (2 * h)
        assert abs(fd - chf(d, ell, t)) <= 1e-6


@given(laws())
def test_jensen_and_json_roundtrip(d):
    m = moments(d, 3)
    for k in (1, 2, 3):
        assert abs(m.a(k)) <= m.abs_moment(k) * (1 + 1e-12)
    assert DiscreteDistribution.from_json(d.to_json()) == d


def test_from_json_rejects_malformed():
    with pytest.raises(DomainError):
        DiscreteDistribution.from_json('{"values": [1]}')
    with pytest.raises(DomainError):
        DiscreteDistribution.from_json('{"atoms": [[1, 2, 3]]}')
