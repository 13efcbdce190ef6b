import numpy as np
import pytest

from cigardeform import geometry as ge
from cigardeform import models
from cigardeform.errors import DomainError
from cigardeform.fixtures import random_killing_spec


@pytest.mark.parametrize("name", sorted(models.FIXTURES))
def test_named_fixtures_build_and_are_riemannian(name, rng):
    m = models.fixture(name)
    assert m.name == name
    assert ge.is_positive_definite(m, m.sample(rng, 30)).all()


def test_unknown_fixture():
    with pytest.raises(KeyError, match="unknown model"):
        models.fixture("bryant")


def test_cigar2d_gauss_curvature_profile(rng):
    r = rng.uniform(0.05, 1.95, 40)
    K = ge.gauss_curvature(models.cigar2d(), (r, np.zeros(40)))
    np.testing.assert_allclose(K, (4 - r * r) / 8, rtol=1e-12)


def test_sigma_conformal_factor_and_curvature_limits():
    assert models.sigma_conformal_factor(np.log(2.0)) == pytest.approx(19 / 12, rel=1e-15)
    sigma = models.sigma_surface()
    xi = np.array([0.005, 1.0, 12.0])
    K = ge.gauss_curvature(sigma, (np.zeros(3), xi))
    assert K[0] == pytest.approx(-4 / 3, abs=2e-2)
    assert K[2] == pytest.approx(0.0, abs=1e-4)
    assert np.all(K < 0)
    with pytest.raises(DomainError):
        models.sigma_conformal_factor(np.array([0.0]))


def test_sigma_curvature_minimum_is_bounded():
    xi = np.linspace(0.005, 12, 4000)
    K = ge.gauss_curvature(models.sigma_surface(), (np.zeros_like(xi), xi))
    assert -5 / 3 - 1e-6 <= K.min() < -4 / 3


def test_warped_obstruction_is_minus_one():
    y = np.linspace(0.2, 5.0, 25)
    val = models.rigidity_obstruction(models.warped_spec(), (0 * y, 0 * y, y))
    np.testing.assert_allclose(val, -1.0, rtol=1e-13)


def test_demo_obstruction_negative_at_y2():
    assert models.rigidity_obstruction(models.demo_spec(), (0.0, 0.0, 2.0)) < 0


def test_closed_hessian_matches_engine(rng):
    s = random_killing_spec(rng, 40)
    m = models.appendix_metric(s)
    p = m.sample(rng, 40)
    closed = models.appendix_hessian_closed(s, p)
    H = ge.hessian(m, m.potential, p)
    scale = 1 + np.abs(H).max(axis=(0, 1))
    for got, (i, j) in ((closed.f11, (0, 0)), (closed.f12, (0, 1)), (closed.f22, (1, 1)), (closed.f33, (2, 2))):
        assert np.all(np.abs(got - H[i, j]) / scale < 1e-10)


def test_closed_k12_matches_engine_sectional(rng):
    s = random_killing_spec(rng, 30)
    m = models.appendix_metric(s)
    p = m.sample(rng, 30)
    closed = models.appendix_hessian_closed(s, p)
    K = ge.curvature(m, p).sectional[(0, 1)]
    np.testing.assert_allclose(closed.k12, K, rtol=1e-9, atol=1e-11)


def test_obstruction_never_positive(rng):
    s = random_killing_spec(rng, 200)
    m = models.appendix_metric(s)
    assert np.all(models.rigidity_obstruction(s, m.sample(rng, 200)) <= 1e-12)


def test_appendix_domain_requires_positive_y():
    with pytest.raises(DomainError):
        models.appendix_hessian_closed(models.warped_spec(), (0.0, 0.0, -1.0))
