import numpy as np
import pytest

from cigardeform import geometry as ge
from cigardeform import jets, models
from cigardeform.errors import DomainError, MissingPotentialError, SingularMetricError
from cigardeform.fixtures import random_killing_spec
from cigardeform.geometry import MetricModel

INF = np.inf


def euclidean3():
    one = lambda a, b: 1.0
    return MetricModel("euclidean", ("x", "y", "z"), (0, 1), {(0, 0): one, (1, 1): one, (2, 2): one},
                       ((-INF, INF), (-INF, INF)), potential=lambda a, b: 0.0 * a)


def round_sphere():
    return MetricModel("sphere", ("theta", "phi"), (0, 1),
                       {(0, 0): lambda t, p: 1.0, (1, 1): lambda t, p: jets.sin(t) ** 2},
                       ((0.0, np.pi), (-INF, INF)))


def half_plane():
    c = lambda x, y: 1.0 / (y * y)
    return MetricModel("hyperbolic", ("x", "y"), (0, 1), {(0, 0): c, (1, 1): c}, ((-INF, INF), (0.0, INF)))


def flat_polar():
    return MetricModel("polar", ("r", "theta"), (0, 1), {(0, 0): lambda r, t: 1.0, (1, 1): lambda r, t: r * r},
                       ((0.0, INF), (-INF, INF)))


def test_euclidean_is_flat_and_flags_unnormalized_potential(rng):
    m = euclidean3()
    p = tuple(rng.uniform(-2, 2, 10) for _ in range(3))
    assert np.all(ge.christoffel(m, p).gamma == 0)
    assert np.all(ge.curvature(m, p).riemann == 0)
    res = ge.soliton_residual(m, p)
    np.testing.assert_array_equal(res.eq_residual, 0.0)
    np.testing.assert_array_equal(res.bianchi_residual, 1.0)


def test_round_sphere_and_hyperbolic_plane(rng):
    th = rng.uniform(0.2, 3.0, 20)
    c = ge.curvature(round_sphere(), (th, np.zeros(20)))
    np.testing.assert_allclose(c.sectional[(0, 1)], 1.0, rtol=1e-12)
    np.testing.assert_allclose(c.scalar, 2.0, rtol=1e-12)
    y = rng.uniform(0.1, 5.0, 20)
    K = ge.gauss_curvature(half_plane(), (np.zeros(20), y))
    np.testing.assert_allclose(K, -1.0, rtol=1e-12)


def test_hessian_of_r_squared_in_polar_coordinates(rng):
    r = rng.uniform(0.1, 3.0, 10)
    H = ge.hessian(flat_polar(), lambda r, t: r * r, (r, np.zeros(10)))
    np.testing.assert_allclose(H[0, 0], 2.0)
    np.testing.assert_allclose(H[0, 1], 0.0, atol=1e-14)
    np.testing.assert_allclose(H[1, 1], 2 * r * r)


def _fd_metric(m: MetricModel, p, h=1e-5):
    """Metric values and their central differences along the active coordinates."""
    def values(q):
        g, _ = ge.metric_values(m, q)
        return g

    g = values(p)
    dg = np.zeros((m.dim,) + g.shape)
    for a in m.active:
        plus = [np.array(c, dtype=float) for c in p]
        minus = [np.array(c, dtype=float) for c in p]
        plus[a] = plus[a] + h
        minus[a] = minus[a] - h
        dg[a] = (values(plus) - values(minus)) / (2 * h)
    return g, dg


def test_christoffel_matches_finite_differences_of_the_metric(rng):
    s = random_killing_spec(rng, 20)
    m = models.appendix_metric(s)
    p = m.sample(rng, 20)
    g, dg = _fd_metric(m, p)
    gi = np.moveaxis(np.linalg.inv(np.moveaxis(g, (0, 1), (-2, -1))), (-2, -1), (0, 1))
    first = np.einsum("ijl...->ijl...", dg) + np.einsum("jil...->ijl...", dg) - np.einsum("lij...->ijl...", dg)
    want = 0.5 * np.einsum("kl...,ijl...->kij...", gi, first)
    got = ge.christoffel(m, p).gamma
    np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-7 * np.abs(want).max())


def test_conformal_gauss_curvature_matches_finite_differences(rng):
    # e^{2φ}(dx² + dy²) has K = -e^{-2φ} Δφ
    phi = lambda x, y: 0.3 * jets.sin(x) * jets.cos(0.7 * y) + 0.1 * x * y
    c = lambda x, y: jets.exp(2.0 * phi(x, y))
    m = MetricModel("conformal", ("x", "y"), (0, 1), {(0, 0): c, (1, 1): c}, ((-INF, INF), (-INF, INF)))
    x, y = rng.uniform(-2, 2, (2, 30))
    h = 1e-4
    lap = (phi(x + h, y) + phi(x - h, y) + phi(x, y + h) + phi(x, y - h) - 4 * phi(x, y)) / h**2
    want = -np.exp(-2 * phi(x, y)) * lap
    np.testing.assert_allclose(ge.gauss_curvature(m, (x, y)), want, rtol=1e-6, atol=1e-6)


def test_cigar3d_against_closed_forms(rng):
    m = models.cigar3d()
    p = m.sample(rng, 50)
    np.testing.assert_allclose(ge.christoffel(m, p).gamma, m.oracles["christoffel"](p), atol=1e-12)
    np.testing.assert_allclose(ge.curvature(m, p).riemann, m.oracles["riemann"](p), atol=1e-11)
    res = ge.soliton_residual(m, p)
    assert res.eq_residual.max() < 1e-12 and res.bianchi_residual.max() < 1e-12


def test_cigar_sectional_curvatures_at_r1():
    K = ge.curvature(models.cigar3d(), (1.0, 0.0, 0.0)).sectional
    assert K[(0, 2)] == pytest.approx(3 / 8)
    assert K[(0, 1)] == pytest.approx(0.0, abs=1e-15)
    assert K[(1, 2)] == pytest.approx(0.0, abs=1e-15)


def test_point_validation():
    m = models.cigar3d()
    with pytest.raises(DomainError):
        ge.christoffel(m, (1.0, 0.0))
    with pytest.raises(DomainError):
        ge.christoffel(m, (2.0, 0.0, 0.0))
    with pytest.raises(DomainError):
        ge.curvature(m, (np.array([0.5, -0.1]), 0.0, 0.0))


def test_missing_potential_and_gauss_dimension():
    with pytest.raises(MissingPotentialError):
        ge.soliton_residual(models.sigma_surface(), (0.0, 1.0))
    with pytest.raises(ValueError):
        ge.gauss_curvature(models.cigar3d(), (1.0, 0.0, 0.0))


def test_singular_metric_is_reported():
    m = MetricModel("degenerate", ("a", "b"), (0, 1), {(0, 0): lambda a, b: a - a, (1, 1): lambda a, b: 1.0},
                    ((-INF, INF), (-INF, INF)))
    with pytest.raises(SingularMetricError):
        ge.christoffel(m, (0.3, 0.2))


def test_positive_definiteness_detects_indefinite_metric():
    m = MetricModel("lorentz", ("t", "x"), (0, 1), {(0, 0): lambda t, x: -1.0, (1, 1): lambda t, x: 1.0},
                    ((-INF, INF), (-INF, INF)))
    assert not ge.is_positive_definite(m, (np.zeros(3), np.zeros(3))).any()
    c = models.cigar3d()
    assert ge.is_positive_definite(c, c.sample(np.random.default_rng(0), 50)).all()
