import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cigardeform import jets
from cigardeform.errors import DomainError
from cigardeform.fixtures import random_composition
from cigardeform.jets import Jet2

finite = st.floats(-3.0, 3.0, allow_nan=False)
slots10 = st.lists(finite, min_size=10, max_size=10)


def jet_of(s):
    return Jet2.from_derivatives(*s)


def close(a: Jet2, b: Jet2, tol=1e-12):
    assert a.order == b.order
    scale = 1.0 + np.abs(a.coeffs).max() + np.abs(b.coeffs).max()
    np.testing.assert_allclose(a.coeffs, b.coeffs, rtol=0, atol=tol * scale)


@given(slots10, slots10, slots10)
def test_ring_axioms(a, b, c):
    a, b, c = jet_of(a), jet_of(b), jet_of(c)
    close((a + b) * c, a * c + b * c)
    close(a * (b * c), (a * b) * c)
    close(a * b, b * a)
    close(a - a, Jet2.constant(0.0))


@given(slots10, slots10)
def test_product_rule_on_first_slots(a, b):
    a, b = jet_of(a), jet_of(b)
    p = a * b
    assert p.d1 == pytest.approx(a.d1 * b.val + a.val * b.d1, abs=1e-12)
    assert p.d12 == pytest.approx(a.d12 * b.val + a.d1 * b.d2 + a.d2 * b.d1 + a.val * b.d12, abs=1e-11)


@given(slots10, st.floats(0.2, 5.0))
def test_exp_log_inverse(s, v):
    s = list(s)
    s[0] = v
    j = jet_of(s)
    close(jets.exp(jets.log(j)), j, tol=1e-12)


@given(slots10, st.floats(0.3, 4.0))
def test_division_inverts_multiplication(s, v):
    s = list(s)
    s[0] = v
    j = jet_of(s)
    close((j * j) / j, j, tol=1e-12)
    close(jets.sqrt(j) * jets.sqrt(j), j, tol=1e-12)


@given(finite, finite)
def test_seeded_variables_have_unit_first_derivative(a, b):
    u = jets.seed_variable(1, a)
    w = jets.seed_variable(2, b)
    assert (u.val, u.d1, u.d2) == (a, 1.0, 0.0)
    assert (w.val, w.d1, w.d2) == (b, 0.0, 1.0)


def test_known_derivatives_of_sin_of_product():
    a, b = 0.7, -1.3
    f = jets.evaluate(lambda u, w: jets.sin(u * w), a, b)
    c = math.cos(a * b)
    s = math.sin(a * b)
    assert f.d1 == pytest.approx(b * c)
    assert f.d12 == pytest.approx(c - a * b * s)
    assert f.d111 == pytest.approx(-(b**3) * c)
    assert f.d112 == pytest.approx(-2 * b * s - a * b * b * c)


def test_diff_lowers_order_and_matches_slots():
    f = jets.evaluate(lambda u, w: jets.exp(u) * jets.cos(w) + u**3 * w, 0.4, 0.9)
    g = f.diff(1)
    assert g.order == 2
    assert g.val == pytest.approx(f.d1)
    assert g.d2 == pytest.approx(f.d12)
    assert g.d11 == pytest.approx(f.d111)
    with pytest.raises(ValueError):
        g.d111
    with pytest.raises(ValueError):
        f.diff(1).diff(2).diff(1).diff(2)


def test_mixed_orders_truncate_to_lower():
    a = jets.seed_variable(1, 1.0, order=3)
    b = jets.seed_variable(2, 2.0, order=1)
    assert (a * b).order == 1


def test_batches_broadcast():
    u = np.linspace(0.1, 1.0, 7)
    f = jets.evaluate(lambda a, b: a * a * b, u, 2.0)
    assert f.shape == (7,)
    np.testing.assert_allclose(f.d11, 4.0)
    np.testing.assert_allclose(f.d12, 2 * u)


def test_constant_fields_become_jets():
    f = jets.evaluate(lambda a, b: 3.0, np.zeros(4), np.zeros(4))
    assert f.shape == (4,)
    np.testing.assert_array_equal(f.val, 3.0)
    np.testing.assert_array_equal(f.d1, 0.0)


@pytest.mark.parametrize("fn, arg", [(jets.log, 0.0), (jets.sqrt, -1.0), (jets.reciprocal, 0.0),
                                     (lambda j: jets.power(j, 0.5), -2.0)])
def test_domain_errors(fn, arg):
    with pytest.raises(DomainError):
        fn(jets.seed_variable(1, arg))
    with pytest.raises(DomainError):
        fn(np.array(arg))


def test_jet_apply_dispatch():
    j = jets.seed_variable(1, 0.5)
    close(jets.jet_apply("tanh", j), jets.tanh(j))
    close(jets.jet_apply("pow", j, 2.5), jets.power(j, 2.5))
    with pytest.raises(ValueError):
        jets.jet_apply("pow", j)
    with pytest.raises(ValueError):
        jets.jet_apply("erf", j)


def test_plain_and_jet_paths_agree():
    for name in ("exp", "sin", "cos", "sinh", "cosh", "tanh"):
        x = np.array([0.3, 1.1])
        assert np.allclose(jets.jet_apply(name, x), jets.jet_apply(name, jets.seed_variable(1, x)).val)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_compositions_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    f = random_composition(rng)
    a, b = rng.uniform(-1, 1, 2)
    j = jets.evaluate(f, a, b)
    h = 1e-4
    d1 = (f(a + h, b) - f(a - h, b)) / (2 * h)
    d22 = (f(a, b + h) - 2 * f(a, b) + f(a, b - h)) / h**2
    h3 = 1e-3
    d111 = (f(a + 2 * h3, b) - 2 * f(a + h3, b) + 2 * f(a - h3, b) - f(a - 2 * h3, b)) / (2 * h3**3)
    assert j.d1 == pytest.approx(d1, rel=1e-5, abs=1e-5)
    assert j.d22 == pytest.approx(d22, rel=1e-5, abs=1e-5)
    assert j.d111 == pytest.approx(d111, rel=1e-3, abs=1e-3)
