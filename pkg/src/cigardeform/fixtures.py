"""Seeded random smooth fields with exact jets.

Each generator returns one field whose coefficients are arrays of length
``n``: evaluating it at ``n`` points evaluates ``n`` independent fixtures at
once.  All fields are trigonometric polynomials in ``x`` times rational
functions of ``r²`` (so they are even in ``r``), built only from jet
arithmetic.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import jets
from .models import KillingMetricSpec
from .variation import VariationField, vlog_field

Rng = np.random.Generator


def _even_rational(rng: Rng, n: int) -> Callable:
    a = rng.uniform(-1.0, 1.0, size=(3, n))
    b = rng.uniform(0.1, 1.0, size=n)

    def R(r):
        s = r * r
        return (a[0] + a[1] * s + a[2] * s * s) / (1.0 + b * s)

    return R


def _trig(rng: Rng, n: int, modes: int = 2) -> Callable:
    a = rng.uniform(-1.0, 1.0, size=(modes + 1, n))
    b = rng.uniform(-1.0, 1.0, size=(modes, n))
    k = rng.uniform(0.3, 1.5, size=(modes, n))

    def T(x):
        out = a[0] + 0.0 * x
        for m in range(modes):
            out = out + a[m + 1] * jets.cos(k[m] * x) + b[m] * jets.sin(k[m] * x)
        return out

    return T


def random_V(rng: Rng, n: int, terms: int = 2) -> VariationField:
    parts = [(_trig(rng, n), _even_rational(rng, n)) for _ in range(terms)]

    def V(r, x):
        out = parts[0][0](x) * parts[0][1](r)
        for T, R in parts[1:]:
            out = out + T(x) * R(r)
        return out

    return VariationField(V, "random")


def random_v(rng: Rng, n: int) -> Callable:
    """A random potential variation ``v(r, x)``."""
    return random_V(rng, n).V


def random_A_x(rng: Rng, n: int) -> Callable:
    return _trig(rng, n)


def random_A_r(rng: Rng, n: int) -> Callable:
    return _even_rational(rng, n)


def random_killing_spec(rng: Rng, n: int) -> KillingMetricSpec:
    """Random two-Killing profiles, smooth with ``p, Ω > 0`` on ``y ∈ [0.5, 3]``."""
    p0 = rng.uniform(0.5, 2.0, n)
    p1 = rng.uniform(-0.1, 0.5, n)
    q = rng.uniform(-1.0, 1.0, size=(3, n))
    om = rng.uniform(0.0, 0.5, size=(2, n))
    t = rng.uniform(-1.0, 1.0, size=(2, n))
    f = rng.uniform(-1.0, 1.0, size=(2, n))
    return KillingMetricSpec(
        p=lambda y: p0 * jets.cosh(p1 * y),
        q=lambda y: q[0] + q[1] * y + q[2] * y * y,
        omega=lambda y: 1.0 + om[0] * y + om[1] * y * y,
        tau=lambda x: t[0] * jets.sin(x) + t[1] * x,
        potential=lambda y: f[0] * y + f[1] * jets.exp(-y),
        y_interval=(0.5, 3.0),
        name="random-killing",
    )


def sample_rx(rng: Rng, n: int, r_range=(0.05, 1.9), x_range=(-3.0, 3.0)):
    return rng.uniform(*r_range, n), rng.uniform(*x_range, n)


# named fields for the transform command
NAMED_V: dict[str, Callable[[], VariationField]] = {
    "gauge": lambda: VariationField(lambda r, x: 1.0 / (4.0 - r * r) + 0.0 * x, "gauge"),
    "gauge-cos": lambda: VariationField(lambda r, x: jets.cos(x) / (4.0 - r * r), "gauge-cos"),
    "vlog": vlog_field,
    "demo": lambda: VariationField(
        lambda r, x: jets.cos(0.5 * x) * (1.0 + r * r) / (2.0 + r**4) + 0.3 * r * r, "demo"),
}


def named_V(name: str) -> VariationField:
    try:
        return NAMED_V[name]()
    except KeyError:
        raise KeyError(f"unknown field {name!r}; choose from {sorted(NAMED_V)}") from None


# random compositions of elementary functions, safe on all of R²
_UNARY = (
    lambda u: jets.exp(0.5 * u),
    jets.sin,
    jets.cos,
    jets.tanh,
    lambda u: jets.sqrt(1.0 + u * u),
    lambda u: jets.log(2.0 + jets.sin(u)),
    lambda u: 1.0 / (1.5 + jets.cos(u)),
    lambda u: jets.power(2.0 + jets.tanh(u), 1.7),
    lambda u: jets.sinh(0.5 * u) * jets.cosh(0.3 * u),
)


def _squash(u):
    """Smooth map onto (-3, 3), keeping derivative scales moderate between stages."""
    return 3.0 * u / jets.sqrt(9.0 + u * u)


def random_composition(rng: Rng, depth: int = 3) -> Callable:
    """A random function of ``(a, b)`` composed from bounded-domain-safe pieces.

    Works on plain floats and on jets alike, so it can be compared against
    finite differences of itself.  Intermediate results are squashed into
    ``(-3, 3)`` before being fed to the next stage, so derivatives up to
    third order stay resolvable by finite differences.
    """
    picks = [int(k) for k in rng.integers(0, len(_UNARY), size=depth)]
    w = rng.uniform(-1.0, 1.0, size=(depth, 3))

    def f(a, b):
        u = w[0, 0] * a + w[0, 1] * b + w[0, 2] * a * b
        for k, (p, c) in enumerate(zip(picks, w)):
            u = _UNARY[p](u)
            if k + 1 < depth:
                u = _squash(u) * (1.0 - c[1] * b) + c[0] * a
        return u

    return f
