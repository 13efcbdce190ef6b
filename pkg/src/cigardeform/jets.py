"""Truncated Taylor jets in two variables, up to total order 3.

A :class:`Jet2` stores the Taylor coefficients of a scalar at a base point
``(c1, c2)``.  Coefficients may be numpy arrays, in which case every slot is
broadcast over the same batch shape and one jet carries many base points.

The jet also records its truncation ``order``.  Differentiating a jet lowers
the order by one, so derivatives of derived quantities stay exact and slots
that are no longer known cannot be read by accident.
"""

from __future__ import annotations

import math
from typing import Callable, Union

import numpy as np

from .errors import DomainError

MAX_ORDER = 3

# monomials u^a w^b of total degree <= 3, graded
MONOMIALS = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]
N_COEFF = (1, 3, 6, 10)
_INDEX = {m: k for k, m in enumerate(MONOMIALS)}
_FACTORIAL = np.array([math.factorial(a) * math.factorial(b) for a, b in MONOMIALS], dtype=float)


def _product_tensor(order: int) -> np.ndarray:
    n = N_COEFF[order]
    t = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            a = (MONOMIALS[i][0] + MONOMIALS[j][0], MONOMIALS[i][1] + MONOMIALS[j][1])
            k = _INDEX.get(a)
            if k is not None and k < n:
                t[k, i, j] = 1.0
    return t


_PRODUCT = [_product_tensor(o) for o in range(MAX_ORDER + 1)]
_PAIRS = [
    [(k, i, j) for k, i, j in zip(*np.nonzero(_PRODUCT[o]))] for o in range(MAX_ORDER + 1)
]


def _diff_map(axis: int, order: int) -> list[tuple[int, int, float]]:
    # (target index, source index, factor) for d/d(axis) of an order-`order` jet
    out = []
    for k in range(N_COEFF[order - 1]):
        a, b = MONOMIALS[k]
        src = (a + 1, b) if axis == 1 else (a, b + 1)
        out.append((k, _INDEX[src], float(src[axis - 1])))
    return out


_DIFF = {(axis, o): _diff_map(axis, o) for axis in (1, 2) for o in range(1, MAX_ORDER + 1)}

Number = Union[float, int, np.ndarray]


class Jet2:
    """Taylor expansion of a scalar in two active coordinates.

    ``coeffs[k]`` is the Taylor coefficient of ``MONOMIALS[k]``; the
    derivative slots (``d1``, ``d12``, ``d112``, ...) are the corresponding
    partial derivatives.
    """

    __slots__ = ("coeffs", "order")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, coeffs, order: int = MAX_ORDER):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[0] != N_COEFF[order]:
            raise ValueError(f"order-{order} jet needs {N_COEFF[order]} coefficients")
        self.coeffs = coeffs
        self.order = order

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value: Number, order: int = MAX_ORDER) -> "Jet2":
        value = np.asarray(value, dtype=float)
        c = np.zeros((N_COEFF[order],) + value.shape)
        c[0] = value
        return cls(c, order)

    @classmethod
    def from_derivatives(cls, val, d1=0.0, d2=0.0, d11=0.0, d12=0.0, d22=0.0,
                         d111=0.0, d112=0.0, d122=0.0, d222=0.0) -> "Jet2":
        slots = np.broadcast_arrays(*(np.asarray(s, dtype=float) for s in
                                      (val, d1, d2, d11, d12, d22, d111, d112, d122, d222)))
        c = np.stack(slots) / _FACTORIAL.reshape((-1,) + (1,) * slots[0].ndim)
        return cls(c, MAX_ORDER)

    # slots --------------------------------------------------------------
    def _slot(self, a: int, b: int) -> np.ndarray:
        if a + b > self.order:
            raise ValueError(f"slot of order {a + b} requested from an order-{self.order} jet")
        k = _INDEX[(a, b)]
        return self.coeffs[k] * _FACTORIAL[k]

    val = property(lambda self: self.coeffs[0])
    d1 = property(lambda self: self._slot(1, 0))
    d2 = property(lambda self: self._slot(0, 1))
    d11 = property(lambda self: self._slot(2, 0))
    d12 = property(lambda self: self._slot(1, 1))
    d22 = property(lambda self: self._slot(0, 2))
    d111 = property(lambda self: self._slot(3, 0))
    d112 = property(lambda self: self._slot(2, 1))
    d122 = property(lambda self: self._slot(1, 2))
    d222 = property(lambda self: self._slot(0, 3))

    def slots(self) -> dict[str, np.ndarray]:
        names = ["val", "d1", "d2", "d11", "d12", "d22", "d111", "d112", "d122", "d222"]
        return {n: getattr(self, n) for n in names[: N_COEFF[self.order]]}

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[1:]

    def truncate(self, order: int) -> "Jet2":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet2(self.coeffs[: N_COEFF[order]], order)

    def diff(self, axis: int) -> "Jet2":
        """Jet of the partial derivative along ``axis`` (1 or 2), one order lower."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        c = np.empty((N_COEFF[self.order - 1],) + self.shape)
        for k, src, fac in _DIFF[(axis, self.order)]:
            c[k] = fac * self.coeffs[src]
        return Jet2(c, self.order - 1)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, self.order)

    def _lift(self, other) -> tuple[np.ndarray, np.ndarray, int]:
        other = self._coerce(other)
        order = min(self.order, other.order)
        n = N_COEFF[order]
        return self.coeffs[:n], other.coeffs[:n], order

    def __add__(self, other):
        if not isinstance(other, Jet2):
            shape = np.broadcast_shapes(self.shape, np.shape(other))
            c = np.broadcast_to(self.coeffs, self.coeffs.shape[:1] + shape).copy()
            c[0] += other
            return Jet2(c, self.order)
        a, b, order = self._lift(other)
        return Jet2(a + b, order)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.coeffs, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            other = np.asarray(other, dtype=float)
            return Jet2(self.coeffs * other, self.order)
        a, b, order = self._lift(other)
        shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
        out = np.zeros((N_COEFF[order],) + shape)
        for k, i, j in _PAIRS[order]:
            out[k] += a[i] * b[j]
        return Jet2(out, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            other = np.asarray(other, dtype=float)
            if np.any(other == 0):
                raise DomainError("division by zero")
            return Jet2(self.coeffs / other, self.order)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            if p == 0:
                return Jet2.constant(np.ones(self.shape), self.order)
            base = self if p > 0 else reciprocal(self)
            out = base
            for _ in range(abs(int(p)) - 1):
                out = out * base
            return out
        return power(self, float(p))

    def __repr__(self) -> str:
        body = ", ".join(f"{k}={np.array2string(np.asarray(v), precision=6)}" for k, v in self.slots().items())
        return f"Jet2(order={self.order}, {body})"


JetLike = Union[Jet2, float, np.ndarray]
"""Either a jet or a plain value; elementary functions below accept both."""

ScalarField2 = Callable[[JetLike, JetLike], JetLike]


def seed_variable(index: int, value: Number, order: int = MAX_ORDER) -> Jet2:
    """Jet of the coordinate function ``c_index`` at ``value``."""
    if index not in (1, 2):
        raise ValueError("index must be 1 or 2")
    j = Jet2.constant(value, order)
    if order >= 1:
        j.coeffs[index] = 1.0
    return j


def as_jet(x: JetLike, order: int = MAX_ORDER) -> Jet2:
    return x if isinstance(x, Jet2) else Jet2.constant(x, order)


def _compose(j: Jet2, derivs: tuple) -> Jet2:
    # f(a + n) = sum_k f^(k)(a)/k! n^k with n nilpotent of degree > order
    n = Jet2(j.coeffs.copy(), j.order)
    n.coeffs[0] = 0.0
    out = Jet2.constant(derivs[0], j.order)
    term = None
    for k in range(1, j.order + 1):
        term = n if term is None else term * n
        out = out + term * (derivs[k] / math.factorial(k))
    return out


def _check(cond: np.ndarray, msg: str) -> None:
    if not np.all(cond):
        raise DomainError(msg)


def exp(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        return np.exp(j)
    e = np.exp(j.val)
    return _compose(j, (e, e, e, e))


def log(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        _check(np.asarray(j) > 0, "log of non-positive value")
        return np.log(j)
    a = j.val
    _check(a > 0, "log of non-positive value")
    return _compose(j, (np.log(a), 1 / a, -1 / a**2, 2 / a**3))


def reciprocal(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        _check(np.asarray(j) != 0, "division by zero")
        return 1.0 / np.asarray(j, dtype=float)
    a = j.val
    _check(a != 0, "division by zero")
    return _compose(j, (1 / a, -1 / a**2, 2 / a**3, -6 / a**4))


def power(j: JetLike, p: float) -> JetLike:
    """``j**p`` for real ``p``; the base must be positive."""
    if not isinstance(j, Jet2):
        _check(np.asarray(j) > 0, "real power of non-positive value")
        return np.power(j, p)
    a = j.val
    _check(a > 0, "real power of non-positive value")
    return _compose(j, (a**p, p * a ** (p - 1), p * (p - 1) * a ** (p - 2),
                        p * (p - 1) * (p - 2) * a ** (p - 3)))


def sqrt(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        _check(np.asarray(j) > 0, "sqrt of non-positive value")
        return np.sqrt(j)
    a = j.val
    _check(a > 0, "sqrt of non-positive value")
    s = np.sqrt(a)
    return _compose(j, (s, 0.5 / s, -0.25 / (s * a), 0.375 / (s * a * a)))


def sin(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        return np.sin(j)
    s, c = np.sin(j.val), np.cos(j.val)
    return _compose(j, (s, c, -s, -c))


def cos(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        return np.cos(j)
    s, c = np.sin(j.val), np.cos(j.val)
    return _compose(j, (c, -s, -c, s))


def sinh(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        return np.sinh(j)
    s, c = np.sinh(j.val), np.cosh(j.val)
    return _compose(j, (s, c, s, c))


def cosh(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        return np.cosh(j)
    s, c = np.sinh(j.val), np.cosh(j.val)
    return _compose(j, (c, s, c, s))


def tanh(j: JetLike) -> JetLike:
    if not isinstance(j, Jet2):
        return np.tanh(j)
    t = np.tanh(j.val)
    s2 = 1 - t * t  # sech^2
    return _compose(j, (t, s2, -2 * t * s2, s2 * (6 * t * t - 2)))


ELEMENTARY = {
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "sin": sin,
    "cos": cos,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "reciprocal": reciprocal,
}


def jet_apply(fn: str, j: JetLike, exponent: float | None = None) -> JetLike:
    """Apply the elementary function named ``fn``; ``"pow"`` takes ``exponent``."""
    if fn == "pow":
        if exponent is None:
            raise ValueError("pow needs an exponent")
        return power(j, exponent)
    try:
        f = ELEMENTARY[fn]
    except KeyError:
        raise ValueError(f"unknown elementary function {fn!r}") from None
    return f(j)


def value(x: JetLike) -> np.ndarray:
    """Plain value of a jet or number."""
    return x.val if isinstance(x, Jet2) else np.asarray(x, dtype=float)


def evaluate(field: ScalarField2, c1: Number, c2: Number, order: int = MAX_ORDER) -> Jet2:
    """Jet of ``field`` at the base point ``(c1, c2)``."""
    c1, c2 = np.broadcast_arrays(np.asarray(c1, dtype=float), np.asarray(c2, dtype=float))
    out = field(seed_variable(1, c1, order), seed_variable(2, c2, order))
    if not isinstance(out, Jet2):
        out = Jet2.constant(np.broadcast_to(np.asarray(out, dtype=float), c1.shape), order)
    elif out.shape != c1.shape:
        out = Jet2(np.broadcast_to(out.coeffs, (out.coeffs.shape[0],) + c1.shape).copy(), out.order)
    return out
