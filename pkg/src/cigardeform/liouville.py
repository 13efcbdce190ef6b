"""Liouville normal form of ``E(V) = 0`` and the eigenfunction ``W``.

With ``ξ = log(2 + r) - log(2 - r)`` (the distance in the ``r`` direction)
and ``Y = M(r) V`` for a suitable multiplier ``M``, the equation ``E(V) = 0``
loses its first-order terms and becomes ``Y_ξξ + Y_xx - Q(ξ) Y = 0``.  The
combination ``W = -Y_ξ - c(ξ) Y`` then solves ``W_ξξ + W_xx - P(ξ) W = 0``
with ``W(0, x) = 0``.

Fields in ``(ξ, x)`` are built by composing jet-valued ``(r, x)`` fields with
``r(ξ) = 2 tanh(ξ/2)``, so every ξ-derivative is an exact chain rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import jets, variation
from .errors import DomainError
from .jets import Jet2, JetLike, ScalarField2
from .residuals import total
from .variation import VariationField, partials

SQRT2 = np.sqrt(2.0)
XI_FLOOR = 1e-3


def _check_xi(xi, floor: float = 0.0) -> None:
    if not np.all(jets.value(xi) > floor):
        raise DomainError(f"xi must exceed {floor}")


# --- coordinates ---------------------------------------------------------------

def xi_of_r(r: JetLike) -> JetLike:
    rv = jets.value(r)
    if not np.all((rv >= 0) & (rv < 2)):
        raise DomainError("r must lie in [0, 2)")
    if not isinstance(r, Jet2):
        r = np.asarray(r, dtype=float)
        return np.log1p(r / 2) - np.log1p(-r / 2)
    return jets.log(2.0 + r) - jets.log(2.0 - r)


def r_of_xi(xi: JetLike) -> JetLike:
    if not np.all(jets.value(xi) >= 0):
        raise DomainError("xi must be nonnegative")
    if not isinstance(xi, Jet2):
        return 2.0 * np.tanh(np.asarray(xi, dtype=float) / 2)
    return 2.0 * jets.tanh(xi / 2.0)


@dataclass(frozen=True)
class TransformPair:
    xi: float
    r: float

    @classmethod
    def from_r(cls, r) -> "TransformPair":
        return cls(xi_of_r(r), np.asarray(r, dtype=float))

    @classmethod
    def from_xi(cls, xi) -> "TransformPair":
        return cls(np.asarray(xi, dtype=float), r_of_xi(xi))


# --- coefficients ------------------------------------------------------------

def Q_coeff(xi: JetLike) -> JetLike:
    _check_xi(xi)
    e2 = jets.exp(2.0 * xi)
    e4 = e2 * e2
    return (e4 * e4 - 36.0 * e4 * e2 + 54.0 * e4 - 36.0 * e2 + 1.0) / (4.0 * (e4 - 1.0) ** 2)


def P_coeff(xi: JetLike) -> JetLike:
    _check_xi(xi)
    e2 = jets.exp(2.0 * xi)
    return (e2 * e2 + 10.0 * e2 + 1.0) / (4.0 * (e2 - 1.0) ** 2)


def w_shift(xi: JetLike) -> JetLike:
    """``(e^{4ξ} - 6e^{2ξ} + 1) / (2(e^{4ξ} - 1))``, the Y coefficient in W."""
    e2 = jets.exp(2.0 * xi)
    e4 = e2 * e2
    return (e4 - 6.0 * e2 + 1.0) / (2.0 * (e4 - 1.0))


def slack_coeff(xi: JetLike) -> JetLike:
    """``(e^{2ξ} + 1) / (2(e^{2ξ} - 1))``, i.e. ``coth(ξ)/2``."""
    e2 = jets.exp(2.0 * xi)
    return (e2 + 1.0) / (2.0 * (e2 - 1.0))


def multiplier_r(r: JetLike) -> JetLike:
    c = 4.0 - r * r
    return 2.0 * c * jets.sqrt(r * c) / (4.0 + r * r)


def multiplier_xi(xi: JetLike) -> JetLike:
    e = jets.exp(xi)
    return (16.0 * SQRT2 * jets.exp(1.5 * xi) * jets.sqrt(e - 1.0)
            / (jets.power(e + 1.0, 1.5) * (e * e + 1.0)))


def transform_factor(r) -> np.ndarray:
    """``λ(r)`` with ``Y_ξξ + Y_xx - QY = λ(r) E(V)``."""
    r = np.asarray(r, dtype=float)
    c = 4.0 - r * r
    return c * np.sqrt(r * c) / (8.0 * (4.0 + r * r) ** 2)


# --- fields ----------------------------------------------------------------

def Y_from_V(V: VariationField | ScalarField2) -> ScalarField2:
    """``Y(ξ, x) = M(r(ξ)) V(r(ξ), x)`` as a jet field in ``(ξ, x)``."""
    Vf = V.V if isinstance(V, VariationField) else V

    def Y(xi, x):
        r = r_of_xi(xi)
        return multiplier_r(r) * Vf(r, x)

    return Y


def _jet(field: ScalarField2, p, order: int) -> Jet2:
    """Jet of ``field`` at ``p`` holding at least ``order`` derivatives.

    Seeds are always full order: fields defined through derivatives of other
    fields (such as W built from Y) lose one order per differentiation.
    """
    a, b = p
    j = jets.evaluate(field, a, b, jets.MAX_ORDER)
    if j.order < order:
        raise ValueError(f"field only carries {j.order} derivatives, {order} needed")
    return j


def W_display_Y(xi, Y: variation.Partials):
    return total(-Y.r, -w_shift(xi) * Y.f)


def W_display_V(r, V: variation.Partials):
    c = 4.0 - r * r
    pre = jets.sqrt(r) * jets.power(c, 1.5) / (2.0 * (4.0 + r * r))
    return pre * total(2.0 * r * V.f, -c * V.r)


def W_field_from_Y(Y: ScalarField2) -> ScalarField2:
    """W as a jet field; one order lower than the jets of ``Y``."""

    def W(xi, x):
        return W_display_Y(xi, partials(jets.as_jet(Y(xi, x)), as_jets=True))

    return W


def W_field_from_V(V: VariationField | ScalarField2) -> ScalarField2:
    return W_field_from_Y(Y_from_V(V))


def Y_residual(Y: ScalarField2, p) -> np.ndarray:
    xi = np.asarray(p[0], dtype=float)
    _check_xi(xi, 0.0)
    d = partials(_jet(Y, p, 2))
    return total(d.rr, d.xx, -Q_coeff(xi) * d.f)


def L_display(xi, W: variation.Partials):
    return total(W.rr, W.xx, -P_coeff(xi) * W.f)


def W_residual(W: ScalarField2, p) -> np.ndarray:
    xi = np.asarray(p[0], dtype=float)
    _check_xi(xi, 0.0)
    return L_display(xi, partials(_jet(W, p, 2)))


def W_from_Y(Y: ScalarField2, p) -> np.ndarray:
    xi = np.asarray(p[0], dtype=float)
    _check_xi(xi)
    return W_display_Y(xi, partials(_jet(Y, p, 1)))


def W_from_V(V, p) -> np.ndarray:
    """The ``(r, V)`` form of W at ``p = (r, x)``."""
    r = np.asarray(p[0], dtype=float)
    Vf = V.V if isinstance(V, VariationField) else V
    return W_display_V(r, partials(variation.field_jet(Vf, r, p[1], 1)))


# --- the kernel W0 -------------------------------------------------------------

def w0_kernel(xi: JetLike) -> JetLike:
    """``(e^ξ - 1)² / (e^{ξ/2} √(e^{2ξ} - 1))``."""
    _check_xi(xi)
    e = jets.exp(xi)
    return (e - 1.0) ** 2 / (jets.exp(0.5 * xi) * jets.sqrt(e * e - 1.0))


def w0_kernel_wall(xi) -> np.ndarray:
    """Equivalent form ``(e^ξ - 1)^{3/2} / (e^{ξ/2} (e^ξ + 1)^{1/2})``, finite at ξ = 0."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise DomainError("xi must be nonnegative")
    em1 = np.expm1(xi)
    return em1**1.5 / (np.exp(0.5 * xi) * np.sqrt(em1 + 2.0))


def w0_in_r(r: JetLike) -> JetLike:
    """W0 in the cigar coordinate: ``√2 r^{3/2} / √(4 - r²)``."""
    return SQRT2 * jets.power(r, 1.5) / jets.sqrt(4.0 - r * r)


def w0_field(xi, x):
    return w0_kernel(xi) + 0.0 * x


# --- inequality, remark and endgame ----------------------------------------------

@dataclass
class Slack:
    slack: np.ndarray
    identity: Optional[np.ndarray] = None


def slack_identity_rhs(xi, dK23) -> np.ndarray:
    """``e^{-ξ/2} (e^{2ξ} - 1)^{1/2} δK23 / √2``, equal to the slack of W built from V."""
    return np.exp(-0.5 * xi) * np.sqrt(np.expm1(2.0 * xi)) * dK23 / SQRT2


def inequality_slack(W: ScalarField2, p, V: Optional[VariationField] = None) -> Slack:
    """``W_ξ - coth(ξ)/2 · W`` at ``p = (ξ, x)``.

    When the variation ``V`` that produced ``W`` is supplied, the value of the
    δK23 expression that the slack must equal is returned as well.
    """
    xi = np.asarray(p[0], dtype=float)
    _check_xi(xi)
    d = partials(_jet(W, p, 1))
    out = Slack(total(d.r, -slack_coeff(xi) * d.f))
    if V is not None:
        _, dk23, _ = variation.delta_sectional(V, (r_of_xi(xi), p[1]))
        out.identity = slack_identity_rhs(xi, dk23)
    return out


@dataclass
class RemarkIdentity:
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray


def remark_identity(V, p) -> RemarkIdentity:
    """``-32(4+r²)² / (√r (4-r²)^{5/2}) · L(W)`` against ``∂_r E(V) - 16r/(16-r⁴) E(V)``.

    ``∂_r E(V)`` is third order in V, so order-3 jets of V give it exactly:
    evaluating the E display on jets yields E(V) as an order-1 jet.
    """
    r, x = np.broadcast_arrays(np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float))
    variation.check_r(r)
    Vf = V.V if isinstance(V, VariationField) else V
    Ej = variation.E_display(jets.seed_variable(1, r), partials(variation.field_jet(Vf, r, x, 3), as_jets=True))
    E = jets.as_jet(Ej)
    rhs = total(E.d1, -16.0 * r / (16.0 - r**4) * E.val)
    xi = xi_of_r(r)
    L = W_residual(W_field_from_V(Vf), (xi, x))
    c = 4.0 - r * r
    lhs = -32.0 * (4.0 + r * r) ** 2 / (np.sqrt(r) * c**2.5) * L
    return RemarkIdentity(lhs, rhs, np.abs(lhs - rhs))


@dataclass
class XiSectional:
    dK12: np.ndarray
    dK23: np.ndarray
    dK13: np.ndarray


def delta_K_display_xi(xi, Y: variation.Partials) -> XiSectional:
    """First variations of the sectional curvatures in terms of ``Y(ξ, x)``.

    The δK13 expression carries an overall minus sign relative to the
    bracketed combination; with it, the three values match the ``(r, V)``
    expressions identically.
    """
    e = np.exp(xi)
    e2 = e * e
    e4 = e2 * e2
    pre12 = 2.0 * SQRT2 * np.exp(1.5 * xi) / np.expm1(2.0 * xi) ** 1.5
    pre = SQRT2 * np.exp(0.5 * xi) / np.sqrt(np.expm1(2.0 * xi))
    dk12 = pre12 * W_display_Y(xi, Y)
    dk23 = pre * total(-Y.rr, 4.0 * e2 / (e4 - 1.0) * Y.r,
                       (e4 * e4 - 28.0 * e4 * e2 + 6.0 * e4 - 28.0 * e2 + 1.0) / (4.0 * (e4 - 1.0) ** 2) * Y.f)
    num13 = (3.0 * e4 * e4 - 8.0 * e4 * e2 * e - 36.0 * e4 * e2 + 40.0 * e4 * e - 14.0 * e4
             + 40.0 * e2 * e - 36.0 * e2 - 8.0 * e + 3.0)
    dk13 = -pre * total(-Y.rr, (e - 1.0) ** 3 / ((e + 1.0) * (e2 + 1.0)) * Y.r,
                        num13 / (4.0 * (e4 - 1.0) ** 2) * Y.f)
    return XiSectional(dk12, dk23, dk13)


def delta_sectional_xi(Y: ScalarField2, p) -> XiSectional:
    xi = np.asarray(p[0], dtype=float)
    _check_xi(xi)
    return delta_K_display_xi(xi, partials(_jet(Y, p, 2)))


@dataclass
class Endgame:
    gauge_pass: bool
    contradiction_value: np.ndarray
    contradiction_residual: np.ndarray


def rigidity_endgame(r, A=None, tol: float = 1e-9) -> Endgame:
    """Check both branches of the rigidity argument at radii ``r``.

    ``W = 0`` forces ``V = A(x)/(4 - r²)``, which gives ``h11 = 0`` and
    ``h22 = -2A``; the other branch ``W = W0`` forces V to the log solution,
    whose ``E(V)`` is a nonzero closed form.
    """
    r = np.asarray(r, dtype=float)
    variation.check_r(r)
    A = A if A is not None else (lambda t: 1.0 + 0.0 * t)
    x = np.zeros_like(r)
    h11, h22 = variation.h_from_V(variation.gauge_field(A), (r, x))
    a = jets.value(A(x))
    gauge_pass = bool(np.all(np.abs(h11) <= tol) and np.all(np.abs(h22 + 2.0 * a) <= tol))
    E = variation.E_of_V(variation.vlog_field(), (r, x))
    return Endgame(gauge_pass, E, np.abs(E - variation.vlog_E_closed(r)))
