"""Linearized soliton equations on the 3D cigar in coordinates ``(r, x)``.

The perturbation keeps the diagonal form, so only ``h_11 = h1`` and
``h_22 = h2`` are nonzero.  ``V`` is the variation of ``F = e^f`` and
``v = (4 - r²) V`` is the variation of the potential ``f`` itself.

Every display is written once, in terms of a :class:`Partials` pack, and
works both on plain arrays and on jets.  The jet form is what lets callers
differentiate a display (for example ``∂_r E(V)``) without finite
differences.

Component labels follow the coordinate order ``1 = r, 2 = x, 3 = θ``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import jets
from .errors import DomainError
from .jets import Jet2, JetLike, ScalarField2
from .residuals import total

Univariate = Callable[[JetLike], JetLike]


@dataclass
class Partials:
    """Partial derivatives of one field, as arrays or as jets."""

    f: Any
    r: Any = None
    x: Any = None
    rr: Any = None
    rx: Any = None
    xx: Any = None
    rrr: Any = None
    rrx: Any = None
    rxx: Any = None
    xxx: Any = None


def partials(j: Jet2, as_jets: bool = False) -> Partials:
    if not as_jets:
        return Partials(**{("f" if k == "val" else k.replace("d", "").replace("1", "r").replace("2", "x")): v
                           for k, v in j.slots().items()})
    p = Partials(j)
    if j.order >= 1:
        p.r, p.x = j.diff(1), j.diff(2)
    if j.order >= 2:
        p.rr, p.rx, p.xx = p.r.diff(1), p.r.diff(2), p.x.diff(2)
    if j.order >= 3:
        p.rrr, p.rrx, p.rxx, p.xxx = p.rr.diff(1), p.rr.diff(2), p.rx.diff(2), p.xx.diff(2)
    return p


def check_r(r) -> None:
    if not np.all((jets.value(r) > 0) & (jets.value(r) < 2)):
        raise DomainError("r must lie in (0, 2)")


def field_jet(fn: ScalarField2, r, x, order: int = 3) -> Jet2:
    check_r(r)
    return jets.evaluate(fn, r, x, order)


def univariate_jet(fn: Optional[Univariate], t, order: int = 3) -> Jet2:
    t = np.asarray(t, dtype=float)
    if fn is None:
        return jets.Jet2.constant(np.zeros_like(t), order)
    return jets.as_jet(fn(jets.seed_variable(1, t, order)), order) + np.zeros_like(t)


# --- fields ----------------------------------------------------------------

@dataclass(frozen=True)
class VariationField:
    """The variation ``V = δF`` as a jet-valued field of ``(r, x)``."""

    V: ScalarField2
    name: str = "V"

    def __call__(self, r, x):
        return self.V(r, x)

    def v(self, r, x):
        """Variation of the potential, ``v = (4 - r²) V``."""
        return (4.0 - r * r) * self.V(r, x)


def gauge_field(A: Univariate, name: str = "gauge") -> VariationField:
    """``V = A(x) / (4 - r²)``: the variations produced by diffeomorphisms."""
    return VariationField(lambda r, x: A(x) / (4.0 - r * r), name)


SQRT2 = np.sqrt(2.0)


def vlog_field(A: Optional[Univariate] = None) -> VariationField:
    """The variation whose W is the kernel ``√2 r^{3/2} / √(4 - r²)``."""

    def V(r, x):
        c = 4.0 - r * r
        out = -8.0 * SQRT2 / (c * c) - SQRT2 * jets.log(c) / c
        return out if A is None else out + A(x) / c

    return VariationField(V, "vlog")


def vlog_E_closed(r) -> np.ndarray:
    """Closed value of E on the log solution: ``-16√2 (4 + r²) / (4 - r²)``."""
    r = np.asarray(r, dtype=float)
    return -16.0 * SQRT2 * (4 + r * r) / (4 - r * r)


def _lifted(fn: ScalarField2) -> ScalarField2:
    """Let a jet-only field also accept plain coordinates (returns values)."""

    def g(r, x):
        if isinstance(r, Jet2) or isinstance(x, Jet2):
            return fn(r, x)
        return jets.evaluate(fn, r, x, 3).val

    return g


@dataclass(frozen=True)
class PerturbationComponents:
    """``h1 = h_11``, ``h2 = h_22`` and ``v``; ``A`` is the free function of ``r``, if any."""

    h1: ScalarField2
    h2: ScalarField2
    v: ScalarField2
    A: Optional[Univariate] = None

    @classmethod
    def from_V(cls, V: VariationField) -> "PerturbationComponents":
        def h1(r, x):
            return h_from_V_display(r, partials(jets.as_jet(V(r, x)), as_jets=True))[0]

        def h2(r, x):
            return h_from_V_display(r, partials(jets.as_jet(V(r, x)), as_jets=True))[1]

        return cls(_lifted(h1), _lifted(h2), V.v)

    @classmethod
    def from_v_A(cls, v: ScalarField2, A: Optional[Univariate] = None) -> "PerturbationComponents":
        """``h1, h2`` from the solutions of ``E12 = 0`` and ``E33 = 0``."""
        Af = A if A is not None else (lambda t: 0.0 * t)

        def h1(r, x):
            vr = jets.as_jet(v(r, x)).diff(1)
            return total(32.0 * r / (16.0 - r**4) * vr, Af(r))

        def h2(r, x):
            vj = jets.as_jet(v(r, x))
            c = 4.0 - r * r
            return total(2.0 * r * c / (4.0 + r * r) * vj.diff(1), -2.0 * vj, c * c / 16.0 * Af(r))

        return cls(_lifted(h1), _lifted(h2), v, A)


# --- displays ----------------------------------------------------------------

def h_from_V_display(r, V: Partials):
    c = 4.0 - r * r
    s = 4.0 + r * r
    h11 = total(32.0 * r / s * V.r, -64.0 * r * r / (16.0 - r**4) * V.f)
    h22 = total(2.0 * r * c * c / s * V.r, -2.0 * c * (4.0 + 3.0 * r * r) / s * V.f)
    return h11, h22


def E_display(r, V: Partials):
    c = 4.0 - r * r
    s = r * r + 4.0
    return total(s * c * c * V.rr, 16.0 * s * V.xx,
                 -(5.0 * r**4 + 48.0 * r * r - 16.0) * c * V.r / r,
                 4.0 * (r**4 + 16.0 * r * r - 16.0) * V.f)


def B_display(r, v: Partials, A):
    """Linearized normalization after substituting ``h1, h2`` in terms of ``v, A``."""
    c = 4.0 - r * r
    return total(c * c / 16.0 * v.rr, v.xx,
                 -c * (r**4 + 32.0 * r * r - 16.0) / (16.0 * r * (4.0 + r * r)) * v.r,
                 -c * c / 16.0 * A)


def B_h_display(r, v: Partials, h1: Partials, h2: Partials):
    """Linearized normalization in terms of ``v, h1, h2``."""
    c = 4.0 - r * r
    return total(c * c / 16.0 * v.rr, v.xx, (16.0 - r**4) / (16.0 * r) * v.r,
                 -r * c**3 / 256.0 * h1.r, r * c / 16.0 * h2.r, -c**3 / 64.0 * h1.f)


def nabla_kk_h(r, h1: Partials, h2: Partials) -> dict[str, Any]:
    """Nonzero ``∇_k ∇_k h_ij``, keyed ``"k;ij"``."""
    c = 4.0 - r * r
    return {
        "1;11": total(h1.rr, -10.0 * r / c * h1.r, -4.0 * (4.0 - 5.0 * r * r) / (c * c) * h1.f),
        "1;22": total(h2.rr, -2.0 * r / c * h2.r),
        "2;11": h1.xx,
        "2;22": h2.xx,
        "3;11": total(r * c * c / 16.0 * h1.r, -(16.0 - r**4) / 8.0 * h1.f),
        "3;22": r * c * c / 16.0 * h2.r,
        "3;33": r * r * c**4 / 128.0 * h1.f,
    }


def laplacian_h(r, nkk: dict[str, Any]) -> dict[str, Any]:
    """``Δh_ij = Σ_k g^{kk} ∇_k ∇_k h_ij`` for the diagonal cigar metric."""
    c = 4.0 - r * r
    g11inv, g33inv = c * c / 16.0, 1.0 / (r * r)
    return {
        "11": total(g11inv * nkk["1;11"], nkk["2;11"], g33inv * nkk["3;11"]),
        "22": total(g11inv * nkk["1;22"], nkk["2;22"], g33inv * nkk["3;22"]),
        "33": g33inv * nkk["3;33"],
    }


def laplacian_h_display(r, h1: Partials, h2: Partials) -> dict[str, Any]:
    """Closed ``Δh`` components (``Δh_22`` with the ``(4 - 3r²)`` coefficient)."""
    c = 4.0 - r * r
    return {
        "11": total(c * c / 16.0 * h1.rr, h1.xx, c * (4.0 - 11.0 * r * r) / (16.0 * r) * h1.r,
                    (11.0 * r**4 - 8.0 * r * r - 16.0) / (8.0 * r * r) * h1.f),
        "22": total(c * c / 16.0 * h2.rr, h2.xx, c * (4.0 - 3.0 * r * r) / (16.0 * r) * h2.r),
        "33": c**4 / 128.0 * h1.f,
    }


def nabla_gradf_h(r, h1: Partials, h2: Partials) -> dict[str, Any]:
    c = 4.0 - r * r
    return {"11": total(r * c / 8.0 * h1.r, -r * r / 2.0 * h1.f), "22": r * c / 8.0 * h2.r}


def rm_h(r, h1: Partials) -> dict[str, Any]:
    c = 4.0 - r * r
    return {"33": r * r * c**3 / 128.0 * h1.f}


def weighted_div_h(r, h1: Partials, h2: Partials) -> dict[str, Any]:
    """``div h + h(∇f, ·)``."""
    c = 4.0 - r * r
    return {"1": total(c * c / 16.0 * h1.r, c * (4.0 - 3.0 * r * r) / (16.0 * r) * h1.f), "2": h2.x}


def omega(r, h1: Partials, h2: Partials) -> dict[str, Any]:
    """``div*`` of the weighted divergence."""
    c = 4.0 - r * r
    return {
        "11": total(-c * c / 16.0 * h1.rr, -c * (4.0 - 9.0 * r * r) / (16.0 * r) * h1.r,
                    (-15.0 * r**4 + 24.0 * r * r + 16.0) / (16.0 * r * r) * h1.f),
        "12": total(-c * c / 32.0 * h1.rx, -c * (4.0 - 3.0 * r * r) / (32.0 * r) * h1.x, -0.5 * h2.rx),
        "22": -h2.xx,
        "33": total(-r * c**4 / 256.0 * h1.r, -c**3 * (4.0 - 3.0 * r * r) / 256.0 * h1.f),
    }


def hess_u(r, u: Partials) -> dict[str, Any]:
    c = 4.0 - r * r
    return {"11": total(u.rr, -2.0 * r / c * u.r), "12": u.rx, "22": u.xx, "33": r * c * c / 16.0 * u.r}


def E12_display(r, v: Partials, h1: Partials):
    return total(2.0 * v.rx, (r**4 - 16.0) / (16.0 * r) * h1.x)


def E33_display(r, v: Partials, h1: Partials, h2: Partials):
    c = 4.0 - r * r
    return total(r * c * c / 8.0 * v.r, r * c * c / 16.0 * h2.r, -r * c**4 / 256.0 * h1.r,
                 r * r * c**3 / 64.0 * h1.f)


def E11_display(r, v: Partials, A: Partials):
    c = 4.0 - r * r
    s = 4.0 + r * r
    return total(
        2.0 * r * c / s * v.rrr,
        32.0 * r / (16.0 - r**4) * v.rxx,
        -2.0 * (5.0 * r**4 + 48.0 * r * r - 16.0) / (s * s) * v.rr,
        2.0 * (3.0 * r**8 + 48.0 * r**6 + 480.0 * r**4 - 768.0 * r * r - 256.0) / (r * c * s**3) * v.r,
        c * c / 16.0 * A.rr,
        -c * (4.0 + 11.0 * r * r) / (16.0 * r) * A.r,
        1.5 * r * r * A.f,
    )


def E22_display(r, v: Partials, A: Partials):
    c = 4.0 - r * r
    s = 4.0 + r * r
    return total(
        r * c**3 / (8.0 * s) * v.rrr,
        2.0 * r * c / s * v.rxx,
        -c * c * (r**4 + 10.0 * r * r - 8.0) / (2.0 * s * s) * v.rr,
        2.0 * v.xx,
        -r * c * c * (r * r + 4.0 * r + 12.0) * (r * r - 4.0 * r + 12.0) / (4.0 * s**3) * v.r,
        c**4 / 256.0 * A.rr,
        c**3 * (4.0 - 9.0 * r * r) / (256.0 * r) * A.r,
        c * c * (r * r - 2.0) / 16.0 * A.f,
    )


def a_ode_displays(r, A: Partials):
    """The two reduced second-order equations for ``A(r)`` and their combination."""
    c = 4.0 - r * r
    q = 16.0 - r**4
    ode1 = total(A.rr, -(11.0 * r**4 + 16.0 * r * r + 16.0) / (r * q) * A.r,
                 -8.0 * r * r * (4.0 - 3.0 * r * r) / (c * c * (4.0 + r * r)) * A.f)
    ode2 = total(A.rr, (16.0 - 9.0 * r**4) / (r * q) * A.r, -16.0 * r * r / q * A.f)
    diff = total(q * A.r, -4.0 * r**3 * A.f)
    return ode1, ode2, diff


def delta_K_display(r, V: Partials):
    """First variations of the coordinate-plane sectional curvatures ``(δK12, δK23, δK13)``."""
    c = 4.0 - r * r
    s = 4.0 + r * r
    pre = c * c / (16.0 * s)
    dk12 = c**3 / (16.0 * s) * total(2.0 * V.f, -c * V.r / r)
    dk23 = pre * total(-c * c * V.rr, 2.0 * r * r * c * (3.0 * r * r + 20.0) / s * V.r / r,
                       -2.0 * (3.0 * r**4 + 24.0 * r * r - 16.0) / s * V.f)
    dk13 = pre * total(c * c * V.rr, -c * (9.0 * r**4 + 48.0 * r * r - 16.0) / s * V.r / r,
                       4.0 * (3.0 * r**4 + 16.0 * r * r - 16.0) / s * V.f)
    return dk12, dk23, dk13


# --- operations at points ----------------------------------------------------

def _as_field(V) -> ScalarField2:
    return V.V if isinstance(V, VariationField) else V


def h_from_V(V, p) -> tuple[np.ndarray, np.ndarray]:
    r, x = p
    return h_from_V_display(np.asarray(r, float), partials(field_jet(_as_field(V), r, x, 1)))


def E_of_V(V, p) -> np.ndarray:
    r, x = p
    return E_display(np.asarray(r, float), partials(field_jet(_as_field(V), r, x, 2)))


def B_of(v: ScalarField2, A: Optional[Univariate], p) -> np.ndarray:
    r, x = p
    r = np.asarray(r, dtype=float)
    return B_display(r, partials(field_jet(v, r, x, 2)), univariate_jet(A, r, 0).val)


def delta_sectional(V, p) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r, x = p
    return delta_K_display(np.asarray(r, float), partials(field_jet(_as_field(V), r, x, 2)))


@dataclass
class ACheck:
    ode1: np.ndarray
    ode2: np.ndarray
    diff: np.ndarray


def a_ode_check(A: Optional[Univariate], r) -> ACheck:
    check_r(r)
    r = np.asarray(r, dtype=float)
    return ACheck(*a_ode_displays(r, partials_univariate(univariate_jet(A, r, 2))))


def partials_univariate(j: Jet2) -> Partials:
    s = j.slots()
    return Partials(f=s["val"], r=s.get("d1"), rr=s.get("d11"), rrr=s.get("d111"))


@dataclass
class LinearizedTensors:
    nabla_kk_h: dict
    laplacian_h: dict
    nabla_gradf_h: dict
    rm_h: dict
    weighted_div_h: dict
    omega: dict
    hess_u: dict
    B: Any


@dataclass
class AssembledE:
    E11: np.ndarray
    E12: np.ndarray
    E22: np.ndarray
    E33: np.ndarray
    E12_direct: np.ndarray
    E33_direct: np.ndarray
    tensors: LinearizedTensors = field(repr=False)


def assemble_Eij(pc: PerturbationComponents, p) -> AssembledE:
    """Linearized soliton equation assembled from its intermediate tensors."""
    r, x = p
    check_r(r)
    r = np.asarray(r, dtype=float)
    rj, xj = np.broadcast_arrays(r, np.asarray(x, dtype=float))
    R = jets.seed_variable(1, rj)
    X = jets.seed_variable(2, xj)
    h1j = jets.as_jet(pc.h1(R, X)) + np.zeros_like(rj)
    h2j = jets.as_jet(pc.h2(R, X)) + np.zeros_like(rj)
    vj = jets.as_jet(pc.v(R, X)) + np.zeros_like(rj)
    uj = (4.0 - R * R) ** 2 / 16.0 * h1j + h2j + 2.0 * vj
    h1, h2, v, u = (partials(j) for j in (h1j, h2j, vj, uj))
    r = rj

    nkk = nabla_kk_h(r, h1, h2)
    lap = laplacian_h(r, nkk)
    ngf = nabla_gradf_h(r, h1, h2)
    rm = rm_h(r, h1)
    om = omega(r, h1, h2)
    hu = hess_u(r, u)
    E = {}
    for k in ("11", "12", "22", "33"):
        E[k] = total(*(t[k] for t in (lap, ngf, om, om, hu) if k in t),
                     *(2.0 * rm[k] for _ in (0,) if k in rm))
    tens = LinearizedTensors(nkk, lap, ngf, rm, weighted_div_h(r, h1, h2), om, hu, B_h_display(r, v, h1, h2))
    return AssembledE(E["11"], E["12"], E["22"], E["33"],
                      E12_display(r, v, h1), E33_display(r, v, h1, h2), tens)


def direct_E11_E22(v: ScalarField2, A: Optional[Univariate], p) -> tuple[np.ndarray, np.ndarray]:
    """``E11, E22`` from their closed forms in ``v`` and ``A``."""
    r, x = p
    r = np.asarray(r, dtype=float)
    vp = partials(field_jet(v, r, x, 3))
    Ap = partials_univariate(univariate_jet(A, r, 2))
    return E11_display(r, vp, Ap), E22_display(r, vp, Ap)


@dataclass
class Reduction:
    E11: np.ndarray
    E22: np.ndarray
    ode1_scaled: np.ndarray
    ode2_scaled: np.ndarray


def reduce_by_B(v: ScalarField2, A: Optional[Univariate], p) -> Reduction:
    """Eliminate ``v_rr`` (and ``v_rrr``) with ``B = 0`` from the direct ``E11, E22``.

    Returns the eliminated expressions together with ``(4-r²)²/16 · ode1`` and
    ``(4-r²)⁴/256 · ode2``; the two pairs agree identically.
    """
    r, x = p
    r = np.asarray(r, dtype=float)
    vp = partials(field_jet(v, r, x, 3))
    Aj = univariate_jet(A, r, 3)
    Ap = partials_univariate(Aj)
    R = jets.seed_variable(1, r, 1)
    c = 4.0 - R * R
    # B = 0 solved for v_rr: v_rr = 16/c² (-v_xx + k v_r + c²A/16)
    k = c * (R**4 + 32.0 * R * R - 16.0) / (16.0 * R * (4.0 + R * R))
    pre = 16.0 / (c * c)
    cA = c * c / 16.0 * Aj.truncate(1)
    inner = -vp.xx + k.val * vp.r + cA.val
    vrr = pre.val * inner
    inner_r = -vp.rxx + k.d1 * vp.r + k.val * vrr + cA.d1
    vrrr = pre.d1 * inner + pre.val * inner_r
    sub = Partials(f=vp.f, r=vp.r, x=vp.x, rr=vrr, rx=vp.rx, xx=vp.xx,
                   rrr=vrrr, rrx=vp.rrx, rxx=vp.rxx, xxx=vp.xxx)
    e11, e22 = E11_display(r, sub, Ap), E22_display(r, sub, Ap)
    ode1, ode2, _ = a_ode_displays(r, Ap)
    cv = 4.0 - r * r
    return Reduction(e11, e22, cv * cv / 16.0 * ode1, cv**4 / 256.0 * ode2)
