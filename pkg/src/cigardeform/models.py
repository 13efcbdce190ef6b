"""Metric fixtures: the 2D and 3D cigar, the surface Σ², and the two-Killing family.

The two-Killing family is written in coordinates ``(t, x, y)`` as

    y² (dt + (q(y) - tau(x)) dx)² + p(y)² dx² + Ω(y)² dy²

with potential ``f(y)``.  The function of ``x`` is called ``tau`` here so it
does not collide with the Liouville coordinate ``ξ``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import geometry, jets
from .errors import DomainError
from .geometry import MetricModel
from .jets import JetLike

INF = float("inf")
CIGAR_BOX = ((0.05, 1.95), (-4.0, 4.0))

Univariate = Callable[[JetLike], JetLike]


def _cigar_g11(r, x):
    return 16.0 / (4.0 - r * r) ** 2


def _cigar_potential(r, x):
    return -jets.log(4.0 - r * r)


def cigar3d_christoffel(p: Sequence) -> np.ndarray:
    """Closed-form ``Γ^k_ij`` of the 3D cigar in ``(r, x, θ)``."""
    r = np.asarray(p[0], dtype=float)
    G = np.zeros((3, 3, 3) + r.shape)
    G[0, 0, 0] = 2 * r / (4 - r * r)
    G[0, 2, 2] = -r * (4 - r * r) ** 2 / 16
    G[2, 0, 2] = G[2, 2, 0] = 1 / r
    return G


def cigar3d_riemann(p: Sequence) -> np.ndarray:
    r = np.asarray(p[0], dtype=float)
    R = np.zeros((3,) * 4 + r.shape)
    v = 2 * r * r / (4 - r * r)
    R[0, 2, 0, 2] = R[2, 0, 2, 0] = v
    R[0, 2, 2, 0] = R[2, 0, 0, 2] = -v
    return R


def cigar3d() -> MetricModel:
    """``16/(4-r²)² dr² + dx² + r² dθ²`` with ``f = -log(4 - r²)``."""
    return MetricModel(
        name="cigar3d",
        coords=("r", "x", "theta"),
        active=(0, 1),
        components={(0, 0): _cigar_g11, (1, 1): lambda r, x: 1.0, (2, 2): lambda r, x: r * r},
        domain=((0.0, 2.0), (-INF, INF)),
        potential=_cigar_potential,
        oracles={"christoffel": cigar3d_christoffel, "riemann": cigar3d_riemann},
        sample_box=CIGAR_BOX,
    )


def cigar2d() -> MetricModel:
    """Hamilton's cigar ``16/(4-r²)² dr² + r² dθ²``."""
    return MetricModel(
        name="cigar2d",
        coords=("r", "theta"),
        active=(0, 1),
        components={(0, 0): _cigar_g11, (1, 1): lambda r, th: r * r},
        domain=((0.0, 2.0), (-INF, INF)),
        potential=_cigar_potential,
        oracles={"gauss": lambda p: (4 - np.asarray(p[0], dtype=float) ** 2) / 8},
        sample_box=((0.05, 1.95), (0.0, 2 * np.pi)),
    )


def sigma_conformal_factor(xi: JetLike) -> JetLike:
    """``(e^{4ξ} + 10 e^{2ξ} + 1) / (4 (e^{2ξ} - 1)²)``, defined for ξ > 0."""
    if np.any(jets.value(xi) <= 0):
        raise DomainError("the surface is only defined for xi > 0")
    e2 = jets.exp(2.0 * xi)
    return (e2 * e2 + 10.0 * e2 + 1.0) / (4.0 * (e2 - 1.0) ** 2)


def sigma_surface() -> MetricModel:
    """Σ² in ``(x, ξ)``: conformal to the flat half-plane."""
    comp = lambda x, xi: sigma_conformal_factor(xi)
    return MetricModel(
        name="sigma",
        coords=("x", "xi"),
        active=(0, 1),
        components={(0, 0): comp, (1, 1): comp},
        domain=((-INF, INF), (0.0, INF)),
        sample_box=((-4.0, 4.0), (0.01, 10.0)),
    )


# --- two commuting Killing fields ---------------------------------------

@dataclass(frozen=True)
class KillingMetricSpec:
    """Profile functions of the two-Killing normal form.

    Each function takes a jet (or plain value) and must be smooth on
    ``y_interval``; ``p`` and ``omega`` must be positive there.  Parameters
    may be numpy arrays, which evaluates a whole family at once.
    """

    p: Univariate
    q: Univariate
    omega: Univariate
    tau: Univariate
    potential: Univariate
    y_interval: tuple[float, float] = (0.0, INF)
    name: str = "killing"


def appendix_metric(s: KillingMetricSpec) -> MetricModel:
    def shift(x, y):
        return s.q(y) - s.tau(x)

    def g_tt(x, y):
        return y * y

    def g_tx(x, y):
        return y * y * shift(x, y)

    def g_xx(x, y):
        a = shift(x, y)
        return y * y * a * a + s.p(y) ** 2

    def g_yy(x, y):
        return s.omega(y) ** 2

    lo, hi = s.y_interval
    return MetricModel(
        name=s.name,
        coords=("t", "x", "y"),
        active=(1, 2),
        components={(0, 0): g_tt, (0, 1): g_tx, (1, 1): g_xx, (2, 2): g_yy},
        domain=((-INF, INF), (lo, hi)),
        potential=lambda x, y: s.potential(y),
        sample_box=((-3.0, 3.0), (max(lo, 0.5), min(hi, 3.0))),
    )


@dataclass
class AppendixHessian:
    f11: np.ndarray
    f12: np.ndarray
    f22: np.ndarray
    f33: np.ndarray
    det2: np.ndarray
    D: np.ndarray
    k12: np.ndarray
    wedge2: np.ndarray


def _univariate_jet(fn: Univariate, y: np.ndarray) -> jets.Jet2:
    return jets.as_jet(fn(jets.seed_variable(1, y, 2)), 2) + np.zeros_like(y)


def appendix_hessian_closed(s: KillingMetricSpec, p: Sequence) -> AppendixHessian:
    """Closed-form Hessian of ``f(y)`` and the ``(∂t, ∂x)`` curvature data at ``p = (t, x, y)``."""
    x = np.asarray(p[1], dtype=float)
    y = np.asarray(p[2], dtype=float)
    lo, hi = s.y_interval
    if not np.all((y > max(lo, 0.0)) & (y < hi)):
        raise DomainError("y outside the admissible interval (y > 0 required)")
    x, y = np.broadcast_arrays(x, y)
    P, Q, Om, F = (_univariate_jet(fn, y) for fn in (s.p, s.q, s.omega, s.potential))
    tau = jets.value(s.tau(x)) + np.zeros_like(x)
    p_, dp = P.val, P.d1
    q, dq = Q.val, Q.d1
    om, dom = Om.val, Om.d1
    df, ddf = F.d1, F.d11
    om2 = om * om
    f11 = y * df / om2
    f12 = y * df / (2 * om2) * (2 * q - 2 * tau + y * dq)
    f22 = df / om2 * (y * tau**2 - (y * y * dq + 2 * y * q) * tau + y * q * q + y * y * q * dq + p_ * dp)
    f33 = ddf - df * dom / om
    D = y**4 * dq**2 - 4 * y * p_ * dp
    g_tt = y * y
    g_tx = y * y * (q - tau)
    g_xx = y * y * (q - tau) ** 2 + p_ * p_
    wedge2 = g_tt * g_xx - g_tx**2
    return AppendixHessian(f11, f12, f22, f33, f11 * f22 - f12**2, D, D / (4 * om2 * wedge2), wedge2)


def rigidity_obstruction(s: KillingMetricSpec, p: Sequence) -> np.ndarray:
    """``det2 · k12``: never positive, so a positive definite Hessian forces ``K(∂t, ∂x) ≤ 0``."""
    h = appendix_hessian_closed(s, p)
    return h.det2 * h.k12


def warped_spec() -> KillingMetricSpec:
    """``p = y, q = 0, Ω = 1, tau = 0, f = y``: the metric ``y²dt² + y²dx² + dy²``."""
    zero = lambda s: 0.0 * s
    return KillingMetricSpec(p=lambda y: y, q=zero, omega=lambda y: 1.0 + 0.0 * y,
                             tau=zero, potential=lambda y: y, name="warped")


def demo_spec() -> KillingMetricSpec:
    return KillingMetricSpec(p=jets.cosh, q=lambda y: y * y, omega=lambda y: 1.0 + 0.0 * y,
                             tau=jets.sin, potential=lambda y: y * y, name="appendix-demo")


FIXTURES: dict[str, Callable[[], MetricModel]] = {
    "cigar2d": cigar2d,
    "cigar3d": cigar3d,
    "sigma": sigma_surface,
    "appendix-demo": lambda: appendix_metric(demo_spec()),
}


def fixture(name: str) -> MetricModel:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {sorted(FIXTURES)}") from None
