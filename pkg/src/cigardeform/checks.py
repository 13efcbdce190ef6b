"""Registry of verification checks grouped into suites.

Every check draws its random fixtures from a generator seeded by
``(seed, crc32(check id))``, so a check's outcome does not depend on which
other checks run.  A check measures absolute residuals and residuals relative
to ``1 + |largest additive term|`` and passes when the maximum relative
residual is within its tolerance (times the global ``tol_scale``).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
import scipy.sparse as sp

from . import eigensolve as es
from . import fixtures as fx
from . import geometry as ge
from . import jets
from . import liouville as lv
from . import models
from . import variation as va
from .residuals import track_terms

SUITES = ("geometry", "variation", "liouville", "appendix", "solver")


@dataclass
class Measurement:
    samples: int
    abs_residual: np.ndarray
    rel_residual: np.ndarray
    ok: bool = True  # extra pass condition beyond the tolerance (strict inequalities)


@dataclass
class CheckResult:
    id: str
    description: str
    samples: int
    max_abs_residual: float
    max_rel_residual: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {"id": self.id, "description": self.description, "samples": self.samples,
                "max_abs_residual": self.max_abs_residual, "max_rel_residual": self.max_rel_residual,
                "tolerance": self.tolerance, "pass": self.passed}


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    description: str
    tolerance: float
    measure: Callable[[np.random.Generator], Measurement]

    def run(self, seed: int = 42, tol_scale: float = 1.0) -> CheckResult:
        rng = np.random.default_rng([seed, zlib.crc32(self.id.encode())])
        m = self.measure(rng)
        a = float(np.max(np.abs(m.abs_residual)))
        r = float(np.max(np.abs(m.rel_residual)))
        tol = self.tolerance * tol_scale
        passed = bool(np.isfinite(a) and np.isfinite(r) and r <= tol and m.ok)
        return CheckResult(self.id, self.description, m.samples, a, r, tol, passed)


REGISTRY: dict[str, Check] = {}


def check(id: str, suite: str, tolerance: float, description: str):
    def deco(fn):
        REGISTRY[id] = Check(id, suite, description, tolerance, fn)
        return fn
    return deco


def checks_for(suite: str) -> list[Check]:
    if suite == "all":
        return sorted(REGISTRY.values(), key=lambda c: c.id)
    if suite not in SUITES:
        raise KeyError(suite)
    return sorted((c for c in REGISTRY.values() if c.suite == suite), key=lambda c: c.id)


# --- measurement helpers -------------------------------------------------------

def _a(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(jets.value(x), dtype=float))


def compare(a, b, scale=None, samples: Optional[int] = None) -> Measurement:
    """``|a - b|`` and its value relative to ``1 + scale`` (default ``|b|``)."""
    a, b = np.broadcast_arrays(_a(a), _a(b))
    d = np.abs(a - b)
    s = np.abs(b) if scale is None else np.broadcast_to(_a(scale), d.shape)
    return Measurement(samples if samples is not None else d.size, d, d / (1.0 + s))


def identity(fn: Callable[[], tuple], samples: Optional[int] = None) -> Measurement:
    """Compare two display evaluations, scaling by the largest additive term seen."""
    with track_terms() as sc:
        a, b = fn()
    return compare(a, b, scale=sc.max, samples=samples)


def combine(*ms: Measurement) -> Measurement:
    return Measurement(sum(m.samples for m in ms),
                       np.concatenate([np.ravel(m.abs_residual) for m in ms]),
                       np.concatenate([np.ravel(m.rel_residual) for m in ms]),
                       all(m.ok for m in ms))


def bound(violation, samples: int, ok: bool = True) -> Measurement:
    """Inequality checks: the residual is the amount by which the bound is violated."""
    v = np.maximum(_a(violation), 0.0)
    return Measurement(samples, v, v, ok)


def _unit_A(rng, n):
    return fx.random_A_x(rng, n)


# --- jets -------------------------------------------------------------------

def _central_slots(f, a, b, h, h3):
    F = lambda i, j, s=h: f(a + i * s, b + j * s)
    G = lambda i, j: F(i, j, h3)
    return {
        "d1": (F(1, 0) - F(-1, 0)) / (2 * h),
        "d2": (F(0, 1) - F(0, -1)) / (2 * h),
        "d11": (F(1, 0) - 2 * F(0, 0) + F(-1, 0)) / h**2,
        "d22": (F(0, 1) - 2 * F(0, 0) + F(0, -1)) / h**2,
        "d12": (F(1, 1) - F(1, -1) - F(-1, 1) + F(-1, -1)) / (4 * h * h),
        "d111": (G(2, 0) - 2 * G(1, 0) + 2 * G(-1, 0) - G(-2, 0)) / (2 * h3**3),
        "d222": (G(0, 2) - 2 * G(0, 1) + 2 * G(0, -1) - G(0, -2)) / (2 * h3**3),
        "d112": (G(1, 1) - 2 * G(0, 1) + G(-1, 1) - G(1, -1) + 2 * G(0, -1) - G(-1, -1)) / (2 * h3**3),
        "d122": (G(1, 1) - 2 * G(1, 0) + G(1, -1) - G(-1, 1) + 2 * G(-1, 0) - G(-1, -1)) / (2 * h3**3),
    }


def _fd_slots(f, a, b, h=1e-4, h3=1e-3):
    """Central finite differences of ``f`` for the ten jet slots.

    Each difference is Richardson-extrapolated from steps ``2h`` and ``h``,
    which removes the ``h²`` truncation term.  Third differences start from
    the wider step ``h3``: at ``1e-4`` their rounding error (about
    ``4 eps |f| / h³``) already reaches 1e-3.
    """
    coarse = _central_slots(f, a, b, 2 * h, 2 * h3)
    fine = _central_slots(f, a, b, h, h3)
    out = {"val": f(a, b)}
    out.update({k: (4.0 * fine[k] - coarse[k]) / 3.0 for k in coarse})
    return out


@check("jets.finite_difference", "geometry", 1.0,
       "jet slots of 200 random compositions match extrapolated central differences: orders 0-2 "
       "(step 1e-4) within 1e-5, order 3 (step 1e-3) within 1e-3 (residuals normalized by those bounds)")
def _jets_fd(rng):
    errs = []
    for _ in range(200):
        f = fx.random_composition(rng)
        a, b = rng.uniform(-1, 1, 2)
        jet = jets.evaluate(f, a, b).slots()
        fd = _fd_slots(f, a, b)
        for k, v in jet.items():
            lim = 1e-3 if len(k) == 4 else 1e-5
            errs.append(abs(float(v) - fd[k]) / max(1.0, abs(float(v))) / lim)
    e = np.array(errs)
    return Measurement(200, e, e)


def _random_jets(rng, n):
    return [jets.Jet2(rng.uniform(-2, 2, size=(10, n))) for _ in range(3)]


@check("jets.ring_axioms", "geometry", 1e-14, "(a+b)c = ac + bc slotwise for random jets")
def _jets_ring(rng):
    a, b, c = _random_jets(rng, 200)
    return compare(((a + b) * c).coeffs, (a * c + b * c).coeffs, scale=np.abs((a * c).coeffs) + np.abs((b * c).coeffs),
                   samples=200)


@check("jets.exp_log", "geometry", 1e-13, "exp(log j) = j slotwise for val in [0.1, 10]")
def _jets_explog(rng):
    c = rng.uniform(-1, 1, size=(10, 200))
    c[0] = rng.uniform(0.1, 10, 200)
    j = jets.Jet2(c)
    return compare(jets.exp(jets.log(j)).coeffs, j.coeffs, samples=200)


# --- geometry -------------------------------------------------------------------

@check("geometry.soliton_equation", "geometry", 1e-10, "cigar3d: max |Ric - Hess f| at 200 points")
def _soliton_eq(rng):
    m = models.cigar3d()
    res = ge.soliton_residual(m, m.sample(rng, 200))
    return Measurement(200, res.eq_residual, res.eq_residual)


@check("geometry.normalization", "geometry", 1e-10, "cigar3d: |Δf + |∇f|² - 1| at 200 points")
def _normalization(rng):
    m = models.cigar3d()
    res = ge.soliton_residual(m, m.sample(rng, 200))
    return Measurement(200, res.bianchi_residual, res.bianchi_residual)


@check("geometry.cigar3d_potential_terms", "geometry", 1e-12, "cigar3d: |∇f|² = r²/4 and Δf = (4-r²)/4")
def _pot_terms(rng):
    m = models.cigar3d()
    p = m.sample(rng, 100)
    r = p[0]
    return combine(compare(ge.gradient_norm2(m, m.potential, p), r * r / 4),
                   compare(ge.laplacian(m, m.potential, p), (4 - r * r) / 4))


@check("geometry.christoffel_oracle", "geometry", 1e-11, "cigar3d Christoffel symbols vs closed forms, 100 points")
def _chris(rng):
    m = models.cigar3d()
    p = m.sample(rng, 100)
    return compare(ge.christoffel(m, p).gamma, m.oracles["christoffel"](p), samples=100)


@check("geometry.riemann_oracle", "geometry", 1e-11, "cigar3d lowered Riemann tensor vs closed form, 100 points")
def _riem(rng):
    m = models.cigar3d()
    p = m.sample(rng, 100)
    return compare(ge.curvature(m, p).riemann, m.oracles["riemann"](p), samples=100)


@check("geometry.cigar3d_values", "geometry", 1e-12,
       "cigar3d at r=1: Γ¹₁₁ = 2/3, Γ¹₃₃ = -9/16, Γ³₁₃ = 1, R₁₃₁₃ = 2/3, K₁₂ = K₂₃ = 0, Hess f₁₁ = 2/3")
def _cigar_values(rng):
    m = models.cigar3d()
    p = (1.0, 0.0, 0.0)
    G = ge.christoffel(m, p).gamma
    c = ge.curvature(m, p)
    H = ge.hessian(m, m.potential, p)
    got = [G[0, 0, 0], G[0, 2, 2], G[2, 0, 2], c.riemann[0, 2, 0, 2], c.sectional[(0, 1)], c.sectional[(1, 2)], H[0, 0]]
    return compare(np.array(got, dtype=float), np.array([2 / 3, -9 / 16, 1, 2 / 3, 0, 0, 2 / 3]), samples=1)


@check("geometry.riemann_symmetries", "geometry", 1e-10,
       "antisymmetry, pair symmetry and first Bianchi identity on every fixture, 100 points each")
def _symm(rng):
    out = []
    for name in sorted(models.FIXTURES):
        m = models.fixture(name)
        R = ge.curvature(m, m.sample(rng, 100)).riemann
        scale = np.abs(R).max(axis=(0, 1, 2, 3))
        for other in (-np.swapaxes(R, 0, 1), -np.swapaxes(R, 2, 3), np.transpose(R, (2, 3, 0, 1, 4))):
            out.append(compare(R, other, scale=scale, samples=100))
        bianchi = R + np.transpose(R, (0, 2, 3, 1, 4)) + np.transpose(R, (0, 3, 1, 2, 4))
        out.append(compare(bianchi, 0.0, scale=scale, samples=0))
    return combine(*out)


@check("geometry.cigar2d_gauss", "geometry", 1e-10, "cigar2d Gauss curvature equals (4 - r²)/8, and is positive")
def _cigar2d(rng):
    m = models.cigar2d()
    p = m.sample(rng, 100)
    K = ge.gauss_curvature(m, p)
    edge = ge.gauss_curvature(m, (np.array([0.05, 1.999]), np.zeros(2)))
    return combine(compare(K, m.oracles["gauss"](p)), compare(edge, [0.4996875, (4 - 1.999**2) / 8]),
                   bound(-K, 0, ok=bool(np.all(K > 0))))


def _sigma_K(xi):
    xi = np.asarray(xi, dtype=float)
    return ge.gauss_curvature(models.sigma_surface(), (np.zeros_like(xi), xi))


@check("geometry.sigma_lower_bound", "geometry", 1e-6,
       "Σ² Gauss curvature grid minimum on ξ ∈ [0.005, 12] lies in [-5/3 - 1e-6, -4/3)")
def _sigma_min(rng):
    K = _sigma_K(np.linspace(0.005, 12, 4000))
    m = K.min()
    return bound(-5 / 3 - m, 4000, ok=bool(m < -4 / 3 and np.all(K < 0)))


@check("geometry.sigma_limits", "geometry", 1.0,
       "Σ² curvature: ξ=0.005 within 2e-2 of -4/3, ξ=12 within 1e-4 of 0, ξ=0.01 and ξ=5 within 0.01 "
       "(residuals normalized by those bounds)")
def _sigma_lim(rng):
    K = _sigma_K([0.005, 12.0, 0.01, 5.0])
    target = np.array([-4 / 3, 0.0, -4 / 3, 0.0])
    lim = np.array([2e-2, 1e-4, 1e-2, 1e-2])
    e = np.abs(K - target) / lim
    return Measurement(4, e, e)


@check("geometry.sigma_conformal_factor", "geometry", 1e-14, "Σ² conformal factor at ξ = log 2 is 19/12")
def _sigma_cf(rng):
    return compare(models.sigma_conformal_factor(np.log(2.0)), 19 / 12, samples=1)


@check("geometry.positive_definite", "geometry", 0.0, "every fixture metric is positive definite at 100 samples")
def _posdef(rng):
    bad = 0
    for name in sorted(models.FIXTURES):
        m = models.fixture(name)
        bad += int(np.sum(~ge.is_positive_definite(m, m.sample(rng, 100))))
    return bound(float(bad), 100 * len(models.FIXTURES))


# --- variation ------------------------------------------------------------------

@check("variation.gauge_h", "variation", 1e-9, "V = A(x)/(4-r²): h11 = 0 and h22 = -2A(x), 20 random A")
def _gauge_h(rng):
    out = []
    for _ in range(20):
        A = _unit_A(rng, 1)
        r, x = fx.sample_rx(rng, 20)
        h11, h22 = va.h_from_V(va.gauge_field(A), (r, x))
        out += [compare(h11, 0.0, samples=20), compare(h22, -2.0 * _a(A(x)), samples=0)]
    return combine(*out)


@check("variation.gauge_E", "variation", 1e-10,
       "V = A(x)/(4-r²) solves E(V) = 0 for affine A (20 random), and E(V) = 16(r²+4)A''(x)/(4-r²) "
       "for 20 random trigonometric A")
def _gauge_E(rng):
    out = []
    for _ in range(20):
        a0, a1 = rng.uniform(-2, 2, 2)
        V = va.gauge_field(lambda t: a0 + a1 * t)
        r, x = fx.sample_rx(rng, 20)
        out.append(identity(lambda: (va.E_of_V(V, (r, x)), 0.0), samples=20))
    for _ in range(20):
        A = _unit_A(rng, 1)
        r, x = fx.sample_rx(rng, 20)
        Axx = va.univariate_jet(A, x, 2).d11
        out.append(identity(lambda: (va.E_of_V(va.gauge_field(A), (r, x)),
                                     16.0 * (r * r + 4.0) * Axx / (4.0 - r * r)), samples=0))
    return combine(*out)


@check("variation.gauge_delta_K", "variation", 1e-9, "V = A(x)/(4-r²): all three δK vanish; 20 random A")
def _gauge_dK(rng):
    out = []
    for _ in range(20):
        V = va.gauge_field(_unit_A(rng, 1))
        r, x = fx.sample_rx(rng, 20)
        with track_terms() as sc:
            ks = va.delta_sectional(V, (r, x))
        for k in ks:
            out.append(compare(k, 0.0, scale=sc.max, samples=20 if k is ks[0] else 0))
    return combine(*out)


@check("variation.E_vlog", "variation", 1e-9,
       "log solution: E(V) = -16√2(4+r²)/(4-r²) on r ∈ [0.05, 1.9], and -80√2/3 at r = 1")
def _E_vlog(rng):
    r = np.concatenate([np.linspace(0.05, 1.9, 100), [1.0]])
    E = va.E_of_V(va.vlog_field(), (r, np.zeros_like(r)))
    return combine(compare(E, va.vlog_E_closed(r)), compare(E[-1], -80 * np.sqrt(2) / 3, samples=0))


@check("variation.B_proportionality", "variation", 1e-9, "E(V) = 16(r²+4)/(4-r²) B((4-r²)V, 0), 100 random V")
def _B_prop(rng):
    V = fx.random_V(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    return identity(lambda: (va.E_of_V(V, (r, x)), 16 * (r * r + 4) / (4 - r * r) * va.B_of(V.v, None, (r, x))))


@check("variation.B_forms", "variation", 1e-10,
       "the B expression in (v, h1, h2) equals its rewritten (v, A) form after substituting h1, h2; 100 fixtures")
def _B_forms(rng):
    v, A = fx.random_v(rng, 100), fx.random_A_r(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    pc = va.PerturbationComponents.from_v_A(v, A)
    return identity(lambda: (va.assemble_Eij(pc, (r, x)).tensors.B, va.B_of(v, A, (r, x))))


@check("variation.assembled_E11_E22", "variation", 1e-8,
       "E11, E22 assembled from the intermediate tensors equal their direct (v, A) forms; 100 fixtures")
def _assembled_11_22(rng):
    v, A = fx.random_v(rng, 100), fx.random_A_r(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    pc = va.PerturbationComponents.from_v_A(v, A)

    def both():
        a = va.assemble_Eij(pc, (r, x))
        e11, e22 = va.direct_E11_E22(v, A, (r, x))
        return np.stack([a.E11, a.E22]), np.stack([e11, e22])

    return identity(both, samples=100)


@check("variation.assembled_E12_E33", "variation", 1e-10,
       "assembled E12, E33 equal their direct (v, h1, h2) forms for arbitrary h1, h2; 100 fixtures")
def _assembled_12_33(rng):
    V1, V2 = fx.random_V(rng, 100), fx.random_V(rng, 100)
    v = fx.random_v(rng, 100)
    pc = va.PerturbationComponents(V1.V, V2.V, v)
    r, x = fx.sample_rx(rng, 100)

    def both():
        a = va.assemble_Eij(pc, (r, x))
        return np.stack([a.E12, a.E33]), np.stack([a.E12_direct, a.E33_direct])

    return identity(both, samples=100)


@check("variation.substitution_closure", "variation", 1e-10,
       "with h1, h2 solved from (v, A), E12 and E33 vanish; 100 fixtures")
def _closure(rng):
    v, A = fx.random_v(rng, 100), fx.random_A_r(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    pc = va.PerturbationComponents.from_v_A(v, A)

    def both():
        a = va.assemble_Eij(pc, (r, x))
        return np.stack([a.E12, a.E33]), 0.0

    return identity(both, samples=100)


@check("variation.gauge_assembled", "variation", 1e-9,
       "perturbation from V = 1/(4-r²) (so v = 1) gives E_ij = 0 for all four components, 50 points")
def _gauge_assembled(rng):
    pc = va.PerturbationComponents.from_V(fx.named_V("gauge"))
    r, x = fx.sample_rx(rng, 50)

    def both():
        a = va.assemble_Eij(pc, (r, x))
        return np.stack([a.E11, a.E12, a.E22, a.E33]), 0.0

    return identity(both, samples=50)


@check("variation.laplacian_contraction", "variation", 1e-10,
       "Δh from contracting the ∇_k∇_k h list equals the closed Δh components; 100 fixtures")
def _lap(rng):
    V1, V2 = fx.random_V(rng, 100), fx.random_V(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    h1 = va.partials(va.field_jet(V1.V, r, x, 2))
    h2 = va.partials(va.field_jet(V2.V, r, x, 2))

    def both():
        a = va.laplacian_h(r, va.nabla_kk_h(r, h1, h2))
        b = va.laplacian_h_display(r, h1, h2)
        return np.stack([a[k] for k in ("11", "22", "33")]), np.stack([b[k] for k in ("11", "22", "33")])

    return identity(both, samples=100)


@check("variation.reduction", "variation", 1e-8,
       "eliminating v_rr via B = 0 turns E11, E22 into the scaled A-ODEs; 100 fixtures")
def _reduction(rng):
    v, A = fx.random_v(rng, 100), fx.random_A_r(rng, 100)
    r, x = fx.sample_rx(rng, 100)

    def both():
        R = va.reduce_by_B(v, A, (r, x))
        return np.stack([R.E11, R.E22]), np.stack([R.ode1_scaled, R.ode2_scaled])

    return identity(both, samples=100)


@check("variation.a_ode", "variation", 1e-12,
       "A = 16/(16-r⁴) solves (16-r⁴)A' - 4r³A = 0, the two A-ODEs differ by -2·that/(r(4-r²)²), A = r² gives 26 at r=1")
def _a_ode(rng):
    r = np.linspace(0.05, 1.9, 50)
    sol = va.a_ode_check(lambda t: 16.0 / (16.0 - t**4), r)
    A = fx.random_A_r(rng, 50)
    with track_terms() as sc:
        c = va.a_ode_check(A, r)
        lhs = c.ode1 - c.ode2
    sq = va.a_ode_check(lambda t: t * t, 1.0)
    return combine(compare(sol.diff, 0.0, scale=1.0),
                   compare(lhs, -2 * c.diff / (r * (4 - r * r) ** 2), scale=sc.max, samples=0),
                   compare(sq.diff, 26.0, samples=0))


# --- liouville -------------------------------------------------------------------

@check("liouville.round_trip", "liouville", 1e-13, "r(ξ(r)) = r on (0, 2); ξ(2/3) = log 2; r(1) = 2(e-1)/(e+1)")
def _round_trip(rng):
    r = rng.uniform(0.0, 1.99, 200)
    return combine(compare(lv.r_of_xi(lv.xi_of_r(r)), r),
                   compare([lv.xi_of_r(2 / 3), lv.r_of_xi(1.0), lv.xi_of_r(0.0)],
                           [np.log(2), 2 * (np.e - 1) / (np.e + 1), 0.0], samples=0))


@check("liouville.coefficients", "liouville", 1e-6,
       "P(log 2) = 19/12, Q(log 2) = -1327/900, P(20) and Q(20) within 1e-6 of 1/4")
def _coeffs(rng):
    l2 = np.log(2.0)
    return compare([lv.P_coeff(l2), lv.Q_coeff(l2), lv.P_coeff(20.0), lv.Q_coeff(20.0)],
                   [19 / 12, -1327 / 900, 0.25, 0.25], scale=0.0, samples=4)


@check("liouville.multiplier_forms", "liouville", 1e-12,
       "the r-form and ξ-form of the Y multiplier agree; Y(gauge) at ξ = log 2 is 1.2/√3")
def _mult(rng):
    r = rng.uniform(0.05, 1.9, 100)
    y = lv.Y_from_V(fx.named_V("gauge"))(np.log(2.0), 0.0)
    return combine(compare(lv.multiplier_xi(lv.xi_of_r(r)), lv.multiplier_r(r)),
                   compare(y, 1.2 / np.sqrt(3.0), samples=0))


@check("liouville.transform_proportionality", "liouville", 1e-9,
       "Y_ξξ + Y_xx - QY = λ(r) E(V) with λ = (4-r²)√(r(4-r²))/(8(4+r²)²); 100 random V")
def _transform(rng):
    V = fx.random_V(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    return identity(lambda: (lv.Y_residual(lv.Y_from_V(V), (lv.xi_of_r(r), x)),
                             lv.transform_factor(r) * va.E_of_V(V, (r, x))))


@check("liouville.gauge_Y_W", "liouville", 1e-9,
       "V = 1/(4-r²): Y solves its equation and W = 0 (W in both forms)")
def _gauge_YW(rng):
    V = fx.named_V("gauge")
    r, x = fx.sample_rx(rng, 50)
    xi = lv.xi_of_r(r)
    return combine(identity(lambda: (lv.Y_residual(lv.Y_from_V(V), (xi, x)), 0.0)),
                   identity(lambda: (lv.W_from_Y(lv.Y_from_V(V), (xi, x)), 0.0), samples=0),
                   identity(lambda: (lv.W_from_V(V, (r, x)), 0.0), samples=0))


@check("liouville.W_forms", "liouville", 1e-10, "W from Y equals W from (r, V); 100 random V")
def _W_forms(rng):
    V = fx.random_V(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    return identity(lambda: (lv.W_from_Y(lv.Y_from_V(V), (lv.xi_of_r(r), x)), lv.W_from_V(V, (r, x))))


@check("liouville.W_vlog", "liouville", 1e-10, "log solution: W = √2 r^{3/2}/√(4-r²)")
def _W_vlog(rng):
    r, x = fx.sample_rx(rng, 100)
    return identity(lambda: (lv.W_from_V(va.vlog_field(), (r, x)), lv.w0_in_r(r)))


@check("liouville.dK12_factorization", "liouville", 1e-10,
       "ξ-form δK12 equals 2√2 e^{3ξ/2}/(e^{2ξ}-1)^{3/2} times W; 100 random V")
def _dk12(rng):
    V = fx.random_V(rng, 100)
    r, x = fx.sample_rx(rng, 100)
    xi = lv.xi_of_r(r)
    Y = lv.Y_from_V(V)
    pre = 2 * np.sqrt(2) * np.exp(1.5 * xi) / np.expm1(2 * xi) ** 1.5
    return identity(lambda: (lv.delta_sectional_xi(Y, (xi, x)).dK12, pre * lv.W_from_Y(Y, (xi, x))))


@check("liouville.delta_K_coordinates", "liouville", 1e-9,
       "δK12, δK23, δK13 agree between the (r, V) and (ξ, Y) expressions; 100 random V")
def _dk_coords(rng):
    V = fx.random_V(rng, 100)
    r, x = fx.sample_rx(rng, 100)

    def both():
        a = va.delta_sectional(V, (r, x))
        b = lv.delta_sectional_xi(lv.Y_from_V(V), (lv.xi_of_r(r), x))
        return np.stack(a), np.stack([b.dK12, b.dK23, b.dK13])

    return identity(both, samples=100)


@check("liouville.remark_identity", "liouville", 1e-7,
       "-32(4+r²)²/(√r(4-r²)^{5/2}) L(W) = ∂_r E(V) - 16r/(16-r⁴) E(V); 50 random V plus the log solution")
def _remark(rng):
    V = fx.random_V(rng, 50)
    r, x = fx.sample_rx(rng, 50)

    with track_terms() as sc:
        ri = lv.remark_identity(V, (r, x))
    with track_terms() as sl:
        rl = lv.remark_identity(va.vlog_field(), (r, x))
    return combine(compare(ri.lhs, ri.rhs, scale=sc.max), compare(rl.lhs, rl.rhs, scale=sl.max, samples=0))


@check("liouville.slack_identity", "liouville", 1e-9,
       "slack of W built from V equals e^{-ξ/2}(e^{2ξ}-1)^{1/2} δK23/√2; 100 random V")
def _slack_id(rng):
    V = fx.random_V(rng, 100)
    r, x = fx.sample_rx(rng, 100)

    def both():
        s = lv.inequality_slack(lv.W_field_from_V(V), (lv.xi_of_r(r), x), V)
        return s.slack, s.identity

    return identity(both, samples=100)


@check("liouville.W0_residual", "liouville", 1e-11, "W0 solves W_ξξ + W_xx - PW = 0 on ξ ∈ [0.05, 8]")
def _w0_res(rng):
    xi = np.linspace(0.05, 8, 100)
    return identity(lambda: (lv.W_residual(lv.w0_field, (xi, rng.uniform(-3, 3, 100))), 0.0))


@check("liouville.W0_slack", "liouville", 1e-10,
       "slack(W0) = 2e^ξ/(e^{2ξ}-1) W0 > 0 on ξ ∈ [0.05, 8]")
def _w0_slack(rng):
    xi = np.linspace(0.05, 8, 100)
    s = lv.inequality_slack(lv.w0_field, (xi, np.zeros_like(xi))).slack
    m = compare(s, 2 * np.exp(xi) / np.expm1(2 * xi) * lv.w0_kernel(xi))
    m.ok = bool(np.all(s > 0))
    return m


@check("liouville.W0_closed_forms", "liouville", 1e-13,
       "W0(log 2) = 1/√6 from three closed forms; W0 = √2 r^{3/2}/√(4-r²) on 100 points")
def _w0_forms(rng):
    l2 = np.log(2.0)
    xi = rng.uniform(0.05, 8, 100)
    return combine(compare([lv.w0_kernel(l2), lv.w0_kernel_wall(l2), lv.w0_in_r(2 / 3)], 1 / np.sqrt(6), samples=3),
                   compare(lv.w0_kernel(xi), lv.w0_kernel_wall(xi)),
                   compare(lv.w0_in_r(lv.r_of_xi(xi)), lv.w0_kernel(xi), samples=0))


@check("liouville.W0_asymptotics", "liouville", 1.0,
       "W0(0.01) within 2% of 0.01^{3/2}/√2 and W0(10)/e^5 within 1% of 1 (residuals normalized by those bounds)")
def _w0_asym(rng):
    a = abs(lv.w0_kernel(0.01) / (0.01**1.5 / np.sqrt(2)) - 1) / 0.02
    b = abs(lv.w0_kernel(10.0) / np.exp(5.0) - 1) / 0.01
    e = np.array([a, b])
    return Measurement(2, e, e)


@check("liouville.far_field_slack", "liouville", 1e-3, "W = e^{ξ/2}: |slack| ≤ 1e-3·W at ξ = 10")
def _far_slack(rng):
    W = lambda xi, x: jets.exp(0.5 * xi) + 0.0 * x
    s = lv.inequality_slack(W, (10.0, 0.0)).slack
    v = abs(float(s)) / np.exp(5.0)
    return Measurement(1, np.array([abs(float(s))]), np.array([v]))


@check("liouville.wall_rate", "liouville", 0.05,
       "W from smooth even V vanishes at the wall at least like ξ^{1/2} (exponent between ξ = 1e-3 and 4e-3)")
def _wall(rng):
    V = fx.random_V(rng, 50)
    x = rng.uniform(-3, 3, 50)
    amp = []
    for xi in (1e-3, 4e-3):
        r = np.full(50, lv.r_of_xi(xi))
        amp.append(np.abs(lv.W_from_V(V, (r, x))).max())
    expo = np.log(amp[1] / amp[0]) / np.log(4.0)
    return bound(0.5 - expo, 50)


@check("liouville.endgame", "liouville", 1e-9,
       "W = 0 branch gives h11 = 0, h22 = -2A; the log solution has E(V) = -16√2(4+r²)/(4-r²), never 0")
def _endgame(rng):
    r = np.array([1.0, 0.1, 1.9])
    e = lv.rigidity_endgame(r)
    m = compare(e.contradiction_value, va.vlog_E_closed(r))
    m.ok = e.gauge_pass and bool(np.all(np.abs(e.contradiction_value) >= 16 * np.sqrt(2)))
    return combine(m, compare(e.contradiction_value[1], -16 * np.sqrt(2) * 4.01 / 3.99, samples=0))


# --- appendix ------------------------------------------------------------------

def _killing_sample(rng, n=100):
    s = fx.random_killing_spec(rng, n)
    p = (np.zeros(n), rng.uniform(-3, 3, n), rng.uniform(0.5, 3, n))
    return s, p


@check("appendix.hessian_closed", "appendix", 1e-9,
       "closed-form f11, f12, f22, f33 equal the engine Hessian; 100 random two-Killing specs")
def _app_hess(rng):
    s, p = _killing_sample(rng)
    m = models.appendix_metric(s)
    H = ge.hessian(m, m.potential, p)
    C = models.appendix_hessian_closed(s, p)
    got = np.stack([C.f11, C.f12, C.f22, C.f33])
    ref = np.stack([H[0, 0], H[0, 1], H[1, 1], H[2, 2]])
    return compare(got, ref, scale=np.abs(ref).max(axis=0), samples=100)


@check("appendix.det_identity", "appendix", 1e-10, "f11 f22 - f12² = -f'² D/(4Ω⁴); 100 random specs")
def _app_det(rng):
    s, p = _killing_sample(rng)
    C = models.appendix_hessian_closed(s, p)
    y = p[2]
    F = models._univariate_jet(s.potential, y)
    Om = jets.value(s.omega(y))
    ref = -F.d1**2 * C.D / (4 * Om**4)
    return compare(C.det2, ref, scale=np.abs(C.f11 * C.f22) + C.f12**2)


@check("appendix.k12_engine", "appendix", 1e-9,
       "K(∂t, ∂x) = D/(4Ω² |∂t∧∂x|²) with the Gram determinant matches engine curvature; 100 random specs")
def _app_k12(rng):
    s, p = _killing_sample(rng)
    C = models.appendix_hessian_closed(s, p)
    K = ge.curvature(models.appendix_metric(s), p).sectional[(0, 1)]
    return compare(C.k12, K)


@check("appendix.obstruction_sign", "appendix", 1e-12, "det2·k12 ≤ 0 (never positive); 100 random specs")
def _app_sign(rng):
    s, p = _killing_sample(rng)
    return bound(models.rigidity_obstruction(s, p), 100)


@check("appendix.named_specs", "appendix", 1e-12,
       "warped spec at y=2: f11 = f22 = 2, f12 = 0, det2 = 4, D = -16, k12 = -1/4, det2·k12 = -1, engine K = -1/4; "
       "demo spec: det2·k12 < 0 at y = 2 and positive definite on y ∈ [0.5, 3]")
def _app_named(rng):
    w = models.warped_spec()
    p = (0.0, 0.3, 2.0)
    C = models.appendix_hessian_closed(w, p)
    K = ge.curvature(models.appendix_metric(w), p).sectional[(0, 1)]
    got = [C.f11, C.f22, C.f12, C.det2, C.D, C.k12, models.rigidity_obstruction(w, p), K]
    m = compare(np.array(got, dtype=float), np.array([2, 2, 0, 4, -16, -0.25, -1, -0.25]), samples=1)
    d = models.demo_spec()
    x = rng.uniform(-3, 3, 50)
    m.ok = bool(np.all(models.rigidity_obstruction(d, (np.zeros(50), x, np.full(50, 2.0))) < 0)) and bool(
        np.all(ge.is_positive_definite(models.appendix_metric(d), (np.zeros(50), x, rng.uniform(0.5, 3, 50)))))
    return m


# --- solver -----------------------------------------------------------------------

@check("solver.assembly", "solver", 1e-12,
       "operator is symmetric with off-diagonals ≤ 0, interior rows sum to P(ξ_i), and P(0.1) is within 5% of 75")
def _assembly(rng):
    g = es.HalfStripGrid(2.0, 1.0, 0.1)
    op = es.assemble(g)
    A = op.matrix
    u, v = rng.standard_normal((2, A.shape[0]))
    lhs, rhs = float((A @ u) @ v), float(u @ (A @ v))
    sym = compare(lhs, rhs, scale=abs(lhs), samples=1)
    rows = np.asarray(A.sum(axis=1)).reshape(op.interior_shape)[1:-1, 1:-1]
    rs = compare(rows, np.broadcast_to(op.p_values[1:-1], rows.shape), samples=0)
    off = A - sp.diags(A.diagonal())
    p01 = abs(op.p_values[0] / 75.0 - 1)
    return combine(sym, rs, bound(off.max(), 0, ok=p01 < 0.05))


@check("solver.zero_data", "solver", 1e-14, "zero boundary data gives the zero solution (CG and direct)")
def _zero(rng):
    g = es.HalfStripGrid(2.0, 1.0, 0.1)
    zero = es.GridField(np.zeros(g.shape), g)
    a, _ = es.solve_dirichlet(g, zero)
    b, _ = es.solve_dirichlet(g, zero, es.SolverConfig(method="direct"))
    return combine(compare(a.values, 0.0), compare(b.values, 0.0, samples=0))


@check("solver.maximum_principle", "solver", 1e-12,
       "nonnegative boundary data gives interior minimum ≥ -1e-12·(data scale); 5 random data sets")
def _maxp(rng):
    g = es.HalfStripGrid(3.0, 2.0, 0.1)
    worst = []
    for _ in range(5):
        data = np.where(es.GridField(np.zeros(g.shape), g).boundary_mask(), rng.uniform(0, 1, g.shape), 0.0)
        data[:, 0] *= rng.integers(0, 2)
        W, _ = es.solve_dirichlet(g, es.GridField(data, g), es.SolverConfig(method="direct"))
        worst.append(-W.values.min() / data.max())
    return bound(np.array(worst), 5)


@check("solver.methods_agree", "solver", 1e-8, "CG and direct solutions agree on a 50×50 grid with W0 data")
def _methods(rng):
    g = es.HalfStripGrid(5.0, 2.5, 0.1)
    b = es.w0_boundary(g)
    a, _ = es.solve_dirichlet(g, b, zero_wall=True)
    d, _ = es.solve_dirichlet(g, b, es.SolverConfig(method="direct"), zero_wall=True)
    return compare(a.values, d.values, scale=np.abs(d.values).max(), samples=g.shape[0] * g.shape[1])


@check("solver.manufactured", "solver", 5e-3,
       "W0 data on (6, 4) with h = 0.05: max error for ξ ≥ 0.5 relative to max W0 (tolerance 5e-3)")
def _manufactured(rng):
    row = es.convergence_study([0.05])[0]
    return Measurement(1, np.array([row.max_error]), np.array([row.relative_error]))


@check("solver.convergence_order", "solver", 1.0,
       "observed order between h = 0.05 and 0.025 lies in [1.7, 2.3], errors decreasing along h = 0.1, 0.05, 0.025 "
       "(residual = distance outside the interval, relative to its half-width)")
def _order(rng):
    rows = es.convergence_study([0.1, 0.05, 0.025])
    o = rows[-1].observed_order
    dist = max(0.0, abs(o - 2.0) - 0.3) / 0.3
    dec = all(b.max_error < a.max_error for a, b in zip(rows, rows[1:]))
    return Measurement(3, np.array([dist]), np.array([dist]), ok=dec)


@check("solver.slack_positivity", "solver", 5e-3,
       "discrete slack of the W0-data solution is ≥ -5e-3·max W0 for ξ ≥ 2h")
def _slack_disc(rng):
    g = es.HalfStripGrid(6.0, 4.0, 0.05)
    W, _ = es.solve_dirichlet(g, es.w0_boundary(g), zero_wall=True)
    p = es.slack_probe(W)
    v = max(0.0, -p.min_slack)
    return Measurement(1, np.array([v]), np.array([v / W.values.max()]))


def run_suite(suite: str, seed: int = 42, tol_scale: float = 1.0,
              only: Optional[Iterable[str]] = None) -> list[CheckResult]:
    cs = checks_for(suite)
    if only is not None:
        keep = set(only)
        cs = [c for c in cs if c.id in keep]
    return [c.run(seed, tol_scale) for c in cs]
