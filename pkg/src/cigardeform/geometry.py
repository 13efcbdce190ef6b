"""Tensor calculus for metrics depending on two active coordinates.

Components are supplied as jet-valued fields of the two active coordinates,
so Christoffel symbols come out as jets and their partial derivatives (and
hence the curvature) are exact to rounding; nothing here finite-differences.

Index conventions (0-based internally): Christoffel ``gamma[k, i, j]`` is
``Γ^k_ij``; the lowered Riemann tensor is ``R_ijkl = g(R(∂_i, ∂_j)∂_l, ∂_k)``,
which makes ``R_ijij`` positive on a round sphere and gives the coordinate
plane sectional curvature ``K_ij = R_ijij / (g_ii g_jj - g_ij^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from . import jets
from .errors import DomainError, MissingPotentialError, SingularMetricError
from .jets import Jet2, ScalarField2

Rect = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class MetricModel:
    """A metric ``g_ij(c1, c2)`` on a ``dim``-dimensional chart.

    ``components`` maps upper-triangular index pairs ``(i, j)`` to fields;
    absent pairs are identically zero.  ``active`` names the two coordinates
    the components depend on; the remaining ones are symmetry directions.
    """

    name: str
    coords: tuple[str, ...]
    active: tuple[int, int]
    components: Mapping[tuple[int, int], ScalarField2]
    domain: Rect
    potential: Optional[ScalarField2] = None
    oracles: Mapping[str, Callable] = field(default_factory=dict)
    sample_box: Optional[Rect] = None

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def symmetric_axes(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.dim) if i not in self.active)

    def component(self, i: int, j: int) -> Optional[ScalarField2]:
        return self.components.get((min(i, j), max(i, j)))

    def active_point(self, p: Sequence) -> tuple[np.ndarray, np.ndarray]:
        """Active coordinates of ``p`` after checking the open chart domain."""
        if len(p) != self.dim:
            raise DomainError(f"{self.name}: expected {self.dim} coordinates, got {len(p)}")
        c1, c2 = np.broadcast_arrays(np.asarray(p[self.active[0]], dtype=float),
                                     np.asarray(p[self.active[1]], dtype=float))
        for c, (lo, hi), n in ((c1, self.domain[0], self.active[0]),
                               (c2, self.domain[1], self.active[1])):
            if not np.all((c > lo) & (c < hi)):
                raise DomainError(f"{self.name}: {self.coords[n]} outside ({lo}, {hi})")
        return c1, c2

    def sample(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, ...]:
        """``n`` random points from the default sampling rectangle."""
        box = self.sample_box or self.domain
        pts = [np.zeros(n) for _ in range(self.dim)]
        pts[self.active[0]] = rng.uniform(*box[0], size=n)
        pts[self.active[1]] = rng.uniform(*box[1], size=n)
        return tuple(pts)


@dataclass
class ChristoffelTable:
    gamma: np.ndarray  # (dim, dim, dim, *batch), gamma[k, i, j] = Γ^k_ij


@dataclass
class CurvatureRecord:
    riemann: np.ndarray  # (dim,)*4 + batch, lowered
    ricci: np.ndarray
    scalar: np.ndarray
    sectional: dict[tuple[int, int], np.ndarray]


# --- jet-level machinery; ``None`` stands for an identically zero entry ---

def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _mul(a, b):
    if a is None or b is None:
        return None
    return a * b


def _sub(a, b):
    if b is None:
        return a
    return _add(a, -b)


def _partial(m: MetricModel, j: Optional[Jet2], axis: int) -> Optional[Jet2]:
    if j is None or axis not in m.active:
        return None
    return j.diff(1 if axis == m.active[0] else 2)


def metric_jets(m: MetricModel, p: Sequence, order: int = 3) -> list[list[Optional[Jet2]]]:
    c1, c2 = m.active_point(p)
    u, w = jets.seed_variable(1, c1, order), jets.seed_variable(2, c2, order)
    g: list[list[Optional[Jet2]]] = [[None] * m.dim for _ in range(m.dim)]
    for (i, j), f in m.components.items():
        val = f(u, w)
        gij = val if isinstance(val, Jet2) else jets.Jet2.constant(np.broadcast_to(val, c1.shape), order)
        if gij.shape != c1.shape:
            gij = Jet2(np.broadcast_to(gij.coeffs, gij.coeffs.shape[:1] + c1.shape).copy(), gij.order)
        g[i][j] = g[j][i] = gij
    return g


def _inverse(g: list[list[Optional[Jet2]]]) -> list[list[Optional[Jet2]]]:
    n = len(g)
    if n == 2:
        det = _sub(_mul(g[0][0], g[1][1]), _mul(g[0][1], g[1][0]))
        cof = [[g[1][1], None if g[0][1] is None else -g[0][1]],
               [None if g[1][0] is None else -g[1][0], g[0][0]]]
    elif n == 3:
        def minor(i, j):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            return _sub(_mul(g[r[0]][c[0]], g[r[1]][c[1]]), _mul(g[r[0]][c[1]], g[r[1]][c[0]]))
        cof = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                mij = minor(j, i)  # adjugate is the transposed cofactor matrix
                cof[i][j] = mij if (i + j) % 2 == 0 or mij is None else -mij
        det = None
        for j in range(3):
            det = _add(det, _mul(g[0][j], cof[j][0]))
    else:
        raise ValueError("only 2- and 3-dimensional metrics are supported")
    if det is None or not np.all(np.isfinite(det.val)) or np.any(det.val == 0):
        raise SingularMetricError("metric component matrix is singular")
    inv_det = jets.reciprocal(det)
    return [[_mul(cof[i][j], inv_det) for j in range(n)] for i in range(n)]


def christoffel_jets(m: MetricModel, p: Sequence, order: int = 3):
    """Christoffel symbols as jets (one order below the metric), plus g and g^-1."""
    g = metric_jets(m, p, order)
    gi = _inverse(g)
    n = m.dim
    dg = [[[_partial(m, g[i][j], k) for j in range(n)] for i in range(n)] for k in range(n)]
    gam = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            # first kind: [ij, l] = (d_i g_jl + d_j g_il - d_l g_ij) / 2
            first = [_sub(_add(dg[i][j][l], dg[j][i][l]), dg[l][i][j]) for l in range(n)]
            for k in range(n):
                s = None
                for l in range(n):
                    s = _add(s, _mul(gi[k][l], first[l]))
                s = None if s is None else s * 0.5
                gam[k][i][j] = gam[k][j][i] = s
    return gam, g, gi


def _values(tab, shape, n_idx: int) -> np.ndarray:
    dims = (len(tab),) * n_idx
    out = np.zeros(dims + shape)
    for idx in np.ndindex(*dims):
        e = tab
        for k in idx:
            e = e[k]
        if e is not None:
            out[idx] = e.val
    return out


def _batch_shape(m: MetricModel, p) -> tuple:
    c1, _ = m.active_point(p)
    return c1.shape


def christoffel(m: MetricModel, p: Sequence) -> ChristoffelTable:
    gam, _, _ = christoffel_jets(m, p, order=1)
    return ChristoffelTable(_values(gam, _batch_shape(m, p), 3))


def curvature(m: MetricModel, p: Sequence) -> CurvatureRecord:
    gam, g, gi = christoffel_jets(m, p, order=2)
    shape = _batch_shape(m, p)
    n = m.dim
    G = _values(gam, shape, 3)
    dG = np.zeros((n,) + G.shape)
    for a in m.active:
        for idx in np.ndindex(n, n, n):
            e = gam[idx[0]][idx[1]][idx[2]]
            d = _partial(m, e, a)
            if d is not None:
                dG[(a,) + idx] = d.val
    # R^l_ijk = d_i Γ^l_jk - d_j Γ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik
    quad = np.einsum("lim...,mjk...->lijk...", G, G)
    Rup = (np.einsum("iljk...->lijk...", dG) - np.einsum("jlik...->lijk...", dG)
           + quad - np.einsum("lijk...->ljik...", quad))
    gv = _values(g, shape, 2)
    giv = _values(gi, shape, 2)
    riem = np.einsum("km...,mijl...->ijkl...", gv, Rup)
    ric = np.einsum("iijl...->jl...", Rup)
    scal = np.einsum("jl...,jl...->...", giv, ric)
    sect = {}
    for i in range(n):
        for j in range(i + 1, n):
            sect[(i, j)] = riem[i, j, i, j] / (gv[i, i] * gv[j, j] - gv[i, j] ** 2)
    return CurvatureRecord(riem, ric, scal, sect)


def gauss_curvature(m: MetricModel, p: Sequence) -> np.ndarray:
    if m.dim != 2:
        raise ValueError("Gauss curvature needs a 2-dimensional metric")
    return curvature(m, p).sectional[(0, 1)]


def _gradient_and_second(m: MetricModel, phi: ScalarField2, p: Sequence):
    jet = jets.evaluate(phi, *m.active_point(p), order=2)
    n = m.dim
    shape = jet.shape
    d = np.zeros((n,) + shape)
    dd = np.zeros((n, n) + shape)
    a, b = m.active
    d[a], d[b] = jet.d1, jet.d2
    dd[a, a], dd[b, b] = jet.d11, jet.d22
    dd[a, b] = dd[b, a] = jet.d12
    return d, dd


def hessian(m: MetricModel, phi: ScalarField2, p: Sequence) -> np.ndarray:
    """``∇_i ∇_j φ = ∂_i ∂_j φ - Γ^k_ij ∂_k φ``, shape ``(dim, dim, *batch)``."""
    G = christoffel(m, p).gamma
    d, dd = _gradient_and_second(m, phi, p)
    return dd - np.einsum("kij...,k...->ij...", G, d)


def metric_values(m: MetricModel, p: Sequence) -> tuple[np.ndarray, np.ndarray]:
    g = metric_jets(m, p, order=0)
    gi = _inverse(g)
    shape = _batch_shape(m, p)
    return _values(g, shape, 2), _values(gi, shape, 2)


def gradient_norm2(m: MetricModel, phi: ScalarField2, p: Sequence) -> np.ndarray:
    _, gi = metric_values(m, p)
    d, _ = _gradient_and_second(m, phi, p)
    return np.einsum("ij...,i...,j...->...", gi, d, d)


def laplacian(m: MetricModel, phi: ScalarField2, p: Sequence) -> np.ndarray:
    _, gi = metric_values(m, p)
    return np.einsum("ij...,ij...->...", gi, hessian(m, phi, p))


def is_positive_definite(m: MetricModel, p: Sequence) -> np.ndarray:
    g, _ = metric_values(m, p)
    mats = np.moveaxis(g, (0, 1), (-2, -1))
    return np.linalg.eigvalsh(mats)[..., 0] > 0


@dataclass
class SolitonResidual:
    eq_residual: np.ndarray
    bianchi_residual: np.ndarray


def soliton_residual(m: MetricModel, p: Sequence) -> SolitonResidual:
    """Residuals of ``Ric = ∇²f`` and of the normalization ``Δf + |∇f|² = 1``."""
    if m.potential is None:
        raise MissingPotentialError(f"{m.name} has no potential function")
    ric = curvature(m, p).ricci
    hf = hessian(m, m.potential, p)
    _, gi = metric_values(m, p)
    d, _ = _gradient_and_second(m, m.potential, p)
    lap = np.einsum("ij...,ij...->...", gi, hf)
    grad2 = np.einsum("ij...,i...,j...->...", gi, d, d)
    eq = np.abs(ric - hf).max(axis=(0, 1))
    return SolitonResidual(eq, np.abs(lap + grad2 - 1.0))
