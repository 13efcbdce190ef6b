"""Finite differences for ``W_ξξ + W_xx - P(ξ) W = 0`` on a truncated half-strip.

Nodes sit at ``ξ_i = i h`` and ``x_j = -x_max + j h``.  Field values are
stored as ``values[j, i]`` (x index first), which is also the x-major order
used for interior unknowns and for CSV output.  Dirichlet data is imposed on
all four sides; ``P`` is only evaluated at interior nodes, never at ``ξ = 0``.

The discrete operator is the 5-point ``-Δ_h`` plus the diagonal ``P``: an
SPD M-matrix.  The iterative solver is matrix-free CG (compiled kernel when
available); the direct solver factors the assembled sparse matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels
from .errors import NonConvergenceError
from .liouville import P_coeff, slack_coeff, w0_kernel_wall

METHODS = ("cg", "direct")
REDUCTION_POLICY = "sequential fixed-order inner products (single thread)"


def _steps(length: float, h: float, what: str) -> int:
    n = int(round(length / h))
    if n <= 0 or abs(n * h - length) > 1e-9 * max(length, 1.0):
        raise ValueError(f"{what} = {length} is not an integer multiple of h = {h}")
    return n


@dataclass(frozen=True)
class HalfStripGrid:
    xi_max: float
    x_max: float
    h: float

    def __post_init__(self):
        if not (self.xi_max > 0 and self.x_max > 0 and self.h > 0):
            raise ValueError("xi_max, x_max and h must be positive")
        if self.n_xi < 8 or self.n_x < 8:
            raise ValueError(f"grid too coarse: need at least 8 cells per axis, got {self.n_xi} x {self.n_x}")

    @property
    def n_xi(self) -> int:
        return _steps(self.xi_max, self.h, "xi_max")

    @property
    def n_x(self) -> int:
        return _steps(2.0 * self.x_max, self.h, "2*x_max")

    @property
    def xi(self) -> np.ndarray:
        return self.h * np.arange(self.n_xi + 1)

    @property
    def x(self) -> np.ndarray:
        return -self.x_max + self.h * np.arange(self.n_x + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x + 1, self.n_xi + 1)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(XI, X)`` arrays of node coordinates, each of shape ``self.shape``."""
        X, XI = np.meshgrid(self.x, self.xi, indexing="ij")
        return XI, X


@dataclass
class GridField:
    values: np.ndarray
    grid: HalfStripGrid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values have shape {self.values.shape}, grid needs {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must be finite")

    @classmethod
    def from_function(cls, grid: HalfStripGrid, fn: Callable) -> "GridField":
        XI, X = grid.mesh()
        return cls(fn(XI, X), grid)

    def boundary_mask(self) -> np.ndarray:
        m = np.zeros(self.grid.shape, dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        return m


@dataclass(frozen=True)
class SolverConfig:
    linear_tol: float = 1e-10
    max_iter: Optional[int] = None
    method: str = "cg"

    def __post_init__(self):
        if not (0 < self.linear_tol <= 1e-4):
            raise ValueError("linear_tol must lie in (0, 1e-4]")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")

    def iteration_budget(self, grid: HalfStripGrid) -> int:
        return self.max_iter if self.max_iter is not None else 50 * (grid.n_xi + grid.n_x)


@dataclass
class DiscreteOperator:
    """``-Δ_h + P`` on interior nodes; ``scaled_diag`` is ``4 + h² P(ξ_i)``."""

    matrix: sp.csr_matrix
    p_values: np.ndarray
    scaled_diag: np.ndarray
    interior_shape: tuple[int, int]


def assemble(grid: HalfStripGrid) -> DiscreteOperator:
    nx, nxi = grid.n_x - 1, grid.n_xi - 1
    h2 = grid.h * grid.h
    p = np.asarray(P_coeff(grid.xi[1:-1]))
    T_xi = sp.diags([-np.ones(nxi - 1), 2.0 * np.ones(nxi), -np.ones(nxi - 1)], [-1, 0, 1])
    T_x = sp.diags([-np.ones(nx - 1), 2.0 * np.ones(nx), -np.ones(nx - 1)], [-1, 0, 1])
    lap = sp.kron(sp.identity(nx), T_xi) + sp.kron(T_x, sp.identity(nxi))
    A = (lap / h2 + sp.kron(sp.identity(nx), sp.diags(p))).tocsr()
    return DiscreteOperator(A, p, 4.0 + h2 * p, (nx, nxi))


def _boundary_rhs(values: np.ndarray) -> np.ndarray:
    """Sum of Dirichlet neighbours for every interior node (the scaled RHS)."""
    b = np.zeros((values.shape[0] - 2, values.shape[1] - 2))
    b[:, 0] += values[1:-1, 0]
    b[:, -1] += values[1:-1, -1]
    b[0, :] += values[0, 1:-1]
    b[-1, :] += values[-1, 1:-1]
    return b


@dataclass
class SolveInfo:
    method: str
    iterations: int
    relative_residual: float
    kernel: str


def solve_dirichlet(grid: HalfStripGrid, boundary: GridField, cfg: SolverConfig = SolverConfig(),
                    zero_wall: bool = False) -> tuple[GridField, SolveInfo]:
    """Solve with Dirichlet data taken from the boundary nodes of ``boundary``.

    With ``zero_wall`` the data on the ``ξ = 0`` row must vanish identically.
    Raises :class:`NonConvergenceError` if CG runs out of iterations.
    """
    data = boundary.values
    if zero_wall and np.any(data[:, 0] != 0.0):
        raise ValueError("the xi = 0 row must carry W = 0")
    op = assemble(grid)
    b = _boundary_rhs(data)
    if cfg.method == "cg":
        u, it, rel, ok = _kernels.cg_stencil(b, op.scaled_diag, cfg.linear_tol, cfg.iteration_budget(grid))
        if not ok:
            raise NonConvergenceError("CG did not reach tolerance", it, rel)
        info = SolveInfo("cg", it, rel, _kernels.KERNEL)
    else:
        A = op.matrix * (grid.h * grid.h)
        u = spla.spsolve(A.tocsc(), b.ravel()).reshape(op.interior_shape)
        rel = float(np.linalg.norm(A @ u.ravel() - b.ravel()) / (np.linalg.norm(b) or 1.0))
        info = SolveInfo("direct", 0, rel, "scipy-superlu")
    out = data.copy()
    out[1:-1, 1:-1] = u
    return GridField(out, grid), info


# --- manufactured solution ---------------------------------------------------------

def w0_boundary(grid: HalfStripGrid) -> GridField:
    """W0 on the outer sides, exactly 0 on ``ξ = 0``, zeros inside."""
    exact = GridField.from_function(grid, lambda XI, X: w0_kernel_wall(XI))
    vals = np.where(exact.boundary_mask(), exact.values, 0.0)
    vals[:, 0] = 0.0
    return GridField(vals, grid)


def w0_exact(grid: HalfStripGrid) -> GridField:
    return GridField.from_function(grid, lambda XI, X: w0_kernel_wall(XI))


@dataclass
class ConvergenceRow:
    h: float
    max_error: float
    observed_order: Optional[float]
    relative_error: float


def convergence_study(h_list: Sequence[float], xi_max: float = 6.0, x_max: float = 4.0,
                      cfg: SolverConfig = SolverConfig(), xi_min: float = 0.5) -> list[ConvergenceRow]:
    """Errors against W0 on the coarsest grid's nodes with ``ξ ≥ xi_min``."""
    hs = [float(h) for h in h_list]
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h_list must be strictly decreasing")
    coarse = HalfStripGrid(xi_max, x_max, hs[0])
    rows: list[ConvergenceRow] = []
    for h in hs:
        g = HalfStripGrid(xi_max, x_max, h)
        ratio = _steps(hs[0], h, "coarsest h")
        W, _ = solve_dirichlet(g, w0_boundary(g), cfg, zero_wall=True)
        exact = w0_exact(g).values
        err = np.abs(W.values - exact)[::ratio, ::ratio]
        keep = coarse.xi >= xi_min - 1e-12
        e = float(err[:, keep].max())
        order = None
        if rows:
            prev = rows[-1]
            order = math.log(prev.max_error / e) / math.log(prev.h / h)
        rows.append(ConvergenceRow(h, e, order, e / float(exact.max())))
    return rows


# --- slack --------------------------------------------------------------------

@dataclass
class SlackProbe:
    min_slack: float
    argmin: tuple[int, int]
    location: tuple[float, float]
    slack: np.ndarray = field(repr=False)


def slack_probe(W: GridField) -> SlackProbe:
    """Discrete ``W_ξ - coth(ξ)/2 · W`` with a second-order backward ξ-difference, for ``ξ ≥ 2h``."""
    g = W.grid
    v = W.values
    dxi = (3.0 * v[:, 2:] - 4.0 * v[:, 1:-1] + v[:, :-2]) / (2.0 * g.h)
    s = dxi - np.asarray(slack_coeff(g.xi[2:]))[None, :] * v[:, 2:]
    j, i = np.unravel_index(int(np.argmin(s)), s.shape)
    return SlackProbe(float(s[j, i]), (int(j), int(i) + 2), (float(g.xi[i + 2]), float(g.x[j])), s)


@dataclass
class PerturbationResult:
    probe: SlackProbe
    solution: GridField


def perturbation_experiment(grid: HalfStripGrid, amplitude: float = 0.5,
                            cfg: SolverConfig = SolverConfig(), keep_wall: bool = False) -> PerturbationResult:
    """Solve with data ``W0 + amplitude·e^{ξ/2} cos(πx/(2 x_max))`` and probe the slack.

    By default the data is imposed on all four sides, so the ``ξ = 0`` row
    carries ``amplitude·cos(...)``; with ``keep_wall`` that row stays 0.  This
    is an exploratory experiment: the outcome is recorded, not asserted as a
    consequence of any theorem.
    """
    data = GridField.from_function(
        grid, lambda XI, X: w0_kernel_wall(XI) + amplitude * np.exp(XI / 2) * np.cos(np.pi * X / (2 * grid.x_max)))
    vals = np.where(data.boundary_mask(), data.values, 0.0)
    if keep_wall:
        vals[:, 0] = 0.0
    W, _ = solve_dirichlet(grid, GridField(vals, grid), cfg, zero_wall=keep_wall)
    return PerturbationResult(slack_probe(W), W)
