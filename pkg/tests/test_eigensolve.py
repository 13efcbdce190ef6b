import numpy as np
import pytest

from cigardeform import _cg_python, _kernels
from cigardeform import eigensolve as es
from cigardeform.errors import NonConvergenceError

try:
    from cigardeform import _cg_kernel
except ImportError:  # extension not built
    _cg_kernel = None

KERNELS = [_cg_python] + ([_cg_kernel] if _cg_kernel is not None else [])
kernel_ids = [k.KERNEL for k in KERNELS]


@pytest.fixture
def small():
    return es.HalfStripGrid(2.0, 1.0, 0.125)


def test_grid_geometry():
    g = es.HalfStripGrid(6.0, 4.0, 0.05)
    assert (g.n_xi, g.n_x) == (120, 160)
    assert g.shape == (161, 121)
    assert g.xi[0] == 0.0 and g.xi[-1] == pytest.approx(6.0)
    assert g.x[0] == -4.0 and g.x[-1] == pytest.approx(4.0)
    XI, X = g.mesh()
    assert XI.shape == X.shape == g.shape
    assert np.all(XI[0] == g.xi) and np.all(X[:, 0] == g.x)


@pytest.mark.parametrize("args", [(6.0, 4.0, 0.07), (1.0, 1.0, 0.25), (-1.0, 4.0, 0.05), (6.0, 4.0, 0.0)])
def test_grid_rejects_bad_parameters(args):
    with pytest.raises(ValueError):
        es.HalfStripGrid(*args)


def test_grid_field_validation(small):
    with pytest.raises(ValueError):
        es.GridField(np.zeros((3, 3)), small)
    bad = np.zeros(small.shape)
    bad[2, 2] = np.nan
    with pytest.raises(ValueError):
        es.GridField(bad, small)


def test_solver_config_validation(small):
    with pytest.raises(ValueError):
        es.SolverConfig(linear_tol=1e-3)
    with pytest.raises(ValueError):
        es.SolverConfig(method="jacobi")
    assert es.SolverConfig().iteration_budget(small) == 50 * (small.n_xi + small.n_x)
    assert es.SolverConfig(max_iter=7).iteration_budget(small) == 7


def test_operator_is_a_symmetric_m_matrix(small):
    op = es.assemble(small)
    A = op.matrix.toarray()
    np.testing.assert_array_equal(A, A.T)
    off = A - np.diag(np.diag(A))
    assert np.all(off <= 0)
    assert np.all(np.diag(A) > 0)
    assert np.all(A.sum(axis=1) >= -1e-12)  # weakly diagonally dominant
    assert np.all(np.linalg.eigvalsh(A) > 0)
    np.testing.assert_allclose(op.scaled_diag, 4 + small.h**2 * op.p_values)


@pytest.mark.parametrize("kernel", KERNELS, ids=kernel_ids)
def test_stencil_matches_assembled_matrix(kernel, small, rng):
    op = es.assemble(small)
    u = rng.standard_normal(op.interior_shape)
    want = (op.matrix @ u.ravel()) * small.h**2
    np.testing.assert_allclose(kernel.apply_stencil(u, op.scaled_diag).ravel(), want, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("kernel", KERNELS, ids=kernel_ids)
def test_cg_energy_error_decreases_monotonically(kernel, small, rng):
    op = es.assemble(small)
    A = op.matrix.toarray() * small.h**2
    b = rng.standard_normal(op.interior_shape)
    exact = np.linalg.solve(A, b.ravel())
    energies = []
    for k in range(1, 100):
        x, it, _, _ = kernel.cg_stencil(b, op.scaled_diag, 1e-14, k)
        e = x.ravel() - exact
        energies.append(e @ A @ e)
    assert all(b_ <= a_ * (1 + 1e-12) for a_, b_ in zip(energies, energies[1:]))
    assert energies[-1] < 1e-18 * energies[0]


def test_kernels_agree_and_are_deterministic(rng):
    grid = es.HalfStripGrid(3.0, 2.0, 0.05)
    op = es.assemble(grid)
    b = rng.standard_normal(op.interior_shape)
    runs = [k.cg_stencil(b, op.scaled_diag, 1e-12, 5000) for k in KERNELS]
    for x, it, rel, ok in runs:
        assert ok and rel <= 1e-12
    for k in KERNELS:
        again = k.cg_stencil(b, op.scaled_diag, 1e-12, 5000)
        assert np.array_equal(again[0], k.cg_stencil(b, op.scaled_diag, 1e-12, 5000)[0])
    ref = runs[0][0]
    for x, *_ in runs[1:]:
        assert np.abs(x - ref).max() <= 1e-10 * np.abs(ref).max()


def test_selected_kernel_is_reported(small):
    _, info = es.solve_dirichlet(small, es.w0_boundary(small))
    assert info.kernel == _kernels.KERNEL
    assert info.method == "cg" and info.iterations > 0 and info.relative_residual <= 1e-10


def test_cg_and_direct_agree():
    g = es.HalfStripGrid(2.5, 1.25, 0.05)
    bc = es.w0_boundary(g)
    Wc, _ = es.solve_dirichlet(g, bc, es.SolverConfig(method="cg", linear_tol=1e-12))
    Wd, info = es.solve_dirichlet(g, bc, es.SolverConfig(method="direct"))
    assert info.method == "direct" and info.relative_residual < 1e-12
    assert np.abs(Wc.values - Wd.values).max() <= 1e-9 * np.abs(Wd.values).max()


def test_zero_data_gives_zero(small):
    W, info = es.solve_dirichlet(small, es.GridField(np.zeros(small.shape), small))
    assert np.all(W.values == 0.0)
    assert info.iterations == 0


@pytest.mark.parametrize("method", es.METHODS)
def test_discrete_maximum_principle(method, rng):
    g = es.HalfStripGrid(2.0, 1.5, 0.1)
    for _ in range(3):
        data = np.where(es.GridField(np.zeros(g.shape), g).boundary_mask(), rng.uniform(0, 1, g.shape), 0.0)
        W, _ = es.solve_dirichlet(g, es.GridField(data, g), es.SolverConfig(method=method, linear_tol=1e-12))
        scale = data.max()
        assert W.values[1:-1, 1:-1].min() >= -1e-12 * scale
        assert W.values[1:-1, 1:-1].max() <= scale * (1 + 1e-12)


def test_boundary_values_are_kept(small, rng):
    data = rng.uniform(0, 1, small.shape)
    data[:, 0] = 0.0
    W, _ = es.solve_dirichlet(small, es.GridField(data, small))
    mask = W.boundary_mask()
    np.testing.assert_array_equal(W.values[mask], data[mask])


def test_budget_exhaustion_raises(small):
    with pytest.raises(NonConvergenceError) as err:
        es.solve_dirichlet(small, es.w0_boundary(small), es.SolverConfig(max_iter=3))
    assert err.value.iterations == 3 and err.value.residual > 1e-10


def test_wall_condition_is_enforced(small):
    data = es.w0_exact(small).values + 1.0
    with pytest.raises(ValueError):
        es.solve_dirichlet(small, es.GridField(data, small), zero_wall=True)


def test_convergence_is_second_order_on_coarse_grids():
    rows = es.convergence_study([0.2, 0.1, 0.05], xi_max=4.0, x_max=2.0)
    assert rows[0].observed_order is None
    for row in rows[1:]:
        assert 1.7 <= row.observed_order <= 2.3
    assert rows[-1].relative_error < 1e-3
    with pytest.raises(ValueError):
        es.convergence_study([0.05, 0.1])


def test_solution_positive_and_slack_positive_for_w0_data():
    g = es.HalfStripGrid(6.0, 4.0, 0.1)
    W, _ = es.solve_dirichlet(g, es.w0_boundary(g), zero_wall=True)
    assert np.all(W.values[:, 1:] > 0)
    probe = es.slack_probe(W)
    assert probe.min_slack > 0
    assert probe.slack.shape == (g.n_x + 1, g.n_xi - 1)


def test_perturbation_experiment_boundary_handling():
    g = es.HalfStripGrid(3.0, 2.0, 0.1)
    literal = es.perturbation_experiment(g, amplitude=0.5)
    walled = es.perturbation_experiment(g, amplitude=0.5, keep_wall=True)
    np.testing.assert_allclose(literal.solution.values[:, 0], 0.5 * np.cos(np.pi * g.x / 4), atol=1e-15)
    assert np.all(walled.solution.values[:, 0] == 0.0)
    for res in (literal, walled):
        assert np.isfinite(res.probe.min_slack)
        j, i = res.probe.argmin
        assert res.probe.location == (g.xi[i], g.x[j])


def test_fallback_kernel_selected_without_extension(monkeypatch):
    import importlib
    import sys

    monkeypatch.setitem(sys.modules, "cigardeform._cg_kernel", None)  # makes the import fail
    mod = importlib.reload(_kernels)
    try:
        assert mod.KERNEL == "python"
        assert mod.cg_stencil is _cg_python.cg_stencil
    finally:
        monkeypatch.undo()
        importlib.reload(_kernels)


def test_first_interior_potential_near_the_wall():
    op = es.assemble(es.HalfStripGrid(2.0, 1.0, 0.1))
    assert op.p_values[0] == pytest.approx(3 / (4 * 0.01), rel=0.05)  # P ~ 3/(4ξ²)
    assert np.all(op.p_values > 0)
