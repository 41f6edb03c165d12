import numpy as np
import pytest

from singell import (CoefficientField, GridFunction, MeasureData, assemble,
                     make_uniform_grid, solve_linear, solve_measure)


def torsion_square_exact(x, y, terms=60):
    """Series solution of -lap u = 1 on the unit square, zero boundary."""
    u = np.zeros_like(x)
    for k in range(1, 2 * terms, 2):
        kp = k * np.pi
        u += (4.0 / (kp ** 3)
              * (1.0 - np.cosh(kp * (y - 0.5)) / np.cosh(kp / 2.0))
              * np.sin(kp * x))
    return u


class TestAssembly:
    def test_1d_laplacian_row(self):
        g = make_uniform_grid(-2.0, 2.0, 8)   # h = 0.5
        op = assemble(g, CoefficientField.identity(g))
        dense = op.matrix.toarray()
        assert np.allclose(np.diag(dense), 8.0)
        assert np.allclose(np.diag(dense, 1), -4.0)

    def test_2d_five_point_row(self):
        g = make_uniform_grid((0.0, 0.0), (4.0, 4.0), (4, 4))   # h = 1
        op = assemble(g, CoefficientField.identity(g))
        dense = op.matrix.toarray()
        assert np.allclose(np.diag(dense), 4.0)
        center = op.grid.interior_shape[1] + 1   # node (2,2)
        row = dense[center]
        assert np.isclose(row[center], 4.0)
        assert np.count_nonzero(np.isclose(row, -1.0)) == 4

    def test_linearity_in_coefficients(self):
        g = make_uniform_grid((0.0, 0.0), (1.0, 1.0), (6, 6))
        a1 = assemble(g, CoefficientField.identity(g))
        a2 = assemble(g, CoefficientField.constant(g, [[2.0, 0.0], [0.0, 2.0]]))
        assert np.allclose(a2.matrix.toarray(), 2.0 * a1.matrix.toarray())

    def test_symmetry_exact(self, rng):
        g = make_uniform_grid((0.0, 0.0), (1.0, 1.0), (8, 8))
        ent = np.zeros(g.shape + (2, 2))
        ent[..., 0, 0] = 1.0 + rng.random(g.shape)
        ent[..., 1, 1] = 0.5 + rng.random(g.shape)
        op = assemble(g, CoefficientField(g, ent))
        diff = (op.matrix - op.matrix.T).toarray()
        assert np.max(np.abs(diff)) == 0.0

    def test_m_matrix_pattern(self, rng):
        for _ in range(5):
            g = make_uniform_grid(0.0, 1.0, 16)
            ent = (1.0 + rng.random(g.shape))[:, None, None]
            op = assemble(g, CoefficientField(g, ent))
            coo = op.matrix.tocoo()
            off = coo.data[coo.row != coo.col]
            assert np.all(off <= 0.0)
            row_sums = np.asarray(op.matrix.sum(axis=1)).ravel()
            assert np.min(row_sums) >= -1e-12 * np.max(op.matrix.diagonal())

    def test_off_diagonal_coefficients_rejected(self):
        g = make_uniform_grid((0.0, 0.0), (1.0, 1.0), (4, 4))
        field = CoefficientField.constant(g, [[1.0, 0.2], [0.2, 1.0]])
        with pytest.raises(ValueError):
            assemble(g, field)


class TestSolveLinear:
    def test_poisson_interval_exact(self):
        g = make_uniform_grid(-1.0, 1.0, 64)
        op = assemble(g, CoefficientField.identity(g))
        u = solve_linear(op, GridFunction(g, np.ones(g.shape)))
        t = g.axes()[0]
        assert np.max(np.abs(u.values - (1.0 - t ** 2) / 2.0)) <= 1e-8

    def test_zero_rhs(self):
        g = make_uniform_grid(-1.0, 1.0, 32)
        op = assemble(g, CoefficientField.identity(g))
        u = solve_linear(op, GridFunction.zeros(g))
        assert u.sup_norm() == 0.0

    def test_nonnegative_rhs_gives_nonnegative_solution(self, rng):
        g = make_uniform_grid(-1.0, 1.0, 64)
        op = assemble(g, CoefficientField.identity(g))
        for _ in range(5):
            rhs = GridFunction(g, rng.random(g.shape))
            u = solve_linear(op, rhs)
            assert np.min(u.values) >= 0.0

    def test_comparison_principle(self, rng):
        g = make_uniform_grid(-1.0, 1.0, 48)
        op = assemble(g, CoefficientField.identity(g))
        for _ in range(5):
            r1 = rng.random(g.shape)
            r2 = r1 + rng.random(g.shape)
            u1 = solve_linear(op, GridFunction(g, r1))
            u2 = solve_linear(op, GridFunction(g, r2))
            assert np.all(u1.values <= u2.values + 1e-10)

    def test_cg_path_matches_direct(self, rng, monkeypatch):
        import singell.operators as ops
        g = make_uniform_grid((0.0, 0.0), (1.0, 1.0), (24, 24))
        op = assemble(g, CoefficientField.identity(g))
        rhs = GridFunction(g, rng.random(g.shape))
        direct = solve_linear(op, rhs)
        monkeypatch.setattr(ops, "DIRECT_SOLVE_LIMIT", 10)
        iterative = solve_linear(op, rhs)
        assert np.max(np.abs(direct.values - iterative.values)) <= 1e-9

    def test_second_order_refinement_2d(self):
        errors = {}
        for cells in (8, 16, 32):
            g = make_uniform_grid((0.0, 0.0), (1.0, 1.0), (cells, cells))
            op = assemble(g, CoefficientField.identity(g))
            u = solve_linear(op, GridFunction(g, np.ones(g.shape)))
            x, y = g.meshes()
            errors[cells] = np.max(np.abs(u.values - torsion_square_exact(x, y)))
        assert errors[8] / errors[16] >= 3.5
        assert errors[16] / errors[32] >= 3.5


class TestSolveMeasure:
    def test_two_unit_masses_hat(self):
        g = make_uniform_grid(-2.0, 2.0, 64)
        op = assemble(g, CoefficientField.identity(g))
        mu = MeasureData.from_pairs([(-1.0, 1.0), (1.0, 1.0)])
        u = solve_measure(op, mu)
        t = g.axes()[0]
        hat = np.where(np.abs(t) <= 1.0, 1.0, 2.0 - np.abs(t))
        assert np.max(np.abs(u.values - hat)) <= 1e-10

    def test_single_mass_tent(self):
        g = make_uniform_grid(-1.0, 1.0, 64)
        op = assemble(g, CoefficientField.identity(g))
        u = solve_measure(op, MeasureData.from_pairs([(0.0, 1.0)]))
        t = g.axes()[0]
        assert np.max(np.abs(u.values - (1.0 - np.abs(t)) / 2.0)) <= 1e-10

    def test_empty_measure(self):
        g = make_uniform_grid(-1.0, 1.0, 16)
        op = assemble(g, CoefficientField.identity(g))
        assert solve_measure(op, MeasureData(())).sup_norm() == 0.0

    def test_boundary_location_rejected(self):
        g = make_uniform_grid(-1.0, 1.0, 16)
        op = assemble(g, CoefficientField.identity(g))
        for loc in (-1.0, 1.0, 1.5):
            with pytest.raises(ValueError):
                solve_measure(op, MeasureData.from_pairs([(loc, 1.0)]))

    def test_2d_point_source(self):
        g = make_uniform_grid((0.0, 0.0), (1.0, 1.0), (16, 16))
        op = assemble(g, CoefficientField.identity(g))
        u = solve_measure(op, MeasureData.from_pairs([((0.5, 0.5), 1.0)]))
        assert np.min(u.values) >= 0.0
        assert 0.0 < u.sup_norm() < 10.0
