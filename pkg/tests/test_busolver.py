"""Equivariant zero-finder contracts and frozen solutions."""

import numpy as np
import pytest

from faircut.busolver import (
    JoinPoint,
    OctahedralPoint,
    SolverConfig,
    antipodal_zero,
    join_point_to_octahedral,
    join_zero,
    octahedral_lattice,
    octahedral_to_join_point,
    product_sphere_zero,
    simplex_lattice,
)
from faircut.errors import ContractError, DimensionError, NoZeroFound


def test_octahedral_point_l1_norm():
    OctahedralPoint((0.5, -0.25, 0.25))
    with pytest.raises(ValueError):
        OctahedralPoint((0.5, 0.25))


def test_join_point_equality_ignores_zero_weight_labels():
    a = JoinPoint((0.5, 0.5, 0.0), (0, 1, 0))
    b = JoinPoint((0.5, 0.5, 0.0), (0, 1, 1))
    c = JoinPoint((0.5, 0.5, 0.0), (1, 1, 0))
    assert a == b
    assert a != c


def test_lattices_cover_sphere_and_simplex():
    X = octahedral_lattice(3, 4)
    assert np.allclose(np.abs(X).sum(axis=1), 1.0)
    # canonical half: first nonzero coordinate positive
    first_nz = [x[np.nonzero(x)[0][0]] for x in X]
    assert all(v > 0 for v in first_nz)
    B = simplex_lattice(3, 5)
    assert np.allclose(B.sum(axis=1), 1.0)
    assert (B >= 0).all()


def test_coordinate_map_zero_on_circle():
    # f(x1, x2) = x1 vanishes exactly at (0, +-1)
    sol = antipodal_zero(lambda x: np.array([x[0]]), sphere_dim=1, tol=1e-12)
    x = sol.array
    assert abs(x[0]) <= 1e-12
    assert abs(abs(x[1]) - 1.0) <= 1e-12


def test_linear_map_on_s2_matches_analytic_zero():
    # f = (x1 + 0.3 x2, x2 - 0.1 x3): kernel spanned by (-0.03, 0.1, 1),
    # L1-normalized to (-0.03, 0.1, 1)/1.13.
    expected = np.array([-0.03, 0.1, 1.0]) / 1.13

    def f(x):
        return np.array([x[0] + 0.3 * x[1], x[1] - 0.1 * x[2]])

    sol = antipodal_zero(f, sphere_dim=2, tol=1e-9).array
    residual = np.max(np.abs(f(sol)))
    assert residual <= 1e-9
    gap = min(np.max(np.abs(sol - expected)), np.max(np.abs(sol + expected)))
    assert gap <= 1e-6


def test_dimension_guard():
    # identity on S^1 maps to R^2, not R^1: rejected before searching
    with pytest.raises(DimensionError):
        antipodal_zero(lambda x: np.asarray(x), sphere_dim=1, tol=1e-9)


def test_antipodality_audit_aborts():
    with pytest.raises(ContractError):
        antipodal_zero(lambda x: np.array([x[0] + 0.2]), sphere_dim=1, tol=1e-9)


def test_budget_exhaustion_raises_no_zero_found():
    # a genuine antipodal map, but with an absurdly small budget and coarse
    # single grid the solver must report its best residual rather than lie
    cfg = SolverConfig(grid_levels=(1,), top_k=0, pattern_budget=0,
                       gn_iterations=0)

    def f(x):
        return np.array([x[0] ** 3 + 0.37 * x[1]])

    with pytest.raises(NoZeroFound) as err:
        antipodal_zero(f, sphere_dim=1, tol=1e-15, cfg=cfg)
    assert err.value.best_residual is not None


class _UniformNecklaceMap:
    """Test map of k-thief splits of the uniform measure on [0, 1]."""

    def __init__(self, k, m):
        self.k = k
        self.m = m

    def __call__(self, bary, labels):
        cuts = np.cumsum(bary)[:-1]
        edges = np.concatenate([[0.0], np.clip(cuts, 0, 1), [1.0]])
        parts = np.diff(edges)
        shares = np.zeros(self.k)
        np.add.at(shares, np.asarray(labels), parts)
        return shares - 1.0 / self.k

    def shift(self, residuals):
        return np.roll(residuals, 1)


def test_join_zero_uniform_thirds():
    f = _UniformNecklaceMap(k=3, m=3)
    sol = join_zero(f, m=3, k=3, tol=1e-10, output_shift=f.shift)
    cuts = sorted(np.cumsum(sol.barycentric)[:-1])
    assert cuts[0] == pytest.approx(1 / 3, abs=1e-9)
    assert cuts[1] == pytest.approx(2 / 3, abs=1e-9)
    assert len(set(sol.labels)) == 3


def test_join_zero_uniform_median():
    f = _UniformNecklaceMap(k=2, m=2)
    sol = join_zero(f, m=2, k=2, tol=1e-10, output_shift=f.shift)
    assert np.cumsum(sol.barycentric)[0] == pytest.approx(0.5, abs=1e-9)
    assert sorted(sol.labels) == [0, 1]


def test_join_k2_agrees_with_antipodal_path():
    # same test map run through both engines via the [2]^{*n} = S^{n-1}
    # identification
    f = _UniformNecklaceMap(k=2, m=2)

    def antipodal_form(x):
        jp = octahedral_to_join_point(x)
        return f(np.asarray(jp.barycentric), jp.labels)[:1]

    via_join = join_zero(f, m=2, k=2, tol=1e-10, output_shift=f.shift)
    via_sphere = antipodal_zero(antipodal_form, sphere_dim=1, tol=1e-10)
    jp = octahedral_to_join_point(via_sphere)
    cut_a = np.cumsum(via_join.barycentric)[0]
    cut_b = np.cumsum(jp.barycentric)[0]
    assert cut_a == pytest.approx(cut_b, abs=1e-8)


def test_join_round_trip_octahedral():
    p = JoinPoint((0.25, 0.75), (1, 0))
    x = join_point_to_octahedral(p)
    assert octahedral_to_join_point(x) == p


def test_cyclic_equivariance_audit_aborts():
    class Bad:
        def __call__(self, bary, labels):
            return np.array([bary[0] - 0.3])

    with pytest.raises(ContractError):
        join_zero(Bad(), m=2, k=2, tol=1e-9,
                  output_shift=lambda r: -r)


def test_determinism_same_inputs_same_outputs():
    f = _UniformNecklaceMap(k=3, m=3)
    a = join_zero(f, m=3, k=3, tol=1e-10, output_shift=f.shift)
    b = join_zero(f, m=3, k=3, tol=1e-10, output_shift=f.shift)
    assert a.barycentric == b.barycentric
    assert a.labels == b.labels


def test_product_sphere_zero_two_factors():
    # XOR colouring of the unit square by one vertical and one horizontal
    # line; for product measures the deviation factors as a product of
    # per-factor signed integrals, which is antipodal in each factor.
    def signed_integral(pair, upto=1.0):
        c = abs(pair[0])
        lo_sign = 1.0 if pair[0] >= 0 else -1.0
        hi_sign = 1.0 if pair[1] >= 0 else -1.0
        return lo_sign * min(c, upto) + hi_sign * max(0.0, upto - c)

    def f(x):
        i1 = signed_integral(x[0:2])
        i2 = signed_integral(x[2:4])
        j1 = 2.0 * signed_integral(x[0:2], upto=0.5)
        return 0.5 * np.array([i1 * i2, j1 * i2])

    sol = np.asarray(product_sphere_zero(f, factor_dims=(1, 1), tol=1e-10))
    assert np.max(np.abs(f(sol))) <= 1e-10
