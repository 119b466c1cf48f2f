import numpy as np
import pytest

from gsqg.basis import (
    QuadratureGrid,
    SpectralField,
    analyze,
    boundary_distance,
    build_rectangle_basis,
    embed,
    gradient,
    perp_gradient,
    restrict,
    synthesize,
)

PI = np.pi


def test_mode_ordering_eigenvalue_ascending():
    basis = build_rectangle_basis(5)
    lam = basis.eigenvalues
    assert np.all(np.diff(lam) >= 0)
    # lexicographic tie break at equal eigenvalue
    for a, b in zip(basis.modes, basis.modes[1:]):
        la, lb = a.j**2 + a.k**2, b.j**2 + b.k**2
        assert (la, a.j, a.k) < (lb, b.j, b.k)


def test_known_eigenvalues():
    basis = build_rectangle_basis(4)
    m0 = basis.modes[0]
    assert (m0.j, m0.k) == (1, 1)
    assert basis.eigenvalues[0] == 2
    # (1,4) with lambda=17 precedes (3,3) with lambda=18
    pairs = [(m.j, m.k) for m in basis.modes]
    assert pairs.index((1, 4)) < pairs.index((3, 3))


def test_orthonormality_by_quadrature():
    basis = build_rectangle_basis(4)
    grid = QuadratureGrid(3 * basis.K)
    vals = np.stack(
        [
            synthesize(SpectralField(basis, np.eye(basis.size)[i]), grid).values
            for i in range(basis.size)
        ]
    )
    gram = grid.weight * np.einsum("ixy,jxy->ij", vals, vals)
    assert np.abs(gram - np.eye(basis.size)).max() < 1e-12


def test_analyze_synthesize_roundtrip():
    basis = build_rectangle_basis(6)
    rng = np.random.default_rng(0)
    f = SpectralField(basis, rng.standard_normal(basis.size))
    grid = QuadratureGrid(2 * basis.K)
    back = analyze(synthesize(f, grid), basis)
    assert np.abs(back.coeffs - f.coeffs).max() < 1e-12


def test_quadrature_exactness_threshold():
    basis = build_rectangle_basis(6)
    f = SpectralField(basis, np.eye(basis.size)[basis.size - 1])
    fine = analyze(synthesize(f, QuadratureGrid(2 * basis.K)), basis)
    assert np.abs(fine.coeffs - f.coeffs).max() < 1e-12
    # grids unable to carry the band are rejected outright
    with pytest.raises(ValueError, match="too coarse"):
        synthesize(f, QuadratureGrid(basis.K - 1))


def test_gradient_matches_analytic():
    basis = build_rectangle_basis(3)
    grid = QuadratureGrid(16)
    j, k = 2, 3
    idx = [i for i, m in enumerate(basis.modes) if (m.j, m.k) == (j, k)][0]
    f = SpectralField(basis, np.eye(basis.size)[idx])
    g = gradient(f, grid)
    X, Y = grid.meshgrid()
    gx = (2.0 / PI) * j * np.cos(j * X) * np.sin(k * Y)
    gy = (2.0 / PI) * k * np.sin(j * X) * np.cos(k * Y)
    assert np.abs(g.values[0] - gx).max() < 1e-12
    assert np.abs(g.values[1] - gy).max() < 1e-12


def test_perp_gradient_orthogonal_to_gradient():
    basis = build_rectangle_basis(4)
    grid = QuadratureGrid(20)
    rng = np.random.default_rng(1)
    f = SpectralField(basis, rng.standard_normal(basis.size))
    g = gradient(f, grid).values
    gp = perp_gradient(f, grid).values
    assert np.abs(g[0] * gp[0] + g[1] * gp[1]).max() < 1e-12


def test_embed_restrict_by_mode_identity():
    small = build_rectangle_basis(3)
    big = build_rectangle_basis(6)
    rng = np.random.default_rng(2)
    f = SpectralField(small, rng.standard_normal(small.size))
    up = embed(f, big)
    # mode (j,k) keeps its coefficient regardless of ordering shift
    for i, m in enumerate(small.modes):
        i_big = [ii for ii, mb in enumerate(big.modes) if (mb.j, mb.k) == (m.j, m.k)][0]
        assert up.coeffs[i_big] == f.coeffs[i]
    down = restrict(up, small)
    assert np.array_equal(down.coeffs, f.coeffs)


def test_boundary_distance():
    assert boundary_distance((0.1, 1.0)) == pytest.approx(0.1)
    assert boundary_distance((PI / 2, PI - 0.2)) == pytest.approx(0.2)
    assert boundary_distance((PI / 2, PI / 2)) == pytest.approx(PI / 2)


def test_grid_weight():
    grid = QuadratureGrid(7)
    assert grid.weight == pytest.approx((PI / 8) ** 2)
    x = grid.nodes
    assert x[0] == pytest.approx(PI / 8)
    assert x[-1] == pytest.approx(7 * PI / 8)
