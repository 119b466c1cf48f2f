import numpy as np
import pytest
from scipy.integrate import dblquad

from gsqg.basis import QuadratureGrid, SpectralField, build_rectangle_basis
from gsqg.galerkin import (
    BlowUpError,
    GalerkinState,
    GalerkinTensor,
    SimConfig,
    assemble_tensor,
    initial_data,
    nonlinear_term_grid,
    rhs,
    run,
    step,
)

PI = np.pi


@pytest.fixture(scope="module")
def basis():
    return build_rectangle_basis(4)


@pytest.fixture(scope="module")
def tensor(basis):
    return assemble_tensor(basis, 16, 0.5)


def test_tensor_antisymmetry_and_diagonal(tensor):
    dense = tensor.to_dense()
    assert np.abs(dense + dense.transpose(0, 2, 1)).max() < 1e-12
    assert np.abs(np.einsum("jjl->jl", dense)).max() < 1e-12


def test_tensor_assembly_modes_agree(basis):
    ta = assemble_tensor(basis, 16, 0.7, mode="analytic")
    tq = assemble_tensor(basis, 16, 0.7, mode="quadrature")
    assert np.abs(ta.to_dense() - tq.to_dense()).max() < 1e-12


def test_tensor_entry_against_dense_dblquad(basis):
    # j=(1,1), k=(1,2), l=(2,1), alpha=0.5: brute-force adaptive quadrature
    pairs = [(m.j, m.k) for m in basis.modes]
    ji, ki, li = pairs.index((1, 1)), pairs.index((1, 2)), pairs.index((2, 1))
    alpha = 0.5
    t = assemble_tensor(basis, 16, alpha)
    got = t.to_dense()[ji, ki, li]

    c = 2.0 / PI  # normalization of w_jk = (2/pi) sin(jx) sin(ky)

    def w(j, k):
        return lambda x, y: c * np.sin(j * x) * np.sin(k * y)

    def integrand(y, x):
        # perp-grad w_(1,1) . grad w_(1,2) times w_(2,1)
        px = -c * np.sin(x) * np.cos(y)  # -d/dy w11
        py = c * np.cos(x) * np.sin(y)  # d/dx w11
        gx = c * np.cos(x) * np.sin(2 * y)
        gy = 2 * c * np.sin(x) * np.cos(2 * y)
        return (px * gx + py * gy) * w(2, 1)(x, y)

    val, err = dblquad(integrand, 0, PI, 0, PI, epsabs=1e-13)
    expected = 2.0 ** (-alpha / 2.0) * val  # lambda_(1,1) = 2
    assert got == pytest.approx(expected, abs=1e-10)


def test_tensor_rejects_coarse_quadrature(basis):
    with pytest.raises(ValueError, match="exactness"):
        assemble_tensor(basis, 16, 0.5, mode="quadrature",
                        grid=QuadratureGrid(basis.K))


def test_rhs_zero_state(tensor, basis):
    lam = basis.eigenvalues[:16]
    assert np.all(rhs(np.zeros(16), tensor, 0.5, lam) == 0)


def test_rhs_single_mode_pure_decay(tensor, basis):
    lam = basis.eigenvalues[:16]
    th = np.zeros(16)
    th[3] = 2.0
    d = rhs(th, tensor, 0.25, lam)
    expected = np.zeros(16)
    expected[3] = -0.25 * lam[3] * 2.0
    assert np.abs(d - expected).max() < 1e-14


def test_rhs_matches_grid_nonlinearity(basis, tensor):
    # two-mode state: gamma contraction vs direct grid evaluation of
    # the projected advection term
    rng = np.random.default_rng(6)
    th = rng.standard_normal(16)
    coeffs = np.zeros(basis.size)
    coeffs[:16] = th
    grid_version = nonlinear_term_grid(SpectralField(basis, coeffs), 16, 0.5)
    tensor_version = tensor.quadratic(th)
    assert np.abs(grid_version - tensor_version).max() < 1e-12


def test_rhs_dimension_mismatch(tensor, basis):
    with pytest.raises(ValueError, match="does not match"):
        rhs(np.zeros(7), tensor, 0.0, basis.eigenvalues[:16])


def test_step_single_mode_exponential(tensor, basis):
    # viscous decay of one mode is linear: RK4 matches exp to O(dt^5) per step
    lam = basis.eigenvalues[:16]
    th = np.zeros(16)
    th[0] = 1.0
    st = step(GalerkinState(0.0, th), tensor, 1.0, 1e-3, lam)
    exact = np.exp(-lam[0] * 1e-3)
    assert abs(st.coeffs[0] - exact) < 1e-14
    assert np.abs(st.coeffs[1:]).max() == 0.0


def test_step_blowup_detection(tensor, basis):
    lam = basis.eigenvalues[:16]
    th = np.full(16, 1e11)
    with pytest.raises(BlowUpError):
        st = GalerkinState(0.0, th)
        for _ in range(50):
            st = step(st, tensor, 0.0, 1.0, lam)


def test_inviscid_l2_conservation():
    cfg = SimConfig(alpha=0.5, epsilon=0.0, m=16, dt=1e-3, T=0.5,
                    initial="two_mode", stride=50)
    tr = run(cfg)
    l2 = tr.diagnostics["l2_theta"]
    assert np.abs(l2 / l2[0] - 1.0).max() < 1e-8 * cfg.T


def test_hamiltonian_conservation_inviscid():
    cfg = SimConfig(alpha=0.3, epsilon=0.0, m=16, dt=1e-3, T=0.5,
                    initial="random", seed=2, stride=50)
    tr = run(cfg)
    ham = tr.diagnostics["hdot_psi"]
    assert np.abs(ham / ham[0] - 1.0).max() < 1e-8 * cfg.T


def test_nonlinear_orthogonality(tensor):
    rng = np.random.default_rng(8)
    th = rng.standard_normal(16)
    q = tensor.quadratic(th)
    assert abs(np.dot(th, q)) < 1e-12
    # stream-function orthogonality with the lambda^{-alpha/2} weight
    lam = build_rectangle_basis(4).eigenvalues[:16]
    assert abs(np.dot(lam ** (-0.25) * th, q)) < 1e-12


def test_viscous_balance_residuals():
    cfg = SimConfig(alpha=0.5, epsilon=0.01, m=16, dt=1e-3, T=1.0,
                    initial="random", seed=3, stride=100)
    tr = run(cfg)
    assert np.abs(tr.diagnostics["energy_residual"]).max() < 1e-6
    assert np.abs(tr.diagnostics["hamiltonian_residual"]).max() < 1e-6


def test_steady_single_mode():
    cfg = SimConfig(alpha=0.5, epsilon=0.0, m=16, dt=1e-3, T=0.2,
                    initial="single_mode", stride=10)
    tr = run(cfg)
    assert np.abs(tr.snaps - tr.snaps[0]).max() < 1e-14


def test_config_validation():
    with pytest.raises(ValueError, match="dt"):
        SimConfig(dt=0.0)
    with pytest.raises(ValueError, match="m"):
        SimConfig(m=0)
    with pytest.raises(ValueError, match="alpha"):
        SimConfig(alpha=2.5)
    with pytest.raises(ValueError, match="epsilon"):
        SimConfig(epsilon=-1.0)


def test_alpha_above_one_flagged(capsys):
    SimConfig(alpha=1.5)
    assert "alpha" in capsys.readouterr().err


def test_initial_data_catalog(basis):
    for name in ("single_mode", "two_mode", "random", "random_rough", "bump"):
        cfg = SimConfig(m=16, initial=name, seed=1)
        th = initial_data(cfg, basis)
        assert th.shape == (16,)
        assert np.isfinite(th).all()
    with pytest.raises(ValueError, match="unknown initial"):
        initial_data(SimConfig(m=16, initial="nope"), basis)


def test_initial_data_deterministic(basis):
    cfg = SimConfig(m=16, initial="random", seed=42)
    a = initial_data(cfg, basis)
    b = initial_data(cfg, basis)
    assert np.array_equal(a, b)


def test_tensor_save_load_roundtrip(tensor, tmp_path):
    path = tmp_path / "t.npz"
    tensor.save(path)
    back = GalerkinTensor.load(path)
    assert back.m == tensor.m and back.alpha == tensor.alpha
    assert np.array_equal(back.vals, tensor.vals)
    assert np.array_equal(back.l, tensor.l)
