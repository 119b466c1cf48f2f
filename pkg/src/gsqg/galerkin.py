"""Galerkin structure tensor, mode ODE with viscosity, and RK4 trajectories.

The dynamics is the quadratic ODE
    d theta_l / dt + sum_jk gamma_jkl theta_j theta_k + eps lambda_l theta_l = 0
with gamma_jkl = lambda_j^{-alpha/2} int (perp-grad w_j . grad w_k) w_l dx.
The tensor is antisymmetric in (k, l), which makes the inviscid L2 norm an
exact invariant of the ODE; trajectories track the discrete energy and
stream-function (Hamiltonian) balances alongside the state.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .basis import (
    EigenBasis,
    GridField,
    QuadratureGrid,
    SpectralField,
    analyze,
    build_rectangle_basis,
    gradient,
    perp_gradient,
    _sine_matrix,
)

PI = np.pi

#: coefficient magnitude treated as integrator blow-up (the exact ODE cannot
#: leave the initial L2 sphere, so crossings indicate integrator failure)
BLOWUP_THRESHOLD = 1e12


class BlowUpError(RuntimeError):
    """Raised when a trajectory exceeds the blow-up threshold."""

    def __init__(self, t: float, max_coeff: float):
        super().__init__(
            f"integrator blow-up at t={t}: max |coefficient| = {max_coeff:.3e} "
            f"exceeds {BLOWUP_THRESHOLD:.0e}"
        )
        self.t = t
        self.max_coeff = max_coeff


@dataclass
class GalerkinTensor:
    """Sparse structure constants gamma_jkl for the first m modes."""

    m: int
    alpha: float
    j: np.ndarray
    k: np.ndarray
    l: np.ndarray
    vals: np.ndarray
    mode: str
    meta: dict = field(default_factory=dict)

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.m, self.m, self.m))
        dense[self.j, self.k, self.l] = self.vals
        return dense

    def quadratic(self, theta: np.ndarray) -> np.ndarray:
        """(sum_jk gamma_jkl theta_j theta_k)_l, the nonlinear part of the ODE."""
        return np.bincount(
            self.l, weights=self.vals * theta[self.j] * theta[self.k], minlength=self.m
        )

    def save(self, path):
        np.savez(
            path, m=self.m, alpha=self.alpha, mode=self.mode,
            j=self.j, k=self.k, l=self.l, vals=self.vals,
        )

    @classmethod
    def load(cls, path) -> "GalerkinTensor":
        with np.load(path, allow_pickle=False) as z:
            return cls(
                m=int(z["m"]), alpha=float(z["alpha"]),
                j=z["j"], k=z["k"], l=z["l"], vals=z["vals"],
                mode=str(z["mode"]), meta={"source": str(path)},
            )


def _sine_cos_integral(a: int, b: int, c: int) -> float:
    """int_0^pi sin(a x) cos(b x) sin(c x) dx for positive integers."""
    val = 0.0
    if a + b == c:
        val += PI / 4.0
    if abs(a - b) == c and a != b:
        val += math.copysign(PI / 4.0, a - b)
    return val


def assemble_tensor(
    basis: EigenBasis, m: int, alpha: float, mode: str = "analytic",
    grid: QuadratureGrid | None = None,
) -> GalerkinTensor:
    """Evaluate gamma_jkl for all mode triples below m.

    'analytic' uses the closed-form triple sine/cosine product integrals;
    'quadrature' evaluates the same integrals with the rectangle rule, which
    is exact when N+1 >= 3K.  Both must agree to roundoff.
    """
    if not 1 <= m <= basis.size:
        raise ValueError(f"mode count m={m} out of range [1, {basis.size}]")
    lam_pref = basis.eigenvalues[:m] ** (-alpha / 2.0)
    modes = basis.modes[:m]
    meta = {"basis_K": basis.K}

    if mode == "analytic":
        triples_j, triples_k, triples_l, vals = [], [], [], []
        index = {(mm.j, mm.k): i for i, mm in enumerate(modes)}
        c0 = (2.0 / PI) ** 3
        for ji, mj in enumerate(modes):
            for ki, mk in enumerate(modes):
                if ji == ki:
                    continue
                acc: dict[int, float] = {}
                # x-factor sin(j1)cos(k1), y-factor cos(j2)sin(k2), coeff -j2*k1
                for l1, ix in _sc_candidates(mj.j, mk.j):
                    for l2, iy in _sc_candidates(mk.k, mj.k):
                        li = index.get((l1, l2))
                        if li is not None:
                            acc[li] = acc.get(li, 0.0) - mj.k * mk.j * ix * iy
                # x-factor cos(j1)sin(k1), y-factor sin(j2)cos(k2), coeff +j1*k2
                for l1, ix in _sc_candidates(mk.j, mj.j):
                    for l2, iy in _sc_candidates(mj.k, mk.k):
                        li = index.get((l1, l2))
                        if li is not None:
                            acc[li] = acc.get(li, 0.0) + mj.j * mk.k * ix * iy
                for li, v in acc.items():
                    v *= c0 * lam_pref[ji]
                    if v != 0.0:
                        triples_j.append(ji)
                        triples_k.append(ki)
                        triples_l.append(li)
                        vals.append(v)
    elif mode == "quadrature":
        K = max(max(mm.j for mm in modes), max(mm.k for mm in modes))
        if grid is None:
            grid = QuadratureGrid(3 * K)
        if grid.N + 1 < 3 * K:
            raise ValueError(
                f"quadrature grid N={grid.N} violates the triple-product "
                f"exactness rule N+1 >= 3K = {3 * K}"
            )
        meta["grid_N"] = grid.N
        sub = build_rectangle_basis(basis.K)
        e = np.zeros(sub.size)
        S = _sine_matrix(grid.N, sub.K)
        grads = []
        for i in range(m):
            e[:] = 0.0
            e[i] = 1.0
            grads.append(gradient(SpectralField(sub, e), grid).values)
        grads = np.array(grads)  # (m, 2, N, N)
        perp = np.stack([-grads[:, 1], grads[:, 0]], axis=1)
        jj, kk = sub.mode_arrays()
        triples_j, triples_k, triples_l, vals = [], [], [], []
        for ji in range(m):
            prods = np.einsum("cxy,kcxy->kxy", perp[ji], grads)  # over all k
            coef = (2.0 / PI) * grid.weight * np.einsum("xa,kxy,yb->kab", S, prods, S)
            proj = coef[:, jj - 1, kk - 1][:, :m]  # (m_k, m_l)
            proj *= lam_pref[ji]
            ks, ls = np.nonzero(np.abs(proj) > 1e-13)
            triples_j.extend([ji] * len(ks))
            triples_k.extend(ks.tolist())
            triples_l.extend(ls.tolist())
            vals.extend(proj[ks, ls].tolist())
    else:
        raise ValueError(f"unknown assembly mode {mode!r}")

    return GalerkinTensor(
        m=m,
        alpha=alpha,
        j=np.array(triples_j, dtype=np.intp),
        k=np.array(triples_k, dtype=np.intp),
        l=np.array(triples_l, dtype=np.intp),
        vals=np.array(vals, dtype=float),
        mode=mode,
        meta=meta,
    )


def _sc_candidates(a: int, b: int):
    """Nonzero (c, integral) pairs of int sin(a x) cos(b x) sin(c x) dx."""
    out = []
    c = a + b
    v = _sine_cos_integral(a, b, c)
    if v != 0.0:
        out.append((c, v))
    c = abs(a - b)
    if c > 0 and c != a + b:
        v = _sine_cos_integral(a, b, c)
        if v != 0.0:
            out.append((c, v))
    return out


def rhs(theta: np.ndarray, tensor: GalerkinTensor, eps: float, eigvals: np.ndarray) -> np.ndarray:
    """d theta / dt = -gamma contraction - eps lambda theta."""
    if theta.shape != (tensor.m,):
        raise ValueError(f"state length {theta.shape} does not match m={tensor.m}")
    return -tensor.quadratic(theta) - eps * eigvals * theta


@dataclass
class GalerkinState:
    t: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("state coefficients must be finite")


def step(
    state: GalerkinState,
    tensor: GalerkinTensor,
    eps: float,
    dt: float,
    eigvals: np.ndarray,
) -> GalerkinState:
    """One classical RK4 step of the mode ODE."""
    if dt <= 0:
        raise ValueError(f"time step must be positive, got {dt}")
    th = state.coeffs
    k1 = rhs(th, tensor, eps, eigvals)
    k2 = rhs(th + 0.5 * dt * k1, tensor, eps, eigvals)
    k3 = rhs(th + 0.5 * dt * k2, tensor, eps, eigvals)
    k4 = rhs(th + dt * k3, tensor, eps, eigvals)
    new = th + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    mx = np.abs(new).max() if new.size else 0.0
    if not np.isfinite(mx) or mx > BLOWUP_THRESHOLD:
        raise BlowUpError(state.t + dt, float(mx))
    return GalerkinState(state.t + dt, new)


@dataclass
class SimConfig:
    """Validated run parameters for one Galerkin trajectory."""

    alpha: float = 0.5
    epsilon: float = 0.01
    m: int = 16
    pad: float = 4.0
    dt: float = 1e-3
    T: float = 1.0
    stride: int = 10
    initial: str = "single_mode"
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError("alpha must lie in (0, 2]")
        if self.alpha >= 1.0:
            print(
                f"note: alpha={self.alpha} is outside the singular-velocity "
                f"weak-solution regime alpha in (0, 1)",
                file=sys.stderr,
            )

    def basis_cutoff(self) -> int:
        return int(math.ceil(math.sqrt(self.m)))


@dataclass
class Trajectory:
    """Snapshots and per-snapshot diagnostics of one run."""

    config: SimConfig
    basis: EigenBasis
    times: np.ndarray
    snaps: np.ndarray  # (n_snap, m)
    diagnostics: dict

    def state_at(self, i: int) -> SpectralField:
        coeffs = np.zeros(self.basis.size)
        coeffs[: self.config.m] = self.snaps[i]
        return SpectralField(self.basis, coeffs)

    def final_state(self) -> SpectralField:
        return self.state_at(len(self.times) - 1)


def initial_data(config: SimConfig, basis: EigenBasis) -> np.ndarray:
    """Named analytic initial fields, projected onto the first m modes."""
    m = config.m
    rng = np.random.default_rng(config.seed)
    name = config.initial
    theta0 = np.zeros(m)
    if name == "single_mode":
        theta0[0] = 1.0
    elif name == "two_mode":
        theta0[0] = 1.0
        theta0[min(1, m - 1)] = -0.5
    elif name == "random":
        theta0 = rng.standard_normal(m)
        theta0 /= np.linalg.norm(theta0)
    elif name == "random_rough":
        # slow coefficient decay lambda^{-0.6}: rough datum for sweeps
        theta0 = rng.standard_normal(m) * basis.eigenvalues[:m] ** (-0.6)
        theta0 /= np.linalg.norm(theta0)
    elif name == "bump":
        from .weakform import test_function_catalog

        phi = test_function_catalog()["quartic"]
        grid = QuadratureGrid(4 * basis.K)
        full = analyze(GridField(grid, phi.on(grid)), basis)
        theta0 = full.coeffs[:m].copy()
    elif name.startswith("file:"):
        from .snapshots import read_snapshot

        snap = read_snapshot(name[5:])
        if len(snap.coeffs) < m:
            raise ValueError(
                f"snapshot holds {len(snap.coeffs)} coefficients, need m={m}"
            )
        theta0 = np.asarray(snap.coeffs[:m])
    else:
        raise ValueError(f"unknown initial datum {name!r}")
    return theta0


def run(
    config: SimConfig,
    basis: EigenBasis | None = None,
    tensor: GalerkinTensor | None = None,
) -> Trajectory:
    """Integrate the mode ODE and record snapshots plus balance diagnostics."""
    if basis is None:
        basis = build_rectangle_basis(config.basis_cutoff())
    if basis.size < config.m:
        raise ValueError(f"basis holds {basis.size} modes, need m={config.m}")
    if tensor is None:
        tensor = assemble_tensor(basis, config.m, config.alpha)
    m = config.m
    lam = basis.eigenvalues[:m]
    alpha = config.alpha
    eps = config.epsilon

    theta = initial_data(config, basis)
    n_steps = int(round(config.T / config.dt))
    state = GalerkinState(0.0, theta.copy())

    l2_sq_0 = float(np.sum(theta**2))
    ham_0 = float(np.sum(lam ** (-alpha / 2.0) * theta**2))
    diss_energy = 0.0  # int ||grad theta||^2 ds, trapezoid per step
    diss_ham = 0.0  # int ||psi||^2_{D(L^{1+a/2})} ds

    times, snaps = [], []
    diag = {key: [] for key in (
        "l2_theta", "h1_theta", "hdot_psi", "hone_psi",
        "energy_residual", "hamiltonian_residual",
    )}

    def grad_sq(th):
        return float(np.sum(lam * th**2))

    def ham_diss(th):
        return float(np.sum(lam ** (1.0 - alpha / 2.0) * th**2))

    # endpoint-corrected trapezoid: subtracting (dt^2/12)(g'(t) - g'(0)) kills
    # the Euler-Maclaurin dt^2 term, so the balance residuals track the RK4
    # trajectory error instead of the quadrature error
    def diss_rates(th):
        dth = rhs(th, tensor, eps, lam)
        return (
            2.0 * float(np.sum(lam * th * dth)),
            2.0 * float(np.sum(lam ** (1.0 - alpha / 2.0) * th * dth)),
        )

    g_rate_0, h_rate_0 = diss_rates(theta)
    em = config.dt**2 / 12.0

    def record(st):
        th = st.coeffs
        l2_sq = float(np.sum(th**2))
        ham = float(np.sum(lam ** (-alpha / 2.0) * th**2))
        g_rate, h_rate = diss_rates(th)
        de = diss_energy - em * (g_rate - g_rate_0)
        dh = diss_ham - em * (h_rate - h_rate_0)
        times.append(st.t)
        snaps.append(th.copy())
        diag["l2_theta"].append(math.sqrt(l2_sq))
        diag["h1_theta"].append(math.sqrt(grad_sq(th)))
        diag["hdot_psi"].append(math.sqrt(ham))
        diag["hone_psi"].append(math.sqrt(ham_diss(th)))
        diag["energy_residual"].append(0.5 * l2_sq + eps * de - 0.5 * l2_sq_0)
        diag["hamiltonian_residual"].append(0.5 * ham + eps * dh - 0.5 * ham_0)

    record(state)
    g_prev, h_prev = grad_sq(theta), ham_diss(theta)
    for i in range(1, n_steps + 1):
        state = step(state, tensor, eps, config.dt, lam)
        g_new, h_new = grad_sq(state.coeffs), ham_diss(state.coeffs)
        diss_energy += 0.5 * config.dt * (g_prev + g_new)
        diss_ham += 0.5 * config.dt * (h_prev + h_new)
        g_prev, h_prev = g_new, h_new
        if i % config.stride == 0 or i == n_steps:
            record(state)

    return Trajectory(
        config=config,
        basis=basis,
        times=np.array(times),
        snaps=np.array(snaps),
        diagnostics={key: np.array(v) for key, v in diag.items()},
    )


def nonlinear_term_grid(
    theta: SpectralField, m: int, alpha: float, grid: QuadratureGrid | None = None
) -> np.ndarray:
    """P_m(u . grad theta) via grid products: independent check of the tensor."""
    basis = theta.basis
    if grid is None:
        grid = QuadratureGrid(3 * basis.K)
    u = perp_gradient(
        SpectralField(basis, basis.eigenvalues ** (-alpha / 2.0) * theta.coeffs), grid
    )
    g = gradient(theta, grid)
    advect = GridField(grid, u.values[0] * g.values[0] + u.values[1] * g.values[1])
    return analyze(advect, basis).coeffs[:m]
