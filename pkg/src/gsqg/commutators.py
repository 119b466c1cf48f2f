"""Commutators of fractional powers with differentiation and multiplication.

All operators act on band-limited fields and are realized with padded
quadrature projections: pointwise products and gradients live on a grid fine
enough for the padded band, and every non-band-limited intermediate is
projected back onto the padded sine basis.  The estimates' constants are
never asserted; monitor_bounds reports observed ratios only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .basis import (
    EigenBasis,
    GridField,
    QuadratureGrid,
    SpectralField,
    analyze,
    boundary_distance_grid,
    build_rectangle_basis,
    embed,
    gradient,
    synthesize,
)
from .fractional import apply_lambda_power, sobolev_norm

#: weight values beyond this are treated as boundary-singular and excluded
WEIGHT_CLIP = 1e8


@dataclass(frozen=True)
class Multiplier:
    """Closed-form scalar multiplier a(x, y) with analytic gradient."""

    name: str
    fn: Callable = field(repr=False)
    grad_x: Callable = field(repr=False)
    grad_y: Callable = field(repr=False)

    def on(self, grid: QuadratureGrid) -> np.ndarray:
        X, Y = grid.meshgrid()
        return np.asarray(self.fn(X, Y), dtype=float) + np.zeros_like(X)

    def grad_on(self, grid: QuadratureGrid) -> np.ndarray:
        X, Y = grid.meshgrid()
        z = np.zeros_like(X)
        return np.stack(
            [np.asarray(self.grad_x(X, Y), dtype=float) + z,
             np.asarray(self.grad_y(X, Y), dtype=float) + z]
        )

    def linf_norm(self, grid: QuadratureGrid) -> float:
        return float(np.abs(self.on(grid)).max())

    def w1inf_norm(self, grid: QuadratureGrid) -> float:
        g = self.grad_on(grid)
        return float(self.linf_norm(grid) + np.abs(g).max())

    def holder_seminorm(self, grid: QuadratureGrid, gamma: float, stride: int = 4) -> float:
        """Empirical sup |a(x)-a(y)| / |x-y|^gamma over subsampled node pairs."""
        X, Y = grid.meshgrid()
        pts = np.stack([X[::stride, ::stride].ravel(), Y[::stride, ::stride].ravel()], 1)
        vals = self.on(grid)[::stride, ::stride].ravel()
        diff = np.abs(vals[:, None] - vals[None, :])
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        mask = dist > 0
        return float((diff[mask] / dist[mask] ** gamma).max())


def multiplier_catalog() -> dict[str, Multiplier]:
    """Named multipliers used by the monitors and the acceptance suite."""
    return {
        "one": Multiplier("one", lambda x, y: 1.0, lambda x, y: 0.0, lambda x, y: 0.0),
        "coord_x": Multiplier(
            "coord_x", lambda x, y: x, lambda x, y: 1.0, lambda x, y: 0.0
        ),
        "cos_xy": Multiplier(
            "cos_xy",
            lambda x, y: np.cos(x) * np.cos(y),
            lambda x, y: -np.sin(x) * np.cos(y),
            lambda x, y: -np.cos(x) * np.sin(y),
        ),
        # vanishes to 4th order at the boundary: admissible weight-side multiplier
        "bump4": Multiplier(
            "bump4",
            lambda x, y: np.sin(x) ** 4 * np.sin(y) ** 4,
            lambda x, y: 4 * np.sin(x) ** 3 * np.cos(x) * np.sin(y) ** 4,
            lambda x, y: 4 * np.sin(x) ** 4 * np.sin(y) ** 3 * np.cos(y),
        ),
    }


@dataclass
class BoundReport:
    """Observed two-sided norms for one commutator estimate instance."""

    kind: str
    lhs_norm: float
    rhs_norm: float
    ratio: float
    params: dict

    def __post_init__(self):
        if not (np.isfinite(self.lhs_norm) and np.isfinite(self.rhs_norm)):
            raise ValueError("bound report norms must be finite")


def padded_basis(basis: EigenBasis, pad: float) -> EigenBasis:
    """Basis holding pad-times as many modes (per-axis cutoff scaled by sqrt)."""
    if pad < 1:
        raise ValueError(f"padding factor must be >= 1, got {pad}")
    return build_rectangle_basis(int(math.ceil(basis.K * math.sqrt(pad))))


def padded_grid(basis: EigenBasis) -> QuadratureGrid:
    """Grid exact for triple products of the padded band."""
    return QuadratureGrid(3 * basis.K)


def comm_lambda_grad(
    psi: SpectralField, s: float, pad: float = 4.0, perp: bool = False
) -> GridField:
    """[Lambda^s, grad] psi (or the perpendicular variant) on the padded grid."""
    if not 0.0 < s < 2.0:
        raise ValueError(f"require s in (0, 2), got {s}")
    big = padded_basis(psi.basis, pad)
    if big.K < psi.basis.K:
        raise ValueError("padding smaller than the field band")
    grid = padded_grid(big)
    psi_b = embed(psi, big)

    # both terms through the same padded projection, so the truncation of the
    # slowly converging sine series of grad(psi) cancels as s -> 0
    grad_psi = gradient(psi_b, grid)
    grad_lam_psi = gradient(apply_lambda_power(psi_b, s), grid)
    out = np.stack(
        [
            synthesize(
                SpectralField(
                    big,
                    apply_lambda_power(
                        analyze(GridField(grid, g1), big), s
                    ).coeffs
                    - analyze(GridField(grid, g2), big).coeffs,
                ),
                grid,
            ).values
            for g1, g2 in zip(grad_psi.values, grad_lam_psi.values)
        ]
    )
    if perp:
        out = np.stack([-out[1], out[0]])
    return GridField(grid, out)


def comm_neg_lambda_mult(
    a: Multiplier, f: SpectralField, s: float, pad: float = 4.0
) -> SpectralField:
    """[Lambda^{-s}, a] f in the padded basis."""
    if not 0.0 < s < 2.0:
        raise ValueError(f"require s in (0, 2), got {s}")
    return _comm_mult(a, f, -s, pad)


def comm_lambda_mult(
    a: Multiplier, f: SpectralField, s: float, pad: float = 4.0
) -> SpectralField:
    """[Lambda^{s}, a] f in the padded basis."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"require s in (0, 1), got {s}")
    return _comm_mult(a, f, s, pad)


def _comm_mult(a: Multiplier, f: SpectralField, s: float, pad: float) -> SpectralField:
    big = padded_basis(f.basis, pad)
    grid = padded_grid(big)
    f_b = embed(f, big)
    a_grid = a.on(grid)

    af = analyze(GridField(grid, a_grid * synthesize(f_b, grid).values), big)
    term1 = apply_lambda_power(af, s)
    lam_f = synthesize(apply_lambda_power(f_b, s), grid).values
    term2 = analyze(GridField(grid, a_grid * lam_f), big)
    return SpectralField(big, term1.coeffs - term2.coeffs)


def _lp_norm(values: np.ndarray, grid: QuadratureGrid, p: float) -> float:
    if np.isinf(p):
        return float(np.abs(values).max())
    return float((grid.weight * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def monitor_bounds(
    kind: str,
    a: Multiplier,
    f: SpectralField,
    s: float,
    p: float = 2.0,
    q: float = 2.0,
    gamma: float = 1.0,
    pad: float = 4.0,
) -> BoundReport:
    """Observed lhs/rhs ratio for one of the commutator estimates.

    Kinds: 'lambda_grad' (weighted bound for a[Lambda^s, grad]f),
    'neg_mult' (W^{1,p} bound for [Lambda^{-s}, a]f),
    'pos_mult' (L^r bound for [Lambda^s, a]f),
    'gain' (D(Lambda^{1-s}) bound for [Lambda^s, a]f).
    """
    d = 2.0
    params = {"s": s, "p": p, "q": q, "gamma": gamma, "pad": pad}

    if kind == "lambda_grad":
        comm = comm_lambda_grad(f, s, pad)
        grid = comm.grid
        mag = np.hypot(comm.values[0], comm.values[1]) * np.abs(a.on(grid))
        lhs = _lp_norm(mag, grid, q)
        weight = boundary_distance_grid(grid) ** (-s - 1.0 - d / p)
        wa = np.abs(a.on(grid)) * weight
        wa = np.where(weight > WEIGHT_CLIP, 0.0, wa)
        rhs = _lp_norm(wa, grid, q) * _lp_norm_field(f, p)
    elif kind == "neg_mult":
        if not s < d / p:
            raise ValueError(f"neg_mult requires s < d/p = {d / p}, got s={s}")
        comm = comm_neg_lambda_mult(a, f, s, pad)
        grid = padded_grid(comm.basis)
        vals = synthesize(comm, grid).values
        grad_vals = gradient(comm, grid).values
        lhs = (
            _lp_norm(vals, grid, p) ** 2
            + _lp_norm(np.hypot(grad_vals[0], grad_vals[1]), grid, p) ** 2
        ) ** 0.5
        rhs = a.w1inf_norm(grid) * _lp_norm_field(f, p)
    elif kind == "pos_mult":
        if not s < gamma:
            raise ValueError(f"pos_mult requires s < gamma, got s={s}, gamma={gamma}")
        inv_r = 1.0 / p - (d + s - gamma) / d + 1.0
        if not 0.0 < inv_r < 1.0:
            raise ValueError(
                "exponent relation 1/p + (d+s-gamma)/d = 1 + 1/r "
                f"gives r outside (1, inf): 1/r = {inv_r}"
            )
        comm = comm_lambda_mult(a, f, s, pad)
        grid = padded_grid(comm.basis)
        lhs = _lp_norm(synthesize(comm, grid).values, grid, 1.0 / inv_r)
        rhs = a.holder_seminorm(grid, gamma) * _lp_norm_field(f, p)
    elif kind == "gain":
        comm = comm_lambda_mult(a, f, s, pad)
        grid = padded_grid(comm.basis)
        lhs = sobolev_norm(comm, 2.0 * (1.0 - s))
        rhs = a.w1inf_norm(grid) * sobolev_norm(f, 2.0 * s)
    else:
        raise ValueError(f"unknown bound kind {kind!r}")

    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else np.inf)
    if not np.isfinite(ratio):
        raise ValueError(f"non-finite observed ratio for kind {kind!r}")
    return BoundReport(kind, lhs, rhs, ratio, params)


def _lp_norm_field(f: SpectralField, p: float) -> float:
    if p == 2.0:
        return f.l2_norm()
    grid = padded_grid(f.basis)
    return _lp_norm(synthesize(f, grid).values, grid, p)
