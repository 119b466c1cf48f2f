"""Dirichlet sine eigenbasis of -Laplace on the square (0, pi)^2.

Eigenfunctions are w_{jk}(x, y) = (2/pi) sin(jx) sin(ky) with eigenvalues
lambda = j^2 + k^2.  Coefficient <-> grid transforms use the uniform interior
grid, which integrates products of sines exactly up to the stated band limit,
so analysis/synthesis round trips are exact in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

PI = np.pi


@dataclass(frozen=True)
class ModeIndex:
    """Per-axis wavenumbers of one sine eigenfunction."""

    j: int
    k: int

    def __post_init__(self):
        if self.j < 1 or self.k < 1:
            raise ValueError(f"mode indices must be >= 1, got ({self.j}, {self.k})")


@dataclass(frozen=True)
class EigenBasis:
    """Ordered Dirichlet eigenpairs, eigenvalue-ascending with (j, k) tie-break."""

    K: int
    modes: tuple = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.modes)

    def mode_arrays(self):
        """(j, k) wavenumbers as two integer arrays."""
        j = np.array([m.j for m in self.modes])
        k = np.array([m.k for m in self.modes])
        return j, k

    def index_of(self, j: int, k: int) -> int:
        return self.modes.index(ModeIndex(j, k))


@lru_cache(maxsize=64)
def build_rectangle_basis(K: int) -> EigenBasis:
    """All modes with 1 <= j, k <= K, sorted by (eigenvalue, j, k)."""
    if K < 1:
        raise ValueError(f"cutoff K must be >= 1, got {K}")
    modes = sorted(
        (ModeIndex(j, k) for j in range(1, K + 1) for k in range(1, K + 1)),
        key=lambda m: (m.j * m.j + m.k * m.k, m.j, m.k),
    )
    eigenvalues = np.array([float(m.j**2 + m.k**2) for m in modes])
    return EigenBasis(K=K, modes=tuple(modes), eigenvalues=eigenvalues)


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform interior grid x_i = i*pi/(N+1), rectangle-rule weight per node.

    Exact for products of sines with per-axis total wavenumber <= 2(N+1) - 1.
    """

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"grid size N must be >= 1, got {self.N}")

    @property
    def nodes(self) -> np.ndarray:
        return PI * np.arange(1, self.N + 1) / (self.N + 1)

    @property
    def weight(self) -> float:
        return (PI / (self.N + 1)) ** 2

    def meshgrid(self):
        x = self.nodes
        return np.meshgrid(x, x, indexing="ij")


@dataclass
class SpectralField:
    """Coefficient vector in an EigenBasis (flat, basis mode order)."""

    basis: EigenBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.basis.size,):
            raise ValueError(
                f"coefficient length {self.coeffs.shape} does not match "
                f"basis size {self.basis.size}"
            )

    def copy(self) -> "SpectralField":
        return SpectralField(self.basis, self.coeffs.copy())

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass
class GridField:
    """Scalar (N, N) or 2-vector (2, N, N) samples on a QuadratureGrid."""

    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        N = self.grid.N
        if self.values.shape not in ((N, N), (2, N, N)):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid N={N}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid field contains non-finite values")

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 3

    def integrate(self) -> float:
        """Rectangle-rule integral of a scalar field."""
        if self.is_vector:
            raise ValueError("cannot integrate a vector field to a scalar")
        return float(self.grid.weight * self.values.sum())


@lru_cache(maxsize=256)
def _sine_matrix(N: int, K: int) -> np.ndarray:
    """S[i, j-1] = sin(j * x_i) for interior nodes x_i, 1 <= j <= K."""
    x = PI * np.arange(1, N + 1) / (N + 1)
    j = np.arange(1, K + 1)
    return np.sin(np.outer(x, j))


@lru_cache(maxsize=256)
def _cosine_matrix(N: int, K: int) -> np.ndarray:
    x = PI * np.arange(1, N + 1) / (N + 1)
    j = np.arange(1, K + 1)
    return np.cos(np.outer(x, j))


def _coeff_square(f: SpectralField) -> np.ndarray:
    """Scatter the flat coefficient vector into a (K, K) wavenumber array."""
    K = f.basis.K
    A = np.zeros((K, K))
    j, k = f.basis.mode_arrays()
    A[j - 1, k - 1] = f.coeffs
    return A


def _gather_square(A: np.ndarray, basis: EigenBasis) -> np.ndarray:
    j, k = basis.mode_arrays()
    return A[j - 1, k - 1]


def _check_grid(basis: EigenBasis, grid: QuadratureGrid):
    if grid.N + 1 <= basis.K:
        raise ValueError(
            f"grid N={grid.N} too coarse for basis cutoff K={basis.K} "
            f"(need N+1 > K)"
        )


def synthesize(f: SpectralField, grid: QuadratureGrid) -> GridField:
    """Evaluate sum_j f_j w_j at the grid nodes."""
    _check_grid(f.basis, grid)
    A = _coeff_square(f)
    S = _sine_matrix(grid.N, f.basis.K)
    values = (2.0 / PI) * (S @ A @ S.T)
    return GridField(grid, values)


def analyze(g: GridField, basis: EigenBasis) -> SpectralField:
    """Quadrature projection f_j = int g w_j dx onto the basis.

    Exact inverse of synthesize when N+1 >= 2K.
    """
    if g.is_vector:
        raise ValueError("analyze expects a scalar field; handle components separately")
    _check_grid(basis, g.grid)
    S = _sine_matrix(g.grid.N, basis.K)
    A = (2.0 / PI) * g.grid.weight * (S.T @ g.values @ S)
    return SpectralField(basis, _gather_square(A, basis))


def gradient(f: SpectralField, grid: QuadratureGrid) -> GridField:
    """Term-by-term analytic gradient (d/dx, d/dy) sampled on the grid."""
    _check_grid(f.basis, grid)
    K = f.basis.K
    A = _coeff_square(f)
    S = _sine_matrix(grid.N, K)
    C = _cosine_matrix(grid.N, K)
    wav = np.arange(1, K + 1)
    dx = (2.0 / PI) * (C @ (wav[:, None] * A) @ S.T)
    dy = (2.0 / PI) * (S @ (A * wav[None, :]) @ C.T)
    return GridField(grid, np.stack([dx, dy]))


def perp_gradient(f: SpectralField, grid: QuadratureGrid) -> GridField:
    """Perpendicular gradient (-d/dy, d/dx) sampled on the grid."""
    g = gradient(f, grid)
    return GridField(grid, np.stack([-g.values[1], g.values[0]]))


def boundary_distance(point) -> float:
    """Distance from a point in the closed square to its boundary."""
    x, y = point
    if not (0.0 <= x <= PI and 0.0 <= y <= PI):
        raise ValueError(f"point {point} lies outside the closed square [0, pi]^2")
    return float(min(x, PI - x, y, PI - y))


def boundary_distance_grid(grid: QuadratureGrid) -> np.ndarray:
    """Boundary distance evaluated at every grid node."""
    X, Y = grid.meshgrid()
    return np.minimum.reduce([X, PI - X, Y, PI - Y])


def embed(f: SpectralField, target: EigenBasis) -> SpectralField:
    """Re-express coefficients in a larger basis (zero padding by mode index)."""
    if target.K < f.basis.K:
        raise ValueError(
            f"cannot embed basis K={f.basis.K} into smaller K={target.K}"
        )
    A = np.zeros((target.K, target.K))
    j, k = f.basis.mode_arrays()
    A[j - 1, k - 1] = f.coeffs
    return SpectralField(target, _gather_square(A, target))


def restrict(f: SpectralField, target: EigenBasis) -> SpectralField:
    """Drop coefficients outside a smaller basis (adjoint of embed)."""
    A = _coeff_square(f)
    j, k = target.mode_arrays()
    coeffs = np.where((j <= f.basis.K) & (k <= f.basis.K),
                      A[np.minimum(j, f.basis.K) - 1, np.minimum(k, f.basis.K) - 1],
                      0.0)
    return SpectralField(target, coeffs)
