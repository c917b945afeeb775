"""Fourier-in-x, finite-difference-in-y field representation and anisotropic norms."""

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

logger = logging.getLogger(__name__)

# Largest exponent accepted by apply_multiplier; e^700 is close to the float64 limit.
MAX_AMPLIFICATION_EXPONENT = 700.0


class AmplificationOverflowError(OverflowError):
    """Raised when an exponential Fourier multiplier would overflow."""


@dataclass(frozen=True)
class Grid:
    """Periodic x-grid of n_x points times a uniform y-grid of n_y nodes on [0, L_y]."""

    n_x: int
    n_y: int
    L_x: float = 2.0 * np.pi
    L_y: float = 1.0

    def __post_init__(self) -> None:
        if self.n_x <= 0 or self.n_x % 2:
            raise ValueError(f"n_x must be an even positive integer, got {self.n_x}")
        if self.n_y < 3:
            raise ValueError(f"n_y must be at least 3, got {self.n_y}")
        if self.L_x <= 0 or self.L_y <= 0:
            raise ValueError(f"domain lengths must be positive, got L_x={self.L_x}, L_y={self.L_y}")

    @property
    def h_y(self) -> float:
        return self.L_y / (self.n_y - 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_y)

    @property
    def mode_numbers(self) -> np.ndarray:
        """Integer wavenumbers k in FFT order; the Nyquist mode is stored as +n_x/2."""
        k = np.fft.fftfreq(self.n_x, d=1.0 / self.n_x)
        k[self.n_x // 2] = self.n_x // 2
        return k

    @property
    def wavenumbers(self) -> np.ndarray:
        """Scaled wavenumbers xi_k = 2 pi k / L_x in FFT order."""
        return 2.0 * np.pi * self.mode_numbers / self.L_x

    @property
    def xi_max(self) -> float:
        return float(np.max(np.abs(self.wavenumbers)))

    @property
    def x_nodes(self) -> np.ndarray:
        return np.arange(self.n_x) * (self.L_x / self.n_x)

    @property
    def y_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L_y, self.n_y)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinates X, Y with shape (n_x, n_y)."""
        return np.meshgrid(self.x_nodes, self.y_nodes, indexing="ij")

    def dealias_mask(self) -> np.ndarray:
        """Boolean mask of the modes kept by the 2/3 rule, |k| <= n_x/3."""
        return np.abs(self.mode_numbers) <= self.n_x / 3.0


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex coefficients indexed by (wavenumber k in FFT order, y-node j)."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid {self.grid.shape}"
            )

    @classmethod
    def zeros(cls, grid: Grid) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    @classmethod
    def from_function(
        cls, grid: Grid, func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> "SpectralField":
        """Sample func(X, Y) on the grid nodes and transform."""
        X, Y = grid.mesh()
        return transform_forward(np.broadcast_to(func(X, Y), grid.shape), grid)

    def values(self) -> np.ndarray:
        return transform_backward(self)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))

    def with_dirichlet(self) -> "SpectralField":
        """Copy with the y=0 and y=L_y rows set to zero."""
        c = self.coeffs.copy()
        c[:, 0] = 0.0
        c[:, -1] = 0.0
        return SpectralField(self.grid, c)

    def truncated(self) -> "SpectralField":
        """Copy with the modes outside the 2/3 band removed."""
        return SpectralField(self.grid, self.coeffs * self.grid.dealias_mask()[:, None])

    def _check_same_grid(self, other: "SpectralField") -> None:
        if other.grid != self.grid:
            raise ValueError(f"grid mismatch: {self.grid} vs {other.grid}")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_grid(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_same_grid(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs / scalar)


# ============================================================================
# Transforms
# ============================================================================


def transform_forward(values: np.ndarray, grid: Grid) -> SpectralField:
    """Physical values (n_x, n_y) to coefficients; the k=0 row is the x-mean."""
    values = np.asarray(values)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} does not match grid {grid.shape}")
    return SpectralField(grid, np.fft.fft(values, axis=0) / grid.n_x)


def transform_backward(f: SpectralField) -> np.ndarray:
    """Coefficients to real physical values."""
    return np.real(np.fft.ifft(f.coeffs * f.grid.n_x, axis=0))


def resample(f: SpectralField, n_x: int) -> SpectralField:
    """Zero-pad or truncate the x-spectrum onto a grid with n_x points (same L_x, n_y)."""
    old = f.grid
    new = Grid(n_x, old.n_y, old.L_x, old.L_y)
    if n_x == old.n_x:
        return SpectralField(new, f.coeffs.copy())
    c = f.coeffs
    out = np.zeros(new.shape, dtype=complex)
    half = min(old.n_x, n_x) // 2
    out[:half] = c[:half]
    out[n_x - half + 1 :] = c[old.n_x - half + 1 :]
    if n_x > old.n_x:
        # old Nyquist row is shared by +half and -half on the finer grid
        out[half] = 0.5 * c[half]
        out[n_x - half] = 0.5 * c[half]
    else:
        out[half] = c[half] + c[old.n_x - half]
    return SpectralField(new, out)


def multiply(f: SpectralField, g: SpectralField) -> SpectralField:
    """Dealiased pseudo-spectral product."""
    f._check_same_grid(g)
    a = transform_backward(f.truncated())
    b = transform_backward(g.truncated())
    return transform_forward(a * b, f.grid).truncated()


# ============================================================================
# Derivatives and quadrature
# ============================================================================


def dx(f: SpectralField) -> SpectralField:
    xi = f.grid.wavenumbers.astype(complex)
    xi[f.grid.n_x // 2] = 0.0
    return SpectralField(f.grid, 1j * xi[:, None] * f.coeffs)


def dy(f: SpectralField) -> SpectralField:
    """Second-order central differences, one-sided second order at both walls."""
    return SpectralField(f.grid, np.gradient(f.coeffs, f.grid.h_y, axis=1, edge_order=2))


def dyy(f: SpectralField) -> SpectralField:
    """Three-point second derivative on interior nodes; wall rows are zero."""
    c = f.coeffs
    out = np.zeros_like(c)
    out[:, 1:-1] = (c[:, 2:] - 2.0 * c[:, 1:-1] + c[:, :-2]) / f.grid.h_y**2
    return SpectralField(f.grid, out)


def integrate_from_0(f: SpectralField) -> SpectralField:
    """Cumulative trapezoid antiderivative in y, zero at y=0."""
    return SpectralField(
        f.grid, cumulative_trapezoid(f.coeffs, dx=f.grid.h_y, axis=1, initial=0.0)
    )


# ============================================================================
# Fourier multipliers and norms
# ============================================================================


def frequency_weight(grid: Grid, power: float) -> np.ndarray:
    """(1 + |xi_k|)^power as a column vector."""
    return ((1.0 + np.abs(grid.wavenumbers)) ** power)[:, None]


def scale_modes(f: SpectralField, power: float) -> SpectralField:
    """Apply the symbol (1 + |D_x|)^power."""
    return SpectralField(f.grid, f.coeffs * frequency_weight(f.grid, power))


def apply_multiplier(f: SpectralField, tau: float, allow_negative: bool = False) -> SpectralField:
    """Apply e^{tau (1 + |D_x|)}.

    Args:
        f: Field to weight.
        tau: Radius; must be nonnegative unless allow_negative is set.
        allow_negative: Permit tau < 0 (smoothing direction).
    """
    if tau < 0 and not allow_negative:
        raise ValueError(f"multiplier radius must be nonnegative, got {tau}")
    exponent = tau * (1.0 + np.abs(f.grid.wavenumbers))
    if np.max(exponent) > MAX_AMPLIFICATION_EXPONENT:
        raise AmplificationOverflowError(
            f"tau*(1+|xi_max|) = {np.max(exponent):.1f} exceeds {MAX_AMPLIFICATION_EXPONENT}"
        )
    return SpectralField(f.grid, f.coeffs * np.exp(exponent)[:, None])


def norm_Hs0(f: SpectralField, s: float) -> float:
    """Discrete H^{s,0} norm: mode sum in x, trapezoid in y."""
    per_mode = trapezoid(np.abs(f.coeffs) ** 2, dx=f.grid.h_y, axis=1)
    return float(np.sqrt(np.sum(frequency_weight(f.grid, 2.0 * s)[:, 0] * per_mode)))


def inner_Hs0(f: SpectralField, g: SpectralField, s: float) -> float:
    f._check_same_grid(g)
    per_mode = trapezoid(f.coeffs * np.conj(g.coeffs), dx=f.grid.h_y, axis=1)
    return float(np.real(np.sum(frequency_weight(f.grid, 2.0 * s)[:, 0] * per_mode)))


def physical_l2(values: np.ndarray, grid: Grid) -> float:
    """L2 norm of physical values: mean over x, trapezoid over y."""
    return float(np.sqrt(trapezoid(np.mean(values**2, axis=0), dx=grid.h_y)))
