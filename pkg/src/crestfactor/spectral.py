"""Periodic grids, Fourier transforms, spectral derivatives and norms.

Fields live on the torus [0, L]^d sampled at N points per axis.  The
spectral representation stores the Fourier coefficients phi_k of

    phi(x) = sum_k phi_k exp(2 pi i k.x / L)

so that ``coeffs = fftn(samples) / N**d``.  With that normalisation
Parseval reads ||phi||_2^2 = L^d sum_k |phi_k|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform collocation grid on the torus [0, L]^d."""

    d: int
    L: float
    N: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigurationError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not self.L > 0:
            raise ConfigurationError(f"side length must be positive, got {self.L}")
        if self.N < 4 or self.N % 2:
            raise ConfigurationError(f"N must be even and >= 4, got {self.N}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def volume(self) -> float:
        return self.L**self.d

    @cached_property
    def x(self) -> np.ndarray:
        """1D coordinates of the collocation points."""
        return np.arange(self.N) * self.dx

    def mesh(self) -> tuple[np.ndarray, ...]:
        return np.meshgrid(*([self.x] * self.d), indexing="ij")

    @cached_property
    def k1d(self) -> np.ndarray:
        """Integer wavenumbers in FFT order; the Nyquist mode appears as -N/2."""
        return np.fft.fftfreq(self.N, 1.0 / self.N)

    @cached_property
    def wavevectors(self) -> tuple[np.ndarray, ...]:
        """Integer wavevector components broadcast to the full grid shape."""
        return tuple(np.meshgrid(*([self.k1d] * self.d), indexing="ij"))

    @cached_property
    def k2(self) -> np.ndarray:
        """|k|^2 with integer k."""
        return sum(k**2 for k in self.wavevectors)

    @cached_property
    def nyquist(self) -> np.ndarray:
        """Mask of modes sitting on the Nyquist plane of any axis."""
        mask = np.zeros(self.shape, dtype=bool)
        for k in self.wavevectors:
            mask |= np.abs(k) == self.N // 2
        return mask

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        keep = np.ones(self.shape, dtype=bool)
        for k in self.wavevectors:
            keep &= np.abs(k) <= self.N / 3
        return keep


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Real scalar or vector field stored by its Fourier coefficients.

    ``coeffs`` has shape ``(components, N, ..., N)``.
    """

    grid: PeriodicGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == self.grid.d:
            c = c[np.newaxis]
        if c.shape[1:] != self.grid.shape:
            raise ConfigurationError(
                f"coefficient shape {c.shape[1:]} does not match grid {self.grid.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    @classmethod
    def from_physical(cls, grid: PeriodicGrid, samples) -> "SpectralField":
        return to_spectral(grid, samples)

    def physical(self) -> np.ndarray:
        return to_physical(self)

    def mean(self) -> np.ndarray:
        """Spatial mean of each component (the k = 0 coefficient)."""
        return self.coeffs[(slice(None),) + (0,) * self.grid.d].real

    def scaled(self, factor: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * factor)

    def component(self, i: int) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs[i : i + 1])


def to_spectral(grid: PeriodicGrid, samples) -> SpectralField:
    a = np.asarray(samples)
    if a.ndim == grid.d:
        a = a[np.newaxis]
    if a.shape[1:] != grid.shape:
        raise ConfigurationError(f"sample shape {a.shape[1:]} does not match grid {grid.shape}")
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag), initial=0.0) > 0:
            raise ConfigurationError("physical samples must be real")
        a = a.real
    axes = tuple(range(1, grid.d + 1))
    return SpectralField(grid, np.fft.fftn(a, axes=axes) / grid.N**grid.d)


def to_physical(f: SpectralField) -> np.ndarray:
    axes = tuple(range(1, f.grid.d + 1))
    return np.fft.ifftn(f.coeffs, axes=axes).real * f.grid.N**f.grid.d


def transform(data, direction: str, grid: PeriodicGrid | None = None):
    """Move ``data`` to the other representation.

    ``direction='to_physical'`` takes a SpectralField and returns samples of
    shape (components, N, ..., N); ``'to_spectral'`` takes samples and the grid.
    """
    if direction == "to_physical":
        if not isinstance(data, SpectralField):
            raise ConfigurationError("to_physical expects a SpectralField")
        return to_physical(data)
    if direction == "to_spectral":
        if grid is None:
            raise ConfigurationError("to_spectral needs the grid")
        return to_spectral(grid, data)
    raise ConfigurationError(f"unknown direction {direction!r}")


def norm(f: SpectralField, p) -> float:
    """L2 norm via Parseval, or the grid sup-norm (max over components)."""
    if p == 2:
        return math.sqrt(f.grid.volume * float(np.sum(np.abs(f.coeffs) ** 2)))
    if p in (np.inf, "inf", math.inf):
        return float(np.max(np.abs(to_physical(f))))
    raise DomainError(f"unsupported norm order {p!r}")


def _check_multi_index(f: SpectralField, n_vec: Sequence[int]) -> tuple[int, ...]:
    n_vec = tuple(int(n) for n in n_vec)
    if len(n_vec) != f.grid.d:
        raise DomainError(f"multi-index {n_vec} has wrong length for d={f.grid.d}")
    if any(n < 0 for n in n_vec):
        raise DomainError(f"multi-index entries must be non-negative, got {n_vec}")
    return n_vec


def sobolev_seminorm_sq(f: SpectralField, n_vec: Sequence[int]) -> float:
    """||D^n f||_2^2 summed over components, computed spectrally."""
    n_vec = _check_multi_index(f, n_vec)
    g = f.grid
    weight = np.ones(g.shape)
    for k, n in zip(g.wavevectors, n_vec):
        if n:
            weight = weight * k ** (2 * n)
            if n % 2:
                # odd derivatives annihilate the Nyquist mode (real-field convention)
                weight = np.where(np.abs(k) == g.N // 2, 0.0, weight)
    scale = g.volume * (2 * math.pi / g.L) ** (2 * sum(n_vec))
    return scale * float(np.sum(weight * np.abs(f.coeffs) ** 2))


def hs_norm_sq(f: SpectralField, s: float) -> float:
    """Isotropic H^s norm L^d (2 pi/L)^{2s} sum |k|^{2s} |phi_k|^2.

    The k = 0 term only contributes for s = 0; negative s requires a
    mean-zero field.
    """
    g = f.grid
    mag2 = np.abs(f.coeffs) ** 2
    if s < 0 and np.max(np.abs(f.mean())) > 1e-14 * max(1.0, float(np.sqrt(mag2.sum()))):
        raise DomainError("negative-order Sobolev norm needs a mean-zero field")
    k2 = g.k2.astype(float)
    with np.errstate(divide="ignore"):
        weight = np.where(k2 > 0, k2**s, 1.0 if s == 0 else 0.0)
    return g.volume * (2 * math.pi / g.L) ** (2 * s) * float(np.sum(weight * mag2))


def spectral_derivative(f: SpectralField, n_vec: Sequence[int]) -> SpectralField:
    n_vec = _check_multi_index(f, n_vec)
    g = f.grid
    mult = np.ones(g.shape, dtype=complex)
    for k, n in zip(g.wavevectors, n_vec):
        if n:
            mult = mult * (2j * math.pi * k / g.L) ** n
            if n % 2:
                mult = np.where(np.abs(k) == g.N // 2, 0.0, mult)
    return SpectralField(g, f.coeffs * mult)


def dealias(f: SpectralField) -> SpectralField:
    """2/3-rule truncation: zero every mode with some |k_i| > N/3."""
    return SpectralField(f.grid, f.coeffs * f.grid.dealias_mask)


def gradient_tensor(u: SpectralField) -> np.ndarray:
    """Physical samples of du_i/dx_j, shape (components, d, N, ..., N)."""
    g = u.grid
    out = []
    for j in range(g.d):
        n_vec = [0] * g.d
        n_vec[j] = 1
        out.append(to_physical(spectral_derivative(u, n_vec)))
    return np.stack(out, axis=1)


def random_band_limited(
    grid: PeriodicGrid,
    rng: np.random.Generator,
    kmax: float | None = None,
    components: int = 1,
    slope: float = 0.0,
    mean_zero: bool = True,
) -> SpectralField:
    """Real random field with Gaussian coefficients on 0 < |k| <= kmax.

    Amplitudes scale like |k|^-slope; the result is exactly conjugate
    symmetric because it is built from real samples.
    """
    if kmax is None:
        kmax = grid.N / 3
    shape = (components,) + grid.shape
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    k = np.sqrt(grid.k2)
    with np.errstate(divide="ignore"):
        amp = np.where(k > 0, k ** (-slope), 0.0 if mean_zero else 1.0)
    amp = np.where((k <= kmax) & ~grid.nyquist, amp, 0.0)
    axes = tuple(range(1, grid.d + 1))
    samples = np.fft.ifftn(noise * amp, axes=axes).real
    return to_spectral(grid, samples)
