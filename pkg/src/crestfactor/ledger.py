"""Semi-norm ladders J_n, Phi_n, F_n, derived constants and long-time averages."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateForcingError, DomainError
from .spectral import PeriodicGrid, SpectralField, sobolev_seminorm_sq

F_FLOOR = 1e-30
LEDGER_COLUMNS = ("t", "J0", "J1", "J2", "F0", "F1", "F2")


def jn(u: SpectralField, n: int) -> float:
    """Multinomial ladder sum_i sum_{|m|=n} n!/m! ||D^m u_i||^2.

    By the multinomial theorem the inner sum collapses to |k|^{2n}, which is
    what is evaluated here; :func:`jn_multi_index` keeps the explicit form.
    """
    if n < 0:
        raise DomainError(f"order must be non-negative, got {n}")
    g = u.grid
    weight = g.k2.astype(float) ** n
    return g.volume * (2 * math.pi / g.L) ** (2 * n) * float(np.sum(weight * np.abs(u.coeffs) ** 2))


def multi_indices(d: int, n: int):
    for m in itertools.product(range(n + 1), repeat=d):
        if sum(m) == n:
            yield m


def multinomial(n: int, m) -> int:
    out = math.factorial(n)
    for mi in m:
        out //= math.factorial(mi)
    return out


def jn_multi_index(u: SpectralField, n: int) -> float:
    """Explicit multi-index form of :func:`jn`, kept as an independent check."""
    if n < 0:
        raise DomainError(f"order must be non-negative, got {n}")
    return sum(multinomial(n, m) * sobolev_seminorm_sq(u, m) for m in multi_indices(u.grid.d, n))


@dataclass(frozen=True)
class ForcingSpectrum:
    """Time-independent, mean-zero forcing with its ladder Phi_0..Phi_{n_max+1}."""

    f: SpectralField
    phi: tuple[float, ...]
    lambda_f: float
    n_max: int
    attained_at: int

    def __getitem__(self, n: int) -> float:
        return self.phi[n]


def _check_mean_zero(f: SpectralField):
    scale = max(1.0, float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2))))
    if np.max(np.abs(f.coeffs[(slice(None),) + (0,) * f.grid.d])) > 1e-12 * scale:
        raise DomainError("forcing must have zero mean")


def phi_n(f: SpectralField | ForcingSpectrum, n: int) -> float:
    if isinstance(f, ForcingSpectrum):
        f = f.f
    _check_mean_zero(f)
    return jn(f, n)


def lambda_f(f: SpectralField, n_max: int = 8) -> tuple[float, int]:
    """Smallest forcing length scale from sup_{n <= n_max} Phi_{n+1}/Phi_n.

    Returns (lambda_f, n) where n is the first order at which the supremum is
    reached to within 1e-12 relative.
    """
    _check_mean_zero(f)
    phis = [jn(f, n) for n in range(n_max + 2)]
    if min(phis[: n_max + 1]) <= 0:
        raise DegenerateForcingError("forcing ladder vanishes; lambda_f undefined")
    ratios = np.array([phis[n + 1] / phis[n] for n in range(n_max + 1)])
    best = float(ratios.max())
    attained = int(np.argmax(ratios >= best * (1 - 1e-12)))
    return 1.0 / math.sqrt(best), attained


def forcing_spectrum(f: SpectralField, n_max: int = 8, cutoff: float = 1e-13) -> ForcingSpectrum:
    """Ladder of a band-limited forcing.

    Coefficients below ``cutoff`` times the largest are treated as round-off
    and removed; |k|^{2n} weights at n ~ 8 would otherwise amplify them.
    """
    mag = np.abs(f.coeffs)
    f = SpectralField(f.grid, np.where(mag >= cutoff * mag.max(initial=0.0), f.coeffs, 0.0))
    _check_mean_zero(f)
    lam, at = lambda_f(f, n_max)
    phis = tuple(jn(f, n) for n in range(n_max + 2))
    return ForcingSpectrum(f, phis, lam, n_max, at)


def zero_forcing(grid: PeriodicGrid, components: int) -> SpectralField:
    return SpectralField(grid, np.zeros((components,) + grid.shape, dtype=complex))


def fn(J: float, Phi: float, tau: float) -> float:
    return J + tau**2 * Phi


@dataclass(frozen=True)
class DerivedConstants:
    nu: float
    L: float
    tau: float
    lambda_0: float
    lambda_f: float

    @property
    def inv_lambda0_sq(self) -> float:
        return self.lambda_0**-2


def derived_constants(nu: float, L: float, lambda_f: float = math.inf) -> DerivedConstants:
    if not (nu > 0 and L > 0 and lambda_f > 0):
        raise DomainError("nu, L and lambda_f must be positive")
    tau = L**2 / nu
    inv_sq = (0.0 if math.isinf(lambda_f) else lambda_f**-2) + L**-2
    return DerivedConstants(nu, L, tau, 1.0 / math.sqrt(inv_sq), lambda_f)


def running_mean(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.cumsum(v) / np.arange(1, v.size + 1)


def long_time_average(values, window: float = 0.2) -> float:
    """Finite-horizon proxy for limsup_t (1/t) int_0^t phi.

    Maximum, over the trailing ``window`` fraction of samples, of the running
    mean.  Samples are assumed uniformly spaced in time.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise DomainError("cannot average an empty series")
    if not 0 < window <= 1:
        raise DomainError(f"window fraction must lie in (0, 1], got {window}")
    rm = running_mean(v)
    start = min(v.size - 1, int(math.floor((1 - window) * v.size)))
    return float(rm[start:].max())


@dataclass(frozen=True)
class SeminormSample:
    t: float
    J: dict
    F: dict


@dataclass
class NormLedger:
    """Append-only record of J_n and F_n along one trajectory."""

    tau: float = 0.0
    phi: tuple[float, ...] = ()
    orders: tuple[int, ...] = (0, 1, 2)
    samples: list[SeminormSample] = field(default_factory=list)

    def append(self, t: float, u: SpectralField) -> SeminormSample:
        if self.samples and t <= self.samples[-1].t:
            raise DomainError("ledger times must increase")
        J = {n: jn(u, n) for n in self.orders}
        F = {n: fn(J[n], self.phi[n] if n < len(self.phi) else 0.0, self.tau) for n in self.orders}
        s = SeminormSample(float(t), J, F)
        self.samples.append(s)
        return s

    def append_values(self, t: float, J: dict) -> SeminormSample:
        F = {n: fn(J[n], self.phi[n] if n < len(self.phi) else 0.0, self.tau) for n in J}
        s = SeminormSample(float(t), dict(J), F)
        self.samples.append(s)
        return s

    def __len__(self):
        return len(self.samples)

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def J(self, n: int) -> np.ndarray:
        return np.array([s.J[n] for s in self.samples])

    def F(self, n: int) -> np.ndarray:
        return np.array([s.F[n] for s in self.samples])

    def rows(self):
        for s in self.samples:
            yield [s.t, s.J[0], s.J[1], s.J[2], s.F[0], s.F[1], s.F[2]]

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LEDGER_COLUMNS)
        for row in self.rows():
            w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_rows(cls, rows, tau: float = 0.0, phi=()) -> "NormLedger":
        led = cls(tau=tau, phi=tuple(phi))
        for r in rows:
            t, j0, j1, j2, f0, f1, f2 = (float(x) for x in r)
            led.samples.append(SeminormSample(t, {0: j0, 1: j1, 2: j2}, {0: f0, 1: f1, 2: f2}))
        return led
