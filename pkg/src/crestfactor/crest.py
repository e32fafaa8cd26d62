"""Crest-factor variants, the interpolation sandwich and derived length scales."""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateFieldError, DomainError
from .ledger import F_FLOOR, jn, long_time_average
from .spectral import PeriodicGrid, SpectralField, norm, random_band_limited

VARIANTS = ("unbounded", "bounded", "forced")
CREST_COLUMNS = ("t", "variant", "sup_norm", "denom", "C_f")


@dataclass(frozen=True)
class CrestSample:
    t: float
    variant: str
    C_f: float
    sup_norm: float
    denom: float


def crest_value(sup_norm: float, J0: float, variant: str = "bounded", L: float = 1.0, d: int = 1,
                F0: float | None = None, t: float = 0.0, floor: float = F_FLOOR) -> CrestSample:
    """Crest factor from precomputed norms."""
    if variant not in VARIANTS:
        raise DomainError(f"unknown crest variant {variant!r}")
    if variant == "forced":
        if F0 is None:
            raise DomainError("forced variant needs F0")
        denom_sq = F0
    else:
        denom_sq = J0
    if not denom_sq > floor:
        raise DegenerateFieldError(f"crest denominator {denom_sq!r} below floor {floor}")
    denom = math.sqrt(denom_sq)
    scale = 1.0 if variant == "unbounded" else L ** (d / 2)
    return CrestSample(float(t), variant, scale * sup_norm / denom, float(sup_norm), denom)


def crest(u: SpectralField, variant: str = "bounded", F0: float | None = None,
          t: float = 0.0, floor: float = F_FLOOR) -> CrestSample:
    """Crest factor of a field on its own torus.

    unbounded: ||u||_inf / J0^1/2; bounded: L^{d/2} ||u||_inf / J0^1/2;
    forced: L^{d/2} ||u||_inf / F0^1/2.
    """
    g = u.grid
    return crest_value(norm(u, np.inf), jn(u, 0), variant, g.L, g.d, F0, t, floor)


@dataclass
class CrestSeries:
    samples: list[CrestSample] = field(default_factory=list)

    def append(self, s: CrestSample):
        if self.samples and s.t <= self.samples[-1].t:
            raise DomainError("crest series times must increase")
        self.samples.append(s)

    def __len__(self):
        return len(self.samples)

    def select(self, variant: str) -> "CrestSeries":
        return CrestSeries([s for s in self.samples if s.variant == variant])

    @property
    def variants(self) -> list[str]:
        return sorted({s.variant for s in self.samples})

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.C_f for s in self.samples])

    def write_csv(self, fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CREST_COLUMNS)
        for s in self.samples:
            w.writerow([repr(s.t), s.variant, repr(s.sup_norm), repr(s.denom), repr(s.C_f)])

    @classmethod
    def read_csv(cls, fh) -> "CrestSeries":
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = [h.strip() for h in next(reader)]
        if tuple(header) != CREST_COLUMNS:
            raise DomainError(f"unexpected crest series header {header}")
        out = cls()
        for row in reader:
            if not row:
                continue
            t, variant, sup, den, cf = row
            out.samples.append(CrestSample(float(t), variant.strip(), float(cf), float(sup), float(den)))
        return out


# --- interpolation sandwich ---------------------------------------------------

def gni_ratio(u: SpectralField, n: int) -> float:
    """C_f (J0/J_n)^{d/4n} / L^{d/2}: the smallest admissible c(n, d, L) for u."""
    g = u.grid
    cf = crest(u, "bounded").C_f
    return cf * (jn(u, 0) / jn(u, n)) ** (g.d / (4 * n)) / g.L ** (g.d / 2)


def calibration_field(grid: PeriodicGrid, rng: np.random.Generator) -> SpectralField:
    """One draw of the random band-limited mean-zero family used for calibration."""
    kmax = rng.uniform(1.0, grid.N / 3)
    slope = rng.uniform(0.0, 3.0)
    return random_band_limited(grid, rng, kmax=kmax, slope=slope)


def calibrate_gni(n: int, d: int, L: float, N: int, samples: int = 10_000, seed: int = 0,
                  margin: float = 1.05) -> float:
    """margin x max of :func:`gni_ratio` over ``samples`` random fields."""
    if n <= d / 2:
        raise DomainError(f"interpolation bound needs n > d/2, got n={n}, d={d}")
    grid = PeriodicGrid(d, L, N)
    rng = np.random.default_rng(seed)
    worst = max(gni_ratio(calibration_field(grid, rng), n) for _ in range(samples))
    return margin * worst


def default_cache_path() -> Path:
    root = os.environ.get("CRESTFACTOR_CACHE")
    if root:
        return Path(root) / "gni_calibration.json"
    return Path.home() / ".cache" / "crestfactor" / "gni_calibration.json"


def _key(n, d, L, N) -> str:
    return f"n={n},d={d},L={float(L)!r},N={N}"


@dataclass
class GniConstants:
    """Calibrated c(n, d, L) values keyed by (n, d, L, N), persisted as JSON."""

    path: Path = field(default_factory=default_cache_path)
    values: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: Path | None = None) -> "GniConstants":
        path = Path(path) if path else default_cache_path()
        values = json.loads(path.read_text()) if path.exists() else {}
        return cls(path, values)

    def save(self):
        from .io import atomic_write_text

        self.path.parent.mkdir(parents=True, exist_ok=True)
        atomic_write_text(self.path, json.dumps(self.values, indent=2, sort_keys=True) + "\n")

    def get(self, n: int, d: int, L: float, N: int, calibrate: bool = True, **kw) -> float:
        key = _key(n, d, L, N)
        if key not in self.values:
            if not calibrate:
                raise KeyError(key)
            self.values[key] = calibrate_gni(n, d, L, N, **kw)
            self.save()
        return self.values[key]


def gni_sandwich(u: SpectralField, n: int, c: float) -> tuple[float, float]:
    """(1, c L^{d/2} (J_n/J_0)^{d/4n}); the bounded crest factor lies between them."""
    g = u.grid
    if n <= g.d / 2:
        raise DomainError(f"interpolation bound needs n > d/2, got n={n}, d={g.d}")
    J0 = jn(u, 0)
    if not J0 > F_FLOOR:
        raise DegenerateFieldError("zero field has no crest factor")
    return 1.0, c * g.L ** (g.d / 2) * (jn(u, n) / J0) ** (g.d / (4 * n))


# --- length scales ------------------------------------------------------------

def length_scale_l(Jn: float, J0: float, n: int, d: int, c: float = 1.0) -> float:
    """l with l^{-d/2} = c (J_n/J_0)^{d/4n}."""
    if not J0 > F_FLOOR:
        raise DegenerateFieldError("J0 below floor")
    return (c * (Jn / J0) ** (d / (4 * n))) ** (-2.0 / d)


def length_scale_lnr(F: dict, n: int, r: int, window: float = 0.2) -> float:
    """l_{n,r} from <(F_n/F_r)^{1/(n-r)}>; ``F`` maps order -> time series."""
    if not n > r >= 0:
        raise DomainError(f"need n > r >= 0, got n={n}, r={r}")
    Fn = np.asarray(F[n], dtype=float)
    Fr = np.asarray(F[r], dtype=float)
    if np.any(Fr <= F_FLOOR):
        raise DegenerateFieldError(f"F_{r} vanishes along the series")
    inv_sq = long_time_average((Fn / Fr) ** (1.0 / (n - r)), window)
    return 1.0 / math.sqrt(inv_sq)


def kolmogorov_length(nu: float, mean_du_sq: float, L: float, C_K: float = 1.0,
                      d: int = 3) -> tuple[float, float]:
    """(epsilon, lambda_K) with epsilon = L^-d nu <||Du||_2^2>."""
    if not (nu > 0 and mean_du_sq > 0 and L > 0 and C_K > 0):
        raise DomainError("Kolmogorov length needs positive inputs")
    eps = nu * mean_du_sq / L**d
    return eps, C_K * (nu**3 / eps) ** 0.25
