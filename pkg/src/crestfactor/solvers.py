"""Pseudo-spectral time integration of the heat, Burgers and 2D Navier-Stokes equations.

Diffusion is integrated exactly through an integrating factor; the
quadratic nonlinearity is advanced explicitly with Heun's method and
dealiased by the 2/3 rule.  Dirichlet problems on [0, pi] are solved on the
odd periodic extension to [0, 2 pi], which keeps the sine basis exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .crest import CrestSeries, crest_value
from .errors import ConfigurationError, DomainError, InstabilityError
from .ledger import ForcingSpectrum, NormLedger, derived_constants, jn
from .spectral import PeriodicGrid, SpectralField, norm, to_physical, to_spectral


@dataclass(frozen=True)
class SolverState:
    t: float
    field: SpectralField
    params: dict


@dataclass
class TrajectoryRecord:
    """Sampled output of one run.

    ``diagnostics`` holds per-sample arrays keyed by name (always ``t``; the
    NSE solver adds ``Du_inf``, ``Du_l2``, ``omega_inf``, ``omega_l2``, ``u_inf``).
    """

    equation: str
    ledger: NormLedger
    crest: CrestSeries
    diagnostics: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    final: SolverState | None = None
    residuals: np.ndarray | None = None

    @property
    def t(self) -> np.ndarray:
        return np.asarray(self.diagnostics["t"])


def odd_extension(phi: Callable, N: int) -> np.ndarray:
    """Samples on [0, 2 pi) of the odd 2 pi-periodic extension of phi from [0, pi]."""
    x = np.arange(N) * (2 * math.pi / N)
    out = np.zeros(N)
    inner = (x > 0) & (x < math.pi)
    out[inner] = phi(x[inner])
    upper = x > math.pi
    out[upper] = -phi(2 * math.pi - x[upper])
    return out


def _sample_times(T: float, dt: float, sample_every: int) -> tuple[int, int]:
    if not (T > 0 and dt > 0):
        raise ConfigurationError("T and dt must be positive")
    steps = int(round(T / dt))
    if abs(steps * dt - T) > 1e-9 * T:
        raise ConfigurationError(f"T={T} is not a whole number of steps of dt={dt}")
    return steps, max(1, int(sample_every))


# --- heat -----------------------------------------------------------------------

def simulate_heat(initial, k: float, T: float, dt: float, N: int = 128,
                  kind: str = "periodic", sample_every: int = 1) -> TrajectoryRecord:
    """Exact per-mode exponential integration of u_t = k u_xx.

    ``initial`` is a SpectralField on [0, L] (periodic) or a callable on
    [0, pi] (Dirichlet, solved via its odd extension).
    """
    if not k > 0:
        raise ConfigurationError("diffusivity must be positive")
    if kind == "dirichlet":
        grid = PeriodicGrid(1, 2 * math.pi, N)
        u = to_spectral(grid, odd_extension(initial, N))
        L_phys, half = math.pi, 0.5
    elif kind == "periodic":
        u = initial if isinstance(initial, SpectralField) else to_spectral(
            PeriodicGrid(1, 2 * math.pi, N), initial(np.arange(N) * 2 * math.pi / N))
        grid = u.grid
        L_phys, half = grid.L, 1.0
    else:
        raise ConfigurationError(f"unknown boundary kind {kind!r}")
    steps, every = _sample_times(T, dt, sample_every)
    kappa2 = (2 * math.pi / grid.L) ** 2 * grid.k2
    decay = np.exp(-k * kappa2 * dt)
    rec = TrajectoryRecord("heat", NormLedger(), CrestSeries(), {"t": []},
                           {"k": k, "dt": dt, "T": T, "N": N, "kind": kind, "L": L_phys, "d": grid.d})
    coeffs = u.coeffs.copy()
    # round-off in slowly decaying low modes would otherwise overtake the data
    mag = np.abs(coeffs)
    coeffs[mag < 1e-14 * mag.max(initial=0.0)] = 0.0
    for step in range(steps + 1):
        if step % every == 0 or step == steps:
            t = step * dt
            field_now = SpectralField(grid, coeffs)
            J = {n: half * jn(field_now, n) for n in (0, 1, 2)}
            rec.ledger.append_values(t, J)
            rec.crest.append(crest_value(norm(field_now, np.inf), J[0], "bounded", L_phys, grid.d, t=t))
            rec.diagnostics["t"].append(t)
        if step < steps:
            coeffs = coeffs * decay
    rec.final = SolverState(steps * dt, SpectralField(grid, coeffs), rec.params)
    rec.diagnostics = {k_: np.asarray(v) for k_, v in rec.diagnostics.items()}
    return rec


# --- Burgers --------------------------------------------------------------------

def simulate_burgers(phi0: Callable, eps: float, T: float, dt: float, N: int = 256,
                     sample_every: int = 1, cfl_max: float = 1.0) -> TrajectoryRecord:
    """u_t = eps u_xx - u u_x on [0, pi], u = 0 at both ends."""
    if not eps > 0:
        raise ConfigurationError("viscosity must be positive")
    grid = PeriodicGrid(1, 2 * math.pi, N)
    steps, every = _sample_times(T, dt, sample_every)
    kappa = grid.k1d * (2 * math.pi / grid.L)
    kappa = np.where(np.abs(grid.k1d) == N // 2, 0.0, kappa)
    E = np.exp(-eps * kappa**2 * dt)
    mask = grid.dealias_mask
    fwd = lambda a: np.fft.fft(a) / N
    inv = lambda c: np.fft.ifft(c).real * N

    def nonlinear(c):
        u = inv(c)
        return -0.5j * kappa * fwd(u * u) * mask

    c = 1j * fwd(odd_extension(phi0, N)).imag
    rec = TrajectoryRecord("burgers", NormLedger(), CrestSeries(), {"t": []},
                           {"eps": eps, "dt": dt, "T": T, "N": N, "L": math.pi, "d": 1})
    for step in range(steps + 1):
        if step % every == 0 or step == steps:
            t = step * dt
            f = SpectralField(grid, c)
            J = {n: 0.5 * jn(f, n) for n in (0, 1, 2)}
            sup = norm(f, np.inf)
            if sup * dt / grid.dx > cfl_max:
                raise InstabilityError(f"CFL number {sup * dt / grid.dx:.3g} exceeds {cfl_max} at t={t}")
            rec.ledger.append_values(t, J)
            rec.diagnostics["t"].append(t)
            if J[0] > 0:
                rec.crest.append(crest_value(sup, J[0], "bounded", math.pi, 1, t=t))
        if step < steps:
            k1 = nonlinear(c)
            c1 = E * (c + dt * k1)
            k2 = nonlinear(c1)
            c = E * c + 0.5 * dt * (E * k1 + k2)
            c = 1j * c.imag  # odd symmetry
    rec.final = SolverState(steps * dt, SpectralField(grid, c), rec.params)
    rec.diagnostics = {k_: np.asarray(v) for k_, v in rec.diagnostics.items()}
    return rec


def burgers_on_grid(rec: TrajectoryRecord) -> tuple[np.ndarray, np.ndarray]:
    """(x, u) of the final Burgers state restricted to [0, pi]."""
    f = rec.final.field
    u = to_physical(f)[0]
    x = f.grid.x
    keep = x <= math.pi + 1e-12
    return x[keep], u[keep]


# --- 2D Navier-Stokes -------------------------------------------------------------

class NSE2D:
    """Vorticity form on the torus [0, L]^2, real-FFT storage."""

    def __init__(self, grid: PeriodicGrid, nu: float, forcing: ForcingSpectrum | None = None):
        if grid.d != 2:
            raise ConfigurationError("NSE2D needs a 2D grid")
        if not nu > 0:
            raise ConfigurationError("viscosity must be positive")
        self.grid, self.nu, self.forcing = grid, nu, forcing
        N, L = grid.N, grid.L
        kx = np.fft.fftfreq(N, 1.0 / N)
        ky = np.fft.rfftfreq(N, 1.0 / N)
        self.ikx, self.iky = np.meshgrid(kx, ky, indexing="ij")
        self.kx = self.ikx * (2 * math.pi / L)
        self.ky = self.iky * (2 * math.pi / L)
        k2 = self.kx**2 + self.ky**2
        self.k2 = k2
        self.inv_k2 = np.where(k2 > 0, 1.0 / np.where(k2 > 0, k2, 1.0), 0.0)
        self.mask = (np.abs(self.ikx) <= N / 3) & (np.abs(self.iky) <= N / 3)
        if forcing is not None:
            fh = np.fft.rfft2(to_physical(forcing.f))
            if fh.shape[0] != 2:
                raise ConfigurationError("NSE2D forcing must be a 2-component velocity field")
            self.f_omega = 1j * self.kx * fh[1] - 1j * self.ky * fh[0]
        else:
            self.f_omega = np.zeros_like(self.k2, dtype=complex)

    def rfft(self, a):
        return np.fft.rfft2(a)

    def irfft(self, c):
        return np.fft.irfft2(c, s=self.grid.shape)

    def velocity_hat(self, w):
        psi = w * self.inv_k2
        return 1j * self.ky * psi, -1j * self.kx * psi

    def nonlinear(self, w):
        uh, vh = self.velocity_hat(w)
        u, v = self.irfft(uh), self.irfft(vh)
        wx, wy = self.irfft(1j * self.kx * w), self.irfft(1j * self.ky * w)
        out = -self.rfft(u * wx + v * wy) * self.mask
        out[0, 0] = 0.0
        return out

    def step(self, w, dt, E):
        k1 = self.nonlinear(w) + self.f_omega
        w1 = E * (w + dt * k1)
        k2 = self.nonlinear(w1) + self.f_omega
        w = E * w + 0.5 * dt * (E * k1 + k2)
        w[0, 0] = 0.0
        return w

    def velocity_field(self, w) -> SpectralField:
        uh, vh = self.velocity_hat(w)
        return to_spectral(self.grid, np.stack([self.irfft(uh), self.irfft(vh)]))

    def divergence_max(self, w) -> float:
        uh, vh = self.velocity_hat(w)
        return float(np.max(np.abs(self.kx * uh + self.ky * vh)))


def default_dt(grid: PeriodicGrid, nu: float, u_scale: float, safety: float = 0.25) -> float:
    """safety x min(advective CFL step, viscous step at the dealiasing cut-off)."""
    kmax = (2 * math.pi / grid.L) * grid.N / 3
    cfl = grid.dx / max(u_scale, 1e-12)
    visc = 1.0 / (nu * kmax**2)
    return safety * min(cfl, visc)


def simulate_nse2d(omega0: SpectralField, nu: float, forcing: ForcingSpectrum | None, T: float,
                   dt: float, sample_every: int = 1, blowup: float = 1e12) -> TrajectoryRecord:
    """Forced or decaying 2D turbulence from a mean-zero vorticity field."""
    grid = omega0.grid
    if abs(omega0.mean()[0]) > 1e-12 * max(1.0, norm(omega0, 2)):
        raise DomainError("initial vorticity must have zero mean")
    steps, every = _sample_times(T, dt, sample_every)
    solver = NSE2D(grid, nu, forcing)
    E = np.exp(-nu * solver.k2 * dt)
    phi = forcing.phi if forcing is not None else (0.0, 0.0, 0.0, 0.0)
    lam_f = forcing.lambda_f if forcing is not None else math.inf
    consts = derived_constants(nu, grid.L, lam_f)
    tau = consts.tau if forcing is not None else 0.0
    ledger = NormLedger(tau=tau, phi=tuple(phi))
    rec = TrajectoryRecord("nse2d", ledger, CrestSeries(), {k: [] for k in (
        "t", "u_inf", "Du_inf", "Du_l2", "omega_inf", "omega_l2", "div_max")},
        {"nu": nu, "dt": dt, "T": T, "N": grid.N, "L": grid.L, "d": 2, "tau": consts.tau,
         "lambda_f": lam_f, "lambda_0": consts.lambda_0, "phi": list(phi),
         "forced": forcing is not None, "sample_interval": dt * every})
    w = np.fft.rfft2(to_physical(omega0)[0])
    w[0, 0] = 0.0
    for step in range(steps + 1):
        if step % every == 0 or step == steps:
            t = step * dt
            _record_nse(rec, solver, w, t)
        if step < steps:
            w = solver.step(w, dt, E)
            if step % every == 0 and not np.all(np.isfinite(w)):
                raise InstabilityError(f"non-finite vorticity at t={(step + 1) * dt}")
            if rec.diagnostics["omega_inf"][-1] > blowup:
                raise InstabilityError(f"vorticity exceeded {blowup:g} at t={t}")
    rec.final = SolverState(steps * dt, to_spectral(grid, solver.irfft(w)), rec.params)
    rec.diagnostics = {k: np.asarray(v) for k, v in rec.diagnostics.items()}
    return rec


def _record_nse(rec: TrajectoryRecord, solver: NSE2D, w, t: float):
    g = solver.grid
    u = solver.velocity_field(w)
    s = rec.ledger.append(t, u)
    omega = solver.irfft(w)
    du = [solver.irfft(1j * k * c) for c in solver.velocity_hat(w) for k in (solver.kx, solver.ky)]
    u_inf = norm(u, np.inf)
    d = rec.diagnostics
    d["t"].append(t)
    d["u_inf"].append(u_inf)
    d["Du_inf"].append(float(max(np.max(np.abs(a)) for a in du)))
    d["Du_l2"].append(math.sqrt(s.J[1]))
    d["omega_inf"].append(float(np.max(np.abs(omega))))
    d["omega_l2"].append(math.sqrt(g.volume * float(np.sum(np.abs(np.fft.fft2(omega) / g.N**2) ** 2))))
    d["div_max"].append(solver.divergence_max(w))
    if s.J[0] > 0:
        rec.crest.append(crest_value(u_inf, s.J[0], "bounded", g.L, 2, t=t))
    if rec.params["forced"]:
        rec.crest.samples.append(crest_value(u_inf, s.J[0], "forced", g.L, 2, F0=s.F[0], t=t))


# --- differential-inequality residuals ------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    slacks: np.ndarray
    min_slack: float
    tolerance: float

    @property
    def holds(self) -> bool:
        return self.min_slack >= -self.tolerance


def inequality_residuals(rec: TrajectoryRecord, c1: float = 3.0) -> ResidualReport:
    """Slack of (1/2) dF1/dt <= -nu F2 + nu tau^2 Phi2 + c1 ||Du||_inf F1 + F1/tau.

    dF1/dt by centred differences at interior samples; the tolerance is
    10 h^2 max|F1''| with h the sample spacing.
    """
    t = rec.t
    if t.size < 3:
        raise DomainError("need at least three samples for centred differences")
    p = rec.params
    nu, tau = p["nu"], p["tau"]
    phi2 = p["phi"][2] if p.get("forced") else 0.0
    inv_tau = 1.0 / tau if p.get("forced") else 0.0
    F1, F2 = rec.ledger.F(1), rec.ledger.F(2)
    du = np.asarray(rec.diagnostics["Du_inf"])
    dF1 = (F1[2:] - F1[:-2]) / (t[2:] - t[:-2])
    rhs = -nu * F2 + nu * tau**2 * phi2 + c1 * du * F1 + inv_tau * F1
    slacks = rhs[1:-1] - 0.5 * dF1
    h = float(np.max(np.diff(t)))
    F1dd = (F1[2:] - 2 * F1[1:-1] + F1[:-2]) / h**2
    tol = 10 * h**2 * float(np.max(np.abs(F1dd)))
    rec.residuals = slacks
    return ResidualReport(slacks, float(slacks.min()), tol)


def energy_balance_residual(rec: TrajectoryRecord) -> np.ndarray:
    """|dJ0/dt + 2 nu J1| / (2 nu J1) at interior samples (unforced runs)."""
    t = rec.t
    J0, J1 = rec.ledger.J(0), rec.ledger.J(1)
    nu = rec.params["nu"]
    dJ0 = (J0[2:] - J0[:-2]) / (t[2:] - t[:-2])
    return np.abs(dJ0 + 2 * nu * J1[1:-1]) / (2 * nu * J1[1:-1])
