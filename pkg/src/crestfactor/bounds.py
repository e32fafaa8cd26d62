"""Time-averaged crest-factor bounds for the Navier-Stokes equations on the torus."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .crest import kolmogorov_length, length_scale_lnr
from .errors import DomainError
from .ledger import derived_constants, long_time_average

ETA = 1.82


class BoundInapplicable(DomainError):
    """The hypotheses of a bound are not met by the supplied inputs."""


@dataclass(frozen=True)
class Bound2dInputs:
    nu: float
    Phi0: float
    Phi1: float
    lambda_f: float
    L: float = 2 * math.pi
    eta: float = ETA
    c1: float = 0.5
    c2: float = 0.5

    def __post_init__(self):
        if not (self.nu > 0 and self.Phi0 > 0 and self.Phi1 > 0 and self.lambda_f > 0):
            raise DomainError("nu, Phi0, Phi1 and lambda_f must be positive")
        if not (0 < self.c1 < 1 and 0 < self.c2 < 1 and abs(self.c1 + self.c2 - 1) < 1e-12):
            raise DomainError("c1, c2 must lie in (0, 1) and sum to one")


def eta_hat(b: Bound2dInputs) -> float:
    return b.eta - 0.25 * math.log(4 * b.c1 * b.c2)


def bound_2d(b: Bound2dInputs) -> float:
    """Upper bound on the long-time average of the forced crest factor in 2D."""
    k = derived_constants(b.nu, b.L, b.lambda_f)
    bracket = (eta_hat(b) + 0.5 * math.log(b.Phi0 * b.Phi1 / b.nu**2)
               + 1 / (2 * math.e) / (k.tau**2 * b.Phi1))
    if bracket < 0:
        raise BoundInapplicable(f"bracket {bracket:.4g} is negative; bound does not apply")
    return 1 / math.sqrt(4 * math.pi) * (b.L / k.lambda_0) * math.sqrt(bracket)


@dataclass(frozen=True)
class Bound3dInputs:
    L: float
    nu: float
    lambda_0: float
    mean_du_inf: float
    c2: float
    c1: float = 3.0

    def __post_init__(self):
        if not all(v > 0 for v in (self.L, self.nu, self.lambda_0, self.mean_du_inf, self.c1, self.c2)):
            raise DomainError("3D bound inputs must be positive")


def bound_3d(b: Bound3dInputs) -> float:
    return (b.L**1.5 * b.c2 * b.lambda_0**-0.75
            * (b.c1 * b.mean_du_inf / b.nu + b.lambda_0**-2) ** 0.375)


def approx_3d(b: Bound3dInputs) -> float:
    """Large-gradient form: the lambda_0^-2 term inside the bracket is dropped."""
    return b.L**1.5 * b.c2 * b.lambda_0**-0.75 * (b.c1 * b.mean_du_inf / b.nu) ** 0.375


def averaging_tolerance(T: float) -> float:
    """Finite-horizon budget for limsup-based comparisons."""
    return 5.0 / T


def holder_lemma_check(A, B, alpha: float, T: float | None = None, window: float = 0.2):
    """(<(AB)^alpha>, <A>^alpha <B>^alpha, holds) for 0 < alpha <= 1/2."""
    if not 0 < alpha <= 0.5:
        raise DomainError(f"alpha must lie in (0, 1/2], got {alpha}")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(A <= 0) or np.any(B <= 0):
        raise DomainError("series must be positive")
    lhs = long_time_average((A * B) ** alpha, window)
    rhs = long_time_average(A, window) ** alpha * long_time_average(B, window) ** alpha
    tol = averaging_tolerance(T) if T else 1e-12 * rhs
    return lhs, rhs, lhs <= rhs + tol


def check_provisos(tau: float, Phi0: float, Phi1: float):
    if not tau**2 * Phi0 > 1:
        raise BoundInapplicable(f"proviso tau^2 Phi0 > 1 fails ({tau**2 * Phi0:.4g})")
    if not tau**2 * Phi1 > 1:
        raise BoundInapplicable(f"proviso tau^2 Phi1 > 1 fails ({tau**2 * Phi1:.4g})")


def taf_checks(record, c1: float = 3.0, window: float = 0.2) -> dict:
    """Slacks of <F1/F0> <= lambda0^-2 and <F2/F1> <= c1 <||Du||_inf>/nu + lambda0^-2."""
    p = record.params
    check_provisos(p["tau"], p["phi"][0], p["phi"][1])
    led = record.ledger
    F0, F1, F2 = led.F(0), led.F(1), led.F(2)
    t = record.t
    T = float(t[-1] - t[0])
    inv_l0 = p["lambda_0"] ** -2
    du = long_time_average(record.diagnostics["Du_inf"], window)
    m10 = long_time_average(F1 / F0, window)
    m21 = long_time_average(F2 / F1, window)
    tol = averaging_tolerance(T)
    s0 = inv_l0 - m10
    s1 = c1 * du / p["nu"] + inv_l0 - m21
    return {
        "taf0": {"measured": m10, "bound": inv_l0, "slack": s0, "tolerance": tol, "pass": s0 >= -tol},
        "taf1": {"measured": m21, "bound": c1 * du / p["nu"] + inv_l0, "slack": s1, "tolerance": tol,
                 "pass": s1 >= -tol, "mean_du_inf": du, "c1": c1},
    }


def kolmogorov_regime(record, C_K: float = 1.0, c: float = 1.0, window: float = 0.2) -> dict:
    """Regime diagnostics when ||Du||_inf is comparable to L^{-d/2} ||Du||_2.

    "Comparable" means within a factor two; the vorticity crest factor is then
    expected inside [1/(2 sqrt 2), 2 sqrt 2].  The length-scale inequality uses
    c_K = c C_K^2 and is reported, not enforced.
    """
    p = record.params
    d, L, nu = p["d"], p["L"], p["nu"]
    diag = record.diagnostics
    du_inf = np.asarray(diag["Du_inf"])
    du_l2 = np.asarray(diag["Du_l2"])
    ok = du_l2 > 0
    ratio = du_inf[ok] / (L ** (-d / 2) * du_l2[ok])
    cf_est = L ** (d / 2) * np.asarray(diag["omega_inf"])[ok] / np.asarray(diag["omega_l2"])[ok]
    in_regime = (ratio >= 0.5) & (ratio <= 2.0)
    window_ok = bool(np.all((cf_est[in_regime] >= 1 / (2 * math.sqrt(2)))
                            & (cf_est[in_regime] <= 2 * math.sqrt(2))))
    mean_du_sq = long_time_average(du_l2**2, window)
    eps, lam_k = kolmogorov_length(nu, mean_du_sq, L, C_K, d=d)
    F = {1: record.ledger.F(1), 2: record.ledger.F(2)}
    l = length_scale_lnr(F, 2, 1, window)
    c_K = c * C_K**2
    rhs = c_K * lam_k**-2 + p["lambda_0"] ** -2
    return {
        "ratio_mean": float(ratio.mean()) if ratio.size else None,
        "regime_fraction": float(in_regime.mean()) if ratio.size else 0.0,
        "cf_est_mean": float(cf_est.mean()) if cf_est.size else None,
        "cf_window_holds": window_ok if in_regime.any() else None,
        "epsilon": eps, "lambda_K": lam_k, "l": l, "l_inv_sq": l**-2,
        "c_K": c_K, "rhs": rhs, "sk_holds": l**-2 <= rhs,
    }


def verification_report(record, c1: float = 3.0, window: float = 0.2, kolmogorov: dict | None = None) -> dict:
    """JSON-ready summary of every bound applicable to a 2D NSE record."""
    from .solvers import inequality_residuals

    p = record.params
    out = {"equation": record.equation, "params": {k: v for k, v in p.items() if k != "phi"}}
    out["params"]["Phi0_Phi1_Phi2"] = list(p.get("phi", [])[:3])
    checks = {}
    if p.get("forced"):
        inputs = Bound2dInputs(nu=p["nu"], Phi0=p["phi"][0], Phi1=p["phi"][1],
                               lambda_f=p["lambda_f"], L=p["L"])
        try:
            check_provisos(p["tau"], p["phi"][0], p["phi"][1])
            value = bound_2d(inputs)
            measured = long_time_average(record.crest.select("forced").values, window)
            checks["bound_2d"] = {"inputs": asdict(inputs), "value": value, "measured": measured,
                                  "slack": value - measured, "pass": measured <= value}
        except BoundInapplicable as exc:
            checks["bound_2d"] = {"inputs": asdict(inputs), "inapplicable": str(exc), "pass": None}
        try:
            checks.update(taf_checks(record, c1, window))
        except BoundInapplicable as exc:
            checks["taf0"] = checks["taf1"] = {"inapplicable": str(exc), "pass": None}
    res = inequality_residuals(record, c1)
    checks["f1_evolution"] = {"min_slack": res.min_slack, "tolerance": res.tolerance,
                              "pass": res.holds, "c1": c1}
    checks["kolmogorov_regime"] = kolmogorov_regime(record, **(kolmogorov or {}))
    out["checks"] = checks
    out["pass"] = all(v.get("pass") is not False for v in checks.values() if isinstance(v, dict))
    return out
