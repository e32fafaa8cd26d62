"""Scenario files: TOML (or JSON) with one table per concern.

Grammar::

    name = "kolmogorov-4"          # required
    equation = "nse2d"             # heat | wave | burgers | nse2d | oracle:<name>
    seed = 0
    checks = ["bound_2d", "taf", "residual", "kolmogorov", "classify"]

    [domain]   d, L, N, kind ("periodic" | "dirichlet")
    [physics]  nu, k, eps, U0, Omega0, U, speed2, x, y
    [initial]  preset, amplitude, kmax, slope, modes
    [forcing]  type ("none" | "kolmogorov" | "modes"), k0, amplitude, modes
    [time]     T, dt, sample_every, t0, samples, periods, spacing
    [classifier] trim, zero_one_stride, and any Thresholds field

Unknown keys and missing parameters are reported together, each prefixed by
its dotted field name.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .classifier import Thresholds
from .errors import ConfigurationError, DomainError
from .ledger import ForcingSpectrum, derived_constants, forcing_spectrum
from .spectral import PeriodicGrid, to_spectral

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EQUATIONS = ("heat", "wave", "burgers", "nse2d", "oracle:stokes2", "oracle:halfplane",
             "oracle:burgers", "oracle:stokes-green")
CHECKS = ("bound_2d", "taf", "residual", "kolmogorov", "classify")


class ScenarioError(ConfigurationError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class Domain:
    d: int = 1
    L: float = 2 * math.pi
    N: int = 128
    kind: str = "periodic"


@dataclass(frozen=True)
class Physics:
    nu: float | None = None
    k: float | None = None
    eps: float | None = None
    U0: float | None = None
    Omega0: float | None = None
    U: float | None = None
    speed2: float = 1.0
    x: tuple | None = None
    y: tuple | None = None


@dataclass(frozen=True)
class Initial:
    preset: str = "modes"
    amplitude: float = 1.0
    kmax: float = 4.0
    slope: float = 1.0
    modes: tuple = ()


@dataclass(frozen=True)
class Forcing:
    type: str = "none"
    k0: int = 1
    amplitude: float = 0.0
    modes: tuple = ()


@dataclass(frozen=True)
class TimeSpec:
    T: float | None = None
    dt: float | None = None
    sample_every: int = 1
    t0: float = 0.0
    samples: int = 512
    periods: float = 2.0
    spacing: str = "linear"


@dataclass(frozen=True)
class ClassifierSpec:
    trim: float = 0.2
    zero_one_stride: int = 1
    thresholds: Thresholds = field(default_factory=Thresholds)


@dataclass(frozen=True)
class Scenario:
    name: str
    equation: str
    seed: int = 0
    domain: Domain = field(default_factory=Domain)
    physics: Physics = field(default_factory=Physics)
    initial: Initial = field(default_factory=Initial)
    forcing: Forcing = field(default_factory=Forcing)
    time: TimeSpec = field(default_factory=TimeSpec)
    checks: tuple = ()
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)

    def with_overrides(self, seed: int | None = None, dt: float | None = None,
                       resolution: int | None = None) -> "Scenario":
        s = self
        if seed is not None:
            s = replace(s, seed=int(seed))
        if dt is not None:
            s = replace(s, time=replace(s.time, dt=float(dt)))
        if resolution is not None:
            s = replace(s, domain=replace(s.domain, N=int(resolution)))
        validate(s)
        return s


SECTIONS = {"domain": Domain, "physics": Physics, "initial": Initial, "forcing": Forcing,
            "time": TimeSpec}


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, dict):
        return {k: _freeze(x) for k, x in v.items()}
    return v


def _coerce(cls, name: str, raw: dict, errors: list[str]):
    known = {f.name: f for f in fields(cls)}
    out = {}
    for key, value in raw.items():
        if key not in known:
            errors.append(f"{name}.{key}: unknown key")
            continue
        want = known[key].type
        try:
            if want == "int" and not isinstance(value, bool):
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError
                value = int(value)
            elif want in ("float", "float | None"):
                value = float(value)
            elif want == "str" and not isinstance(value, str):
                raise ValueError
        except (TypeError, ValueError):
            errors.append(f"{name}.{key}: expected {want}, got {value!r}")
            continue
        out[key] = _freeze(value)
    return cls(**out)


def from_mapping(data: dict) -> Scenario:
    errors: list[str] = []
    top = {"name", "equation", "seed", "checks", "classifier", *SECTIONS}
    for key in data:
        if key not in top:
            errors.append(f"{key}: unknown key")
    for key in ("name", "equation"):
        if key not in data:
            errors.append(f"{key}: missing")
    parts = {}
    for sec, cls in SECTIONS.items():
        raw = data.get(sec, {})
        if not isinstance(raw, dict):
            errors.append(f"{sec}: expected a table")
            raw = {}
        parts[sec] = _coerce(cls, sec, raw, errors)
    cls_raw = dict(data.get("classifier", {}))
    trim = cls_raw.pop("trim", 0.2)
    stride = cls_raw.pop("zero_one_stride", 1)
    th = _coerce(Thresholds, "classifier", cls_raw, errors)
    checks = data.get("checks", [])
    if not isinstance(checks, list):
        errors.append("checks: expected a list")
        checks = []
    if errors:
        raise ScenarioError(errors)
    s = Scenario(name=str(data["name"]), equation=str(data["equation"]), seed=int(data.get("seed", 0)),
                 checks=tuple(checks), classifier=ClassifierSpec(float(trim), int(stride), th), **parts)
    validate(s)
    return s


def parse_config(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"{path}: no such file")
    text = path.read_text()
    try:
        data = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    return from_mapping(data)


# --- validation ---------------------------------------------------------------------

REQUIRED = {
    "heat": ("physics.k", "time.T", "time.dt"),
    "wave": ("time.T",),
    "burgers": ("physics.eps", "time.T", "time.dt"),
    "nse2d": ("physics.nu", "time.T"),
    "oracle:stokes2": ("physics.U0", "physics.Omega0", "physics.nu"),
    "oracle:halfplane": ("physics.U", "physics.nu", "time.T"),
    "oracle:burgers": ("physics.eps", "time.T"),
    "oracle:stokes-green": ("physics.nu", "physics.x", "physics.y", "time.T"),
}


def _get(s: Scenario, dotted: str):
    sec, key = dotted.split(".")
    return getattr(getattr(s, sec), key)


def validate(s: Scenario):
    errors: list[str] = []
    if s.equation not in EQUATIONS:
        raise ScenarioError([f"equation: {s.equation!r} is not one of {', '.join(EQUATIONS)}"])
    for dotted in REQUIRED[s.equation]:
        if _get(s, dotted) is None:
            errors.append(f"{dotted}: required for {s.equation}")
    for dotted in ("physics.nu", "physics.k", "physics.eps", "physics.U0", "physics.Omega0",
                   "physics.U", "time.T", "time.dt", "domain.L"):
        v = _get(s, dotted)
        if v is not None and not v > 0:
            errors.append(f"{dotted}: must be positive, got {v}")
    for c in s.checks:
        if c not in CHECKS:
            errors.append(f"checks: unknown check {c!r}")
    if s.domain.kind not in ("periodic", "dirichlet"):
        errors.append(f"domain.kind: {s.domain.kind!r} is not periodic or dirichlet")
    if s.domain.N < 8 or s.domain.N % 2:
        errors.append(f"domain.N: must be an even integer >= 8, got {s.domain.N}")
    if s.forcing.type not in ("none", "kolmogorov", "modes"):
        errors.append(f"forcing.type: {s.forcing.type!r} is not none, kolmogorov or modes")
    if s.equation == "nse2d":
        if s.domain.d != 2:
            errors.append("domain.d: nse2d runs in two dimensions")
        if s.initial.preset not in ("random", "modes"):
            errors.append(f"initial.preset: {s.initial.preset!r} is not random or modes")
        errors += _forcing_errors(s)
    if s.equation in ("heat", "burgers", "oracle:burgers") and s.initial.preset not in (
            "modes", "sine", "parabola"):
        errors.append(f"initial.preset: {s.initial.preset!r} is not modes, sine or parabola")
    if (s.equation in ("heat", "burgers", "oracle:burgers") and s.initial.preset == "modes"
            and not s.initial.modes):
        errors.append("initial.modes: list [n, a_n] pairs or choose another preset")
    for i, m in enumerate(s.initial.modes if s.equation in ("heat", "burgers", "oracle:burgers") else ()):
        if not (isinstance(m, (list, tuple)) and len(m) == 2):
            errors.append(f"initial.modes[{i}]: expected [n, a_n]")
    if s.equation == "wave":
        if not s.initial.modes:
            errors.append("initial.modes: wave scenarios need at least one mode")
        for i, m in enumerate(s.initial.modes):
            if not isinstance(m, dict) or "k" not in m or len(m["k"]) != s.domain.d:
                errors.append(f"initial.modes[{i}].k: needs {s.domain.d} components")
    if errors:
        raise ScenarioError(errors)
    bound_checks = {"bound_2d", "taf"} & set(s.checks)
    if s.equation == "nse2d" and bound_checks:
        fs = build_forcing(s)
        if fs is None:
            raise ScenarioError([f"forcing.type: {', '.join(sorted(bound_checks))} need a forcing"])
        tau = derived_constants(s.physics.nu, s.domain.L, fs.lambda_f).tau
        for n in (0, 1):
            if not tau**2 * fs.phi[n] > 1:
                errors.append(f"forcing: proviso tau^2 Phi{n} > 1 fails "
                              f"({tau**2 * fs.phi[n]:.4g}) for checks {sorted(bound_checks)}")
    if errors:
        raise ScenarioError(errors)


def _forcing_errors(s: Scenario) -> list[str]:
    out = []
    for i, m in enumerate(s.forcing.modes):
        if not isinstance(m, dict) or "k" not in m or "amplitude" not in m:
            out.append(f"forcing.modes[{i}]: needs k and amplitude")
            continue
        unknown = set(m) - {"k", "amplitude", "phase"}
        if unknown:
            out.append(f"forcing.modes[{i}]: unknown keys {sorted(unknown)}")
        if not all(isinstance(m[key], (list, tuple)) and len(m[key]) == 2 for key in ("k", "amplitude")):
            out.append(f"forcing.modes[{i}]: k and amplitude need two components")
        elif all(int(k) == 0 for k in m["k"]) and abs(math.cos(m.get("phase", 0.0))) > 1e-12:
            out.append(f"forcing.modes[{i}].k: zero wavevector gives the forcing a nonzero mean")
    if s.forcing.type == "kolmogorov" and s.forcing.k0 < 1:
        out.append(f"forcing.k0: must be >= 1, got {s.forcing.k0}")
    return out


def grid_of(s: Scenario) -> PeriodicGrid:
    return PeriodicGrid(s.domain.d, s.domain.L, s.domain.N)


def build_forcing(s: Scenario) -> ForcingSpectrum | None:
    """Velocity forcing on the scenario grid; None when unforced."""
    f = s.forcing
    if f.type == "none":
        return None
    g = grid_of(s)
    X, Y = g.mesh()
    q = 2 * math.pi / g.L
    data = np.zeros((2,) + g.shape)
    if f.type == "kolmogorov":
        data[0] = f.amplitude * np.sin(f.k0 * q * Y)
    else:
        for m in f.modes:
            arg = q * (m["k"][0] * X + m["k"][1] * Y) + m.get("phase", 0.0)
            data[0] += m["amplitude"][0] * np.cos(arg)
            data[1] += m["amplitude"][1] * np.cos(arg)
    try:
        return forcing_spectrum(to_spectral(g, data))
    except DomainError as exc:
        raise ScenarioError([f"forcing: {exc}"]) from exc
