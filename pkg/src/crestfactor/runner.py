"""Execute scenarios and persist their trajectories and reports."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import verification_report
from .classifier import classify, cf_statistics
from .config import Scenario, build_forcing, grid_of
from .crest import CrestSample, CrestSeries
from .errors import ConfigurationError, CrestFactorError, DomainError
from .io import atomic_write_text, render
from .ledger import NormLedger
from .oracles import (ORACLE_COLUMNS, BurgersColeHopf, HalfPlane, HalfPlaneParams,
                      HeatSeriesSolution, Stokes2, Stokes2Params, WaveMode, stokes_green, wave_crest)
from .solvers import (TrajectoryRecord, burgers_on_grid, default_dt, simulate_burgers,
                      simulate_heat, simulate_nse2d)
from .spectral import SpectralField, norm, random_band_limited, to_spectral

OUTPUT_ENV = "CRESTFACTOR_OUTPUT"


def output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ENV, "runs"))


@dataclass
class RunResult:
    out_dir: Path
    files: list[str]
    verification: dict
    classification: dict | None
    status: int = 0


@dataclass
class _Outputs:
    """Everything a run produces, rendered to text before anything is written."""

    record: TrajectoryRecord | None = None
    crest: CrestSeries | None = None
    oracle_rows: list | None = None
    oracle_columns: tuple = ORACLE_COLUMNS
    verification: dict = field(default_factory=dict)
    classify_variant: str = "bounded"


# --- initial data -----------------------------------------------------------------

def _mode_pairs(s: Scenario) -> dict:
    return {int(n): float(a) for n, a in s.initial.modes}


def _profile_1d(s: Scenario):
    """Callable initial profile on [0, pi] for heat and Burgers scenarios."""
    ini = s.initial
    if ini.preset == "sine":
        return lambda x: ini.amplitude * np.sin(x)
    if ini.preset == "parabola":
        return lambda x: ini.amplitude * x * (math.pi - x)
    modes = _mode_pairs(s)
    return lambda x: sum(a * np.sin(n * np.asarray(x)) for n, a in modes.items())


def nse_initial(s: Scenario) -> SpectralField:
    g = grid_of(s)
    ini = s.initial
    if ini.preset == "random":
        rng = np.random.default_rng(s.seed)
        w = random_band_limited(g, rng, ini.kmax, 1, ini.slope)
        rms = norm(w, 2) / math.sqrt(g.volume)
        return w.scaled(ini.amplitude / rms)
    X, Y = g.mesh()
    q = 2 * math.pi / g.L
    data = np.zeros(g.shape)
    for m in ini.modes:
        data += m["amplitude"] * np.cos(q * (m["k"][0] * X + m["k"][1] * Y) + m.get("phase", 0.0))
    return to_spectral(g, data)


# --- per-equation drivers ------------------------------------------------------------

def _times(s: Scenario, start: float | None = None) -> np.ndarray:
    t0 = s.time.t0 if start is None else start
    if s.time.spacing == "log":
        if not t0 > 0:
            raise ConfigurationError("time.t0: log spacing needs t0 > 0")
        return np.logspace(math.log10(t0), math.log10(s.time.T), s.time.samples)
    return np.linspace(t0, s.time.T, s.time.samples)


def _crest_from_rows(rows, variant: str) -> CrestSeries:
    cs = CrestSeries()
    for t, sup, l2, cf in rows:
        cs.append(CrestSample(t, variant, cf, sup, l2))
    return cs


def _run_heat(s: Scenario) -> _Outputs:
    kind = s.domain.kind
    if s.initial.preset == "modes":
        oracle = HeatSeriesSolution(_mode_pairs(s), s.physics.k, kind)
    else:
        oracle = HeatSeriesSolution.from_initial(_profile_1d(s), s.physics.k, kind)
    rec = simulate_heat(lambda x: oracle(x, 0.0), s.physics.k, s.time.T, s.time.dt,
                        s.domain.N, kind, s.time.sample_every)
    cf = rec.crest.values
    t = rec.t
    env = np.array([oracle.envelope(tt) for tt in t])
    asym = oracle.asymptotic_crest()
    ver = {
        "cf_relative_spread": float(np.ptp(cf) / cf[0]),
        "single_mode": len(oracle.coeffs) == 1,
        "envelope_max_excess": float(np.max(cf - env)),
        "envelope_holds": bool(np.all(cf <= env * (1 + 1e-12))),
        "asymptotic_crest": asym,
        "final_crest": float(cf[-1]),
        "asymptote_error": float(abs(cf[-1] - asym)),
    }
    if ver["single_mode"]:
        ver["constant_holds"] = ver["cf_relative_spread"] < 1e-10
    ver["pass"] = ver["envelope_holds"] and ver.get("constant_holds", True)
    rows = [(float(tt), *_oracle_norms(oracle, float(tt))) for tt in t[:: max(1, t.size // 64)]]
    return _Outputs(rec, rec.crest, rows, verification=ver)


def _oracle_norms(oracle: HeatSeriesSolution, t: float):
    l2 = oracle.l2_norm(t)
    cf = oracle.crest(t)
    return cf * l2 / math.sqrt(oracle.L), l2, cf


def _run_wave(s: Scenario) -> _Outputs:
    modes = [WaveMode(float(m["amplitude"]), tuple(int(k) for k in m["k"]), float(m.get("phase", 0.0)))
             for m in s.initial.modes]
    kind = s.domain.kind
    cs = CrestSeries()
    for t in _times(s):
        cf = wave_crest(modes, float(t), s.domain.N, s.physics.speed2, kind)
        cs.append(CrestSample(float(t), "bounded", cf, math.nan, math.nan))
    return _Outputs(None, cs, verification={"pass": True, "cf_min": float(cs.values.min()),
                                            "cf_max": float(cs.values.max())})


def _run_burgers(s: Scenario) -> _Outputs:
    phi0 = _profile_1d(s)
    rec = simulate_burgers(phi0, s.physics.eps, s.time.T, s.time.dt, s.domain.N, s.time.sample_every)
    oracle = BurgersColeHopf(phi0, s.physics.eps)
    x, u = burgers_on_grid(rec)
    err = float(np.max(np.abs(u - oracle(x, s.time.T))))
    cf_end = float(rec.crest.values[-1])
    ver = {"oracle_sup_error": err, "final_crest": cf_end,
           "eps_T": s.physics.eps * s.time.T,
           "asymptote": math.sqrt(2), "asymptote_relative_error": abs(cf_end / math.sqrt(2) - 1)}
    ver["asymptote_within_1pct"] = ver["asymptote_relative_error"] < 0.01
    ver["pass"] = True
    rows = []
    for t in rec.t[:: max(1, rec.t.size // 64)]:
        if t > 0:
            sup, l2 = oracle.norms(float(t))
            rows.append((float(t), sup, l2, math.sqrt(math.pi) * sup / l2))
    return _Outputs(rec, rec.crest, rows, verification=ver)


def _run_nse(s: Scenario) -> _Outputs:
    forcing = build_forcing(s)
    w0 = nse_initial(s)
    dt = s.time.dt
    if dt is None:
        g = grid_of(s)
        q = 2 * math.pi / g.L * max(1, s.forcing.k0)
        u_scale = max(1.0, s.forcing.amplitude / (s.physics.nu * q**2))  # laminar amplitude
        dt = default_dt(g, s.physics.nu, u_scale)
        dt = s.time.T / math.ceil(s.time.T / dt)
    rec = simulate_nse2d(w0, s.physics.nu, forcing, s.time.T, dt, s.time.sample_every)
    ver = verification_report(rec) if forcing is not None or "residual" in s.checks else {}
    if ver:
        keep = {"residual": "f1_evolution", "bound_2d": "bound_2d", "taf": ("taf0", "taf1"),
                "kolmogorov": "kolmogorov_regime"}
        wanted = set()
        for c in s.checks:
            k = keep.get(c)
            if k:
                wanted.update(k if isinstance(k, tuple) else (k,))
        if wanted:
            ver["checks"] = {k: v for k, v in ver["checks"].items() if k in wanted}
            ver["pass"] = all(v.get("pass") is not False for v in ver["checks"].values())
    return _Outputs(rec, rec.crest, verification=ver,
                    classify_variant="forced" if forcing is not None else "bounded")


def _run_stokes2(s: Scenario) -> _Outputs:
    o = Stokes2(Stokes2Params(s.physics.U0, s.physics.Omega0, s.physics.nu))
    T = s.time.T if s.time.T is not None else s.time.periods * o.period
    times = np.linspace(s.time.t0, T, s.time.samples)
    rows = o.series(times)
    closed = np.array([float(o.cf_closed(t)) for t in times])
    rel = float(np.max(np.abs(np.array([r[3] for r in rows]) / closed - 1)))
    l2rel = float(max(abs(r[2] / o.l2_closed(r[0]) - 1) for r in rows))
    ver = {"discrepancy": o.discrepancy_report(), "cf_max_relative_error": rel,
           "l2_max_relative_error": l2rel, "period": o.period,
           "pass": rel < 1e-8 and l2rel < 1e-8}
    return _Outputs(None, _crest_from_rows(rows, "unbounded"), rows, verification=ver,
                    classify_variant="unbounded")


def _run_halfplane(s: Scenario) -> _Outputs:
    o = HalfPlane(HalfPlaneParams(s.physics.U, s.physics.nu))
    times = _times(s, s.time.t0 if s.time.t0 > 0 else 1.0)
    rows = o.series(times)
    cf = np.array([r[3] for r in rows])
    slope = float(np.polyfit(np.log(times), np.log(cf), 1)[0])
    ver = {"discrepancy": o.discrepancy_report(), "loglog_slope": slope,
           "pass": abs(slope + 0.25) <= 0.002}
    return _Outputs(None, _crest_from_rows(rows, "unbounded"), rows, verification=ver,
                    classify_variant="unbounded")


def _run_burgers_oracle(s: Scenario) -> _Outputs:
    o = BurgersColeHopf(_profile_1d(s), s.physics.eps)
    times = _times(s, s.time.t0 if s.time.t0 > 0 else s.time.T / s.time.samples)
    rows = []
    for t in times:
        sup, l2 = o.norms(float(t))
        rows.append((float(t), sup, l2, math.sqrt(math.pi) * sup / l2))
    cf_end = rows[-1][3]
    ver = {"final_crest": cf_end, "asymptote_relative_error": abs(cf_end / math.sqrt(2) - 1), "pass": True}
    return _Outputs(None, _crest_from_rows(rows, "bounded"), rows, verification=ver)


def _run_green(s: Scenario) -> _Outputs:
    x, y = np.asarray(s.physics.x, float), np.asarray(s.physics.y, float)
    rows = []
    for t in _times(s, s.time.t0 if s.time.t0 > 0 else s.time.T / s.time.samples):
        G = stokes_green(x, y, float(t), s.physics.nu)
        rows.append((float(t), *map(float, G.ravel())))
    sym = max(abs(r[2] - r[3]) for r in rows)
    return _Outputs(None, None, rows, ("t", "G11", "G12", "G21", "G22"),
                    verification={"max_asymmetry": sym, "pass": sym < 1e-14})


DRIVERS = {"heat": _run_heat, "wave": _run_wave, "burgers": _run_burgers, "nse2d": _run_nse,
           "oracle:stokes2": _run_stokes2, "oracle:halfplane": _run_halfplane,
           "oracle:burgers": _run_burgers_oracle, "oracle:stokes-green": _run_green}


# --- persistence ----------------------------------------------------------------------

def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(v)) for v in r])
    return buf.getvalue()


def _json_text(obj) -> str:
    from .io import _jsonable
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable, allow_nan=True) + "\n"


def _classification(s: Scenario, out: _Outputs) -> dict | None:
    if out.crest is None or "classify" not in s.checks:
        return None
    series = out.crest.select(out.classify_variant)
    try:
        stats = cf_statistics(series, s.classifier.trim, s.seed, s.classifier.zero_one_stride)
    except DomainError as exc:
        return {"verdict": "indeterminate", "error": str(exc)}
    return {"variant": out.classify_variant, **classify(stats, s.classifier.thresholds).to_dict()}


def render_outputs(s: Scenario, out: _Outputs) -> dict[str, str]:
    texts: dict[str, str] = {}
    if out.crest is not None:
        if len(out.crest) == 0:
            raise DomainError("empty trajectory; nothing written")
        texts["crest.csv"] = render(out.crest.write_csv)
    rec = out.record
    if rec is not None:
        if len(rec.ledger) == 0:
            raise DomainError("empty trajectory; nothing written")
        texts["ledger.csv"] = render(rec.ledger.write_csv)
        keys = list(rec.diagnostics)
        texts["diagnostics.csv"] = _csv_text(keys, zip(*(rec.diagnostics[k] for k in keys)))
        texts["trajectory.json"] = _json_text({"equation": rec.equation, "params": rec.params})
    if out.oracle_rows is not None:
        texts["oracle.csv"] = _csv_text(out.oracle_columns, out.oracle_rows)
    texts["verification.json"] = _json_text(out.verification)
    cls = _classification(s, out)
    if cls is not None:
        texts["classification.json"] = _json_text(cls)
    manifest = {"scenario": asdict(s), "seed": s.seed, "version": __version__,
                "files": sorted(texts) + ["manifest.json"]}
    texts["manifest.json"] = _json_text(manifest)
    return texts


def run_scenario(s: Scenario, out_dir=None) -> RunResult:
    """Run one scenario; all outputs are rendered first, then written atomically."""
    out_dir = Path(out_dir) if out_dir is not None else output_root() / s.name
    try:
        out = DRIVERS[s.equation](s)
    except CrestFactorError as exc:
        raise type(exc)(f"scenario {s.name!r}: {exc}") from exc
    texts = render_outputs(s, out)
    for name, text in texts.items():
        atomic_write_text(out_dir / name, text)
    cls = json.loads(texts["classification.json"]) if "classification.json" in texts else None
    status = 0 if out.verification.get("pass", True) is not False else 1
    return RunResult(out_dir, sorted(texts), out.verification, cls, status)


def _run_one(args):
    s, out_dir = args
    r = run_scenario(s, out_dir)
    return r.out_dir, r.status


def run_batch(scenarios, root=None, workers: int | None = None) -> list[tuple[Path, int]]:
    """One worker process per scenario; results in input order."""
    root = Path(root) if root is not None else output_root()
    jobs = [(s, root / s.name) for s in scenarios]
    if len({j[1] for j in jobs}) != len(jobs):
        raise ConfigurationError("scenario names must be unique within a batch")
    if len(jobs) <= 1 or workers == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers or min(len(jobs), os.cpu_count() or 1)) as ex:
        return list(ex.map(_run_one, jobs))


# --- reloading ------------------------------------------------------------------------

def load_record(path) -> TrajectoryRecord:
    """Rebuild a TrajectoryRecord from a run directory."""
    path = Path(path)
    meta = json.loads((path / "trajectory.json").read_text())
    p = meta["params"]
    with open(path / "ledger.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    ledger = NormLedger.from_rows(rows, tau=p.get("tau", 0.0) if p.get("forced") else 0.0,
                                  phi=p.get("phi", ()))
    with open(path / "crest.csv") as fh:
        crest = CrestSeries.read_csv(fh)
    with open(path / "diagnostics.csv") as fh:
        reader = csv.reader(fh)
        keys = next(reader)
        cols = list(zip(*(map(float, r) for r in reader)))
    diag = {k: np.asarray(c) for k, c in zip(keys, cols)}
    return TrajectoryRecord(meta["equation"], ledger, crest, diag, p)


def verify_dir(path) -> dict:
    rec = load_record(path)
    if rec.equation != "nse2d":
        return json.loads((Path(path) / "verification.json").read_text())
    return verification_report(rec)

