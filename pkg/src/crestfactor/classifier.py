"""Regime classification of crest-factor time series and the mode-sum K_f bound."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .crest import CrestSeries
from .errors import DomainError
from .oracles import refined_sup

VERDICTS = ("steady", "decaying", "periodic_or_quasiperiodic", "mild_turbulence",
            "stationary_hard_turbulence", "intermittent_turbulence", "indeterminate")
MIN_SAMPLES = 256


@dataclass(frozen=True)
class Thresholds:
    C_star: float = 3.0
    F_star: float = 6.0
    b_star: float = 0.01
    steady_cv: float = 1e-3
    decay_slope: float = -0.05
    relax_drop: float = 1e-2
    monotone: float = 0.95
    tail_fraction: float = 0.25
    period_strength: float = 0.8
    K_periodic: float = 0.2
    K_chaotic: float = 0.8


@dataclass(frozen=True)
class CfStatistics:
    n_samples: int
    mean: float
    std: float
    cv: float
    flatness: float
    burst_fraction: float
    trend_slope: float
    period_strength: float
    dominant_period: float
    K: float
    monotonicity: float
    relative_drop: float
    tail_fraction: float

    def __post_init__(self):
        if self.flatness < 1 - 1e-9:
            raise DomainError(f"flatness {self.flatness} < 1")
        if not 0 <= self.burst_fraction <= 1 or not 0 <= self.K <= 1:
            raise DomainError("burst fraction and K must lie in [0, 1]")


@dataclass(frozen=True)
class ClassificationReport:
    verdict: str
    rule: str
    stats: CfStatistics
    thresholds: Thresholds

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "rule": self.rule,
                "stats": asdict(self.stats), "thresholds": asdict(self.thresholds)}


# --- 0-1 test -------------------------------------------------------------------

def _msd(z: np.ndarray, ncut: int) -> np.ndarray:
    """Mean square displacement M(n) = <|z(j+n) - z(j)|^2>_j for n = 1..ncut."""
    N = z.size
    zz = np.abs(z) ** 2
    csum = np.concatenate([[0.0], np.cumsum(zz)])
    size = 1 << int(math.ceil(math.log2(2 * N)))
    Z = np.fft.fft(z, size)
    corr = np.fft.ifft(np.abs(Z) ** 2)[: ncut + 1].real  # sum_j Re conj(z_j) z_{j+n}
    n = np.arange(1, ncut + 1)
    heads = csum[N - n]               # sum_{j < N-n} |z_j|^2
    tails = csum[N] - csum[n]         # sum_{j >= n} |z_j|^2
    return (heads + tails - 2 * corr[1:]) / (N - n)


def zero_one_test(x, n_c: int = 100, seed: int = 0, ncut_fraction: float = 0.1) -> float:
    """Modified 0-1 test for chaos; median over random frequencies c.

    Returns K in [0, 1]: near 0 for regular dynamics, near 1 for chaotic.
    """
    x = np.asarray(x, dtype=float)
    N = x.size
    ncut = max(2, int(ncut_fraction * N))
    if N < 20:
        raise DomainError("0-1 test needs at least 20 samples")
    if np.std(x) == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    cs = rng.uniform(math.pi / 5, 4 * math.pi / 5, n_c)
    j = np.arange(1, N + 1)
    n = np.arange(1, ncut + 1)
    mean_sq = x.mean() ** 2
    Ks = np.empty(n_c)
    for i, c in enumerate(cs):
        z = np.cumsum(x * np.exp(1j * j * c))
        D = _msd(z, ncut) - mean_sq * (1 - np.cos(n * c)) / (1 - math.cos(c))
        if np.std(D) == 0:
            Ks[i] = 0.0
        else:
            Ks[i] = np.corrcoef(n, D)[0, 1]
    return float(np.clip(np.median(Ks), 0.0, 1.0))


# --- statistics -------------------------------------------------------------------

def _periodicity(x: np.ndarray, dt: float) -> tuple[float, float]:
    """(strength, period) from the autocorrelation past its first zero.

    The period is the first local peak reaching 90% of the highest one, so that
    multiples of the period do not win on noise.
    """
    v = x - x.mean()
    N = v.size
    var = float(v @ v) / N
    if var == 0:
        return 0.0, 0.0
    size = 1 << int(math.ceil(math.log2(2 * N)))
    V = np.fft.rfft(v, size)
    acf = np.fft.irfft(np.abs(V) ** 2, size)[: N // 2] / (N - np.arange(N // 2)) / var
    neg = np.nonzero(acf < 0)[0]
    if neg.size == 0:
        return 0.0, 0.0
    start = int(neg[0])
    if start >= acf.size - 2:
        return 0.0, 0.0
    tail = acf[start:]
    top = float(tail.max())
    if top <= 0:
        return 0.0, 0.0
    interior = (tail[1:-1] >= tail[:-2]) & (tail[1:-1] >= tail[2:]) & (tail[1:-1] >= 0.9 * top)
    hits = np.nonzero(interior)[0]
    k = start + (int(hits[0]) + 1 if hits.size else int(np.argmax(tail)))
    peak = float(acf[k])
    shift = 0.0
    if 0 < k < acf.size - 1:
        a, b, c = acf[k - 1], acf[k], acf[k + 1]
        den = a - 2 * b + c
        if den < 0:
            shift = 0.5 * (a - c) / den
    return min(peak, 1.0), (k + shift) * dt


def _trend_slope(t: np.ndarray, x: np.ndarray) -> float:
    ok = (t > 0) & (x > 0)
    if ok.sum() < 2 or np.ptp(np.log(t[ok])) == 0:
        return 0.0
    return float(np.polyfit(np.log(t[ok]), np.log(x[ok]), 1)[0])


def cf_statistics(series: CrestSeries | tuple, trim: float = 0.2, seed: int = 0,
                  zero_one_stride: int = 1) -> CfStatistics:
    """Summary statistics of a crest-factor series after discarding a transient.

    ``series`` is a CrestSeries holding one variant or a pair (t, values).
    Periodicity assumes uniform sampling; the trend slope does not.
    """
    if isinstance(series, CrestSeries):
        if len(series.variants) > 1:
            raise DomainError(f"series mixes variants {series.variants}; select one")
        t, x = series.t, series.values
    else:
        t, x = (np.asarray(a, dtype=float) for a in series)
    start = int(math.floor(trim * x.size))
    t, x = t[start:], x[start:]
    if x.size < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples after trimming, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("series contains non-finite values")
    mean = float(x.mean())
    std = float(x.std())
    cv = std / abs(mean) if mean != 0 else math.inf
    if std <= 1e-14 * max(abs(mean), 1e-300):
        flat, burst, std_eff = 1.0, 0.0, 0.0
    else:
        std_eff = std
        flat = float(np.mean((x - mean) ** 4) / std**4)
        burst = float(np.mean(x > mean + 3 * std))
    dts = np.diff(t)
    strength, period = _periodicity(x, float(np.median(dts))) if std_eff > 0 else (0.0, 0.0)
    if std_eff > 0:
        idx = np.arange(x.size)
        detrended = x - np.polyval(np.polyfit(idx, x, 1), idx)
        K = zero_one_test(detrended[::max(1, zero_one_stride)], seed=seed)
    else:
        K = 0.0
    steps = np.diff(x)
    variation = float(np.abs(steps).sum())
    if variation > 0:
        mono = float((x[0] - x[-1]) / variation)
        tail_start = int(0.75 * steps.size)
        tail = float(np.abs(steps[tail_start:]).sum() / variation)
    else:
        mono, tail = 0.0, 0.0
    drop = float((x[0] - x[-1]) / abs(x[0])) if x[0] != 0 else 0.0
    return CfStatistics(int(x.size), mean, std_eff, cv, flat, burst, _trend_slope(t, x),
                        strength, period, K, mono, drop, tail)


def classify(stats: CfStatistics, thresholds: Thresholds | None = None) -> ClassificationReport:
    """Ordered decision table; the first rule that fires wins.

    Decay covers both algebraic decay (log-log slope below ``decay_slope``) and
    relaxation to a positive asymptote (relative drop above ``relax_drop``),
    provided the series is near-monotone and its changes die out in the tail.
    """
    th = thresholds or Thresholds()
    s = stats

    def report(verdict, rule):
        return ClassificationReport(verdict, rule, s, th)

    if s.cv < th.steady_cv:
        return report("steady", "cv < steady_cv")
    vanishing = s.monotonicity >= th.monotone and s.tail_fraction < th.tail_fraction
    if vanishing and s.trend_slope < th.decay_slope:
        return report("decaying", "trend slope < decay_slope, vanishing tail")
    if vanishing and s.relative_drop > th.relax_drop:
        return report("decaying", "monotone relaxation, vanishing tail")
    if s.period_strength > th.period_strength and s.K < th.K_periodic:
        return report("periodic_or_quasiperiodic", "period strength high, K low")
    if s.K >= th.K_chaotic:
        if s.mean < th.C_star:
            return report("mild_turbulence", "K high, mean < C*")
        if s.flatness > th.F_star or s.burst_fraction > th.b_star:
            return report("intermittent_turbulence", "K high, mean >= C*, flatness > F* or bursts > b*")
        return report("stationary_hard_turbulence", "K high, mean >= C*, flatness <= F*")
    return report("indeterminate", "no rule fired")


# --- mode-sum bound --------------------------------------------------------------

def periodic_basis(n: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal real Fourier basis on [0, 2 pi]: 1/sqrt(2 pi), cos(n x)/sqrt(pi), sin(|n| x)/sqrt(pi)."""
    if n == 0:
        return np.full_like(x, 1 / math.sqrt(2 * math.pi), dtype=float)
    if n > 0:
        return np.cos(n * x) / math.sqrt(math.pi)
    return np.sin(-n * x) / math.sqrt(math.pi)


PERIODIC_K0 = 1 / math.sqrt(math.pi)


def prefix_delta(b: np.ndarray) -> tuple[float, int]:
    """(delta, m): the m largest b_n are the shortest prefix summing to at least B/2."""
    b = np.asarray(b, dtype=float)
    if np.any(b < 0):
        raise DomainError("b_n must be non-negative")
    B = float(b.sum())
    if not B > 0:
        raise DomainError("all coefficients vanish")
    order = np.sort(b)[::-1]
    csum = np.cumsum(order)
    m = int(np.searchsorted(csum, B / 2 * (1 - 1e-15))) + 1
    m = min(m, order.size)
    return float(order[m - 1]), m


@dataclass(frozen=True)
class ModeSumState:
    t: float
    b: np.ndarray = field(repr=False)
    B: float
    delta: float
    prefix: int
    K0: float
    K_f: float
    chain_bound: float
    C_f: float | None

    @property
    def holds(self) -> bool:
        return self.C_f is None or self.C_f <= self.K_f * (1 + 1e-12)


def mode_sum_bound(a, rates, K0: float, t: float, indices=None,
                     realize: bool = False, samples: int = 4096) -> ModeSumState:
    """B, delta and K_f = sqrt(4 K0^2 pi B / delta) for b_n = |a_n| exp(-rate_n t).

    With ``realize`` the field sum a_n T_n X_n is built from the periodic basis
    (``indices`` label the modes) and its bounded crest factor on [0, 2 pi] is
    returned as ``C_f``.  ``chain_bound`` is sqrt(2 pi) K0 B / sqrt(sum b_n^2).
    """
    a = np.asarray(a, dtype=float)
    rates = np.broadcast_to(np.asarray(rates, dtype=float), a.shape)
    if t < 0:
        raise DomainError("time must be non-negative")
    if not K0 > 0:
        raise DomainError("K0 must be positive")
    b = np.abs(a) * np.exp(-rates * t)
    delta, m = prefix_delta(b)
    B = float(b.sum())
    K_f = math.sqrt(4 * K0**2 * math.pi * B / delta)
    chain = math.sqrt(2 * math.pi) * K0 * B / math.sqrt(float(b @ b))
    C_f = None
    if realize:
        if indices is None:
            raise DomainError("indices are required to realise the field")
        coeff = a * np.exp(-rates * t)
        idx = list(indices)
        f = lambda x: sum(c * periodic_basis(n, np.asarray(x, dtype=float)) for n, c in zip(idx, coeff))
        sup = refined_sup(f, 0.0, 2 * math.pi, samples=max(samples, 16 * (max(map(abs, idx)) + 1)))
        C_f = math.sqrt(2 * math.pi) * sup / math.sqrt(float(coeff @ coeff))
    return ModeSumState(float(t), b, B, delta, m, K0, K_f, chain, C_f)


def uniform_example(N: int, K0: float = 1.0) -> dict:
    """Equal b_n over |n| <= N: chain value against the two candidate closed forms."""
    b = np.full(2 * N + 1, 1 / (2 * N + 1))
    st = mode_sum_bound(b, 0.0, K0, 0.0)
    printed = math.sqrt(2 * math.pi / (2 * N + 1)) * K0
    chain_form = math.sqrt(2 * math.pi * (2 * N + 1)) * K0
    return {
        "B": st.B, "delta": st.delta, "chain_bound": st.chain_bound,
        "sqrt_2K0sq_pi_B_over_delta": math.sqrt(2 * K0**2 * math.pi * st.B / st.delta),
        "K_f": st.K_f, "printed_form": printed, "chain_form": chain_form,
        "matches_printed": abs(st.chain_bound - printed) <= 1e-12 * chain_form,
        "matches_chain_form": abs(st.chain_bound - chain_form) <= 1e-12 * chain_form,
    }
