"""Discrete-event Monte Carlo oracle for the loss receiver with interference.

A Poisson rain of one-shot packet transmissions is pushed through the
receiver state machine: an admissible packet that finds the receiver idle is
accepted and occupies it for exactly one packet duration; every transmission
(admissible or not, accepted or not) injects power into receptions it
overlaps.  A packet succeeds when its mean received power times its fading
beats the SINR threshold against noise plus the time-averaged interference
over its reception window.

Interference is integrated exactly from interval overlaps: the shot-noise
process is piecewise constant, so the time average is a finite sum of
``power * overlap / B`` terms.  Per accepted packet the sum is kept split
three ways (admissible packets already in flight at its arrival, admissible
packets arriving during its reception, and non-admissible traffic) because
the analytical transforms factor the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import AtomicDensity
from .loss_model import ChannelParams, PowerDistribution

__all__ = [
    "SimConfig",
    "PacketEvent",
    "PacketEvents",
    "SimResult",
    "RhoEstimate",
    "LaplaceEstimate",
    "IdleGapTest",
    "generate_rain",
    "generate_power_rain",
    "run_loss_system",
    "pool_results",
    "estimate_rho",
    "estimate_conditional_laplace",
    "idle_gap_test",
]

# Keep ragged interference gathers below ~2e7 scratch elements per block.
_GATHER_BLOCK = 20_000_000

# Asymptotic 1% critical constant of the Kolmogorov distribution,
# sqrt(-log(0.005)/2).
_KS_CRIT_1PCT = 1.6276236115189503


@dataclass(frozen=True)
class SimConfig:
    """Simulation horizon and estimation grid.

    Arrivals are generated on ``[-warmup, duration)``; statistics are
    collected on ``[0, duration)`` only.
    """

    duration: float
    warmup: float
    domain_radius: float
    seed: int
    annulus_bins: int = 25

    def __post_init__(self):
        if not self.duration > self.warmup:
            raise ValueError("duration must exceed warmup")
        if self.warmup < 0:
            raise ValueError("warmup must be non-negative")
        if not self.domain_radius > 0:
            raise ValueError("domain_radius must be positive")
        if self.annulus_bins < 1:
            raise ValueError("annulus_bins must be at least 1")


@dataclass(frozen=True)
class PacketEvent:
    """One packet of the rain, fully resolved."""

    t: float
    r: float
    h: float
    admissible: bool
    accepted: bool
    integrated_interference: float
    success: bool


class PacketEvents:
    """Column store of packets, time ordered.

    Pre-mark columns (``t``, ``r``, ``power``, ``h``, ``admissible``) are
    filled by the generators; the receiver flags and the split interference
    averages are filled by :func:`run_loss_system`.
    """

    def __init__(self, t, r, power, h, admissible):
        self.t = np.asarray(t, dtype=float)
        self.r = np.asarray(r, dtype=float)
        self.power = np.asarray(power, dtype=float)
        self.h = np.asarray(h, dtype=float)
        self.admissible = np.asarray(admissible, dtype=bool)
        n = self.t.size
        if any(a.shape != (n,) for a in (self.r, self.power, self.h, self.admissible)):
            raise ValueError("all event columns must share one length")
        if np.any(np.diff(self.t) < 0):
            raise ValueError("events must be time ordered")
        self.accepted = np.zeros(n, dtype=bool)
        self.success = np.zeros(n, dtype=bool)
        self.i_before = np.zeros(n)
        self.i_during = np.zeros(n)
        self.i_external = np.zeros(n)

    def __len__(self):
        return self.t.size

    @property
    def integrated_interference(self):
        return self.i_before + self.i_during + self.i_external

    def row(self, i: int) -> PacketEvent:
        return PacketEvent(
            float(self.t[i]),
            float(self.r[i]),
            float(self.h[i]),
            bool(self.admissible[i]),
            bool(self.accepted[i]),
            float(self.integrated_interference[i]),
            bool(self.success[i]),
        )

    def to_csv(self, path):
        """Per-packet trace, one row per packet, 17 significant digits."""
        interference = self.integrated_interference
        with open(path, "w") as fh:
            fh.write("t,r,h,admissible,accepted,interference,success\n")
            for i in range(len(self)):
                fh.write(
                    "%.17g,%.17g,%.17g,%d,%d,%.17g,%d\n"
                    % (
                        self.t[i],
                        self.r[i],
                        self.h[i],
                        self.admissible[i],
                        self.accepted[i],
                        interference[i],
                        self.success[i],
                    )
                )


@dataclass
class SimResult:
    """Pooled counters of one run (statistics window only) plus idle gaps."""

    n_offered: int          # admissible packets
    n_accepted: int
    n_success: int
    idle_gaps: np.ndarray = field(repr=False)

    @property
    def p_free_hat(self) -> float:
        return self.n_accepted / self.n_offered if self.n_offered else math.nan

    @property
    def p_free_se(self) -> float:
        p = self.p_free_hat
        return math.sqrt(p * (1 - p) / self.n_offered) if self.n_offered else math.nan

    @property
    def pi_hat(self) -> float:
        return self.n_success / self.n_offered if self.n_offered else math.nan

    @property
    def pi_se(self) -> float:
        p = self.pi_hat
        return math.sqrt(p * (1 - p) / self.n_offered) if self.n_offered else math.nan


def pool_results(results) -> SimResult:
    """Merge independent replications; associative and order-independent."""
    results = list(results)
    return SimResult(
        n_offered=sum(r.n_offered for r in results),
        n_accepted=sum(r.n_accepted for r in results),
        n_success=sum(r.n_success for r in results),
        idle_gaps=np.sort(np.concatenate([r.idle_gaps for r in results])),
    )


def generate_rain(cfg: SimConfig, density, ch: ChannelParams, policy, pl) -> PacketEvents:
    """Spatio-temporal Poisson rain with admission pre-marks.

    Deterministic given the seed: the draw order is fixed (count, times,
    locations, fading, admission coins) and the final time sort is stable.
    """
    if cfg.warmup < 2 * ch.b:
        raise ValueError("warmup must cover at least two packet durations")
    if cfg.domain_radius < density.support_radius - 1e-12:
        raise ValueError("domain_radius must cover the sensor support")
    rng = np.random.default_rng(cfg.seed)
    span = cfg.duration + cfg.warmup
    rate = ch.lambda_e * density.disk_mass()
    n = int(rng.poisson(rate * span))
    t = rng.uniform(-cfg.warmup, cfg.duration, n)
    if isinstance(density, AtomicDensity):
        idx = density.sample_indices(rng, n)
        r = density.radii[idx]
    else:
        r = density.sample_radii(rng, n)
    rng.uniform(0.0, 2.0 * np.pi, n)  # angles; the model is isotropic
    h = rng.exponential(1.0, n)
    admissible = rng.random(n) < np.asarray(policy(r), dtype=float)
    order = np.argsort(t, kind="stable")
    return PacketEvents(
        t[order], r[order], ch.p_bar * pl(r[order]), h[order], admissible[order]
    )


def generate_power_rain(
    powers: PowerDistribution,
    lam: float,
    ch: ChannelParams,
    cfg: SimConfig,
    external=None,
) -> PacketEvents:
    """Poisson stream with i.i.d. received powers from a finite mixture.

    The main stream is fully admissible; ``external=(PowerDistribution, rate)``
    adds an independent never-admissible stream that only interferes.
    """
    if cfg.warmup < 2 * ch.b:
        raise ValueError("warmup must cover at least two packet durations")
    rng = np.random.default_rng(cfg.seed)
    span = cfg.duration + cfg.warmup

    def stream(mix, rate, admissible_flag):
        n = int(rng.poisson(rate * span))
        t = rng.uniform(-cfg.warmup, cfg.duration, n)
        p = mix.powers[rng.choice(mix.powers.size, size=n, p=mix.probs)]
        h = rng.exponential(1.0, n)
        flags = np.full(n, admissible_flag)
        return t, p, h, flags

    t, p, h, flags = stream(powers, lam, True)
    if external is not None:
        ext_mix, ext_rate = external
        t2, p2, h2, f2 = stream(ext_mix, ext_rate, False)
        t = np.concatenate((t, t2))
        p = np.concatenate((p, p2))
        h = np.concatenate((h, h2))
        flags = np.concatenate((flags, f2))
    order = np.argsort(t, kind="stable")
    return PacketEvents(
        t[order], np.full(t.size, np.nan), p[order], h[order], flags[order]
    )


def _ragged_windows(starts, stops):
    """Flat gather indices and segment ids for per-window element sums."""
    sizes = stops - starts
    seg = np.repeat(np.arange(starts.size), sizes)
    offsets = np.cumsum(sizes) - sizes
    idx = np.arange(sizes.sum()) - np.repeat(offsets, sizes) + np.repeat(starts, sizes)
    return seg, idx


def run_loss_system(events: PacketEvents, ch: ChannelParams):
    """Drive the receiver over a time-ordered event stream.

    Fills the ``accepted``/``success`` flags and the split time-averaged
    interference of every accepted packet, and returns ``(events, SimResult)``.
    """
    t = events.t
    b = ch.b
    n = len(events)

    accepted = np.zeros(n, dtype=bool)
    idle_gaps = []
    busy_until = -math.inf
    seen_busy = False
    adm_idx = np.flatnonzero(events.admissible)
    for i, ti in zip(adm_idx, t[adm_idx].tolist()):
        # A packet landing exactly when a reception ends finds the receiver
        # idle (right-continuous busy indicator).
        if ti >= busy_until:
            accepted[i] = True
            if seen_busy and ti >= 0.0:
                idle_gaps.append(ti - busy_until)
            busy_until = ti + b
            seen_busy = True
    events.accepted = accepted

    acc = np.flatnonzero(accepted)
    if acc.size:
        gap = np.diff(t[acc])
        if np.any(gap < b * (1 - 1e-12)):
            raise AssertionError("receiver exclusivity violated")

    weighted = events.power * events.h
    adm_w = np.where(events.admissible, weighted, 0.0)
    ext_w = np.where(events.admissible, 0.0, weighted)

    i_before = np.zeros(n)
    i_during = np.zeros(n)
    i_external = np.zeros(n)
    t_acc_all = t[acc]
    lo_all = np.searchsorted(t, t_acc_all - b, side="right")
    hi_all = np.searchsorted(t, t_acc_all + b, side="left")

    start = 0
    while start < acc.size:
        stop = start
        budget = 0
        while stop < acc.size and (budget == 0 or budget < _GATHER_BLOCK):
            budget += int(hi_all[stop] - lo_all[stop])
            stop += 1
        block = acc[start:stop]
        t_acc = t_acc_all[start:stop]
        for starts, stops, own_side in (
            (lo_all[start:stop], block, "left"),
            (block + 1, hi_all[start:stop], "right"),
        ):
            seg, idx = _ragged_windows(starts, stops)
            if idx.size == 0:
                continue
            overlap = (b - np.abs(t[idx] - t_acc[seg])) / b
            m = block.size
            i_external[block] += np.bincount(seg, ext_w[idx] * overlap, minlength=m)
            adm_part = np.bincount(seg, adm_w[idx] * overlap, minlength=m)
            if own_side == "left":
                i_before[block] += adm_part
            else:
                i_during[block] += adm_part
        start = stop

    events.i_before = i_before
    events.i_during = i_during
    events.i_external = i_external

    total = i_before + i_during + i_external
    events.success = accepted & (
        weighted >= ch.gamma * (ch.noise_w + total)
    )

    if np.any(events.success & ~events.accepted):
        raise AssertionError("success implies accepted")
    if np.any(events.accepted & ~events.admissible):
        raise AssertionError("accepted implies admissible")

    window = (t >= 0.0) & events.admissible
    result = SimResult(
        n_offered=int(window.sum()),
        n_accepted=int((window & events.accepted).sum()),
        n_success=int((window & events.success).sum()),
        idle_gaps=np.asarray(idle_gaps),
    )
    return events, result


@dataclass(frozen=True)
class RhoEstimate:
    """Per-annulus received-packet rates from a finished run."""

    edges: np.ndarray
    n_arrivals: np.ndarray
    n_accepted: np.ndarray
    n_success: np.ndarray
    rate: np.ndarray
    rate_se: np.ndarray
    success_given_accepted: np.ndarray
    success_given_accepted_se: np.ndarray
    present: np.ndarray
    duration: float


def estimate_rho(events: PacketEvents, cfg: SimConfig, duration=None) -> RhoEstimate:
    """Bin successful receptions into annuli and normalise by time and area.

    Bins that saw no arrivals at all are flagged absent rather than zero.
    Standard errors are binomial, conditioned on the arrivals seen.
    """
    duration = cfg.duration if duration is None else float(duration)
    edges = np.linspace(0.0, cfg.domain_radius, cfg.annulus_bins + 1)
    window = (events.t >= 0.0) & np.isfinite(events.r)
    r = events.r[window]
    acc = events.accepted[window]
    suc = events.success[window]

    which = np.clip(np.digitize(r, edges) - 1, 0, cfg.annulus_bins - 1)
    n_arr = np.bincount(which, minlength=cfg.annulus_bins)
    n_acc = np.bincount(which[acc], minlength=cfg.annulus_bins)
    n_suc = np.bincount(which[suc], minlength=cfg.annulus_bins)

    area = np.pi * np.diff(edges**2)
    with np.errstate(invalid="ignore", divide="ignore"):
        rate = n_suc / (duration * area)
        p_suc = np.where(n_arr > 0, n_suc / np.maximum(n_arr, 1), np.nan)
        rate_se = np.sqrt(n_suc * (1.0 - p_suc)) / (duration * area)
        p_cond = np.where(n_acc > 0, n_suc / np.maximum(n_acc, 1), np.nan)
        p_cond_se = np.sqrt(p_cond * (1.0 - p_cond) / np.maximum(n_acc, 1))
    return RhoEstimate(
        edges=edges,
        n_arrivals=n_arr,
        n_accepted=n_acc,
        n_success=n_suc,
        rate=rate,
        rate_se=rate_se,
        success_given_accepted=p_cond,
        success_given_accepted_se=p_cond_se,
        present=n_arr > 0,
        duration=duration,
    )


@dataclass(frozen=True)
class LaplaceEstimate:
    """Empirical conditional Laplace transforms of the averaged interference.

    ``admissible`` covers interference from admissible packets only (both the
    in-flight and the arriving-later part); ``total`` adds the non-admissible
    traffic.  ``before``/``during`` expose the two admissible parts alone.
    """

    xi: float
    n: int
    admissible: tuple
    total: tuple
    before: tuple
    during: tuple
    low_sample: bool


def _mean_se(values):
    m = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    return m, se


def estimate_conditional_laplace(events: PacketEvents, xi: float) -> LaplaceEstimate:
    """Means of exp(-xi * averaged interference) over accepted packets."""
    if xi < 0:
        raise ValueError("xi must be non-negative")
    mask = events.accepted & (events.t >= 0.0)
    before = events.i_before[mask]
    during = events.i_during[mask]
    external = events.i_external[mask]
    n = int(mask.sum())
    if n == 0:
        nan = (math.nan, math.nan)
        return LaplaceEstimate(xi, 0, nan, nan, nan, nan, True)
    return LaplaceEstimate(
        xi=xi,
        n=n,
        admissible=_mean_se(np.exp(-xi * (before + during))),
        total=_mean_se(np.exp(-xi * (before + during + external))),
        before=_mean_se(np.exp(-xi * before)),
        during=_mean_se(np.exp(-xi * during)),
        low_sample=n < 1000,
    )


@dataclass(frozen=True)
class IdleGapTest:
    """Empirical-CDF sup-distance of the idle gaps against Exp(lam)."""

    statistic: float
    n: int
    critical_1pct: float
    passed: bool


def idle_gap_test(result: SimResult, lam: float) -> IdleGapTest:
    gaps = np.sort(np.asarray(result.idle_gaps, dtype=float))
    n = gaps.size
    if n == 0:
        return IdleGapTest(math.nan, 0, math.nan, False)
    cdf = 1.0 - np.exp(-lam * gaps)
    upper = np.max(np.arange(1, n + 1) / n - cdf)
    lower = np.max(cdf - np.arange(0, n) / n)
    stat = float(max(upper, lower))
    crit = _KS_CRIT_1PCT / math.sqrt(n)
    return IdleGapTest(stat, n, crit, stat < crit)
