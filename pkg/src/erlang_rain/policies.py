"""Admission-policy construction and the radius-maximisation solvers.

Four policies are built here:

* ``naive_policy`` admits wherever the mean received power alone beats the
  SINR threshold against noise.
* ``maxmin_policy`` equalises the (bound-based) weighted information density
  over a disk; the weighted max-min fair solution in closed form.
* ``waterfill_policy`` maximises the total weighted throughput bound; a
  level-set (water-filling) policy.
* ``cod_policy`` is the coverage-optimal deterministic disk under the exact
  model.

The radius solvers (``maxmin_max_radius``, ``cod_policy``) size the sensing
disk itself: sensors are deployed on the domain being solved for, so each
trial radius is evaluated with the density truncated to it.  Policy
constructors for a *given* domain leave the deployment untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import RadialDensity, WeightFunction, radial_integral
from .loss_model import (
    ChannelParams,
    DiskPolicy,
    Policy,
    AnnularPolicy,
    ReceptionEvaluator,
    TabulatedPolicy,
    lambda_admissible,
    p_rec_bounds,
)

__all__ = [
    "MaxMinSolution",
    "WaterfillSolution",
    "ThroughputBounds",
    "naive_policy",
    "maxmin_policy",
    "maxmin_level",
    "maxmin_max_radius",
    "waterfill_policy",
    "cod_policy",
    "total_throughput",
]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
_SCAN_POINTS = 512
_RADIUS_REL_TOL = 1e-6


def _require_radial(density):
    if not isinstance(density, RadialDensity):
        raise TypeError("policy solvers need a RadialDensity (positive area density)")


def _check_positive_density(density, radius):
    if density.support_radius < radius * (1 - 1e-12):
        raise ValueError("max-min policy does not exist: no sensors on part of the domain")
    last = min(np.searchsorted(density.breaks, radius, side="left"), density.values.size - 1)
    if np.any(density.values[: last + 1] <= 0):
        raise ValueError("max-min policy does not exist: density vanishes on the domain")


def _golden_max(g, lo, hi, *, rel_tol=1e-9):
    """Golden-section maximisation of a unimodal scalar function."""
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    while (b - a) > rel_tol * max(abs(b), 1.0):
        if gc < gd:
            a, c, gc = c, d, gd
            d = a + _GOLDEN * (b - a)
            gd = g(d)
        else:
            b, d, gd = d, c, gc
            c = b - _GOLDEN * (b - a)
            gc = g(c)
    return (0.5 * (a + b), max(gc, gd))


def _scan_then_golden_max(g_vec, lo, hi):
    """512-point coarse scan followed by golden refinement; ties go to the
    largest radius."""
    grid = np.linspace(lo, hi, _SCAN_POINTS)
    vals = np.asarray(g_vec(grid), dtype=float)
    best = vals.size - 1 - int(np.argmax(vals[::-1]))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, vals.size - 1)]
    if b <= a:
        return float(grid[best]), float(vals[best])
    r, v = _golden_max(lambda x: float(g_vec(np.array([x]))[0]), a, b)
    if vals[best] > v:
        return float(grid[best]), float(vals[best])
    return r, v


def _bisect_decreasing(g, lo, hi, *, rel_tol=_RADIUS_REL_TOL, max_iter=200):
    """Root of a decreasing function g on [lo, hi] with g(lo) >= 0 >= g(hi)."""
    a, b = float(lo), float(hi)
    for _ in range(max_iter):
        if (b - a) <= rel_tol * max(abs(b), 1e-30):
            break
        m = 0.5 * (a + b)
        if g(m) >= 0.0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def naive_policy(ch: ChannelParams, pl) -> DiskPolicy:
    """Admit wherever mean received power over noise meets the threshold.

    The admission radius solves ``p_bar * L(R) / W = gamma``; undefined for
    zero noise (the admission region would be the whole plane).
    """
    if ch.noise_w <= 0:
        raise ValueError("naive radius undefined: noise power is zero")
    return DiskPolicy(pl.radius_for_gain(ch.gamma * ch.noise_w / ch.p_bar))


def _bound_fn(density, ch, pl, bound_kind, rel_tol):
    if bound_kind not in ("lower", "upper"):
        raise ValueError("bound_kind must be 'lower' or 'upper'")
    idx = 0 if bound_kind == "lower" else 1

    def p_b(r):
        return np.atleast_1d(p_rec_bounds(r, density, ch, pl, rel_tol=rel_tol)[idx])

    return p_b


def _refined_table(fn, lo, hi, seeds, *, rel_tol=1e-9, max_rounds=12):
    """Radius grid on which linear interpolation of ``fn`` is accurate."""
    grid = np.unique(
        np.concatenate((np.linspace(lo, hi, 257), [s for s in seeds if lo < s < hi]))
    )
    vals = fn(grid)
    for _ in range(max_rounds):
        mids = 0.5 * (grid[:-1] + grid[1:])
        exact = fn(mids)
        interp = 0.5 * (vals[:-1] + vals[1:])
        bad = np.abs(interp - exact) > rel_tol * np.maximum(np.abs(exact), 1e-300)
        if not np.any(bad):
            break
        grid = np.sort(np.concatenate((grid, mids[bad])))
        vals = fn(grid)  # re-evaluate once per round; rounds are few
    return grid, vals


@dataclass(frozen=True)
class MaxMinSolution:
    """Weighted max-min fair policy built from a reception-probability bound."""

    policy: TabulatedPolicy
    m_const: float
    i_const: float
    bound_kind: str
    domain_radius: float
    lam: float
    weights: WeightFunction = field(repr=False)
    _denominator: float = field(repr=False)

    def rho_achieved(self, r):
        """The guaranteed flat level: weights(r) / (B*I + M/lambda_e)."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.asarray(self.weights(r), dtype=float) / self._denominator
        return out if out.ndim else float(out)


def maxmin_policy(
    weights: WeightFunction,
    domain_radius: float,
    density: RadialDensity,
    ch: ChannelParams,
    pl,
    bound_kind: str = "lower",
    *,
    rel_tol: float = 1e-9,
) -> MaxMinSolution:
    """Admission policy equalising the bound on weighted information density.

    The policy is ``weights(r) / (M * lambda_s(r) * p_bound(r))`` on the
    domain, where ``M`` normalises the maximum to one; it guarantees (for the
    lower bound) an exact density of at least ``rho_achieved`` everywhere.
    """
    _require_radial(density)
    _check_positive_density(density, domain_radius)
    p_b = _bound_fn(density, ch, pl, bound_kind, rel_tol)

    def score(r):
        return np.asarray(weights(r), dtype=float) / (density(r) * p_b(r))

    lo = domain_radius * 1e-6
    seeds = list(weights.breakpoints) + list(
        density.breaks[density.breaks < domain_radius]
    )
    grid, vals = _refined_table(score, lo, domain_radius, seeds, rel_tol=1e-9)

    r_star, m_const = _scan_then_golden_max(score, lo, domain_radius)
    if not np.isfinite(m_const) or m_const <= 0:
        raise ValueError("max-min policy does not exist: M is not finite")
    # The argmax lands in the table so the policy attains exactly 1 there.
    grid = np.unique(np.concatenate((grid, [r_star])))
    vals = score(grid)
    policy = TabulatedPolicy(grid, np.clip(vals / m_const, 0.0, 1.0))

    i_const = float(
        radial_integral(
            lambda r: np.asarray(weights(r), dtype=float) / p_b(r),
            RadialDensity.uniform(1.0, domain_radius),
            rel_tol=rel_tol,
            breakpoints=tuple(seeds),
        )
    )
    lam = lambda_admissible(policy, density, ch, rel_tol=rel_tol)
    denom = ch.b * i_const + (m_const / ch.lambda_e if ch.lambda_e > 0 else np.inf)
    return MaxMinSolution(
        policy=policy,
        m_const=m_const,
        i_const=i_const,
        bound_kind=bound_kind,
        domain_radius=float(domain_radius),
        lam=lam,
        weights=weights,
        _denominator=denom,
    )


def maxmin_level(
    domain_radius: float,
    density: RadialDensity,
    ch: ChannelParams,
    pl,
    bound_kind: str = "lower",
    *,
    rel_tol: float = 1e-9,
) -> float:
    """Flat level the equal-weights max-min policy achieves on a disk whose
    radius also bounds the deployment."""
    _require_radial(density)
    if ch.lambda_e <= 0:
        return 0.0
    dens = density.truncated(domain_radius)
    _check_positive_density(dens, domain_radius)
    p_b = _bound_fn(dens, ch, pl, bound_kind, rel_tol)

    lo = domain_radius * 1e-6
    # Underflow guard: with a hopeless domain the level is numerically zero.
    if -np.log(np.maximum(p_b(np.array([domain_radius]))[0], 1e-300)) > 600.0:
        return 0.0

    def inv_mass_score(r):
        return 1.0 / (dens(r) * p_b(r))

    _, m_over = _scan_then_golden_max(inv_mass_score, lo, domain_radius)
    i_over = float(
        radial_integral(
            lambda r: 1.0 / p_b(r),
            RadialDensity.uniform(1.0, domain_radius),
            rel_tol=rel_tol,
        )
    )
    return 1.0 / (ch.b * i_over + m_over / ch.lambda_e)


def maxmin_max_radius(
    target_density: float,
    density: RadialDensity,
    ch: ChannelParams,
    pl,
    bound_kind: str = "lower",
    *,
    r_min: float = 0.1,
    rel_tol: float = 1e-9,
) -> float:
    """Largest disk radius whose max-min guaranteed level reaches the target.

    The level is decreasing in the radius, so the root is found by bisection;
    the deployment grows with the trial domain (sensors live on the disk
    being sized).  Returns the support radius when even the full support
    meets the target.
    """
    _require_radial(density)
    if not target_density > 0:
        raise ValueError("target density must be positive")

    def level(radius):
        return maxmin_level(radius, density, ch, pl, bound_kind, rel_tol=rel_tol)

    if level(r_min) < target_density:
        raise ValueError("target density unreachable at any radius")
    support = density.support_radius
    if level(support) >= target_density:
        return support
    return _bisect_decreasing(
        lambda radius: level(radius) - target_density, r_min, support
    )


@dataclass(frozen=True)
class WaterfillSolution:
    """Throughput-optimal level-set policy for a reception bound."""

    theta_star: float
    region: tuple
    u_star: float
    bound_kind: str
    policy: Policy


def _cumtrapz(values, grid):
    steps = np.diff(grid) * 0.5 * (values[:-1] + values[1:])
    return np.concatenate(([0.0], np.cumsum(steps)))


def _region_from_threshold(grid, score_vals, theta, score_fn=None):
    """Closed radius intervals where the sampled score exceeds theta.

    With ``score_fn`` given, every interval edge found on the grid is
    sharpened by bisection on ``score - theta``.
    """
    above = score_vals > theta

    def refine(lo, hi):
        if score_fn is None:
            return 0.5 * (lo + hi)
        a, b = lo, hi
        fa = float(score_fn(np.array([a]))[0]) - theta
        for _ in range(60):
            m = 0.5 * (a + b)
            fm = float(score_fn(np.array([m]))[0]) - theta
            if (fa > 0) == (fm > 0):
                a, fa = m, fm
            else:
                b = m
        return 0.5 * (a + b)

    if not above.any():
        return ()
    edges = np.flatnonzero(np.diff(above.astype(int)))
    starts = [grid[0]] if above[0] else []
    stops = []
    for e in edges:
        cross = refine(grid[e], grid[e + 1])
        if above[e]:
            stops.append(cross)
        else:
            starts.append(cross)
    if above[-1]:
        stops.append(grid[-1])
    return tuple(zip(starts, stops))


def waterfill_policy(
    weights: WeightFunction,
    domain_radius: float,
    density: RadialDensity,
    ch: ChannelParams,
    pl,
    bound_kind: str = "lower",
    *,
    rel_tol: float = 1e-9,
) -> WaterfillSolution:
    """Maximise the bound on total weighted throughput over level-set policies.

    For a radially non-increasing score the admission region is a disk and
    its radius is found by a coarse scan plus golden-section refinement; a
    general score is handled by sweeping the threshold over 1024 quantiles of
    its sampled values.
    """
    _require_radial(density)
    p_b = _bound_fn(density, ch, pl, bound_kind, rel_tol)
    r_hi = min(domain_radius, density.support_radius)
    lo = r_hi * 1e-6

    def score(r):
        return density(r) * p_b(r) / np.asarray(weights(r), dtype=float)

    def u_of_region(intervals):
        if not intervals:
            return 0.0
        policy = AnnularPolicy(intervals)
        admitted = lambda_admissible(policy, density, ch, rel_tol=rel_tol)
        gain = float(
            radial_integral(
                lambda r: policy(r) * p_b(r) / np.asarray(weights(r), dtype=float),
                density,
                rel_tol=rel_tol,
                breakpoints=policy.breakpoints,
            )
        )
        return ch.lambda_e * gain / (1.0 + admitted * ch.b)

    grid = np.linspace(lo, r_hi, _SCAN_POINTS)
    p_grid = p_b(grid)
    s_vals = density(grid) * p_grid / np.asarray(weights(grid), dtype=float)

    monotone = np.all(np.diff(s_vals) <= 1e-12 * np.maximum(np.abs(s_vals[:-1]), 1e-300))
    if monotone:
        # Coarse scan on cumulative trapezoids, exact golden refinement.
        gain_density = 2.0 * np.pi * grid * s_vals
        mass_density = 2.0 * np.pi * grid * density(grid)
        gain_cum = _cumtrapz(gain_density, grid)
        mass_cum = _cumtrapz(mass_density, grid)
        u_grid = ch.lambda_e * gain_cum / (1.0 + ch.lambda_e * ch.b * mass_cum)
        best = u_grid.size - 1 - int(np.argmax(u_grid[::-1]))
        a = grid[max(best - 2, 0)]
        b = grid[min(best + 2, grid.size - 1)]
        r_star, u_star = _golden_max(
            lambda radius: u_of_region(((0.0, radius),)), a, b, rel_tol=_RADIUS_REL_TOL
        )
        region = ((0.0, r_star),)
        theta_star = float(score(np.array([r_star]))[0])
        return WaterfillSolution(
            theta_star, region, u_star, bound_kind, DiskPolicy(r_star)
        )

    # General score: sweep the threshold over quantiles of the sampled score
    # (grid sums are accurate enough to rank thresholds), then evaluate the
    # winning level set exactly.
    thetas = np.unique(np.quantile(s_vals, np.linspace(0.0, 1.0, 1024)))
    gain_density = 2.0 * np.pi * grid * s_vals
    mass_density = 2.0 * np.pi * grid * density(grid)
    best = (-np.inf, thetas[0])
    for theta in thetas:
        inside = s_vals > theta
        gain = np.trapezoid(np.where(inside, gain_density, 0.0), grid)
        mass = np.trapezoid(np.where(inside, mass_density, 0.0), grid)
        u = ch.lambda_e * gain / (1.0 + ch.lambda_e * ch.b * mass)
        if u > best[0]:
            best = (u, theta)
    theta_star = float(best[1])
    region = _region_from_threshold(grid, s_vals, theta_star, score)
    u_star = u_of_region(region)
    if not region:
        return WaterfillSolution(theta_star, (), 0.0, bound_kind, AnnularPolicy(()))
    return WaterfillSolution(
        theta_star, region, float(u_star), bound_kind, AnnularPolicy(region)
    )


def cod_policy(
    target_density: float,
    density: RadialDensity,
    ch: ChannelParams,
    pl,
    *,
    r_min: float = 0.1,
    rel_tol: float = 1e-9,
):
    """Coverage-optimal deterministic disk under the exact model.

    Returns ``(DiskPolicy(R), R)`` for the largest radius whose boundary
    still carries the target information density when everything inside the
    disk is admitted.  Like the max-min radius solver, sensors are deployed
    on the disk being sized, and the admissible rate is recomputed at every
    trial radius.
    """
    _require_radial(density)
    if not target_density > 0:
        raise ValueError("target density must be positive")
    if ch.lambda_e <= 0:
        raise ValueError("target density unreachable at any radius")

    def rho_boundary(radius):
        dens = density.truncated(radius)
        ev = ReceptionEvaluator(DiskPolicy(radius), dens, ch, pl, rel_tol)
        return ch.lambda_e * dens(radius) * ev.p_free * float(ev.p_rec(radius))

    if rho_boundary(r_min) < target_density:
        raise ValueError("target density unreachable at any radius")
    support = density.support_radius
    if rho_boundary(support) >= target_density:
        return DiskPolicy(support), support
    radius = _bisect_decreasing(
        lambda rad: rho_boundary(rad) - target_density, r_min, support
    )
    return DiskPolicy(radius), radius


@dataclass(frozen=True)
class ThroughputBounds:
    """Total weighted throughput under the exact model and its two bounds."""

    exact: float
    lower: float
    upper: float


def total_throughput(
    policy,
    weights: WeightFunction,
    domain_radius: float,
    density: RadialDensity,
    ch: ChannelParams,
    pl,
    *,
    rel_tol: float = 1e-9,
    bounds_only: bool = False,
) -> ThroughputBounds:
    """Integral of the information density over the domain, weighted by 1/D.

    ``bounds_only`` skips the exact-model integral (the expensive one) when
    only the bound values are needed.
    """
    _require_radial(density)
    ev = ReceptionEvaluator(policy, density, ch, pl, rel_tol)
    pf = ev.p_free
    r_hi = min(domain_radius, density.support_radius)
    breaks = tuple(getattr(policy, "breakpoints", ())) + tuple(weights.breakpoints)
    dens_dom = density.truncated(r_hi)

    def make_integrand(prob_fn):
        def f(r):
            return (
                np.asarray(policy(r), dtype=float)
                * np.atleast_1d(prob_fn(r))
                / np.asarray(weights(r), dtype=float)
            )

        return f

    def integrate(prob_fn):
        return float(
            ch.lambda_e
            * pf
            * radial_integral(
                make_integrand(prob_fn), dens_dom, rel_tol=rel_tol, breakpoints=breaks
            )
        )

    exact = math.nan if bounds_only else integrate(ev.p_rec)
    lower = integrate(lambda r: ev.bounds(r)[0])
    upper = integrate(lambda r: ev.bounds(r)[1])
    return ThroughputBounds(exact, lower, upper)
