"""Economic optimisation of the hybrid network.

Cluster-heads sit on a triangular grid of density ``lambda_c``; transmit-only
sensors are spread uniformly at ``lambda_s``.  Information sensed directly by
a head is delivered with certainty, so the coverage constraint at the worst
point of a cell reads ``lambda_e * lambda_c + rho(R_max) >= target``.  The
head density required for a given sensor density is solved from the max-min
guarantee on the cell disk, and the deployment cost per unit area
``lambda_s * C_s + lambda_c * C_c`` is swept over the sensor density.

The per-cell model ignores reception by neighbouring heads: each head's
sensing domain is its own disk of radius ``R_max``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import RadialDensity, WeightFunction
from .loss_model import ChannelParams, DiskPolicy, ReceptionEvaluator, rho
from .policies import maxmin_level, maxmin_policy, naive_policy

__all__ = [
    "CostParams",
    "CostCurve",
    "r_max",
    "lambda_c_for_radius",
    "head_density_from_spacing",
    "required_lambda_c",
    "cost_sweep",
    "feasibility_slack",
]

_TRI = 3.0 * np.sqrt(3.0)


def r_max(lambda_c: float) -> float:
    """Largest distance to the nearest cluster-head on the triangular grid."""
    if not lambda_c > 0:
        raise ValueError("lambda_c must be positive")
    return 4.0 / np.sqrt(lambda_c * _TRI)


def lambda_c_for_radius(radius: float) -> float:
    """Head density whose worst-case nearest distance equals ``radius``.

    Exact algebraic inverse of :func:`r_max`.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    return 16.0 / (_TRI * radius**2)


def head_density_from_spacing(spacing: float) -> float:
    """Head density of a triangular grid with the given adjacent spacing."""
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    return 4.0 / (np.sqrt(3.0) * spacing**2)


@dataclass(frozen=True)
class CostParams:
    """Device prices and the coverage target."""

    c_s: float
    c_c: float
    target_d: float

    def __post_init__(self):
        if not self.c_s > 0:
            raise ValueError("sensor cost must be positive")
        if self.c_c < self.c_s:
            raise ValueError("a cluster-head cannot cost less than a sensor")
        if not self.target_d > 0:
            raise ValueError("target density must be positive")


def _cell_level_maxmin(radius, lambda_s, ch, pl):
    density = RadialDensity.uniform(lambda_s, radius)
    return maxmin_level(radius, density, ch, pl, "lower")


def _cell_rho_naive(radius, lambda_s, ch, pl):
    """Exact boundary information density under the naive policy.

    The naive policy admits everything out to its own radius, so sensors all
    the way to that radius load the receiver; the cell edge only collects if
    it sits inside the admission region at all.
    """
    r0 = naive_policy(ch, pl).radius
    if radius > r0:
        return 0.0
    density = RadialDensity.uniform(lambda_s, r0)
    ev = ReceptionEvaluator(DiskPolicy(r0), density, ch, pl)
    return ch.lambda_e * lambda_s * ev.p_free * float(ev.p_rec(radius))


def required_lambda_c(
    lambda_s: float,
    cost: CostParams,
    ch: ChannelParams,
    pl,
    *,
    policy: str = "maxmin",
    rel_tol: float = 1e-6,
) -> float:
    """Smallest head density meeting the coverage target at the cell edge.

    Monotone in the head density (denser heads shrink the cell, raising the
    cell-edge guarantee while lowering the residual target), so bisection.
    With no sensors at all the heads carry the whole target.
    """
    if ch.lambda_e <= 0:
        raise ValueError("coverage target infeasible: sensors never report")
    if lambda_s < 0:
        raise ValueError("lambda_s must be non-negative")
    hi = cost.target_d / ch.lambda_e
    if lambda_s == 0:
        return hi

    if policy == "maxmin":
        def cell(radius):
            return _cell_level_maxmin(radius, lambda_s, ch, pl)
    elif policy == "naive":
        def cell(radius):
            return _cell_rho_naive(radius, lambda_s, ch, pl)
    else:
        raise ValueError("policy must be 'maxmin' or 'naive'")

    def slack(lambda_c):
        return cell(r_max(lambda_c)) - (cost.target_d - ch.lambda_e * lambda_c)

    lo = hi
    for _ in range(200):
        candidate = lo / 2.0
        if slack(candidate) < 0.0:
            lo = candidate
            break
        lo = candidate
    else:
        return 0.0  # sensors alone meet the target at any spacing tried

    a, b = lo, hi
    while (b - a) > rel_tol * b:
        m = 0.5 * (a + b)
        if slack(m) >= 0.0:
            b = m
        else:
            a = m
    return b


@dataclass(frozen=True)
class CostCurve:
    """Sensor/head sweep with the cost optimum and optional gain curves."""

    lambda_s: np.ndarray
    lambda_c: np.ndarray
    cost: np.ndarray
    optimum_index: int
    ratios: np.ndarray = None
    gain: np.ndarray = None
    gain_naive: np.ndarray = None
    lambda_c_naive: np.ndarray = None

    @property
    def optimum(self):
        i = self.optimum_index
        return float(self.lambda_s[i]), float(self.lambda_c[i]), float(self.cost[i])


def cost_sweep(
    lambda_s_grid,
    cost: CostParams,
    ch: ChannelParams,
    pl,
    *,
    ratio_grid=None,
) -> CostCurve:
    """Evaluate the deployment cost over a sensor-density grid.

    Returns the required head density and cost per sample plus the argmin.
    With ``ratio_grid`` given, also reports the cost gain over the
    all-cluster-head baseline as a function of the head/sensor price ratio,
    under both the max-min and the naive admission policy.  The baseline is
    the head density that meets the target with no sensors at all,
    ``target / lambda_e``, priced at heads only; it coincides with the
    ``lambda_s = 0`` endpoint of the sweep.
    """
    grid = np.asarray(lambda_s_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("need a non-empty sensor-density grid")
    lam_c = np.array(
        [required_lambda_c(ls, cost, ch, pl, policy="maxmin") for ls in grid]
    )
    total = grid * cost.c_s + lam_c * cost.c_c
    opt = int(np.argmin(total))

    ratios = gain = gain_naive = lam_c_naive = None
    if ratio_grid is not None:
        ratios = np.asarray(ratio_grid, dtype=float)
        lam_c_naive = np.array(
            [required_lambda_c(ls, cost, ch, pl, policy="naive") for ls in grid]
        )
        baseline_heads = cost.target_d / ch.lambda_e
        gain = np.array(
            [
                ratio * baseline_heads / np.min(grid + lam_c * ratio)
                for ratio in ratios
            ]
        )
        gain_naive = np.array(
            [
                ratio * baseline_heads / np.min(grid + lam_c_naive * ratio)
                for ratio in ratios
            ]
        )
    return CostCurve(grid, lam_c, total, opt, ratios, gain, gain_naive, lam_c_naive)


def feasibility_slack(
    lambda_s: float,
    lambda_c: float,
    cost: CostParams,
    ch: ChannelParams,
    pl,
) -> float:
    """Exact-model certificate for one sweep point.

    Re-evaluates the cell: builds the max-min policy on the cell disk and
    checks ``lambda_e * lambda_c + rho_exact(R_max) - target`` with the exact
    reception probability, not the bound the solver used.
    """
    direct = ch.lambda_e * lambda_c
    if lambda_s == 0:
        return direct - cost.target_d
    radius = r_max(lambda_c)
    density = RadialDensity.uniform(lambda_s, radius)
    solution = maxmin_policy(
        WeightFunction.constant(1.0), radius, density, ch, pl, "lower"
    )
    exact = rho(radius, solution.policy, density, ch, pl).exact
    return direct + float(exact) - cost.target_d
