"""Radial geometry primitives: path loss, sensor densities, weight functions
and the adaptive quadrature used by every closed-form evaluation.

All spatial quantities are isotropic around the receiver at the origin, so
integrals against a sensor intensity measure reduce to one-dimensional radial
integrals (or plain weighted sums for atomic configurations).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "QuadratureError",
    "PathLoss",
    "RadialDensity",
    "AtomicDensity",
    "WeightFunction",
    "phi",
    "log1p_over",
    "adaptive_simpson",
    "radial_integral",
]

# Below this the direct form 1 - log1p(u)/u loses digits to cancellation.
_PHI_SERIES_CUTOFF = 1e-4


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


@dataclass(frozen=True)
class PathLoss:
    """Power-law attenuation ``L(r) = kappa * r**(-eta)``.

    ``eta`` must exceed 2 or the radial interference integrals would diverge
    on large supports.
    """

    kappa: float
    eta: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not self.eta > 2:
            raise ValueError("eta must exceed 2")

    def __call__(self, r):
        """Attenuation at distance ``r`` (strictly positive)."""
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("attenuation is only defined for r > 0")
        return self.kappa * r ** (-self.eta)

    def radius_for_gain(self, gain: float) -> float:
        """Inverse map: the distance at which the attenuation equals ``gain``."""
        if not gain > 0:
            raise ValueError("gain must be positive")
        return float((self.kappa / gain) ** (1.0 / self.eta))


def phi(u):
    """The interference kernel ``1 - log(1 + u)/u``.

    Continuous extension ``phi(0) = 0``; monotone increasing with limit 1 as
    ``u -> inf``.  Small arguments use the alternating series
    ``u/2 - u^2/3 + u^3/4 - u^4/5`` because the direct form cancels badly
    when ``u`` is many orders of magnitude below 1.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("phi is only defined for u >= 0")
    out = np.empty_like(u)
    small = u < _PHI_SERIES_CUTOFF
    us = u[small]
    out[small] = us / 2 - us**2 / 3 + us**3 / 4 - us**4 / 5
    ul = u[~small]
    with np.errstate(invalid="ignore"):
        val = 1.0 - np.log1p(ul) / ul
    out[~small] = np.where(np.isinf(ul), 1.0, val)
    return out if out.ndim else float(out)


def log1p_over(u):
    """``log(1 + u)/u`` with limits 1 at 0 and 0 at infinity."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("log1p_over is only defined for u >= 0")
    return 1.0 - phi(u)


def _as_breaks(radii, what):
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ValueError(f"{what} grid must be a non-empty 1-d sequence")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError(f"{what} grid must be strictly increasing and positive")
    return radii


@dataclass(frozen=True)
class RadialDensity:
    """Piecewise-constant radial sensor intensity (sensors per unit area).

    ``breaks`` are the upper edges of the constant pieces, so the density is
    ``values[k]`` on ``(breaks[k-1], breaks[k]]`` (with ``breaks[-1]`` the
    finite support radius) and zero beyond.  Values at a breakpoint are taken
    from the left.
    """

    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "breaks", _as_breaks(self.breaks, "density"))
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.breaks.shape:
            raise ValueError("density needs one value per piece")
        if np.any(values < 0):
            raise ValueError("density values must be non-negative")
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, lambda_s: float, support_radius: float) -> "RadialDensity":
        return cls(np.array([support_radius]), np.array([lambda_s]))

    @property
    def support_radius(self) -> float:
        return float(self.breaks[-1])

    def __call__(self, r):
        """Density at radius ``r`` (left-continuous at the piece edges)."""
        r = np.asarray(r, dtype=float)
        idx = np.searchsorted(self.breaks, r, side="left")
        inside = idx < self.breaks.size
        out = np.where(inside, self.values[np.minimum(idx, self.breaks.size - 1)], 0.0)
        return out if out.ndim else float(out)

    def disk_mass(self, radius=None):
        """Total sensor mass of the disk ``B(0, radius)``."""
        radius = self.support_radius if radius is None else float(radius)
        hi = np.minimum(self.breaks, radius)
        lo = np.minimum(np.concatenate(([0.0], self.breaks[:-1])), radius)
        return float(np.pi * np.sum(self.values * (hi**2 - lo**2)))

    def truncated(self, radius: float) -> "RadialDensity":
        """The same density restricted to the disk of the given radius."""
        if radius >= self.support_radius:
            return self
        keep = self.breaks < radius
        breaks = np.concatenate((self.breaks[keep], [radius]))
        values = self.values[: breaks.size]
        return RadialDensity(breaks, values)

    def sample_radii(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` radii with probability proportional to ``density * r``."""
        lo = np.concatenate(([0.0], self.breaks[:-1]))
        masses = self.values * (self.breaks**2 - lo**2)
        total = masses.sum()
        if total <= 0:
            raise ValueError("cannot sample from a density with zero mass")
        piece = rng.choice(masses.size, size=n, p=masses / total)
        u = rng.random(n)
        return np.sqrt(lo[piece] ** 2 + u * (self.breaks[piece] ** 2 - lo[piece] ** 2))


@dataclass(frozen=True)
class AtomicDensity:
    """Finitely many fixed emitters, each with an integer multiplicity."""

    points: np.ndarray  # (n, 2) locations
    weights: np.ndarray = None

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.shape[1] != 2:
            raise ValueError("points must be (n, 2) planar locations")
        weights = (
            np.ones(points.shape[0])
            if self.weights is None
            else np.asarray(self.weights, dtype=float)
        )
        if weights.shape != (points.shape[0],) or np.any(weights < 1):
            raise ValueError("each point needs a weight >= 1")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def radii(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])

    @property
    def support_radius(self) -> float:
        return float(self.radii.max())

    def disk_mass(self, radius=None):
        radius = self.support_radius if radius is None else float(radius)
        return float(self.weights[self.radii <= radius].sum())

    def truncated(self, radius: float) -> "AtomicDensity":
        keep = self.radii <= radius
        return AtomicDensity(self.points[keep], self.weights[keep])

    def sample_indices(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.choice(self.weights.size, size=n, p=self.weights / self.weights.sum())


@dataclass(frozen=True)
class WeightFunction:
    """Strictly positive piecewise-constant radial weights."""

    breaks: np.ndarray
    values: np.ndarray
    _constant: bool = field(default=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "breaks", _as_breaks(self.breaks, "weights"))
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.breaks.shape:
            raise ValueError("weights need one value per piece")
        if np.any(values <= 0):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, value: float = 1.0) -> "WeightFunction":
        w = cls(np.array([np.inf]), np.array([float(value)]))
        object.__setattr__(w, "_constant", True)
        return w

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        idx = np.minimum(
            np.searchsorted(self.breaks, r, side="left"), self.breaks.size - 1
        )
        out = self.values[idx]
        return out if out.ndim else float(out)

    @property
    def breakpoints(self):
        return () if self._constant else tuple(self.breaks[np.isfinite(self.breaks)])


def _simpson(width, f_lo, f_mid, f_hi):
    return width / 6.0 * (f_lo + 4.0 * f_mid + f_hi)


def adaptive_simpson(
    f,
    a: float,
    b: float,
    *,
    rel_tol: float = 1e-9,
    abs_tol: float = 0.0,
    initial_cuts=(),
    max_depth: int = 48,
    max_evals: int = 4_000_000,
):
    """Globally adaptive composite Simpson rule with Richardson control.

    ``f`` maps an array of abscissae ``(m,)`` to values ``(m,)`` or ``(m, k)``;
    vector outputs are integrated component-wise against a shared refinement
    (an interval is accepted only once every component meets its budget).
    ``abs_tol`` caps the precision chased on components whose integrals are
    negligibly small in the caller's units.  Raises :class:`QuadratureError`
    when refinement stalls, which is how non-integrable integrands are
    detected.
    """
    if b <= a:
        raise ValueError("empty integration range")
    cuts = np.unique(
        np.concatenate(
            ([a, b], [c for c in initial_cuts if a < c < b])
        ).astype(float)
    )

    scalar_out = True

    def evaluate(x):
        nonlocal scalar_out
        vals = np.asarray(f(x), dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        else:
            scalar_out = False
        return vals

    lo, hi = cuts[:-1], cuts[1:]
    mid = 0.5 * (lo + hi)
    # Endpoint nodes are pulled a hair inside their own segment so that
    # piecewise integrands with jumps at the cuts are sampled from the
    # correct side; the abscissa shift is far below any sane tolerance.
    nudge = 1e-12 * (hi - lo)
    f_lo = evaluate(lo + nudge)
    f_hi = evaluate(hi - nudge)
    f_mid = evaluate(mid)
    k = f_mid.shape[1]
    s1 = _simpson((hi - lo)[:, None], f_lo, f_mid, f_hi)

    span = b - a
    accepted = np.zeros(k)
    n_evals = 3 * mid.size
    scalar = scalar_out
    diag = (lo.size, float(lo[0]), float("nan"))

    for depth in range(max_depth + 1):
        if lo.size == 0:
            return accepted[0] if scalar else accepted
        if n_evals > max_evals:
            break
        q1 = 0.75 * lo + 0.25 * hi
        q3 = 0.25 * lo + 0.75 * hi
        f_q = evaluate(np.concatenate((q1, q3)))
        n_evals += 2 * lo.size
        f_q1, f_q3 = f_q[: lo.size], f_q[lo.size :]
        half = (0.5 * (hi - lo))[:, None]
        s_left = _simpson(half, f_lo, f_q1, f_mid)
        s_right = _simpson(half, f_mid, f_q3, f_hi)
        s2 = s_left + s_right
        err = np.abs(s2 - s1) / 15.0
        value = s2 + (s2 - s1) / 15.0

        total = accepted + value.sum(axis=0)
        scale = np.maximum(np.abs(total), 1e-300)
        # Small components ride along with the largest one: refining them
        # below ~machine noise of the dominant scale is pointless.
        scale = np.maximum(scale, 1e-9 * scale.max())
        tol_scale = np.maximum(rel_tol * scale, abs_tol)
        budget = tol_scale[None, :] * ((hi - lo) / span)[:, None]
        noise_floor = 1e-15 * scale[None, :]
        too_small = (hi - lo) <= 16 * np.finfo(float).eps * np.maximum(np.abs(hi), 1.0)
        done = np.all((err <= budget) | (err <= noise_floor), axis=1) | too_small

        accepted = accepted + value[done].sum(axis=0)
        keep = ~done
        if not np.any(keep):
            return accepted[0] if scalar else accepted
        diag = (int(keep.sum()), float(lo[keep][np.argmax(np.max(err[keep], axis=1))]),
                float(np.max(err[keep])))

        lo, hi, mid = lo[keep], hi[keep], mid[keep]
        f_lo, f_mid, f_hi = f_lo[keep], f_mid[keep], f_hi[keep]
        f_q1, f_q3 = f_q1[keep], f_q3[keep]
        s_left, s_right = s_left[keep], s_right[keep]
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
        f_lo = np.concatenate((f_lo, f_mid))
        f_hi = np.concatenate((f_mid, f_hi))
        mid = 0.5 * (lo + hi)
        f_mid = np.concatenate((f_q1, f_q3))
        s1 = np.concatenate((s_left, s_right))

    n_pending, where, worst = diag
    raise QuadratureError(
        f"quadrature did not converge: {n_pending} intervals pending after "
        f"depth {max_depth} / {n_evals} evaluations, worst interval around "
        f"x={where:.6g} with error {worst:.3g}"
    )


def radial_integral(f, density, *, rel_tol: float = 1e-9, abs_tol: float = 0.0, breakpoints=()):
    """Integrate ``f`` against a spatial intensity measure.

    For a radial density this is ``2*pi * int f(r) * density(r) * r dr`` over
    the support; for an atomic density it is the exact weighted sum
    ``sum_i w_i f(r_i)``.  ``f`` may return a vector per abscissa, in which
    case the result has that trailing shape.  ``breakpoints`` flags radii
    where the integrand may kink or jump (policy edges and the like) so that
    no quadrature interval straddles them.
    """
    if isinstance(density, AtomicDensity):
        radii = density.radii
        vals = np.asarray(f(radii), dtype=float)
        return np.tensordot(density.weights, vals, axes=(0, 0))

    support = density.support_radius
    cuts = np.unique(
        np.concatenate(
            (
                [0.0, support],
                density.breaks[density.breaks < support],
                [c for c in breakpoints if 0.0 < c < support],
            )
        )
    )

    def integrand(r):
        vals = np.asarray(f(r), dtype=float)
        weight = 2.0 * np.pi * r * density(r)
        return vals * (weight[:, None] if vals.ndim == 2 else weight)

    return adaptive_simpson(
        integrand, 0.0, support, rel_tol=rel_tol, abs_tol=abs_tol, initial_cuts=cuts[1:-1]
    )
