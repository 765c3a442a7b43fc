"""Closed forms for the Erlang M/D/1/1 loss receiver with interference.

Two entry points share one computational core:

* the spatial form, where packet powers come from sensor locations through a
  path-loss law and a radial intensity measure (``laplace_l1`` ... ``p_rec``,
  ``rho``), and
* the generic form, where the received-power distribution is an explicit
  finite mixture (``erlang_pi`` and the ``mixture_laplace_*`` helpers).

Every transform is an exponential of one scalar function, the phi-moment
``lambda_e * int w(x) * phi(xi * P * L(x)) Lambda_s(dx)`` with weight
``w`` equal to the admission probability, its complement, or one.  The
moment is evaluated for whole arrays of ``xi`` in a single adaptive
quadrature pass, which keeps curve evaluations cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import PathLoss, RadialDensity, phi, radial_integral

__all__ = [
    "ChannelParams",
    "Policy",
    "DiskPolicy",
    "ConstantPolicy",
    "TabulatedPolicy",
    "AnnularPolicy",
    "PowerDistribution",
    "ReceptionCurve",
    "ReceptionEvaluator",
    "RhoProfile",
    "lambda_admissible",
    "p_free",
    "laplace_w",
    "laplace_l1",
    "laplace_l2",
    "laplace_ljb",
    "laplace_all_traffic",
    "p_rec",
    "p_rec_bounds",
    "rho",
    "reception_curve",
    "erlang_pi",
    "mixture_laplace_l1",
    "mixture_laplace_l2",
    "mixture_laplace_ljb",
]

_PHI_CHUNK = 256          # xi values per quadrature pass
_OUTER_NODES = 64         # Gauss-Legendre order of the t-integral in L2
_OUTER_PANEL_LOAD = 8.0   # one panel per this much lambda*B


@dataclass(frozen=True)
class ChannelParams:
    """Emission power, noise, SINR threshold, packet duration, per-sensor rate."""

    p_bar: float
    noise_w: float
    gamma: float
    b: float
    lambda_e: float

    def __post_init__(self):
        if not self.p_bar > 0:
            raise ValueError("p_bar must be positive")
        if self.noise_w < 0:
            raise ValueError("noise_w must be non-negative")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.b > 0:
            raise ValueError("b must be positive")
        if self.lambda_e < 0:
            raise ValueError("lambda_e must be non-negative")

    def xi_at(self, pl: PathLoss, r):
        """SINR threshold divided by the mean received power from distance r."""
        return self.gamma / (self.p_bar * pl(r))


class Policy:
    """Radial admission probability d(r).  Subclasses implement ``__call__``."""

    breakpoints: tuple = ()

    def __call__(self, r):  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class DiskPolicy(Policy):
    """Admit everything up to (and including) the given radius."""

    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r <= self.radius, 1.0, 0.0)
        return out if out.ndim else float(out)

    @property
    def breakpoints(self):
        return (self.radius,) if np.isfinite(self.radius) else ()


@dataclass(frozen=True)
class ConstantPolicy(Policy):
    """Location-independent admission probability."""

    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("admission probability must lie in [0, 1]")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full_like(r, self.value)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class TabulatedPolicy(Policy):
    """Piecewise-linear admission probability on an explicit radius grid.

    Zero beyond the last grid point; constant continuation below the first.
    """

    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if radii.ndim != 1 or radii.size < 2 or np.any(np.diff(radii) <= 0):
            raise ValueError("radius grid must be increasing with >= 2 points")
        if values.shape != radii.shape:
            raise ValueError("one admission value per grid radius")
        if np.any((values < -1e-12) | (values > 1 + 1e-12)):
            raise ValueError("admission values must lie in [0, 1]")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", np.clip(values, 0.0, 1.0))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.radii, self.values)
        out = np.where(r > self.radii[-1], 0.0, out)
        return out if out.ndim else float(out)

    @property
    def breakpoints(self):
        return (self.radii[0], self.radii[-1])


@dataclass(frozen=True)
class AnnularPolicy(Policy):
    """Indicator of a union of closed radius intervals."""

    intervals: tuple

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if not 0.0 <= lo <= hi:
                raise ValueError("intervals must satisfy 0 <= lo <= hi")
        object.__setattr__(self, "intervals", ivs)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for lo, hi in self.intervals:
            out = np.where((r >= lo) & (r <= hi), 1.0, out)
        return out if out.ndim else float(out)

    @property
    def breakpoints(self):
        return tuple(x for iv in self.intervals for x in iv)


@dataclass(frozen=True)
class PowerDistribution:
    """Finite mixture of mean received powers with probabilities summing to 1."""

    powers: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        powers = np.asarray(self.powers, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if powers.shape != probs.shape or powers.ndim != 1 or powers.size == 0:
            raise ValueError("powers and probs must be matching 1-d sequences")
        if np.any(powers <= 0) or np.any(probs <= 0):
            raise ValueError("powers and probs must be strictly positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        object.__setattr__(self, "powers", powers)
        object.__setattr__(self, "probs", probs)


# ---------------------------------------------------------------------------
# phi-moment kernels
# ---------------------------------------------------------------------------


class _SpatialKernel:
    """lambda and the phi-moment for a weighted Poisson rain of packets."""

    def __init__(self, weight, density, ch, pl, rel_tol):
        self._weight = weight
        self._density = density
        self._ch = ch
        self._pl = pl
        self._rel_tol = rel_tol
        breakpoints = getattr(weight, "breakpoints", ())
        self._breakpoints = tuple(breakpoints)
        self.lam = ch.lambda_e * radial_integral(
            lambda r: np.asarray(weight(r), dtype=float),
            density,
            rel_tol=rel_tol,
            breakpoints=self._breakpoints,
        )

    def phi_moment(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s)
        ch, pl, w = self._ch, self._pl, self._weight
        # Moments are only ever multiplied by B and exponentiated, so chasing
        # them below 1e-11/B in absolute terms buys nothing.
        abs_tol = 1e-11 / ch.b if ch.lambda_e > 0 else 0.0
        for start in range(0, s.size, _PHI_CHUNK):
            chunk = s[start : start + _PHI_CHUNK]

            def f(r, chunk=chunk):
                u = np.outer(ch.p_bar * pl(r), chunk)
                return phi(u) * np.asarray(w(r), dtype=float)[:, None]

            out[start : start + _PHI_CHUNK] = ch.lambda_e * radial_integral(
                f,
                self._density,
                rel_tol=self._rel_tol,
                abs_tol=abs_tol / max(ch.lambda_e, 1e-300),
                breakpoints=self._breakpoints,
            )
        return out


class _MixtureKernel:
    """lambda and the phi-moment for an explicit received-power mixture."""

    def __init__(self, powers: PowerDistribution, lam: float):
        self.lam = float(lam)
        self._powers = powers

    def phi_moment(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        u = np.outer(s, self._powers.powers)
        return self.lam * phi(u) @ self._powers.probs


class _ComplementWeight:
    """Weight ``1 - d`` with the policy's breakpoints."""

    def __init__(self, policy):
        self._policy = policy
        self.breakpoints = getattr(policy, "breakpoints", ())

    def __call__(self, r):
        return 1.0 - np.asarray(self._policy(r), dtype=float)


def _ones(r):
    return np.ones_like(np.asarray(r, dtype=float))


@lru_cache(maxsize=8)
def _gauss_legendre_01(panels: int):
    """Nodes/weights of a composite Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(_OUTER_NODES)
    edges = np.linspace(0.0, 1.0, panels + 1)
    nodes = ((x[None, :] + 1.0) / 2.0 * np.diff(edges)[:, None] + edges[:-1, None]).ravel()
    weights = (w[None, :] / 2.0 * np.diff(edges)[:, None]).ravel()
    return nodes, weights


def _l1_from_kernel(kernel, b, xi):
    return np.exp(-b * kernel.phi_moment(xi))


def _l2_from_kernel(kernel, b, xi):
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    lam = kernel.lam
    lam_b = lam * b
    panels = max(1, int(np.ceil(lam_b / _OUTER_PANEL_LOAD)))
    t, w = _gauss_legendre_01(panels)
    moments = kernel.phi_moment(np.outer(t, xi).ravel()).reshape(t.size, xi.size)
    # Exponents are kept <= 0 so that arbitrarily loaded systems cannot
    # overflow: exp(-b*(lam*(1-t) + t*phi_moment(t*xi))).
    exponent = -b * (lam * (1.0 - t)[:, None] + t[:, None] * moments)
    return np.exp(-lam_b) + lam_b * (w @ np.exp(exponent))


def _ljb_from_kernel(kernel, b, xi):
    return np.exp(-2.0 * b * kernel.phi_moment(xi))


def _maybe_scalar(values, xi):
    values = np.asarray(values)
    return float(values[0]) if np.ndim(xi) == 0 else values


def _check_xi(xi):
    if np.any(np.asarray(xi, dtype=float) < 0):
        raise ValueError("xi must be non-negative")


# ---------------------------------------------------------------------------
# spatial operations
# ---------------------------------------------------------------------------


def lambda_admissible(policy, density, ch, *, rel_tol: float = 1e-9) -> float:
    """Total arrival rate of admissible packets, lambda_e * int d dLambda_s."""
    return float(_SpatialKernel(policy, density, ch, None, rel_tol).lam)


def p_free(lam: float, b: float) -> float:
    """Erlang acceptance probability 1 / (1 + lambda * B)."""
    if lam < 0 or b <= 0:
        raise ValueError("need lam >= 0 and b > 0")
    return 1.0 / (1.0 + lam * b)


def laplace_w(xi, ch: ChannelParams):
    """Laplace transform of the (constant) noise power."""
    _check_xi(xi)
    return np.exp(-np.asarray(xi, dtype=float) * ch.noise_w)


def laplace_l1(xi, policy, density, ch, pl, *, rel_tol: float = 1e-9):
    """Transform of the averaged interference from admissible packets that
    arrive while the tagged packet is being received."""
    _check_xi(xi)
    kernel = _SpatialKernel(policy, density, ch, pl, rel_tol)
    return _maybe_scalar(_l1_from_kernel(kernel, ch.b, np.atleast_1d(xi)), xi)


def laplace_l2(xi, policy, density, ch, pl, *, rel_tol: float = 1e-9):
    """Transform of the averaged interference from admissible packets already
    in flight when the tagged packet arrives."""
    _check_xi(xi)
    kernel = _SpatialKernel(policy, density, ch, pl, rel_tol)
    return _maybe_scalar(_l2_from_kernel(kernel, ch.b, xi), xi)


def laplace_ljb(xi, policy, density, ch, pl, *, rel_tol: float = 1e-9):
    """Transform of the averaged interference from non-admissible packets."""
    _check_xi(xi)
    kernel = _SpatialKernel(_ComplementWeight(policy), density, ch, pl, rel_tol)
    return _maybe_scalar(_ljb_from_kernel(kernel, ch.b, np.atleast_1d(xi)), xi)


def laplace_all_traffic(xi, density, ch, pl, *, rel_tol: float = 1e-9):
    """Policy-free kernel: the L1-type transform of the whole packet rain.

    This is the quantity whose square (times the noise transform) lower-bounds
    the reception probability and which alone upper-bounds it.
    """
    _check_xi(xi)
    kernel = _SpatialKernel(_ones, density, ch, pl, rel_tol)
    return _maybe_scalar(_l1_from_kernel(kernel, ch.b, np.atleast_1d(xi)), xi)


class ReceptionEvaluator:
    """Reception probabilities for one (policy, density, channel) triple.

    Builds the three quadrature kernels once so that solvers can evaluate
    ``p_rec`` and its bounds at many radii cheaply.
    """

    def __init__(self, policy, density, ch, pl, rel_tol: float = 1e-9):
        self.ch = ch
        self.pl = pl
        self._adm = _SpatialKernel(policy, density, ch, pl, rel_tol)
        self._non = _SpatialKernel(_ComplementWeight(policy), density, ch, pl, rel_tol)
        self._all = _SpatialKernel(_ones, density, ch, pl, rel_tol)
        self.lam = float(self._adm.lam)

    @property
    def p_free(self) -> float:
        return p_free(self.lam, self.ch.b)

    def _xi(self, r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(r <= 0):
            raise ValueError("reception probabilities need r > 0")
        return self.ch.xi_at(self.pl, r)

    def p_rec(self, r):
        xi = self._xi(r)
        value = (
            laplace_w(xi, self.ch)
            * _l1_from_kernel(self._adm, self.ch.b, xi)
            * _l2_from_kernel(self._adm, self.ch.b, xi)
            * _ljb_from_kernel(self._non, self.ch.b, xi)
        )
        return _maybe_scalar(value, r)

    def bounds(self, r):
        xi = self._xi(r)
        lw = laplace_w(xi, self.ch)
        kernel_transform = _l1_from_kernel(self._all, self.ch.b, xi)
        return (
            _maybe_scalar(lw * kernel_transform**2, r),
            _maybe_scalar(lw * kernel_transform, r),
        )

    def conditional_transform(self, xi):
        """L1 * L2: transform of the averaged admissible interference seen by
        an accepted packet."""
        _check_xi(xi)
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        value = _l1_from_kernel(self._adm, self.ch.b, xi_arr) * _l2_from_kernel(
            self._adm, self.ch.b, xi_arr
        )
        return _maybe_scalar(value, xi)

    def external_transform(self, xi):
        """Transform of the averaged non-admissible interference."""
        _check_xi(xi)
        value = _ljb_from_kernel(self._non, self.ch.b, np.atleast_1d(xi))
        return _maybe_scalar(value, xi)


def p_rec(r, policy, density, ch, pl, *, rel_tol: float = 1e-9):
    """Conditional reception probability for an accepted packet from radius r.

    Product of the noise transform and the three interference transforms,
    all evaluated at xi = gamma / (P * L(r)).
    """
    return ReceptionEvaluator(policy, density, ch, pl, rel_tol).p_rec(r)


def p_rec_bounds(r, density, ch, pl, *, rel_tol: float = 1e-9):
    """Policy-independent lower and upper bounds on the reception probability."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise ValueError("p_rec_bounds needs r > 0")
    xi = ch.xi_at(pl, r_arr)
    kernel = _SpatialKernel(_ones, density, ch, pl, rel_tol)
    lw = laplace_w(xi, ch)
    kernel_transform = _l1_from_kernel(kernel, ch.b, xi)
    return (
        _maybe_scalar(lw * kernel_transform**2, r),
        _maybe_scalar(lw * kernel_transform, r),
    )


@dataclass(frozen=True)
class RhoProfile:
    """Exact information density and its bound-based variants at some radii."""

    exact: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def rho(r, policy, density, ch, pl, *, rel_tol: float = 1e-9) -> RhoProfile:
    """Spatio-temporal density of received information at radius r.

    ``lambda_e * lambda_s(r) * d(r) * p_free * p_rec(r)``, together with the
    variants where the reception probability is replaced by its bounds.
    Only meaningful for radial densities.
    """
    if not isinstance(density, RadialDensity):
        raise TypeError("rho is a density per unit area; needs a RadialDensity")
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    ev = ReceptionEvaluator(policy, density, ch, pl, rel_tol)
    base = ch.lambda_e * density(r_arr) * policy(r_arr) * ev.p_free
    exact = base * np.atleast_1d(ev.p_rec(r_arr))
    low, up = (np.atleast_1d(v) for v in ev.bounds(r_arr))
    if np.ndim(r) == 0:
        return RhoProfile(float(exact[0]), float((base * low)[0]), float((base * up)[0]))
    return RhoProfile(exact, base * low, base * up)


@dataclass(frozen=True)
class ReceptionCurve:
    """Sampled reception probabilities, bounds and information density."""

    radii: np.ndarray
    p_rec: np.ndarray
    p_rec_lower: np.ndarray
    p_rec_upper: np.ndarray
    rho: np.ndarray
    rho_lower: np.ndarray
    rho_upper: np.ndarray
    p_free: float
    lam: float

    def __post_init__(self):
        # 1e-8 slack: exact value and bounds come from independent quadratures.
        if np.any(self.p_rec_lower > self.p_rec + 1e-8) or np.any(
            self.p_rec > self.p_rec_upper + 1e-8
        ):
            raise ValueError("reception bounds must sandwich the exact value")


def reception_curve(
    radii, policy, density, ch, pl, *, rel_tol: float = 1e-9
) -> ReceptionCurve:
    radii = np.asarray(radii, dtype=float)
    ev = ReceptionEvaluator(policy, density, ch, pl, rel_tol)
    pf = ev.p_free
    exact = np.atleast_1d(ev.p_rec(radii))
    low, up = ev.bounds(radii)
    base = ch.lambda_e * density(radii) * policy(radii) * pf
    return ReceptionCurve(
        radii, exact, low, up, base * exact, base * low, base * up, pf, ev.lam
    )


# ---------------------------------------------------------------------------
# generic mixture operations
# ---------------------------------------------------------------------------


def mixture_laplace_l1(xi, powers: PowerDistribution, lam: float, b: float):
    _check_xi(xi)
    return _maybe_scalar(
        _l1_from_kernel(_MixtureKernel(powers, lam), b, np.atleast_1d(xi)), xi
    )


def mixture_laplace_l2(xi, powers: PowerDistribution, lam: float, b: float):
    _check_xi(xi)
    return _maybe_scalar(_l2_from_kernel(_MixtureKernel(powers, lam), b, xi), xi)


def mixture_laplace_ljb(xi, powers: PowerDistribution, rate: float, b: float):
    """External-interference transform for a non-admissible mixture stream."""
    _check_xi(xi)
    return _maybe_scalar(
        _ljb_from_kernel(_MixtureKernel(powers, rate), b, np.atleast_1d(xi)), xi
    )


def erlang_pi(
    powers: PowerDistribution,
    lam: float,
    ch: ChannelParams,
    external=None,
) -> float:
    """Long-run fraction of packets correctly received by the loss system.

    ``external`` optionally adds an independent interfering stream as a
    ``(PowerDistribution, rate)`` pair.
    """
    if lam < 0:
        raise ValueError("lam must be non-negative")
    xi = ch.gamma / powers.powers
    kernel = _MixtureKernel(powers, lam)
    per_atom = (
        laplace_w(xi, ch)
        * _l1_from_kernel(kernel, ch.b, xi)
        * _l2_from_kernel(kernel, ch.b, xi)
    )
    if external is not None:
        ext_powers, ext_rate = external
        per_atom = per_atom * _ljb_from_kernel(
            _MixtureKernel(ext_powers, ext_rate), ch.b, xi
        )
    return float(p_free(lam, ch.b) * (powers.probs @ per_atom))
