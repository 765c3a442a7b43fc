import math
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from erlang_rain.geometry import (
    AtomicDensity,
    PathLoss,
    QuadratureError,
    RadialDensity,
    WeightFunction,
    adaptive_simpson,
    phi,
    radial_integral,
)

getcontext().prec = 50


def decimal_power_of_ten(exponent: float) -> float:
    """10**exponent through 50-digit decimal arithmetic."""
    return float((Decimal(exponent) * Decimal(10).ln()).exp())


class TestPathLoss:
    def test_unit_radius_gives_kappa(self):
        pl = PathLoss(10**-5.5, 3.3)
        assert pl(1.0) == pytest.approx(10**-5.5, rel=1e-15)

    def test_unit_everything(self):
        assert PathLoss(1.0, 2.5)(1.0) == 1.0

    def test_high_precision_oracle_at_20m(self):
        # 10^(-5.5 - 3.3*log10(20)) evaluated in 50-digit decimals.
        expected = float(
            (
                (Decimal("-5.5") - Decimal("3.3") * Decimal(20).ln() / Decimal(10).ln())
                * Decimal(10).ln()
            ).exp()
        )
        assert expected == pytest.approx(1.6091666169315297e-10, rel=1e-12)
        assert PathLoss(10**-5.5, 3.3)(20.0) == pytest.approx(expected, rel=1e-12)

    def test_domain_error(self):
        pl = PathLoss(1.0, 3.0)
        with pytest.raises(ValueError):
            pl(0.0)
        with pytest.raises(ValueError):
            pl(np.array([1.0, -2.0]))

    def test_invariants(self):
        with pytest.raises(ValueError):
            PathLoss(0.0, 3.0)
        with pytest.raises(ValueError):
            PathLoss(1.0, 2.0)

    @settings(max_examples=60, deadline=None)
    @given(
        r1=st.floats(1e-3, 1e3),
        factor=st.floats(1.0001, 100.0),
        eta=st.floats(2.01, 6.0),
    )
    def test_strictly_decreasing(self, r1, factor, eta):
        pl = PathLoss(0.7, eta)
        assert pl(r1) > pl(r1 * factor)

    def test_radius_for_gain_round_trip(self):
        pl = PathLoss(10**-5.5, 3.3)
        assert pl.radius_for_gain(pl(17.0)) == pytest.approx(17.0, rel=1e-12)


class TestPhi:
    def test_zero(self):
        assert phi(0.0) == 0.0

    def test_one_minus_log_two(self):
        assert phi(1.0) == pytest.approx(1.0 - math.log(2.0), abs=1e-15)

    def test_tiny_argument_series_oracle(self):
        # Independent 50-digit evaluation of 1 - log(1+u)/u at u = 1e-6.
        u = Decimal("1e-6")
        expected = float(1 - (1 + u).ln() / u)
        assert expected == pytest.approx(5e-7, rel=1e-5)
        assert phi(1e-6) == pytest.approx(expected, rel=1e-12)

    def test_infinite_argument(self):
        assert phi(np.inf) == 1.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            phi(-0.1)

    @settings(max_examples=80, deadline=None)
    @given(u=st.floats(0.0, 1e12), step=st.floats(1e-9, 1e6))
    def test_monotone_and_bounded(self, u, step):
        lo, hi = phi(u), phi(u + step)
        assert 0.0 <= lo <= hi < 1.0

    @settings(max_examples=80, deadline=None)
    @given(exponent=st.floats(-8.0, -3.0))
    def test_series_matches_log_form(self, exponent):
        u = 10.0**exponent
        direct = 1.0 - math.log1p(u) / u
        assert abs(phi(u) - direct) < 1e-12


class TestRadialDensity:
    def test_uniform_mass(self):
        dens = RadialDensity.uniform(10.0, 50.0)
        assert dens.disk_mass() == pytest.approx(10 * math.pi * 2500, rel=1e-12)

    def test_left_continuity_and_support(self):
        dens = RadialDensity(np.array([10.0, 30.0]), np.array([5.0, 2.0]))
        assert dens(10.0) == 5.0
        assert dens(10.000001) == 2.0
        assert dens(30.0) == 2.0
        assert dens(30.1) == 0.0

    def test_truncated(self):
        dens = RadialDensity(np.array([10.0, 30.0]), np.array([5.0, 2.0]))
        cut = dens.truncated(20.0)
        assert cut.support_radius == 20.0
        assert cut.disk_mass() == pytest.approx(5 * math.pi * 100 + 2 * math.pi * 300)

    def test_invariants(self):
        with pytest.raises(ValueError):
            RadialDensity(np.array([1.0, 0.5]), np.array([1.0, 1.0]))
        with pytest.raises(ValueError):
            RadialDensity(np.array([1.0]), np.array([-1.0]))

    def test_sampling_matches_annulus_masses(self):
        dens = RadialDensity(np.array([5.0, 20.0]), np.array([8.0, 1.0]))
        rng = np.random.default_rng(3)
        r = dens.sample_radii(rng, 200_000)
        inner = np.mean(r <= 5.0)
        expected = dens.disk_mass(5.0) / dens.disk_mass()
        assert inner == pytest.approx(expected, abs=4 * math.sqrt(expected / 200_000))


class TestAtomicDensity:
    def test_radii_and_mass(self):
        at = AtomicDensity(np.array([[3.0, 4.0], [0.0, 1.0]]), np.array([2.0, 1.0]))
        assert np.allclose(sorted(at.radii), [1.0, 5.0])
        assert at.disk_mass() == 3.0
        assert at.disk_mass(2.0) == 1.0

    def test_weight_invariant(self):
        with pytest.raises(ValueError):
            AtomicDensity(np.array([[0.0, 1.0]]), np.array([0.5]))


class TestWeightFunction:
    def test_constant(self):
        w = WeightFunction.constant(2.5)
        assert w(0.3) == 2.5 and w(1e6) == 2.5
        assert w.breakpoints == ()

    def test_pieces_left_continuous(self):
        w = WeightFunction(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
        assert w(1.0) == 3.0 and w(1.5) == 4.0 and w(5.0) == 4.0

    def test_positive_required(self):
        with pytest.raises(ValueError):
            WeightFunction(np.array([1.0]), np.array([0.0]))


class TestRadialIntegral:
    def test_area_times_density(self):
        dens = RadialDensity.uniform(10.0, 50.0)
        val = radial_integral(lambda r: np.ones_like(r), dens)
        assert val == pytest.approx(10 * math.pi * 2500, rel=1e-9)

    def test_atomic_point_count(self):
        at = AtomicDensity(np.array([[1.0, 0.0], [0.0, 2.0], [3.0, 0.0]]))
        assert radial_integral(lambda r: np.ones_like(r), at) == 3.0

    def test_canonical_kernel_vs_dense_trapezoid(self, canonical):
        pl, dens = canonical["pl"], canonical["density"]
        xi = canonical["ch"].xi_at(pl, 10.0)
        val = radial_integral(lambda r: phi(xi * pl(r)), dens)
        r = np.linspace(1e-9, 50.0, 1_000_001)
        brute = np.trapezoid(phi(xi * pl(r)) * 2 * np.pi * r * 10.0, r)
        assert val == pytest.approx(brute, rel=1e-7)

    def test_linearity(self):
        dens = RadialDensity(np.array([7.0, 50.0]), np.array([3.0, 10.0]))
        f1 = lambda r: np.sin(r) ** 2
        f2 = lambda r: np.exp(-0.1 * r)
        lhs = radial_integral(lambda r: 2.3 * f1(r) - 1.7 * f2(r), dens)
        rhs = 2.3 * radial_integral(f1, dens) - 1.7 * radial_integral(f2, dens)
        assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_tolerance_halving_stability(self):
        dens = RadialDensity.uniform(10.0, 50.0)
        f = lambda r: np.exp(-0.01 * r**2) * np.cos(r)
        for tol in [1e-6, 1e-7, 1e-8]:
            coarse = radial_integral(f, dens, rel_tol=tol)
            fine = radial_integral(f, dens, rel_tol=tol / 2)
            assert abs(coarse - fine) < tol * max(abs(fine), 1.0)

    def test_vector_valued_integrand(self):
        dens = RadialDensity.uniform(2.0, 10.0)
        out = radial_integral(lambda r: np.stack([np.ones_like(r), r], axis=1), dens)
        assert out[0] == pytest.approx(2 * math.pi * 100, rel=1e-9)
        assert out[1] == pytest.approx(2 * 2 * math.pi * 1000 / 3, rel=1e-9)

    def test_non_integrable_raises(self):
        with pytest.raises(QuadratureError):
            adaptive_simpson(
                lambda x: np.sin(1.0 / np.maximum(x, 1e-300)) / np.maximum(x, 1e-300) ** 2,
                0.0,
                1.0,
                max_depth=20,
                max_evals=20_000,
            )

    def test_breakpoint_jump_handled(self):
        # Integrand with a step at r=5 listed as a breakpoint.
        dens = RadialDensity.uniform(1.0, 10.0)
        step = lambda r: np.where(r <= 5.0, 1.0, 0.0)
        val = radial_integral(step, dens, breakpoints=(5.0,))
        assert val == pytest.approx(math.pi * 25, rel=1e-9)
