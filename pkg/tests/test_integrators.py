"""Convergence classification and the four integration engines."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from gaugelab.cells import Gauge, Interval
from gaugelab.divisions import RefinementSchedule, delta_fine_division, is_fine
from gaugelab.errors import (
    ArgumentError,
    MonotonicityError,
    OracleInconsistencyError,
)
from gaugelab.integrand import (
    BurkillIntegrand,
    increments_of,
    length_factor,
    length_squared_factor,
    make_integrand,
)
from gaugelab.integrators import (
    ConvergenceController,
    DistributionFunction,
    ExtremaOracle,
    darboux_riemann,
    gauge_integrate,
    identity_distribution,
    jump_anchoring_gauge,
    lebesgue_distribution_integrate,
    oscillation_probe,
    rs_integrate,
    singularity_gauge,
    square_distribution,
    step_distribution,
)
from gaugelab.results import Status


def _ctrl(tol=1e-9, start=4, stop=22, **kw):
    return ConvergenceController(
        tolerance_abs=tol, schedule=RefinementSchedule(start, stop), **kw
    )


class TestConvergenceController:
    def test_defaults(self):
        ctrl = ConvergenceController()
        assert ctrl.tolerance_abs == 1e-9
        assert ctrl.tolerance_rel == 1e-9
        assert ctrl.window == 3

    def test_validation(self):
        with pytest.raises(ArgumentError):
            ConvergenceController(tolerance_abs=-1.0)
        with pytest.raises(ArgumentError):
            ConvergenceController(window=0)
        with pytest.raises(ArgumentError):
            ConvergenceController(growth_factor=0.9)

    def test_tolerance_scales_with_magnitude(self):
        ctrl = ConvergenceController(tolerance_abs=1e-9, tolerance_rel=1e-9)
        assert ctrl.tolerance_at(0.0) == 1e-9
        assert ctrl.tolerance_at(1e6) == pytest.approx(1e-3 + 1e-9)


class TestRsIntegrate:
    def test_telescoping_accepts_first_level(self):
        h = make_integrand(None, increments_of(lambda u: u * u), "interval-only")
        result = rs_integrate(h, 0.0, 1.0)
        assert result.status is Status.CONVERGED
        assert result.levels_run == 1
        assert result.estimate == pytest.approx(1.0, abs=1e-12)

    def test_smooth_integrand_converges(self):
        h = make_integrand(
            lambda s: s,
            increments_of(lambda u: u * u, batch=lambda us: us * us),
            "tag",
            point_batch=lambda xs: xs,
        )
        result = rs_integrate(h, 0.0, 1.0, _ctrl(5e-5))
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(2.0 / 3.0, abs=1e-4)
        assert result.error_bound is not None

    def test_needs_two_strategies(self):
        h = make_integrand(None, length_factor(), "interval-only")
        from gaugelab.integrators import RS_STRATEGIES

        with pytest.raises(ArgumentError):
            rs_integrate(h, 0.0, 1.0, strategies=RS_STRATEGIES[:1])

    def test_trace_rows_and_strategy_sums(self):
        h = make_integrand(
            lambda s: s * s, length_factor(), "tag", point_batch=lambda x: x * x
        )
        result = rs_integrate(h, 0.0, 1.0, _ctrl(1e-3, 4, 12))
        assert result.status is Status.CONVERGED
        first = result.trace[0]
        assert first.level == 4 and first.n == 16
        assert first.sum_min <= first.sum_max
        assert set(result.strategy_sums) == {
            "rational-left", "rational-mid", "shifted-left"
        }
        lengths = {len(v) for v in result.strategy_sums.values()}
        assert lengths == {len(result.trace)}

    def test_divergence_detected(self):
        # sums grow like n * mean(tag): clean geometric growth
        h = BurkillIntegrand(
            name="tags-only", convention="tag",
            rule=lambda s, cell: s, batch=lambda tags, us, vs: tags,
        )
        result = rs_integrate(h, 0.0, 1.0, _ctrl(1e-9, 4, 12))
        assert result.status is Status.DIVERGED
        assert result.estimate is None

    def test_oscillation_between_grid_families(self):
        # rational grids sum 0, shifted grids sum 1: spread never closes
        from gaugelab.catalog import dirichlet_factor, step_at

        h = make_integrand(step_at(Fraction(1, 2)), dirichlet_factor(), "tag")
        result = rs_integrate(h, Fraction(0), Fraction(1), _ctrl(1e-9, 1, 9))
        assert result.status is Status.OSCILLATING
        assert result.estimate is None
        spreads = {row.spread for row in result.trace}
        assert spreads == {1}  # exact integers, no float fuzz

    def test_inconclusive_when_schedule_too_short(self):
        h = make_integrand(
            lambda s: s * s, length_factor(), "tag", point_batch=lambda x: x * x
        )
        result = rs_integrate(h, 0.0, 1.0, _ctrl(1e-12, 4, 6))
        assert result.status is Status.INCONCLUSIVE
        assert result.estimate is not None  # best guess, spread as error bound


class TestDarboux:
    def test_monotone_square(self):
        f = lambda s: s * s
        result = darboux_riemann(f, ExtremaOracle.monotone(f), 0.0, 1.0, _ctrl(1e-3, 4, 12))
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(1 / 3, abs=1e-3)
        assert result.error_bound <= 1e-3 / 2 * 1.001

    def test_constant_first_level(self):
        f = lambda s: 3.5
        result = darboux_riemann(f, ExtremaOracle.monotone(f), 0.0, 2.0, _ctrl(1e-9, 0, 8))
        assert result.status is Status.CONVERGED
        assert result.estimate == 7.0

    def test_lying_oracle_caught(self):
        f = lambda s: s * s
        liar = ExtremaOracle(lambda cell: (0.0, 0.1))  # claims sup 0.1 everywhere
        with pytest.raises(OracleInconsistencyError):
            darboux_riemann(f, liar, 0.0, 1.0, _ctrl(1e-3, 4, 8))

    def test_inverted_oracle_rejected(self):
        bad = ExtremaOracle(lambda cell: (1.0, 0.0))
        with pytest.raises(ArgumentError):
            bad(Interval(0.0, 1.0))

    def test_upper_lower_bracket_estimate(self):
        f = lambda s: s
        result = darboux_riemann(f, ExtremaOracle.monotone(f), 0.0, 2.0, _ctrl(1e-3, 4, 14))
        assert result.status is Status.CONVERGED
        last = result.trace[-1]
        assert last.sum_min <= 2.0 <= last.sum_max
        assert result.estimate == pytest.approx(2.0, abs=1e-3)


class TestGaugeIntegrate:
    def test_lengths_telescope_exactly(self):
        h = make_integrand(None, length_factor(), "interval-only")
        result = gauge_integrate(h, 0.0, 1.0)
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(1.0, abs=1e-12)

    def test_selector_depth_asymmetry_on_squared_lengths(self):
        # constant gauge delta = 2^-k: midpoint tags accept a uniform division
        # at n = 2^k, left and right tags need n = 2^(k+1); squared lengths
        # then sum to 2^-k versus 2^-(k+1), a visible factor-2 spread
        h = make_integrand(None, length_squared_factor(), "interval-only")
        result = gauge_integrate(h, 0.0, 1.0, _ctrl(4e-5, 4, 17))
        assert result.status is Status.CONVERGED
        mid = result.strategy_sums["mid-tags"]
        left = result.strategy_sums["left-tags"]
        assert mid[0] == pytest.approx(2.0 * left[0])
        assert result.estimate == pytest.approx(0.0, abs=1e-5)

    def test_riemann_integrable_subset_of_gauge(self):
        # whatever Darboux settles, the gauge engine must reproduce
        f = lambda s: s * s
        darboux = darboux_riemann(
            f, ExtremaOracle.monotone(f), 0.0, 1.0, _ctrl(1e-3, 4, 12)
        )
        h = make_integrand(f, length_factor(), "tag", point_batch=lambda x: x * x)
        gauge = gauge_integrate(h, 0.0, 1.0, _ctrl(1.5e-3, 4, 12))
        assert darboux.status is Status.CONVERGED
        assert gauge.status is Status.CONVERGED
        tol = 2 * max(1e-3, 1.5e-3)
        assert abs(darboux.estimate - gauge.estimate) <= tol

    def test_monotone_convergence_of_truncations(self):
        # f_j = min(j, 1/sqrt(s)) integrates to 2 - 1/j, increasing to 2;
        # the spread scales with the truncation's total variation, hence
        # the j-scaled stability tolerance
        previous = -math.inf
        for j in (1, 2, 4, 8):
            f = lambda s, j=j: min(float(j), 0.0 if s <= 0 else s ** -0.5)
            h = make_integrand(f, length_factor(), "tag")
            result = gauge_integrate(h, 0.0, 1.0, _ctrl(2e-4 * j, 4, 16))
            assert result.status is Status.CONVERGED
            assert result.estimate == pytest.approx(2.0 - 1.0 / j, abs=1e-3)
            assert result.estimate > previous
            previous = result.estimate
        assert previous == pytest.approx(2.0, abs=1e-3 + 1.0 / 8)

    def test_custom_gauges_respected(self):
        h = make_integrand(None, length_factor(), "interval-only")
        seen = []

        def gauges(level):
            seen.append(level)
            return Gauge.constant(2.0 ** -level)

        result = gauge_integrate(h, 0.0, 1.0, _ctrl(1e-9, 4, 8), gauges=gauges)
        assert result.status is Status.CONVERGED
        assert seen and all(lv >= 4 for lv in seen)


class TestSingularityGauge:
    def test_origin_gets_floor_width(self):
        g = singularity_gauge(ceiling=0.25, at_origin=1e-4)
        assert g(0.0) == 1e-4
        assert g(1e-3) == pytest.approx(5e-4)
        assert g(0.9) == 0.25

    def test_division_anchors_origin(self):
        g = singularity_gauge(ceiling=0.25, at_origin=1e-3)
        d = delta_fine_division(0.0, 1.0, g, selectors=("left", "midpoint", "right"))
        assert is_fine(d, g)
        assert d.tags[0] == 0.0  # only the origin itself survives near 0

    def test_inverse_sqrt_converges_to_two(self):
        from gaugelab.catalog import get_entry, run_entry

        result = run_entry(get_entry("inv_sqrt"))
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(2.0, abs=1e-3)


class TestDistributionFunction:
    def test_spot_check_rejects_decreasing(self):
        g = DistributionFunction(
            name="down", c=0.0, d=1.0, evaluate=lambda u: -u
        )
        with pytest.raises(MonotonicityError):
            g.spot_check_monotone()

    def test_step_distribution_normalized_at_left(self):
        g = step_distribution([(0.5, 2.0)], c=0.0, d=1.0)
        assert g.evaluate(0.0) == 0.0
        assert g.evaluate(0.4) == 0.0
        assert g.evaluate(0.5) == 2.0  # mass counted at its own position
        assert g.evaluate(0.6) == 2.0
        assert g.jumps == ((0.5, 2.0),)

    def test_mass_at_left_endpoint_counted(self):
        g = step_distribution([(0.0, 1.0), (0.5, 1.0)], c=0.0, d=1.0)
        # mass sitting at c lands in the first increment
        assert g.evaluate(0.0) == 0.0
        assert g.evaluate(0.1) == 1.0

    def test_increments_factor(self):
        g = identity_distribution()
        inc = g.increments()
        assert inc(Interval(0.25, 0.5)) == 0.25
        assert inc.additive


class TestJumpAnchoring:
    def test_jump_cells_tagged_at_jump(self):
        gauge = jump_anchoring_gauge([0.5], ceiling=0.25)
        d = delta_fine_division(0.0, 1.0, gauge, selectors=("left", "midpoint", "right"))
        assert is_fine(d, gauge)
        touching = [
            c for c in d.iter_cells() if c.cell.u <= 0.5 <= c.cell.v
        ]
        assert touching and all(c.tag == 0.5 for c in touching)

    def test_interior_mass_exact(self):
        g = step_distribution([(3.0, 1.0)], c=2.0, d=5.0, name="one-mass")
        result = lebesgue_distribution_integrate(g, _ctrl(1e-9, 4, 14))
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(3.0, abs=1e-12)

    def test_two_masses_exact(self):
        g = step_distribution(
            [(2.0, 1.0 / 3.0), (5.0, 2.0 / 3.0)], c=2.0, d=5.0, name="twomass"
        )
        result = lebesgue_distribution_integrate(g, _ctrl(1e-9, 4, 14))
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(4.0, abs=1e-9)


class TestLebesgueRoute:
    def test_identity_distribution_mean(self):
        result = lebesgue_distribution_integrate(
            identity_distribution(), _ctrl(2e-6)
        )
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(0.5, abs=1e-6)

    def test_square_distribution(self):
        result = lebesgue_distribution_integrate(
            square_distribution(), _ctrl(5e-5)
        )
        assert result.status is Status.CONVERGED
        assert result.estimate == pytest.approx(2.0 / 3.0, abs=1e-5)

    def test_refuses_non_monotone(self):
        g = DistributionFunction(
            name="wavy", c=0.0, d=1.0,
            evaluate=lambda u: math.sin(8.0 * u),
        )
        with pytest.raises(MonotonicityError):
            lebesgue_distribution_integrate(g)


class TestOscillationProbe:
    def test_rows_expose_per_strategy_sums(self):
        from gaugelab.catalog import dirichlet_factor, step_at
        from gaugelab.integrators import RS_STRATEGIES

        h = make_integrand(step_at(Fraction(1, 2)), dirichlet_factor(), "tag")
        rows = oscillation_probe(
            h, Fraction(0), Fraction(1), RS_STRATEGIES,
            schedule=RefinementSchedule(1, 6),
        )
        assert len(rows) == 6
        for level, sums, spread in rows:
            assert spread == 1
            assert set(sums) == {"rational-left", "rational-mid", "shifted-left"}


@settings(max_examples=15, deadline=None)
@given(
    c=hst.floats(min_value=-2.0, max_value=2.0),
    width=hst.floats(min_value=0.5, max_value=3.0),
)
def test_property_constant_point_function(c, width):
    # a constant against plain length always converges to c * (b - a) fast
    h = make_integrand(lambda s, c=c: c, length_factor(), "tag")
    result = rs_integrate(h, 0.0, width)
    assert result.status is Status.CONVERGED
    assert result.estimate == pytest.approx(c * width, abs=1e-9 + 1e-12 * abs(c * width))
