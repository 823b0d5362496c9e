"""Self-check machinery: grid sweeps, support bounds, limit tables."""
import math

import pytest

from conftest import dirichlet_pair
from fanokit import (
    FiniteDistribution,
    SweepSpec,
    sweep_diffusion,
    verify_limit,
    verify_power_sum,
    verify_support_bound,
)
from fanokit.errors import GridTooLarge, NumericalInstability


class TestSweep:
    small = SweepSpec(outcome_counts=(2,), weight_grid_denominator=4,
                      alphas=(0.5, 2.0))

    def test_small_grid_is_clean(self):
        s = sweep_diffusion(self.small)
        assert s.instances == 120
        assert s.violations == 0
        assert s.max_violation == 0.0

    def test_summary_is_deterministic(self):
        a = sweep_diffusion(self.small).to_json_obj(include_timing=False)
        b = sweep_diffusion(self.small).to_json_obj(include_timing=False)
        assert a == b

    def test_worst_instance_is_replayable(self):
        worst = sweep_diffusion(self.small).worst_instance
        for key in ("id", "k", "p", "q", "event", "p_min", "p_max", "alpha",
                    "p_event", "bound_value", "excess"):
            assert key in worst
        assert worst["id"].startswith("k2-")

    def test_timing_is_opt_in(self):
        s = sweep_diffusion(self.small)
        assert "elapsed_ms" in s.to_json_obj()
        assert "elapsed_ms" not in s.to_json_obj(include_timing=False)

    def test_planned_size_is_capped(self):
        with pytest.raises(GridTooLarge):
            sweep_diffusion(SweepSpec(outcome_counts=(4, 5),
                                      weight_grid_denominator=64))

    @pytest.mark.parametrize("alpha", [1.0, 0.0, math.inf, -2.0])
    def test_unusable_orders_are_refused(self, alpha):
        with pytest.raises(NumericalInstability):
            sweep_diffusion(SweepSpec(outcome_counts=(2,),
                                      weight_grid_denominator=4,
                                      alphas=(alpha,)))


class TestSupportBound:
    def test_point_mass_is_tight(self):
        P = FiniteDistribution((0, 1), (1.0, 0.0))
        Q = FiniteDistribution((0, 1), (0.25, 0.75))
        c = verify_support_bound(P, Q)
        assert c.passed and c.slack == 0.0
        assert c.divergence == c.support_term == -math.log(0.25)

    def test_disjoint_supports_compare_as_equal_infinities(self):
        P = FiniteDistribution((0, 1), (1.0, 0.0))
        Q = FiniteDistribution((0, 1), (0.0, 1.0))
        c = verify_support_bound(P, Q)
        assert c.passed and c.slack == 0.0 and c.divergence == math.inf

    def test_partial_support_leaves_infinite_room(self):
        P = FiniteDistribution((0, 1), (0.5, 0.5))
        Q = FiniteDistribution((0, 1), (1.0, 0.0))
        c = verify_support_bound(P, Q)
        assert c.passed and c.slack == math.inf

    def test_random_pairs_never_violate(self):
        for seed in range(40):
            P, Q = dirichlet_pair(seed, 3)
            c = verify_support_bound(P, Q)
            assert c.passed and c.slack >= -1e-12


class TestPowerSum:
    def test_default_grid_is_exactly_clean(self):
        c = verify_power_sum()
        assert c.passed
        assert c.max_violation == 0.0
        assert c.points == 5 * 1001


class TestLimitTables:
    P = FiniteDistribution((0, 1, 2), (0.5, 0.3, 0.2))
    Q = FiniteDistribution((0, 1, 2), (0.2, 0.5, 0.3))

    def event(self, x):
        return x == 0

    def test_orders_below_one_close_in_from_beneath(self):
        t = verify_limit(self.P, self.Q, self.event, 0.0, 0.2, k_max=6,
                         side="below")
        assert t.decreasing and t.converged
        assert len(t.rows) == 6
        assert t.rows[-1].gap <= 1e-4
        # each row really does use orders marching toward one
        assert [r.alpha for r in t.rows] == [
            pytest.approx(1.0 - 10.0 ** -k) for k in range(1, 7)
        ]

    def test_orders_above_one_close_in_from_the_other_side(self):
        t = verify_limit(self.P, self.Q, self.event, 0.0, 0.2, k_max=6,
                         side="above")
        assert t.decreasing and t.converged
        assert t.rows[-1].gap <= 1e-4

    def test_both_sides_share_the_limiting_value(self):
        below = verify_limit(self.P, self.Q, self.event, 0.0, 0.2, side="below")
        above = verify_limit(self.P, self.Q, self.event, 0.0, 0.2, side="above")
        assert below.kl_value == above.kl_value

    def test_unknown_side(self):
        with pytest.raises(NumericalInstability):
            verify_limit(self.P, self.Q, self.event, 0.0, 0.2, side="sideways")

    def test_depth_is_limited_by_the_kl_routing_band(self):
        # ten digits in would land inside the band where orders reroute to
        # kl, which would silently compare kl against itself
        with pytest.raises(NumericalInstability):
            verify_limit(self.P, self.Q, self.event, 0.0, 0.2, k_max=10)
