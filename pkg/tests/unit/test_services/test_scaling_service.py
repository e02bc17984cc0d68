from fractions import Fraction

import pytest

from bubblewalk.core.exception import ValidationException
from bubblewalk.models.scaling import ScalingRule
from bubblewalk.services.scaling_service import ScalingService


@pytest.mark.unit
class TestScalingService:
    """Unit tests for ScalingService."""

    def test_alpha_examples(self):
        """alpha_1 = 2 and alpha_9 = 7 for the canonical rule."""
        service = ScalingService(ScalingRule.canonical())
        assert service.alpha_at(1) == 2
        assert service.alpha_at(9) == 7

    def test_s_examples(self, fig1_rule):
        """s_0 = 0, s_2 = 7, s_3 = 12 for alpha = (2, 3, 4)."""
        service = ScalingService(fig1_rule)
        assert [service.s_at(k) for k in (0, 2, 3)] == [0, 7, 12]

    def test_increments(self):
        """s_k - s_{k-1} = alpha_k + 1."""
        for rule in (ScalingRule.canonical(), ScalingRule.geometric(3.0), ScalingRule.constant_rule(4)):
            service = ScalingService(rule)
            for k in range(1, 40):
                assert service.s_at(k) - service.s_at(k - 1) == service.alpha_at(k) + 1

    def test_constant_rule_violates(self):
        """Bounded alpha cannot keep up with linearly growing s."""
        report = ScalingService(ScalingRule.constant_rule(5)).check_assumption(0.5, 60)
        assert report.first_violation_k is not None
        assert not report.holds

    def test_geometric_four(self):
        """alpha_k = 4^k: max feasible d = 64/22 at k = 3."""
        report = ScalingService(ScalingRule.geometric(4.0)).check_assumption(1.0, 50)
        assert report.max_feasible_d == pytest.approx(64 / 22)
        assert report.argmin_k == 3
        assert report.holds

    def test_canonical_measured_constant(self):
        """Canonical scan: max feasible d = 2/15 at k = 6."""
        service = ScalingService(ScalingRule.canonical())
        report = service.check_assumption(0.1, 60)
        assert report.max_feasible_d == pytest.approx(2 / 15)
        assert report.argmin_k == 6
        assert report.first_violation_k is None

    def test_canonical_quarter_is_violated(self):
        """d = 0.25 first fails at k = 4 once the rule is made monotone."""
        report = ScalingService(ScalingRule.canonical()).check_assumption(0.25, 60)
        assert report.first_violation_k == 4

    @pytest.mark.parametrize("values", [(1, 1, 2, 3, 5), (2, 3, 4), (1, 2, 4, 8, 16, 32), (3, 3, 3, 7, 20)])
    def test_passes_iff_below_max_feasible(self, values):
        """The scan passes exactly when d <= max_feasible_d."""
        rule = ScalingRule.explicit(*values)
        service = ScalingService(rule)
        best = min(Fraction(rule.alpha(k), rule.partial_sum(k - 1)) for k in range(2, len(values) + 1))
        assert service.check_assumption(float(best) * (1 - 1e-9), len(values)).holds
        assert not service.check_assumption(float(best) * 1.001, len(values)).holds

    def test_invalid_scan(self):
        """k_max must be at least 2 and d positive."""
        service = ScalingService(ScalingRule.canonical())
        with pytest.raises(ValidationException):
            service.check_assumption(0.1, 1)
        with pytest.raises(ValidationException):
            service.check_assumption(0.0, 10)
