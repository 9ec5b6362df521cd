import numpy as np
import pytest

from covert_sense import (
    AdversaryModel,
    ChannelParams,
    InvalidArgumentError,
    MomentSpec,
    VarianceConvention,
    adversary_noise_moments,
    chebyshev_detector,
    covert_budget,
    detection_error_lower_bound,
    qre_quadratic_bound,
    qre_thermal,
)
from conftest import ETA_GRID, NBAR_B_GRID, kl_geometric_series

CH = ChannelParams(0.5, 1.0)


class TestQre:
    def test_zero_signal(self):
        assert qre_thermal(0.0, CH) == 0.0
        assert qre_quadratic_bound(0.0, CH) == 0.0

    def test_matches_kl_series(self):
        d = qre_thermal(0.01, CH)
        oracle = kl_geometric_series(0.5, 0.5 + 0.5 * 0.01)
        assert d == pytest.approx(oracle, abs=1e-10)

    def test_matches_kl_series_grid(self):
        for ns in (1e-4, 1e-2, 0.1, 1.0):
            for eta in (0.1, 0.5, 0.9):
                for nb in (0.1, 1.0, 10.0):
                    ch = ChannelParams(eta, nb)
                    mu0 = eta * nb
                    mu1 = (1.0 - eta) * ns + mu0
                    assert qre_thermal(ns, ch) == pytest.approx(
                        kl_geometric_series(mu0, mu1), abs=1e-10
                    )

    def test_quadratic_bound_value(self):
        assert qre_quadratic_bound(0.1, CH) == pytest.approx(1.0 / 600.0, rel=1e-12)

    def test_quadratic_bound_dominates(self):
        for ns in (1e-4, 1e-2, 0.1, 1.0):
            for eta in ETA_GRID:
                for nb in NBAR_B_GRID:
                    ch = ChannelParams(eta, nb)
                    assert qre_thermal(ns, ch) <= qre_quadratic_bound(ns, ch) + 1e-15

    def test_quadratic_bound_is_tight_at_small_signal(self):
        ratio = qre_quadratic_bound(1e-4, CH) / qre_thermal(1e-4, CH)
        assert ratio == pytest.approx(1.0, abs=1e-2)

    def test_negative_signal_rejected(self):
        with pytest.raises(InvalidArgumentError):
            qre_thermal(-1.0, CH)


class TestDetectionErrorBound:
    def test_zero_signal_is_half(self):
        assert detection_error_lower_bound(0.0, 100, CH) == 0.5

    def test_budget_round_trip(self):
        budget = covert_budget(0.05, 10 ** 4, CH)
        pe = detection_error_lower_bound(budget.nbar_s, budget.n, CH)
        assert pe == pytest.approx(0.45, abs=1e-12)

    def test_reference_value(self):
        pe = detection_error_lower_bound(1e-3, 10 ** 4, CH)
        assert pe == pytest.approx(0.48556624327025936, abs=1e-12)

    def test_monotone_in_signal_and_modes(self):
        values_ns = [detection_error_lower_bound(ns, 100, CH)
                     for ns in (0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0)]
        assert all(a >= b for a, b in zip(values_ns, values_ns[1:]))
        values_n = [detection_error_lower_bound(1e-2, n, CH)
                    for n in (1, 10, 100, 10 ** 4, 10 ** 6)]
        assert all(a >= b for a, b in zip(values_n, values_n[1:]))

    def test_clamped_at_zero(self):
        assert detection_error_lower_bound(100.0, 10 ** 6, CH) == 0.0

    def test_pinsker_chain(self):
        # The closed-form floor comes from relaxing the relative entropy to
        # its quadratic bound, so it can never exceed the direct Pinsker
        # floor 1/2 - sqrt(n D / 8) built on the exact relative entropy.
        for ns in (1e-4, 1e-2, 0.1, 1.0):
            for eta in (0.1, 0.5, 0.9):
                for nb in (0.1, 1.0, 10.0):
                    for n in (1, 100, 10 ** 4):
                        ch = ChannelParams(eta, nb)
                        direct = 0.5 - np.sqrt(n * qre_thermal(ns, ch) / 8.0)
                        relaxed = detection_error_lower_bound(ns, n, ch)
                        if relaxed > 0.0:
                            assert relaxed <= direct + 1e-12


class TestBudget:
    def test_reference_value(self):
        budget = covert_budget(0.05, 10 ** 6, CH)
        assert budget.nbar_s == pytest.approx(0.2 * np.sqrt(0.75) / 500.0, rel=1e-14)
        assert budget.nbar_s == pytest.approx(3.4641016151377546e-4, rel=1e-12)

    def test_quadrupling_n_halves_budget(self):
        b1 = covert_budget(0.1, 10 ** 4, CH)
        b2 = covert_budget(0.1, 4 * 10 ** 4, CH)
        assert b2.nbar_s == pytest.approx(b1.nbar_s / 2.0, rel=1e-14)

    def test_round_trip_identity_on_epsilon(self):
        for eps in (0.01, 0.05, 0.2, 0.49):
            for n in (1, 10 ** 3, 10 ** 6):
                budget = covert_budget(eps, n, CH)
                pe = detection_error_lower_bound(budget.nbar_s, n, CH)
                assert pe == pytest.approx(0.5 - eps, abs=1e-12)

    @pytest.mark.parametrize("eps", [0.0, 0.5, 0.6, -0.1])
    def test_epsilon_range(self, eps):
        with pytest.raises(InvalidArgumentError):
            covert_budget(eps, 100, CH)

    def test_n_range(self):
        with pytest.raises(InvalidArgumentError):
            covert_budget(0.1, 0, CH)


class TestAdversaryMoments:
    def test_vanishing_noise_limit(self):
        ch = ChannelParams(0.5, 1e-15)
        adv = AdversaryModel(dark_rate=0.0)
        mean, var = adversary_noise_moments(100, adv, ch)
        assert mean == pytest.approx(0.0, abs=1e-12)
        assert var == pytest.approx(0.0, abs=1e-12)

    def test_printed_convention(self):
        adv = AdversaryModel(dark_rate=0.1)
        mean, var = adversary_noise_moments(100, adv, CH)
        assert mean == pytest.approx(60.0, rel=1e-14)
        assert var == pytest.approx(60.0, rel=1e-14)

    def test_bose_einstein_convention(self):
        adv = AdversaryModel(dark_rate=0.1,
                             variance_convention=VarianceConvention.BOSE_EINSTEIN)
        mean, var = adversary_noise_moments(100, adv, CH)
        assert mean == pytest.approx(60.0, rel=1e-14)
        assert var == pytest.approx(85.0, rel=1e-14)

    def test_model_validation(self):
        with pytest.raises(InvalidArgumentError):
            AdversaryModel(gamma=1.5)
        with pytest.raises(InvalidArgumentError):
            AdversaryModel(dark_rate=-0.1)
        with pytest.raises(InvalidArgumentError):
            AdversaryModel(gamma=0.8).resolve_gamma(CH)  # gamma > 1 - eta
        assert AdversaryModel().resolve_gamma(CH) == pytest.approx(0.5)


class TestChebyshevDetector:
    ADV = AdversaryModel(dark_rate=0.01)

    def test_threshold_pins_false_alarm_bound(self):
        spec = MomentSpec(100.0, 110.0, 10 ** 4)
        bounds = chebyshev_detector(10 ** 4, spec, self.ADV, CH, 0.1)
        assert bounds.p_fa_bound == pytest.approx(0.1, rel=1e-12)
        mean, var = adversary_noise_moments(10 ** 4, self.ADV, CH)
        assert bounds.threshold_s == pytest.approx(mean + np.sqrt(var / 0.1))
        assert bounds.threshold_s >= mean

    def test_zero_signal_gives_vacuous_md_bound(self):
        spec = MomentSpec(0.0, 0.0, 10 ** 4)
        bounds = chebyshev_detector(10 ** 4, spec, self.ADV, CH, 0.1)
        assert bounds.p_md_bound == 1.0

    def test_md_bound_vanishes_on_super_sqrt_ladder(self):
        # <N_S> = n^(3/4) grows faster than sqrt(n): detection becomes easy
        values = []
        for n in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
            ns_tot = n ** 0.75
            nbar_s = ns_tot / n
            spec = MomentSpec(ns_tot, ns_tot * (1.0 + nbar_s), n)
            values.append(
                chebyshev_detector(n, spec, self.ADV, CH, 0.1).p_md_bound
            )
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 0.01

    def test_md_bound_stays_vacuous_at_covert_budget(self):
        for n in (10 ** 3, 10 ** 4, 10 ** 5):
            nbar_s = covert_budget(0.05, n, CH).nbar_s
            spec = MomentSpec(n * nbar_s, n * nbar_s * (1.0 + nbar_s), n)
            bounds = chebyshev_detector(n, spec, self.ADV, CH, 0.1)
            assert bounds.p_md_bound >= 0.5

    def test_gamma_generalisation_flagged(self):
        spec = MomentSpec(100.0, 110.0, 10 ** 3)
        printed = chebyshev_detector(10 ** 3, spec, self.ADV, CH, 0.1)
        assert printed.uses_printed_capture
        partial = chebyshev_detector(
            10 ** 3, spec, AdversaryModel(gamma=0.2, dark_rate=0.01), CH, 0.1
        )
        assert not partial.uses_printed_capture
        # capturing less light can only worsen the adversary's bound
        assert partial.p_md_bound >= printed.p_md_bound

    def test_p_e_lower_matches_closed_form(self):
        spec = MomentSpec(10.0, 11.0, 10 ** 3)
        bounds = chebyshev_detector(10 ** 3, spec, self.ADV, CH, 0.1)
        assert bounds.p_e_lower == pytest.approx(
            detection_error_lower_bound(10.0 / 10 ** 3, 10 ** 3, CH)
        )

    def test_validation(self):
        spec = MomentSpec(10.0, 11.0, 100)
        with pytest.raises(InvalidArgumentError):
            chebyshev_detector(100, spec, self.ADV, CH, 0.0)
        with pytest.raises(InvalidArgumentError):
            chebyshev_detector(100, spec, self.ADV, CH, 1.0)
        with pytest.raises(InvalidArgumentError):
            chebyshev_detector(99, spec, self.ADV, CH, 0.1)
