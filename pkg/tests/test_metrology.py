import numpy as np
import pytest

from covert_sense import (
    ChannelParams,
    DomainError,
    InvalidArgumentError,
    MomentSpec,
    NumericalFailureError,
    OpOrder,
    ProbeFamily,
    ProbeKind,
    QfiReport,
    StepUnderflowError,
    build_qfi_report,
    constant_coherent_exact,
    constant_tmsv_exact,
    constant_ultimate_exact,
    covert_constants,
    mean_photon_number,
    probe_moment_spec,
    qcrlb_mse,
    qfi_coherent,
    qfi_numeric,
    qfi_tmsv,
    qfi_tmsv_xi,
    qfi_upper_bound,
    qfi_upper_bound_limit,
)
from conftest import ETA_GRID, NBAR_B_GRID, NBAR_S_GRID

CH = ChannelParams(0.5, 1.0)


class TestClosedForms:
    def test_coherent_zero_photons(self):
        assert qfi_coherent(0.0, CH) == 0.0

    def test_coherent_value(self):
        assert qfi_coherent(1.0, CH) == pytest.approx(1.0, rel=1e-15)

    def test_tmsv_zero_photons(self):
        assert qfi_tmsv(0.0, CH) == 0.0

    def test_tmsv_value(self):
        assert qfi_tmsv(1.0, CH) == pytest.approx(4.0 / 3.0, rel=1e-15)

    def test_tmsv_lossless_quadratic_scaling(self):
        ch = ChannelParams(1.0 - 1e-12, 1.0)
        assert qfi_tmsv(1.0, ch) == pytest.approx(8.0, rel=1e-9)

    def test_tmsv_xi_form_agrees(self):
        for eta in ETA_GRID:
            for nb in NBAR_B_GRID:
                ch = ChannelParams(eta, nb)
                for ns in NBAR_S_GRID:
                    xi = np.arcsinh(np.sqrt(ns))
                    assert qfi_tmsv_xi(xi, ch) == pytest.approx(
                        qfi_tmsv(ns, ch), rel=1e-12
                    )

    def test_tmsv_dominates_coherent(self):
        for eta in ETA_GRID:
            for nb in NBAR_B_GRID:
                ch = ChannelParams(eta, nb)
                for ns in NBAR_S_GRID:
                    assert qfi_tmsv(ns, ch) >= qfi_coherent(ns, ch)

    def test_negative_photons_rejected(self):
        with pytest.raises(InvalidArgumentError):
            qfi_coherent(-1.0, CH)
        with pytest.raises(InvalidArgumentError):
            qfi_tmsv(-1.0, CH)


class TestProbeFamily:
    def test_initial_photon_number(self):
        for kind in ProbeKind:
            fam = ProbeFamily(kind, 1.7, CH)
            assert mean_photon_number(fam.initial_state(), 0) == pytest.approx(1.7)

    def test_builder_outputs_are_physical(self):
        for kind in ProbeKind:
            fam = ProbeFamily(kind, 2.0, CH)
            for theta in (-1.0, 0.0, 0.9, 3.0):
                fam(theta)  # constructor validates physicality

    def test_reference_mode_untouched(self):
        fam = ProbeFamily(ProbeKind.TMSV, 1.0, CH)
        out = fam(0.4)
        assert mean_photon_number(out, 1) == pytest.approx(1.0)


class TestQfiNumeric:
    def test_coherent_lossless_limit(self):
        ch = ChannelParams(1.0 - 1e-9, 1.0)
        fam = ProbeFamily(ProbeKind.COHERENT, 1.0, ch)
        assert qfi_numeric(fam, 0.0) == pytest.approx(4.0, abs=1e-4)

    def test_coherent_reference_point(self):
        fam = ProbeFamily(ProbeKind.COHERENT, 1.0, CH)
        assert qfi_numeric(fam, 0.1) == pytest.approx(1.0, rel=1e-6)

    def test_tmsv_reference_point(self):
        fam = ProbeFamily(ProbeKind.TMSV, 1.0, CH)
        assert qfi_numeric(fam, 0.1) == pytest.approx(4.0 / 3.0, rel=1e-6)

    def test_explicit_step(self):
        fam = ProbeFamily(ProbeKind.COHERENT, 1.0, CH)
        assert qfi_numeric(fam, 0.0, step=5e-3) == pytest.approx(1.0, rel=1e-6)

    def test_step_underflow(self):
        fam = ProbeFamily(ProbeKind.COHERENT, 1.0, CH)
        with pytest.raises(StepUnderflowError):
            qfi_numeric(fam, 0.0, step=1e-9)

    def test_invalid_step(self):
        fam = ProbeFamily(ProbeKind.COHERENT, 1.0, CH)
        with pytest.raises(InvalidArgumentError):
            qfi_numeric(fam, 0.0, step=-1.0)

    def test_order_swap_invariance(self):
        for kind in ProbeKind:
            closed = (qfi_coherent if kind is ProbeKind.COHERENT else qfi_tmsv)(1.0, CH)
            for order in OpOrder:
                fam = ProbeFamily(kind, 1.0, CH, order=order)
                assert qfi_numeric(fam, 0.2) == pytest.approx(closed, rel=1e-6)


class TestUpperBound:
    def test_zero_variance(self):
        assert qfi_upper_bound(MomentSpec(10.0, 0.0, 5), CH) == 0.0

    def test_zero_photons(self):
        assert qfi_upper_bound(MomentSpec(0.0, 3.0, 5), CH) == 0.0

    def test_monotone_in_variance(self):
        lo = qfi_upper_bound(MomentSpec(10.0, 10.0, 100), CH)
        hi = qfi_upper_bound(MomentSpec(10.0, 100.0, 100), CH)
        assert lo <= hi

    def test_large_variance_matches_limit(self):
        spec = MomentSpec(10.0, 1e9, 100)
        limit = qfi_upper_bound_limit(10.0, 100, CH)
        assert qfi_upper_bound(spec, CH) == pytest.approx(limit, rel=1e-4)

    def test_limit_examples(self):
        assert qfi_upper_bound_limit(0.0, 10, CH) == 0.0
        with pytest.raises(DomainError):
            qfi_upper_bound_limit(1.0, 10, ChannelParams(1.0 - 1e-12, 1.0))

    def test_limit_is_variance_limit_on_grid(self):
        for eta in (0.2, 0.5, 0.8):
            for nb in (0.3, 2.0):
                ch = ChannelParams(eta, nb)
                for n, ns_tot in [(10, 3.0), (1000, 40.0)]:
                    v = qfi_upper_bound(MomentSpec(ns_tot, 1e10, n), ch)
                    assert v == pytest.approx(
                        qfi_upper_bound_limit(ns_tot, n, ch), rel=1e-4
                    )

    def test_coherent_probe_respects_bound(self):
        # n i.i.d. coherent probes carry Poisson photon statistics
        for n in (1, 10, 100):
            for ns in NBAR_S_GRID:
                spec = probe_moment_spec(ProbeKind.COHERENT, ns, n)
                assert n * qfi_coherent(ns, CH) <= qfi_upper_bound(spec, CH) + 1e-9

    def test_tmsv_probe_respects_bound(self):
        for n in (1, 10):
            for ns in NBAR_S_GRID:
                spec = probe_moment_spec(ProbeKind.TMSV, ns, n)
                assert n * qfi_tmsv(ns, CH) <= qfi_upper_bound(spec, CH) + 1e-9


class TestQcrlb:
    def test_values(self):
        assert qcrlb_mse(1.0, 1) == 1.0
        assert qcrlb_mse(4.0, 100) == pytest.approx(0.0025, rel=1e-15)
        assert qcrlb_mse(qfi_coherent(1.0, CH), 10) == pytest.approx(0.1, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            qcrlb_mse(0.0, 10)
        with pytest.raises(InvalidArgumentError):
            qcrlb_mse(1.0, 0)


class TestConstants:
    def test_reference_value(self):
        c = covert_constants(CH)
        assert c.c_het == pytest.approx(0.75 / (4.0 * np.sqrt(0.75)), rel=1e-14)
        assert c.c_het == pytest.approx(0.21650635094610965, rel=1e-12)

    def test_het_to_coh_ratio(self):
        for eta in ETA_GRID:
            for nb in NBAR_B_GRID:
                c = covert_constants(ChannelParams(eta, nb))
                expected = (
                    2.0 * (1.0 + nb * (1.0 - eta)) / (1.0 + 2.0 * nb * (1.0 - eta))
                )
                ratio = c.c_het / c.c_coh
                assert ratio == pytest.approx(expected, rel=1e-12)
                assert 1.0 < ratio <= 2.0

    def test_het_to_lb_ratio(self):
        for eta in ETA_GRID:
            for nb in NBAR_B_GRID:
                c = covert_constants(ChannelParams(eta, nb))
                assert c.c_het / c.c_lb <= 2.0 / (1.0 - eta) + 1e-12

    def test_ordering(self):
        for eta in ETA_GRID:
            for nb in NBAR_B_GRID:
                c = covert_constants(ChannelParams(eta, nb))
                assert c.c_lb <= c.c_sq <= c.c_coh <= c.c_het

    def test_coherent_substitution_is_exact(self):
        # plugging the covert budget into the coherent QFI reproduces c_coh
        # identically, at any n
        for n in (10, 10 ** 4):
            for eps in (0.01, 0.3):
                assert constant_coherent_exact(eps, n, CH) == pytest.approx(
                    covert_constants(CH).c_coh, rel=1e-12
                )

    def test_leading_order_constants_are_asymptotic(self):
        # c_sq and c_lb drop lower-order terms; the exact substitutions
        # approach them from above as n grows
        c = covert_constants(CH)
        n = 10 ** 8
        assert constant_tmsv_exact(0.05, n, CH) == pytest.approx(c.c_sq, rel=5e-2)
        assert constant_ultimate_exact(0.05, n, CH) == pytest.approx(c.c_lb, rel=5e-2)
        gap_small_n = constant_tmsv_exact(0.05, 100, CH) / c.c_sq
        gap_large_n = constant_tmsv_exact(0.05, n, CH) / c.c_sq
        assert gap_large_n < gap_small_n


class TestReport:
    def test_build_and_mse_bound(self):
        report = build_qfi_report(ProbeKind.COHERENT, 1.0, CH)
        assert report.j_closed == pytest.approx(1.0)
        assert report.j_numeric == pytest.approx(1.0, rel=1e-6)
        assert report.c_q_bound >= report.j_closed - 1e-9
        assert report.mse_lower_bound(10) == pytest.approx(0.1, rel=1e-12)

    def test_mismatch_rejected(self):
        with pytest.raises(NumericalFailureError):
            QfiReport(j_numeric=1.0, j_closed=1.1)

    def test_moment_spec_validation(self):
        with pytest.raises(InvalidArgumentError):
            MomentSpec(-1.0, 0.0, 1)
        with pytest.raises(InvalidArgumentError):
            MomentSpec(1.0, -1.0, 1)
        with pytest.raises(InvalidArgumentError):
            MomentSpec(1.0, 1.0, 0)
