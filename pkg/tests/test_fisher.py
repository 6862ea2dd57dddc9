import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gphase.fisher import (
    IllConditionedError,
    NoRealSolutionError,
    OptimalType,
    UndefinedTypeError,
    classify_optimal_type,
    closed_form_fi,
    critical_thermal_photon_number,
    gaussian_fi,
    is_nonclassical_sts,
    numeric_fi_oracle,
    optimal_measurement_spec,
    optimize_gaussian_fi,
    qfi,
    qfi_turnaround_alpha,
    reduced_displacement,
    sql_threshold,
    type_boundaries,
)
from gphase.measurement import MeasurementKind, MeasurementSpec
from gphase.states import StateParams, params_to_moments, mean_photon_number


def canonical(alpha_mag, r, n_th, theta_s=0.6):
    return StateParams(alpha_mag, 0.5 * (math.pi + theta_s), r, theta_s, n_th)


class TestGaussianFi:
    def test_coherent_optimal_homodyne_reaches_four(self):
        p = StateParams(1.0, 0.0, 0.0, 0.0, 0.0)
        spec = optimal_measurement_spec(p, 0.0, OptimalType.TYPE_I)
        assert gaussian_fi(p, 0.0, spec) == pytest.approx(4.0, rel=1e-12)

    def test_vacuum_gives_zero(self):
        p = StateParams(0.0)
        for spec in (
            MeasurementSpec.homodyne(0.3),
            MeasurementSpec.heterodyne(),
            MeasurementSpec.general_dyne(0.7, 1.1),
        ):
            assert gaussian_fi(p, 0.2, spec) == pytest.approx(0.0, abs=1e-14)

    def test_coherent_heterodyne(self):
        # Heterodyne doubles the outcome noise: F = 2|alpha|^2.
        p = StateParams(1.0, 0.0, 0.0, 0.0, 0.0)
        assert gaussian_fi(p, 0.0, MeasurementSpec.heterodyne()) == pytest.approx(
            2.0, rel=1e-12
        )

    def test_sts_general_dyne_reduction(self):
        r, n = 0.8, 0.4
        p = canonical(0.0, r, n)
        spec = optimal_measurement_spec(p, 0.3, OptimalType.TYPE_III)
        target = ((2.0 * n + 1.0) / (n + 1.0)) ** 2 * math.sinh(2.0 * r) ** 2
        assert gaussian_fi(p, 0.3, spec) == pytest.approx(target, rel=1e-10)
        assert spec.s == pytest.approx(r, abs=1e-12)

    def test_ill_conditioned_covariance(self):
        p = StateParams(0.5, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(IllConditionedError):
            gaussian_fi(p, 0.0, MeasurementSpec.general_dyne(20.0, 0.0))

    @given(
        st.floats(0.1, 1.2),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.5),
        st.floats(0.0, 6.28),
        st.floats(0.0, 3.1),
        st.floats(-3.0, 3.0),
        st.floats(-3.0, 3.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_corotated_spec_is_phase_covariant(self, a, r, n, ts, angle, phi1, phi2):
        p = StateParams(a, 0.9, r, ts, n)
        f1 = gaussian_fi(p, phi1, MeasurementSpec.homodyne(angle - phi1))
        f2 = gaussian_fi(p, phi2, MeasurementSpec.homodyne(angle - phi2))
        assert f1 == pytest.approx(f2, rel=1e-9, abs=1e-9)

    @given(
        st.floats(0.1, 1.2),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.5),
        st.floats(0.0, 6.28),
        st.floats(0.0, 6.28),
        st.floats(0.0, 1.5),
        st.floats(0.0, 6.28),
    )
    @settings(max_examples=40, deadline=None)
    def test_never_exceeds_qfi(self, a, r, n, tc, ts, s, psi):
        p = StateParams(a, tc, r, ts, n)
        fi = gaussian_fi(p, 0.3, MeasurementSpec.general_dyne(s, psi))
        assert fi <= qfi(p) * (1.0 + 1e-9)


class TestNumericOracle:
    def test_coherent_homodyne(self):
        p = StateParams(1.0, 0.0, 0.0, 0.0, 0.0)
        spec = MeasurementSpec.homodyne(-0.5 * math.pi)
        assert numeric_fi_oracle(p, 0.0, spec) == pytest.approx(
            gaussian_fi(p, 0.0, spec), rel=1e-6
        )

    def test_vacuum_is_zero(self):
        p = StateParams(0.0)
        assert abs(numeric_fi_oracle(p, 0.1, MeasurementSpec.heterodyne())) < 1e-10

    def test_dsts_heterodyne(self):
        p = StateParams(0.5, 0.4, 0.6, 1.0, 0.3)
        spec = MeasurementSpec.heterodyne()
        assert numeric_fi_oracle(p, 0.2, spec) == pytest.approx(
            gaussian_fi(p, 0.2, spec), rel=1e-5
        )


class TestQfi:
    def test_coherent(self):
        assert qfi(StateParams(1.0)) == pytest.approx(4.0, rel=1e-14)

    def test_squeezed_vacuum(self):
        assert qfi(StateParams(0.0, 0.0, 1.0, 0.0, 0.0)) == pytest.approx(
            2.0 * math.sinh(2.0) ** 2, rel=1e-12
        )

    def test_displaced_thermal(self):
        assert qfi(StateParams(1.0, 0.0, 0.0, 0.0, 1.0)) == pytest.approx(
            4.0 / 3.0, rel=1e-12
        )

    def test_canonical_phases_maximize_displacement_term(self):
        r, n = 0.7, 0.4
        best = qfi(canonical(1.0, r, n))
        for tc in np.linspace(0.0, 2.0 * math.pi, 37):
            assert qfi(StateParams(1.0, tc, r, 0.6, n)) <= best * (1.0 + 1e-12)


class TestClosedForm:
    def test_type2_requires_squeezing(self):
        with pytest.raises(UndefinedTypeError):
            closed_form_fi(StateParams(1.0, 0.0, 0.0, 0.0, 0.5), OptimalType.TYPE_II)

    def test_type3_existence_region(self):
        # Reduced displacement beyond the type-III boundary: no real seed.
        n, r = 0.2, 0.3
        a = 2.0 * type_boundaries(n)["III"] * math.exp(-r) * math.sinh(2.0 * r)
        with pytest.raises(NoRealSolutionError):
            closed_form_fi(canonical(a, r, n), OptimalType.TYPE_III)

    def test_sts_type3_value(self):
        n = 0.4
        p = canonical(0.0, 0.8, n)
        expected = ((2.0 * n + 1.0) / (n + 1.0)) ** 2 * math.sinh(1.6) ** 2
        assert closed_form_fi(p, OptimalType.TYPE_III) == pytest.approx(
            expected, rel=1e-12
        )

    def test_type2_equals_type3_at_critical_n(self):
        n = 1.0 / math.sqrt(2.0)
        p = canonical(0.0, 0.6, n)
        assert closed_form_fi(p, OptimalType.TYPE_II) == pytest.approx(
            closed_form_fi(p, OptimalType.TYPE_III), rel=1e-12
        )


class TestOptimalSpec:
    def test_sts_type3_seed_squeezing(self):
        p = canonical(0.0, 0.7, 0.5)
        spec = optimal_measurement_spec(p, 0.0, OptimalType.TYPE_III)
        assert spec.kind is MeasurementKind.GENERAL_DYNE
        assert spec.s == pytest.approx(0.7, abs=1e-12)

    def test_svs_type2_angle(self):
        r = 0.6
        p = StateParams(0.0, 0.0, r, 0.0, 0.0)
        spec = optimal_measurement_spec(p, 0.0, OptimalType.TYPE_II)
        chi = math.acos(math.tanh(2.0 * r))
        assert spec.kind is MeasurementKind.HOMODYNE
        assert math.cos(2.0 * spec.homodyne_angle) == pytest.approx(
            math.cos(-chi), abs=1e-12
        )

    def test_dts_type1_orthogonal_homodyne(self):
        p = StateParams(1.0, 0.4, 0.0, 0.0, 0.5)
        spec = optimal_measurement_spec(p, 0.1, OptimalType.TYPE_I)
        assert spec.kind is MeasurementKind.HOMODYNE
        expected = 0.4 - 0.1 - 0.5 * math.pi
        # Quadrature directions are defined modulo pi.
        assert abs(math.cos(spec.homodyne_angle - expected)) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_non_canonical_rejected(self):
        p = StateParams(1.0, 0.3, 0.5, 0.9, 0.2)
        with pytest.raises(ValueError):
            optimal_measurement_spec(p, 0.0, OptimalType.TYPE_I)

    @pytest.mark.parametrize("t", [OptimalType.TYPE_I, OptimalType.TYPE_II,
                                   OptimalType.TYPE_III])
    def test_spec_achieves_closed_form(self, t):
        p = canonical(0.4, 0.6, 0.5)
        spec = optimal_measurement_spec(p, 0.3, t)
        assert gaussian_fi(p, 0.3, spec) == pytest.approx(
            closed_form_fi(p, t), rel=1e-9
        )


class TestClassifier:
    def test_dsvs_boundary_tie(self):
        r = 0.5
        a = math.sqrt(2.0) * math.exp(-r) * math.sinh(2.0 * r)
        ties = classify_optimal_type(canonical(a, r, 0.0))
        assert set(ties) == {OptimalType.TYPE_I, OptimalType.TYPE_II}

    def test_sts_tie_at_critical_n(self):
        ties = classify_optimal_type(canonical(0.0, 0.6, 1.0 / math.sqrt(2.0)))
        assert set(ties) == {OptimalType.TYPE_II, OptimalType.TYPE_III}

    def test_no_squeezing_is_type1(self):
        assert classify_optimal_type(StateParams(1.0, 0.0, 0.0, 0.0, 0.8)) == (
            OptimalType.TYPE_I,
        )

    def test_reduced_displacement(self):
        p = canonical(0.5, 0.4, 0.1)
        expected = 0.5 / (math.exp(-0.4) * math.sinh(0.8))
        assert reduced_displacement(p) == pytest.approx(expected, rel=1e-12)
        with pytest.raises(ValueError):
            reduced_displacement(StateParams(0.5))

    def test_boundaries_at_zero_thermal(self):
        b = type_boundaries(0.0)
        assert b["II"] == pytest.approx(math.sqrt(2.0), abs=1e-14)
        assert b["III"] == pytest.approx(1.0, abs=1e-14)
        assert math.isinf(b["II_III"])

    def test_critical_thermal_photon_number(self):
        n = critical_thermal_photon_number()
        assert (2.0 * n + 1.0) ** 2 == pytest.approx(2.0, abs=1e-14)


class TestOptimizer:
    def test_coherent_saturates(self):
        rep = optimize_gaussian_fi(StateParams(1.0), 0.0)
        assert rep.fi == pytest.approx(4.0, rel=1e-9)
        assert rep.ratio == pytest.approx(1.0, abs=1e-9)
        assert rep.type_used is OptimalType.TYPE_I

    def test_svs_saturates(self):
        rep = optimize_gaussian_fi(StateParams(0.0, 0.0, 0.8, 0.0, 0.0), 0.2)
        assert rep.fi == pytest.approx(2.0 * math.sinh(1.6) ** 2, rel=1e-9)

    def test_sts_prefers_type3_and_stays_below_qfi(self):
        rep = optimize_gaussian_fi(canonical(0.0, 0.5, 2.0), 0.0)
        assert rep.type_used is OptimalType.TYPE_III
        assert rep.fi == pytest.approx(
            closed_form_fi(canonical(0.0, 0.5, 2.0), OptimalType.TYPE_III), rel=1e-8
        )
        assert rep.fi < rep.qfi


class TestDiagnostics:
    def test_sql_threshold_zero_thermal(self):
        assert sql_threshold(0.0) == pytest.approx(0.0, abs=1e-14)

    def test_sql_threshold_is_boundary(self):
        n = 1.0
        sinh2_r = sql_threshold(n)
        r = math.asinh(math.sqrt(sinh2_r))
        p = StateParams(0.0, 0.0, r, 0.0, n)
        big_n = mean_photon_number(params_to_moments(p))
        assert qfi(p) - 4.0 * big_n == pytest.approx(0.0, abs=1e-9)

    def test_sql_threshold_monotone(self):
        grid = np.linspace(0.0, 5.0, 51)
        vals = [sql_threshold(float(n)) for n in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_nonclassicality(self):
        assert not is_nonclassical_sts(0.0, 0.0)
        assert is_nonclassical_sts(1.0, 0.0)
        assert not is_nonclassical_sts(0.1, 1.0)

    def test_sql_beating_implies_nonclassical(self):
        for n in np.linspace(0.0, 2.0, 20):
            for extra in np.linspace(0.01, 1.0, 20):
                r = math.asinh(math.sqrt(sql_threshold(float(n)) + extra))
                assert is_nonclassical_sts(r, float(n))

    def test_turnaround_at_zero_thermal(self):
        r = 0.6
        expected = math.sqrt(math.exp(-2.0 * r) * math.sinh(2.0 * r) ** 2 / 2.0)
        assert qfi_turnaround_alpha(r, 0.0) == pytest.approx(expected, rel=1e-12)

    def test_turnaround_is_stationary_point(self):
        r, n = 0.6, 0.8
        a = qfi_turnaround_alpha(r, n)
        h = 1e-4

        def h_of_n(nn):
            return qfi(canonical(a, r, nn, theta_s=0.0))

        deriv = (h_of_n(n + h) - h_of_n(n - h)) / (2.0 * h)
        assert abs(deriv) < 1e-6 * h_of_n(n)

    def test_turnaround_requires_squeezing(self):
        with pytest.raises(ValueError):
            qfi_turnaround_alpha(0.0, 0.5)
