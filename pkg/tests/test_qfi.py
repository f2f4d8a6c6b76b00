import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optograv.dynamics import (ConstantCoupling, DriveSpec, FreqModSpec, ModulatedCoupling,
                               NO_MODULATION)
from optograv.params import PreconditionError
from optograv.qfi import (CoherentState, GeneratorCoefficients, PhotonStats,
                          SqueezedCoherentState, generator_coefficients, optimal_squeeze_phase,
                          photon_stats, qfi_benchmark, qfi_doubly_resonant,
                          qfi_doubly_resonant_optimal, qfi_doubly_resonant_periodic,
                          qfi_fractional_at_sep, qfi_fractional_optimal, qfi_global,
                          qfi_local_cavity, qfi_parametric, qfi_parametric_dominant,
                          qfi_phase_map, qfi_resonant_closed, qfi_resonant_periodic,
                          qfi_same_frequency)
from optograv.separability import FractionalFrequency

from oracles import fock_squeezed_coherent_stats

UNIT = PhotonStats(1.0, 1.0)
PI2 = math.pi**2


def pipeline(drive, coupling, tau, ps=UNIT, r_T=math.inf, fm=NO_MODULATION):
    return qfi_global(generator_coefficients(drive, coupling, fm, tau), ps, r_T)


class TestPhotonStats:
    def test_coherent(self):
        ps = photon_stats(CoherentState(3.0))
        assert (ps.mean_n, ps.var_n) == (9.0, 9.0)

    def test_unsqueezed_reduces_to_coherent(self):
        ps = photon_stats(SqueezedCoherentState(2 - 1j, 0.0, 1.3))
        assert ps.mean_n == pytest.approx(5.0) and ps.var_n == pytest.approx(5.0)

    def test_table_state(self):
        ps = photon_stats(SqueezedCoherentState(250.0, 1.73, optimal_squeeze_phase(250.0)))
        ref = 250**2 * math.exp(4 * 1.73) + math.sinh(2 * 1.73) ** 2 / 2
        assert ps.var_n == pytest.approx(ref, rel=1e-12)
        assert ps.var_n == pytest.approx(6.33e7, rel=1e-3)

    @pytest.mark.parametrize("mu, r, phi", [(1.5, 0.4, 0.7), (1 + 1j, 0.3, 2.0), (2.0, 0.5, math.pi),
                                            (0.0, 0.6, 0.0), (-1.2j, 0.2, -1.0)])
    def test_fock_oracle(self, mu, r, phi):
        mean, var, tail = fock_squeezed_coherent_stats(mu, r, phi)
        assert tail < 1e-20
        ps = photon_stats(SqueezedCoherentState(mu, r, phi))
        assert ps.mean_n == pytest.approx(mean, rel=1e-10, abs=1e-12)
        assert ps.var_n == pytest.approx(var, rel=1e-10, abs=1e-12)

    @given(st.floats(0.1, 10), st.floats(-math.pi, math.pi), st.floats(0.05, 2))
    def test_optimal_phase_maximizes_variance(self, amp, arg, r):
        mu = amp * np.exp(1j * arg)
        grid = np.linspace(0, 2 * math.pi, 721)
        var = [photon_stats(SqueezedCoherentState(mu, r, p)).var_n for p in grid]
        best = photon_stats(SqueezedCoherentState(mu, r, optimal_squeeze_phase(mu))).var_n
        assert best >= max(var) * (1 - 1e-12)


class TestGenerator:
    def test_resonant_value(self):
        for n in (1, 3):
            gc = generator_coefficients(DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi), ConstantCoupling(0.7),
                                        NO_MODULATION, 2 * math.pi * n)
            assert gc.b == pytest.approx(2 * math.pi * n * 0.7, rel=1e-9)

    def test_zero_coupling(self):
        gc = generator_coefficients(DriveSpec(1.0, 0.3, 1.0, 1.0, 0.4), ConstantCoupling(0.0),
                                    NO_MODULATION, 3.0)
        assert gc.b == 0.0
        assert gc.c_plus != 0.0

    def test_independent_of_d1(self):
        a = generator_coefficients(DriveSpec(3.0, 0.3), ConstantCoupling(0.5), NO_MODULATION, 4.0)
        b = generator_coefficients(DriveSpec(1.0, 0.3), ConstantCoupling(0.5), NO_MODULATION, 4.0)
        assert a == b


class TestGlobal:
    def test_zero(self):
        assert qfi_global(GeneratorCoefficients(0.0, 0.0, 0.0), UNIT, 0.0) == 0.0

    def test_unit_generator(self):
        assert qfi_global(GeneratorCoefficients(1.0, 5.0, 5.0), UNIT, math.inf) == 4.0

    def test_resonant_ground_state(self):
        # cavity part 16 pi^2 plus mechanical part 4 pi^2 at r_T = 0
        val = pipeline(DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi), ConstantCoupling(1.0), 2 * math.pi,
                       r_T=0.0)
        assert val == pytest.approx(20 * PI2, rel=1e-9)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 5), st.floats(0, 5))
    def test_thermal_monotone(self, b, cp, cm, r1, r2):
        gc = GeneratorCoefficients(b, cp, cm)
        lo, hi = sorted((r1, r2))
        assert qfi_global(gc, UNIT, hi) <= qfi_global(gc, UNIT, lo) + 1e-12
        assert qfi_global(gc, UNIT, math.inf) == 4 * b * b
        assert qfi_global(gc, UNIT, 0.0) == pytest.approx(4 * (b * b + cp * cp + cm * cm))


class TestLocal:
    def test_benchmark(self):
        val = qfi_local_cavity(DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi), ConstantCoupling(1.0),
                               NO_MODULATION, 2 * math.pi, UNIT)
        assert val == pytest.approx(16 * PI2, rel=1e-9)
        assert val == pytest.approx(qfi_benchmark(1, 1.0, 1.0, UNIT), rel=1e-9)

    def test_fractional_optimum(self):
        ff = FractionalFrequency(-1, 8)
        val = qfi_local_cavity(DriveSpec(1.0, 0.0, 1.0, ff.omega_frac, 0.3),
                               ModulatedCoupling(1.0, ff.omega_frac, 0.3), NO_MODULATION,
                               ff.tau_sep, UNIT)
        assert val == pytest.approx(PI2 * 8**6 / 196, rel=1e-9)
        assert val == pytest.approx(1.320e4, rel=1e-3)

    def test_zero_coupling(self):
        assert qfi_local_cavity(DriveSpec(), ConstantCoupling(0.0), NO_MODULATION, 2.0, UNIT) == 0.0

    def test_non_separable_time(self):
        with pytest.raises(PreconditionError, match="K"):
            qfi_local_cavity(DriveSpec(), ConstantCoupling(1.0), NO_MODULATION, math.pi, UNIT)

    def test_never_exceeds_global(self):
        args = (DriveSpec(1.0, 0.3, 0.6, 1.0, 0.4), ConstantCoupling(0.8))
        local = qfi_local_cavity(*args, NO_MODULATION, 4 * math.pi, UNIT)
        assert local <= pipeline(*args, 4 * math.pi, r_T=0.0) * (1 + 1e-12)


class TestResonant:
    def test_constant_drive_value(self):
        drive = DriveSpec(1.0, 1.0, 0.0, 1.0, 0.0)
        val = qfi_resonant_closed(1.0, drive, 2 * math.pi, UNIT, math.inf)
        assert val == pytest.approx(64 * PI2, rel=1e-12)

    def test_benchmark_factor_four(self):
        for n in (1, 2, 5):
            const = qfi_resonant_periodic(n, 0.3, DriveSpec(1.0, 1.0, 0.0), UNIT)
            osc = qfi_benchmark(n, 0.3, 1.0, UNIT)
            assert const == pytest.approx(4 * osc, rel=1e-14)

    def test_phase_maximum(self):
        grid = np.linspace(0, 2 * math.pi, 720, endpoint=False)
        vals = [qfi_resonant_closed(1.0, DriveSpec(1.0, 1.0, 0.5, 1.0, p), 4 * math.pi, UNIT, 0.3)
                for p in grid]
        assert grid[int(np.argmax(vals))] == pytest.approx(math.pi)

    def test_periodic_equals_closed(self):
        drive = DriveSpec(1.0, 0.4, 0.7, 1.0, 2.1)
        for n in (1, 4):
            assert qfi_resonant_periodic(n, 0.6, drive, UNIT, 0.2) == pytest.approx(
                qfi_resonant_closed(0.6, drive, 2 * math.pi * n, UNIT, 0.2), rel=1e-12)


class TestDoublyResonant:
    def test_optimal_value(self):
        drive = DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi / 2)
        val = qfi_doubly_resonant(1.0, 0.0, drive, 2 * math.pi, UNIT, math.inf)
        assert val == pytest.approx(4 * math.pi**4, rel=1e-12)
        assert qfi_doubly_resonant_optimal(1, 1.0, 1.0, UNIT) == pytest.approx(389.6, abs=0.1)

    def test_improvement_over_benchmark(self):
        for n in (1, 3, 10):
            ratio = qfi_doubly_resonant_optimal(n, 0.4, 1.0, UNIT) / qfi_benchmark(n, 0.4, 1.0, UNIT)
            assert ratio == pytest.approx(n**2 * PI2 / 4, rel=1e-14)

    def test_no_signal(self):
        drive = DriveSpec(1.0, 0.0, 0.0, 1.0, 0.3)
        assert qfi_doubly_resonant(1.0, 0.2, drive, 7.0, UNIT, math.inf) == 0.0

    def test_n4_scaling(self):
        drive = DriveSpec(1.0, 0.0, 1.0, 1.0, math.pi / 2)
        for n in (8, 16):
            ratio = (qfi_doubly_resonant(1.0, 0.0, drive, 4 * math.pi * n, UNIT)
                     / qfi_doubly_resonant(1.0, 0.0, drive, 2 * math.pi * n, UNIT))
            assert ratio == pytest.approx(16, rel=0.01)

    def test_periodic_equals_closed(self):
        drive = DriveSpec(1.0, 0.3, 0.8, 1.0, 1.1)
        for n in (1, 3):
            assert qfi_doubly_resonant_periodic(n, 0.7, 0.4, drive, UNIT, 0.5) == pytest.approx(
                qfi_doubly_resonant(0.7, 0.4, drive, 2 * math.pi * n, UNIT, 0.5), rel=1e-11)


class TestSameFrequency:
    def test_matches_fractional_form(self):
        ff = FractionalFrequency(-1, 8)
        drive = DriveSpec(1.0, 0.0, 1.0, 0.75, 0.6)
        a = qfi_same_frequency(1.0, 0.75, 0.2, drive, 8 * math.pi, UNIT, 0.4)
        b = qfi_fractional_at_sep(ff, 1, 1.0, 0.2, drive, UNIT, 0.4)
        assert a == pytest.approx(b, rel=1e-9)

    def test_zero_time(self):
        drive = DriveSpec(1.0, 0.5, 1.0, 1.7, 0.6)
        assert qfi_same_frequency(1.0, 1.7, 0.2, drive, 0.0, UNIT, 0.0) == pytest.approx(0.0, abs=1e-20)

    def test_random_point(self):
        drive = DriveSpec(1.0, 0.35, 0.8, 1.37, 0.9)
        cp = ModulatedCoupling(0.6, 1.37, 2.2)
        assert qfi_same_frequency(0.6, 1.37, 2.2, drive, 5.1, UNIT, 0.3) == pytest.approx(
            pipeline(drive, cp, 5.1, r_T=0.3), rel=1e-8)

    def test_defers_at_resonance(self):
        drive = DriveSpec(1.0, 0.35, 0.8, 1.0, 0.9)
        assert qfi_same_frequency(0.6, 1.0, 0.4, drive, 5.1, UNIT, 0.3) == qfi_doubly_resonant(
            0.6, 0.4, drive, 5.1, UNIT, 0.3)


class TestFractional:
    def test_optimum_value(self):
        assert qfi_fractional_optimal(8, 1.0, 1.0, UNIT) == pytest.approx(PI2 * 8**6 / 196)

    def test_even_s_constant_term_vanishes(self):
        ff = FractionalFrequency(-1, 8)
        with_a = qfi_fractional_at_sep(ff, 1, 1.0, 0.0, DriveSpec(1.0, 0.7, 1.0, 0.75, 0.3), UNIT, 0.0)
        without = qfi_fractional_at_sep(ff, 1, 1.0, 0.0, DriveSpec(1.0, 0.0, 1.0, 0.75, 0.3), UNIT, 0.0)
        assert with_a == pytest.approx(without, rel=1e-14)

    def test_odd_s_with_offset_matches_pipeline(self):
        ff = FractionalFrequency(-1, 7)
        drive = DriveSpec(1.0, 0.6, 0.9, ff.omega_frac, 0.4)
        cp = ModulatedCoupling(0.8, ff.omega_frac, 1.1)
        val = qfi_fractional_at_sep(ff, 1, 0.8, 1.1, drive, UNIT, 0.25)
        assert val == pytest.approx(pipeline(drive, cp, ff.tau_sep, r_T=0.25), rel=1e-8)

    def test_local_matches_local_cavity(self):
        ff = FractionalFrequency(2, 5)
        drive = DriveSpec(1.0, 0.6, 0.9, ff.omega_frac, 0.4)
        cp = ModulatedCoupling(0.8, ff.omega_frac, 1.1)
        assert qfi_fractional_at_sep(ff, 2, 0.8, 1.1, drive, UNIT, local=True) == pytest.approx(
            qfi_local_cavity(drive, cp, NO_MODULATION, 2 * ff.tau_sep, UNIT), rel=1e-8)


class TestParametric:
    def test_dominant_value(self):
        val = qfi_parametric_dominant(1.0, 1.0, 0.01, 100.0, UNIT)
        assert val == pytest.approx(4 * (math.e - 1) ** 2 / 1e-4, rel=1e-14)
        assert val == pytest.approx(1.181e5, rel=1e-3)

    def test_small_d2_limit(self):
        val = qfi_parametric_dominant(0.5, 0.8, 1e-9, 3.0, UNIT)
        assert val == pytest.approx(4 * 0.25 * 0.64 * 9.0, rel=1e-8)
        assert qfi_parametric_dominant(0.5, 0.8, 0.0, 3.0, UNIT) == pytest.approx(4 * 0.25 * 0.64 * 9.0)

    def test_approximates_pipeline(self):
        d2, tau = 0.01, 100.0
        num = pipeline(DriveSpec(1.0, 0.0, 1.0, 1.0, 0.0), ConstantCoupling(1.0), tau,
                       fm=FreqModSpec(d2, 2.0, -math.pi / 2))
        assert qfi_parametric(1.0, 1.0, d2, tau, UNIT) == pytest.approx(num, rel=5 * d2)
        assert qfi_parametric_dominant(1.0, 1.0, d2, tau, UNIT) == pytest.approx(num, rel=5 * d2)

    def test_improvement_at_unit_d2_tau(self):
        tau = 2 * math.pi
        d2 = 1 / tau
        with pytest.warns(UserWarning):
            fm = FreqModSpec(d2, 2.0, -math.pi / 2)
        num = pipeline(DriveSpec(1.0, 0.0, 1.0, 1.0, 0.0), ConstantCoupling(1.0), tau, fm=fm)
        ratio = num / qfi_benchmark(1, 1.0, 1.0, UNIT)
        assert ratio == pytest.approx((math.e - 1) ** 2, rel=d2)


class TestPhaseMap:
    def test_no_modulation_is_flat_in_phi_d2(self):
        grid = np.linspace(-math.pi, math.pi, 7, endpoint=False)
        m = qfi_phase_map(grid, grid, 1.0, 0.0, 4 * math.pi, UNIT)
        np.testing.assert_allclose(m, np.broadcast_to(m[0], m.shape), rtol=1e-12)

    def test_matches_direct_evaluation(self):
        p2, p1 = np.array([-1.0, 0.4]), np.array([-2.5, 0.3, 1.9])
        m = qfi_phase_map(p2, p1, 0.8, 0.02, 4 * math.pi, UNIT, r_T=0.3)
        for i, a in enumerate(p2):
            for j, b in enumerate(p1):
                ref = pipeline(DriveSpec(1.0, 0.0, 1.0, 1.0, b), ConstantCoupling(0.8), 4 * math.pi,
                               r_T=0.3, fm=FreqModSpec(0.02, 2.0, a))
                assert m[i, j] == pytest.approx(ref, rel=1e-9)

    def test_pi_periodic_in_drive_phase(self):
        p1 = np.array([0.2, 0.2 + math.pi])
        m = qfi_phase_map([-0.7], p1, 1.0, 0.02, 4 * math.pi, UNIT)
        assert m[0, 0] == pytest.approx(m[0, 1], rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2), st.floats(0, 1), st.floats(0.1, 1.5), st.floats(0, 2 * math.pi),
       st.floats(0, 2 * math.pi), st.floats(0.1, 6 * math.pi), st.floats(0, 3))
def test_closed_forms_match_pipeline(k0, a, eps, p1, pk, tau, r_T):
    ps = PhotonStats(2.0, 1.7)
    res = DriveSpec(1.0, a, eps, 1.0, p1)
    assert qfi_resonant_closed(k0, res, tau, ps, r_T) == pytest.approx(
        pipeline(res, ConstantCoupling(k0), tau, ps, r_T), rel=1e-7, abs=1e-10)
    assert qfi_doubly_resonant(k0, pk, res, tau, ps, r_T) == pytest.approx(
        pipeline(res, ModulatedCoupling(k0, 1.0, pk), tau, ps, r_T), rel=1e-7, abs=1e-10)


def test_nonnegative_outputs():
    rng = np.random.default_rng(5)
    for _ in range(20):
        drive = DriveSpec(1.0, rng.uniform(0, 1), rng.uniform(0, 1), 1.0, rng.uniform(0, 6.3))
        assert qfi_resonant_closed(rng.uniform(0, 2), drive, rng.uniform(0, 20), UNIT, 0.1) >= 0
        assert qfi_doubly_resonant(rng.uniform(0, 2), 0.3, drive, rng.uniform(0, 20), UNIT) >= 0
