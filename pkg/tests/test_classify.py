import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from coriolis_orbits.classify import (
    MissingBrouwerIndexError,
    Region,
    SpectralData,
    T_periods,
    crossing_periods,
    emanation_report,
    gamma2,
    gamma3,
    imaginary_spectrum,
    region,
    vertical_period,
)
from coriolis_orbits.spectrum import HessianData, build_ST, morse_ST_planar

from oracle_values import T_MINUS_11, T_PLUS_11


class TestRegion:
    @pytest.mark.parametrize(
        "b, label",
        [
            ((1.0, 1.0), Region.R1),
            ((-1.0, 2.0), Region.R2),
            ((2.0, -1.0), Region.R4),
            ((-0.5, -0.5), Region.R3),
            ((-4.0, -4.0), Region.R0),
            ((-2.0, -2.0), Region.R0),
            ((-1.0, -1.0), Region.BOUNDARY_OFF_C),
            ((0.0, 2.0), Region.C_OFF_BOUNDARY),
            ((0.0, -4.0), Region.C_ON_BOUNDARY),
            ((-6.0, 0.0), Region.C_ON_BOUNDARY),
            ((0.0, -3.0), Region.C_OFF_BOUNDARY),
        ],
    )
    def test_labels(self, b, label):
        assert region(*b) is label

    @given(st.floats(-10, 10), st.floats(-10, 10))
    def test_symmetric_up_to_quadrant_swap(self, b1, b2):
        swap = {Region.R2: Region.R4, Region.R4: Region.R2}
        lab = region(b1, b2)
        assert region(b2, b1) is swap.get(lab, lab)

    def test_closure_predicate(self):
        assert Region.R0.in_closure_R0() and Region.C_ON_BOUNDARY.in_closure_R0()
        assert not Region.C_OFF_BOUNDARY.in_closure_R0()


class TestPeriods:
    def test_identity_hessian(self):
        t_minus, t_plus = T_periods(1.0, 1.0)
        assert t_minus == pytest.approx(T_MINUS_11, rel=1e-13)
        assert t_plus == pytest.approx(T_PLUS_11, rel=1e-13)

    def test_missing_periods(self):
        assert T_periods(-4.0, -4.0) == (None, None)
        assert T_periods(-1.0, 2.0)[1] is None

    def test_boundary_periods_coincide(self):
        t_minus, t_plus = T_periods(-1.0, -1.0)
        assert t_minus == t_plus == pytest.approx(2 * math.pi)

    @settings(max_examples=100)
    @given(st.floats(-8, 4), st.floats(-8, 4))
    def test_periods_match_eigenvalues(self, b1, b2):
        lab = region(b1, b2)
        assume(lab in (Region.R1, Region.R2, Region.R3, Region.R4))
        a = np.array([[0.0, -1.0], [1.0, 0.0]])
        A = np.block([[np.eye(2), a], [-a, np.diag([b1, b2]) - a @ a]])
        J = np.block([[np.zeros((2, 2)), -np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
        ev = np.linalg.eigvals(J @ A)
        imag = np.abs(ev.imag[np.abs(ev.real) < 1e-7 * (1 + np.abs(ev.imag))])
        expected = sorted({round(x, 6) for x in 2 * math.pi / imag[imag > 1e-9]})
        got = sorted(round(t, 6) for t in T_periods(b1, b2) if t is not None)
        assume(all(abs(t) < 1e5 for t in got))
        assert got == pytest.approx(expected, rel=1e-5)

    def test_crossings_sorted_and_deduplicated(self):
        tv = vertical_period(1.0)
        assert crossing_periods(-1.0, -1.0, 1.0) == [tv]
        c = crossing_periods(1.0, 1.0, 4.0)
        assert c == sorted(c) and len(c) == 3


class TestImaginarySpectrum:
    def test_generic(self):
        spec = imaginary_spectrum(1.0, 1.0)
        values = [v.imag for v, _ in spec]
        assert values == pytest.approx([-1 - math.sqrt(2), 1 - math.sqrt(2), math.sqrt(2) - 1, 1 + math.sqrt(2)])

    def test_boundary_double(self):
        assert imaginary_spectrum(-1.0, -1.0) == [(-1j, 2), (1j, 2)]

    def test_zero_multiplicity_on_axes(self):
        assert imaginary_spectrum(0.0, -4.0) == [(0j, 4)]
        assert (0j, 2) in imaginary_spectrum(0.0, 2.0)

    def test_vertical_pair(self):
        spec = imaginary_spectrum(-4.0, -4.0, 9.0)
        assert spec == [(-3j, 1), (3j, 1)]


class TestGamma:
    def test_first_quadrant(self):
        assert gamma2(1.0, 1.0, None, T_MINUS_11) == 1
        assert gamma2(1.0, 1.0, None, T_PLUS_11) == 1
        assert gamma2(1.0, 1.0, None, 7.0) == 0

    def test_saddle(self):
        t_minus, _ = T_periods(-1.0, 2.0)
        assert gamma2(-1.0, 2.0, None, t_minus) == -1

    def test_third_quadrant_signs(self):
        t_minus, t_plus = T_periods(-0.5, -0.5)
        assert (gamma2(-0.5, -0.5, None, t_minus), gamma2(-0.5, -0.5, None, t_plus)) == (1, -1)

    def test_axes_need_index(self):
        with pytest.raises(MissingBrouwerIndexError):
            gamma2(0.0, 2.0, None, 1.0)
        t_minus, _ = T_periods(0.0, 2.0)
        assert gamma2(0.0, 2.0, 3, t_minus) == 3

    def test_inconsistent_index_rejected(self):
        with pytest.raises(ValueError, match="contradicts"):
            gamma2(1.0, 1.0, -1, 2.0)

    def test_vertical_jump(self):
        tv = vertical_period(2.0)
        assert gamma3(-4.0, -4.0, 2.0, None, tv) == 1
        assert gamma3(-1.0, 2.0, 2.0, None, tv) == -1
        assert gamma3(0.0, -5.0, 2.0, -2, tv) == -2

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-2, 8), st.floats(1e-2, 8), st.sampled_from([(1, 1), (-1, 1), (1, -1), (-1, -1)]),
           st.sampled_from(["minus", "plus"]))
    def test_gamma_is_half_jump_of_morse_index(self, x, y, signs, which):
        b1, b2 = signs[0] * x, signs[1] * y
        lab = region(b1, b2)
        assume(lab in (Region.R1, Region.R2, Region.R3, Region.R4))
        t_minus, t_plus = T_periods(b1, b2)
        T = t_minus if which == "minus" else t_plus
        assume(T is not None and T < 1e4)
        assume(t_plus is None or abs(t_plus - t_minus) > 1e-3 * t_minus)
        eps = 1e-4 * T
        ib = 1 if b1 * b2 > 0 else -1
        jump = morse_ST_planar(b1, b2, T + eps) - morse_ST_planar(b1, b2, T - eps)
        assert gamma2(b1, b2, None, T) == ib * jump // 2
        brute = [int(np.sum(np.linalg.eigvalsh(build_ST(HessianData.from_betas(b1, b2), t).S) < 0))
                 for t in (T - eps, T + eps)]
        assert brute[1] - brute[0] == jump


class TestReport:
    def test_identity_hessian(self):
        rep = emanation_report(SpectralData(1.0, 1.0))
        assert rep.region is Region.R1
        assert rep.predicted_branches == 2
        assert rep.gamma_at(T_PLUS_11) == 1

    def test_hyperbolic_spatial(self):
        rep = emanation_report(SpectralData(-4.0, -4.0, 9.0))
        assert rep.flags == ("no_planar_orbits", "nonplanar")
        assert rep.gammas == ((2 * math.pi / 3, 1),)

    def test_flags_on_boundary(self):
        assert "inconclusive" in emanation_report(SpectralData(-1.0, -1.0)).flags
        assert "conjectural" in emanation_report(SpectralData(0.0, -6.0), ib=1).flags
        assert "conjectural" not in emanation_report(SpectralData(0.0, -4.0), ib=1).flags
        assert "inconclusive" in emanation_report(SpectralData(0.0, 2.0), ib=0).flags

    def test_missing_index_on_axes(self):
        with pytest.raises(MissingBrouwerIndexError):
            emanation_report(SpectralData(0.0, 2.0))

    def test_beta3_positive(self):
        with pytest.raises(ValueError):
            SpectralData(1.0, 1.0, 0.0)

    def test_to_dict_round_trip_keys(self):
        d = emanation_report(SpectralData(1.0, 1.0, 2.0), location=(0.0, 1.0)).to_dict()
        assert d["region"] == "R1" and d["location"] == [0.0, 1.0]
        assert len(d["gammas"]) == 3
