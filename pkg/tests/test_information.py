import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polestim.errors import DegenerateError, DomainError, SingularError
from polestim.information import (
    crb,
    fim_event,
    fim_finite_difference,
    fim_total,
    jacobian_reparam,
    qfim_reduced,
    qfim_reparam,
    qfim_single_state,
    qfim_three_param,
)
from polestim.probabilities import EVENT_ORDER, EventClass
from polestim.states import ReducedParams

PI = math.pi
points = st.builds(ReducedParams, st.floats(0, PI), st.floats(0, PI / 2))


def test_qfim_single_state():
    assert np.allclose(qfim_single_state(PI / 2), np.eye(2), atol=0)
    assert np.array_equal(qfim_single_state(0.0), np.diag([1.0, 0.0]))
    assert np.allclose(qfim_single_state(PI / 6), np.diag([1.0, 0.25]), atol=1e-15)


def test_qfim_three_param():
    assert np.array_equal(qfim_three_param(PI / 2), np.diag([2.0, 1.0, 1.0]))
    assert np.array_equal(qfim_three_param(0.0), np.diag([2.0, 0.0, 0.0]))
    assert all(qfim_three_param(t)[0, 0] == 2.0 for t in np.linspace(0, PI, 13))


class TestJacobian:
    def test_inverse_rows(self):
        _, inv = jacobian_reparam(1)
        assert np.array_equal(inv, [[1, 0, 0], [0, 1, 1], [0, 1, -1]])

    @pytest.mark.parametrize("sign", [1, -1])
    def test_identity(self, sign):
        j, inv = jacobian_reparam(sign)
        assert np.max(np.abs(j @ inv - np.eye(3))) < 1e-14

    @pytest.mark.parametrize("sign", [1, -1])
    @pytest.mark.parametrize("theta", np.linspace(0, PI, 9))
    def test_transform(self, sign, theta):
        s2 = math.sin(theta) ** 2
        expected = 2 * np.diag([1.0, s2, s2])
        assert np.max(np.abs(qfim_reparam(theta, sign) - expected)) < 1e-14

    @pytest.mark.parametrize("sign", [0, 2, 0.5])
    def test_degenerate(self, sign):
        with pytest.raises(DegenerateError):
            jacobian_reparam(sign)


def test_qfim_reduced():
    assert np.array_equal(qfim_reduced(PI / 2), np.diag([2.0, 2.0]))
    assert np.array_equal(qfim_reduced(0.0), np.diag([2.0, 0.0]))
    full = qfim_reparam(1.1, 1)
    assert np.allclose(qfim_reduced(1.1), full[np.ix_([0, 2], [0, 2])], atol=1e-15)


class TestFimEvent:
    def test_db_h_equator(self):
        assert np.allclose(fim_event(EventClass.DB_H, ReducedParams(PI / 2, 0.3)), [[1, 0], [0, 0]], atol=1e-15)

    def test_c_equator(self):
        assert np.allclose(fim_event(EventClass.C, ReducedParams(PI / 2, PI / 4)), [[0, 0], [0, 1]], atol=1e-15)

    def test_sb_zero_phase(self):
        t = 0.8
        expected = 2 * np.array([[math.cos(t) ** 2, 0], [0, 0]])
        assert np.allclose(fim_event(EventClass.SB, ReducedParams(t, 0.0)), expected, atol=1e-15)

    def test_matches_score_form(self):
        # (grad P)(grad P)^T / P with analytic derivatives of the closed forms
        t, d = 1.3, 0.5
        st_, ct, sd, cd = math.sin(t), math.cos(t), math.sin(d), math.cos(d)
        p = {
            EventClass.C: (0.5 * st_**2 * sd**2, st_ * ct * sd**2, st_**2 * sd * cd),
            EventClass.SB: (0.5 * st_**2 * cd**2, st_ * ct * cd**2, -(st_**2) * sd * cd),
        }
        for e, (pv, dt, dd) in p.items():
            g = np.array([dt, dd])
            assert np.allclose(fim_event(e, ReducedParams(t, d)), np.outer(g, g) / pv, atol=1e-14)

    @given(points)
    def test_psd(self, rp):
        for e in EVENT_ORDER:
            m = fim_event(e, rp)
            assert np.array_equal(m, m.T)
            assert np.min(np.linalg.eigvalsh(m)) >= -1e-12


class TestFimTotal:
    def test_examples(self):
        assert np.allclose(fim_total(ReducedParams(PI / 2, PI / 3)), np.diag([2, 2]), atol=1e-15)
        assert np.allclose(fim_total(ReducedParams(PI / 4, 0.1)), np.diag([2, 1]), atol=1e-15)

    @given(points)
    def test_equals_qfim(self, rp):
        assert np.max(np.abs(fim_total(rp) - qfim_reduced(rp.theta))) < 1e-12

    @given(points)
    def test_additive(self, rp):
        total = sum(fim_event(e, rp) for e in EVENT_ORDER)
        assert np.max(np.abs(fim_total(rp) - total)) <= 1e-14


class TestFiniteDifference:
    def test_examples(self):
        rp = ReducedParams(1.0, 0.7)
        assert np.max(np.abs(fim_finite_difference(rp, 1e-5) - fim_total(rp))) < 1e-6
        assert np.max(np.abs(fim_finite_difference(ReducedParams(PI / 2, PI / 4)) - np.diag([2, 2]))) < 1e-6

    @pytest.mark.parametrize("step", [0.0, -1e-5])
    def test_bad_step(self, step):
        with pytest.raises(DomainError):
            fim_finite_difference(ReducedParams(1.0, 0.7), step)

    def test_outside_domain(self):
        with pytest.raises(DomainError):
            fim_finite_difference(ReducedParams(0.0, 0.7))
        with pytest.raises(DomainError):
            fim_finite_difference(ReducedParams(1.0, PI / 2))


class TestCrb:
    def test_examples(self):
        assert np.allclose(crb(ReducedParams(PI / 2, 0.3), 100), np.diag([0.005, 0.005]), atol=1e-18)
        assert np.allclose(crb(ReducedParams(PI / 6, 0.3), 50), np.diag([0.01, 0.04]), atol=1e-15)

    @pytest.mark.parametrize("theta", [0.0, PI])
    def test_singular(self, theta):
        with pytest.raises(SingularError):
            crb(ReducedParams(theta, 0.3), 10)

    def test_bad_n(self):
        with pytest.raises(DomainError):
            crb(ReducedParams(1.0, 0.3), 0)
