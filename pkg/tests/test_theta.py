import cmath
import math
from fractions import Fraction

import pytest

from modcancel.errors import DomainError, ZeroFunction
from modcancel.series import FormPoly, QSeries, Registry
from modcancel.theta import (
    ThetaKind,
    delta_eps,
    eisenstein_e2,
    inject_fault,
    jacobi_check,
    numeric_delta_eps,
    numeric_e2,
    numeric_log_derivative,
    numeric_theta,
    numeric_theta_prime,
    numeric_theta_prime_null,
    theta_block,
    theta_log_block,
    theta_null,
    theta_prime_null,
)

R8 = Registry.for_dim(2)


def test_theta_null_expansions():
    assert theta_null(ThetaKind.TH3, 9)[0] == 1 and theta_null(ThetaKind.TH3, 9)[4] == 2
    assert theta_null(ThetaKind.TH2, 9)[4] == -2
    th1 = theta_null(ThetaKind.TH1, 2)
    assert th1.coeffs == {1: 2} and th1.trunc == 2
    with pytest.raises(ZeroFunction):
        theta_null(ThetaKind.TH, 8)


def test_theta3_is_a_sum_of_squares():
    # triple product oracle: theta3(0) = sum_n q^(n^2/2)
    n8 = 200
    oracle = {}
    for n in range(-10, 11):
        idx = 4 * n * n
        if idx < n8:
            oracle[idx] = oracle.get(idx, 0) + 1
    assert theta_null(ThetaKind.TH3, n8) == QSeries(oracle, n8)


def test_theta_prime_null():
    f = theta_prime_null(32)
    assert f[1] == 2
    assert f[9] == -6


def test_jacobi():
    assert jacobi_check(8)
    assert jacobi_check(160)


def test_jacobi_mutation():
    n8 = 64
    t3 = theta_null(ThetaKind.TH3, n8)
    bad = t3 + QSeries({4: -2 * t3[4]}, n8)
    assert not jacobi_check(n8, {ThetaKind.TH3: bad})


def test_e2():
    e2 = eisenstein_e2(40)
    assert e2 == QSeries({0: 1, 8: -24, 16: -72, 24: -96, 32: -168}, 40)
    tau = 1.1j
    lhs = e2_full(-1 / tau)
    rhs = tau**2 * e2_full(tau) - 6j * tau / math.pi
    assert abs(lhs - rhs) < 1e-8


def e2_full(tau):
    return eisenstein_e2(8 * 60).evaluate(tau)


def test_numeric_e2_matches_series():
    tau = 0.2 + 1.3j
    assert numeric_e2(tau) == pytest.approx(e2_full(tau), rel=1e-12)


def test_delta_eps_leading_terms():
    p1, p2, p3 = (delta_eps(i, 16) for i in (1, 2, 3))
    assert (p1.delta[0], p1.delta[8]) == (Fraction(1, 4), 6)
    assert (p1.epsilon[0], p1.epsilon[8]) == (Fraction(1, 16), -1)
    assert (p2.delta[0], p2.delta[4], p2.epsilon[0], p2.epsilon[4]) == (Fraction(-1, 8), -3, 0, 1)
    assert (p3.delta[0], p3.delta[4], p3.epsilon[0], p3.epsilon[4]) == (Fraction(-1, 8), 3, 0, -1)
    assert p2.group == "Gamma^0(2)"


def test_delta2_t_image_is_delta3():
    p2, p3 = delta_eps(2, 64), delta_eps(3, 64)
    assert p2.delta.t_action() == p3.delta
    assert p2.epsilon.t_action() == p3.epsilon


def test_delta_eps_numeric_agrees_with_series():
    tau = 0.05 + 1.2j
    for i in (1, 2, 3):
        p = delta_eps(i, 96)
        d, e = numeric_delta_eps(i, tau)
        assert p.delta.evaluate(tau) == pytest.approx(d, rel=1e-12, abs=1e-14)
        assert p.epsilon.evaluate(tau) == pytest.approx(e, rel=1e-12, abs=1e-14)


def test_fault_hook_is_scoped():
    clean = delta_eps(2, 32).delta
    with inject_fault("delta2"):
        assert delta_eps(2, 32).delta != clean
    assert delta_eps(2, 32).delta == clean


def test_blocks_at_zero_argument():
    zero = FormPoly.constant(R8, 0)
    for kind in ThetaKind:
        assert theta_block(kind, zero, 32).first_difference(1) is None
    for kind in (ThetaKind.TH1, ThetaKind.TH2, ThetaKind.TH3):
        assert theta_log_block(kind, zero, 32).is_zero()


def test_block_expansions():
    x = FormPoly.var(R8, "x1")
    b = theta_block(ThetaKind.TH, x, 32)
    assert b.q_coefficient(0) == 1 - x * x * Fraction(1, 24) + x**4 * Fraction(7, 5760)
    b2 = theta_block(ThetaKind.TH2, x, 32)
    assert b2.q_coefficient(4) == -(x * x) - x**4 * Fraction(1, 12)


def test_log_block_expansions():
    x = FormPoly.var(R8, "x1")
    l1 = theta_log_block(ThetaKind.TH1, x, 32)
    assert l1.q_coefficient(0) == x * Fraction(1, 4) - x**3 * Fraction(1, 48)
    l2 = theta_log_block(ThetaKind.TH2, x, 32)
    # -2 sinh(x), through the weight cap of 8 (x^3 has weight 6)
    assert l2.q_coefficient(4) == -(x * 2) - x**3 * Fraction(1, 3)
    with pytest.raises(ValueError):
        theta_log_block(ThetaKind.TH, x, 32)


def test_numeric_theta_values():
    assert numeric_theta(ThetaKind.TH3, 0, 1j) == pytest.approx(1.0864348112, abs=1e-9)
    assert abs(numeric_theta(ThetaKind.TH, 0, 0.3 + 1.1j)) < 1e-15
    tau = 1.3j
    ratio = numeric_theta(ThetaKind.TH1, 0, tau + 1) / numeric_theta(ThetaKind.TH1, 0, tau)
    assert abs(ratio - cmath.exp(1j * math.pi / 4)) < 1e-10
    with pytest.raises(DomainError):
        numeric_theta(ThetaKind.TH, 0.1, -1j)


def test_theta2_s_law():
    v, tau = 0.2, 1.2j
    lhs = numeric_theta(ThetaKind.TH2, v, -1 / tau)
    rhs = cmath.sqrt(tau / 1j) * cmath.exp(1j * math.pi * tau * v * v) * numeric_theta(ThetaKind.TH1, tau * v, tau)
    assert abs(lhs - rhs) / abs(rhs) < 1e-8


def test_log_derivative_matches_difference_quotient():
    for kind in ThetaKind:
        v, tau = 0.21 + 0.03j, 0.1 + 1.1j
        fd = numeric_theta_prime(kind, v, tau) / numeric_theta(kind, v, tau)
        assert numeric_log_derivative(kind, v, tau) == pytest.approx(fd, rel=1e-8)


def test_theta_prime_null_numeric():
    tau = 0.2 + 1.1j
    fd = numeric_theta_prime(ThetaKind.TH, 0, tau)
    assert numeric_theta_prime_null(tau) == pytest.approx(fd, rel=1e-8)
    assert numeric_theta_prime_null(tau) == pytest.approx(math.pi * theta_prime_null(200).evaluate(tau), rel=1e-12)
