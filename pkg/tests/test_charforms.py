from fractions import Fraction

import pytest

from modcancel.charforms import (
    LAMBDA_COEFFS,
    GeometrySpec,
    VirtualBundle,
    agw_probe,
    ahat_form,
    anomaly_polynomial,
    bundle_form,
    ch_line,
    cosh_half,
    cs_form,
    lambda_combination,
    lhat_form,
    q_form,
    witten_bundle_ch,
)
from modcancel.errors import CapError, SpecError
from modcancel.series import FormPoly, QSeries, Registry
from modcancel.theta import eisenstein_e2

R1 = Registry.for_dim(1)


def v(name, reg=R1):
    return FormPoly.var(reg, name)


def p1(reg=R1):
    return v("x1", reg) ** 2 + v("x2", reg) ** 2


def test_spec_validation():
    with pytest.raises(SpecError):
        GeometrySpec(1, 2, (1,), (1, 2))
    with pytest.raises(SpecError):
        GeometrySpec(0, 1, (1,), (1,))
    sp = GeometrySpec(2, 1, (2,), (1,))
    assert sp.registry.n_roots == 4 and sp.registry.degree_cap == 8


def test_ahat():
    a = ahat_form(1)
    assert a.component(0) == FormPoly.constant(R1, 1)
    assert a.component(4) == p1() * Fraction(-1, 24)
    assert a.component(8).is_zero()


def test_lhat():
    reg = Registry.for_dim(1, degree_cap=8)
    assert lhat_form(1, reg).constant_term() == 4
    ld = lhat_form(1)
    assert ld.component(0) == FormPoly.constant(R1, 4)
    assert ld.component(4) == p1() * Fraction(2, 6)
    assert all(w % 4 == 0 for w in lhat_form(2).weights())
    # the x1^4 coefficient of x/tanh(x/2) * 2 is 2 * (-1/360)
    assert lhat_form(1, reg).coefficient(reg.mono(x1=4)) == Fraction(-2, 360)


def test_ch_line():
    assert ch_line(0, reduced=True).is_zero()
    c = ch_line(1)
    assert c.component(2).is_zero()
    assert c.component(4) == v("u") ** 2
    reg = Registry.for_dim(2)
    u = v("u", reg)
    assert ch_line(2, reduced=True, registry=reg) == u * u * 4 + u**4 * Fraction(4, 3)
    assert ch_line(1, "vbar", True, reg) == v("vbar", reg) ** 2 + v("vbar", reg) ** 4 * Fraction(1, 12)


def test_virtual_bundle():
    u = v("u")
    b = VirtualBundle.line(u, 2) + VirtualBundle.line(u * 2, -1)
    assert b.rank == 2
    assert b.ch() == ch_line(1, reduced=True) * 2 - ch_line(2, reduced=True)


def test_witten_bundle_low_orders():
    sp = GeometrySpec(1, 2, (1, 3), (2, 0), n8=16)
    th2 = witten_bundle_ch("theta2", sp)
    assert th2.q_coefficient(0) == FormPoly.constant(sp.registry, 1)
    expect = FormPoly.constant(sp.registry, 0)
    for a, b in zip(sp.a, sp.b):
        expect = expect + ch_line(b, registry=sp.registry) - ch_line(a, registry=sp.registry)
    assert th2.q_coefficient(4) == expect


def test_witten_bundle_symmetric_when_a_equals_b():
    sp = GeometrySpec(1, 1, (2,), (2,), n8=24)
    assert witten_bundle_ch("theta1", sp) == witten_bundle_ch("theta2", sp) == witten_bundle_ch("theta3", sp)


@pytest.mark.parametrize("d,k,a,b", [(1, 1, (2,), (1,)), (1, 2, (1, 2), (2, 1)), (2, 1, (2,), (1,))])
def test_bundle_route_equals_theta_route(d, k, a, b):
    sp = GeometrySpec(d, k, a, b, True, n8=64)
    for which in ("Q1", "Q2", "Q3", "Qbar1", "Qbar2", "Qbar3"):
        assert bundle_form(which, sp).first_difference(q_form(which, sp)) is None


def test_q1_at_q_zero():
    sp = GeometrySpec(1, 1, (3,), (1,), n8=16)
    reg = sp.registry
    expect = (anomaly_polynomial(sp) * Fraction(1, 24)).exp() * cosh_half(v("u") * 3) * 2 * ahat_form(1)
    assert q_form("Q1", sp).q_coefficient(0) == expect


def test_anomaly_exponent():
    sp = GeometrySpec(1, 1, (1,), (1,), n8=16)
    assert anomaly_polynomial(sp) == p1() - v("u") ** 2 * 3
    assert eisenstein_e2(16)[0] == 1


def test_barred_needs_eta():
    sp = GeometrySpec(1, 1, (1,), (1,))
    with pytest.raises(SpecError):
        q_form("Qbar1", sp)
    with pytest.raises(SpecError):
        cs_form("CSPhi1", sp)


def test_lambda_at_q_zero():
    reg = Registry.for_dim(2)
    x = v("x1", reg)
    lam = lambda_combination(1, x, 32).q_coefficient(0)
    # -tanh(x/2) = -x/2 + x^3/24
    assert lam == -(x * Fraction(1, 2)) + x**3 * Fraction(1, 24)
    assert all(sum(c) == 0 for c in LAMBDA_COEFFS.values())


def test_cs_form_shape():
    sp = GeometrySpec(1, 1, (2,), (1,), True, n8=32)
    reg = sp.registry
    for i in (1, 2, 3):
        cs = cs_form(f"CSPhi{i}", sp)
        assert not cs.is_zero()
        for m in cs.cells:
            assert reg.weight(m) == 3
            # exactly one alpha: linear in the connection difference
            assert m[reg.alpha_index] == 1
            assert m[reg.t_index] == 0


def test_cs_form_cap_errors():
    reg = Registry(2, 2, 1)
    sp = GeometrySpec(1, 1, (1,), (1,), True, 16, reg)
    with pytest.raises(CapError):
        cs_form("CSPhi1", sp)


def test_agw_probe():
    res = agw_probe(3)
    assert res.exact
    assert (res.lam, res.mu) == (8, -32)
    small = agw_probe(1)
    assert small.exact
    assert small.lam == Fraction(2, 5) and small.free == ("mu",)


def test_generating_function_laws():
    from modcancel.charforms import ch_exterior, ch_symmetric
    from modcancel.series import FormQSeries

    reg = Registry.for_dim(2)
    u, x = v("u", reg), v("x1", reg)
    E = VirtualBundle.line(u * 2) + VirtualBundle.line(x)
    F = VirtualBundle.line(x)
    y = QSeries.monomial(4, 1, 40)
    one = FormQSeries.constant(reg, 1, 40)
    assert (ch_symmetric(E, y) * ch_exterior(E, -y)).first_difference(one) is None
    diff = E + F.scaled(-1)
    assert (ch_exterior(diff, y) * ch_exterior(F, y)).first_difference(ch_exterior(E, y)) is None
    # a zero exponent gives the trivial bundle
    assert ch_exterior(VirtualBundle.line(u * 0), y).first_difference(one) is None
