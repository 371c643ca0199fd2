import math
from fractions import Fraction

import pytest

from modcancel.errors import CapError, DomainError, NotInvertible, StructureError
from modcancel.series import (
    UNBOUNDED,
    FormPoly,
    FormQSeries,
    PhasedSeries,
    QSeries,
    Registry,
    series_arith,
    series_component,
    series_eval_numeric,
    series_exp,
    series_integrate_t,
    series_inverse,
    series_t_action,
    tail_bound,
)

R1 = Registry.for_dim(1)
R1_8 = Registry.for_dim(1, degree_cap=8)


def var(name, reg=R1):
    return FormPoly.var(reg, name)


class TestRegistry:
    def test_names_and_weights(self):
        assert R1.names == ("x1", "x2", "u", "vbar", "r0", "s", "alpha", "t")
        assert R1.weight(R1.mono(x1=1, alpha=1)) == 3
        assert R1.weight(R1.mono(t=3)) == 0

    def test_format_parse_roundtrip(self):
        m = R1.mono(x1=2, u=1)
        assert R1.format_mono(m) == "x1^2*u"
        assert R1.parse_mono("x1^2*u") == m
        assert R1.format_mono(R1.one) == "1"

    def test_alpha_squared_is_not_admissible(self):
        a = R1.mono(alpha=1)
        assert R1.mono_mul(a, a) is None


class TestQSeries:
    def test_lowest_terms(self):
        f = QSeries({0: Fraction(6, 4), 8: Fraction(-3, -9)})
        assert f[0] == Fraction(3, 2) and f[0].denominator == 2
        big = Fraction(2**300 + 1, 3**200)
        g = QSeries({0: big}) + QSeries({0: Fraction(1, 3**200)})
        assert g[0] == Fraction(2**300 + 2, 3**200)

    def test_no_stored_zeros(self):
        f = QSeries({0: 1, 8: 0})
        assert f.coeffs == {0: 1}
        assert (QSeries({8: 1}) - QSeries({8: 1})).coeffs == {}

    def test_difference_of_squares(self):
        one_plus = QSeries({0: 1, 8: 1})
        one_minus = QSeries({0: 1, 8: -1})
        assert series_arith("mul", one_plus, one_minus) == QSeries({0: 1, 16: -1})

    def test_mul_tightens_truncation(self):
        f = QSeries({4: 1}, 20)
        g = QSeries({0: 1, 8: 1}, 16)
        assert (f * g).trunc == min(20 + 0, 16 + 4)

    def test_add_takes_min_truncation(self):
        assert (QSeries({0: 1}, 10) + QSeries({0: 1}, 7)).trunc == 7

    def test_geometric_inverse(self):
        f = QSeries({0: 1, 8: -1}, 40)
        inv = series_inverse(f)
        assert inv == QSeries({0: 1, 8: 1, 16: 1, 24: 1, 32: 1}, 40)

    def test_scalar_inverse(self):
        assert series_inverse(2) == Fraction(1, 2)
        with pytest.raises(NotInvertible):
            series_inverse(0)

    def test_non_unit_not_invertible(self):
        with pytest.raises(NotInvertible):
            QSeries({8: 1}, 32).inverse()

    def test_exp(self):
        assert series_exp(QSeries({}, 40)) == QSeries({0: 1}, 40)
        got = series_exp(QSeries({8: 1}, 32))
        assert got == QSeries({0: 1, 8: 1, 16: Fraction(1, 2), 24: Fraction(1, 6)}, 32)

    def test_exp_needs_nilpotent_argument(self):
        with pytest.raises(Exception):
            QSeries({0: 1}, 16).exp()

    def test_numeric_evaluation(self):
        assert series_eval_numeric(QSeries({0: 1, 8: 1}), 1j) == pytest.approx(1 + math.exp(-2 * math.pi))
        assert series_eval_numeric(QSeries({4: 1}), 1j) == pytest.approx(0.0432139, abs=1e-7)
        assert series_eval_numeric(QSeries({}), 1j) == 0

    def test_tail_bound(self):
        assert tail_bound(QSeries({0: 1}), 1j) == 0.0
        r = math.exp(-2 * math.pi / 8)
        assert tail_bound(QSeries({0: 3}, 16), 1j) == pytest.approx(3 * r**16 / (1 - r))
        with pytest.raises(DomainError):
            tail_bound(QSeries({0: 1}, 8), -1j)

    def test_t_action(self):
        assert series_t_action(QSeries({4: 1})) == QSeries({4: -1})
        assert series_t_action(QSeries({8: 1})) == QSeries({8: 1})
        phased = series_t_action(QSeries({1: 1}))
        assert isinstance(phased, PhasedSeries)
        tau = 0.3 + 1.1j
        assert phased.evaluate(tau) == pytest.approx(QSeries({1: 1}).evaluate(tau + 1))

    def test_first_difference(self):
        a = QSeries({0: 1, 12: 2}, 32)
        assert a.first_difference(QSeries({0: 1, 12: 3}, 32)) == 12
        assert a.first_difference(QSeries({0: 1, 12: 2, 40: 1})) is None

    def test_pow(self):
        f = QSeries({0: 1, 8: 1}, 32)
        assert f**3 == QSeries({0: 1, 8: 3, 16: 3, 24: 1}, 32)
        assert (f**0).coeffs == {0: 1}
        assert (f**-1) * f == QSeries({0: 1}, 32)


class TestFormPoly:
    def test_weight_truncation(self):
        x1 = var("x1")
        assert series_arith("mul", series_arith("mul", x1, x1), x1).is_zero()

    def test_alpha_squares_to_zero(self):
        a = var("alpha")
        assert (a * a).is_zero()

    def test_geometric_inverse_in_nilpotent(self):
        x = var("x1", R1_8)
        got = series_inverse(1 + x * x)
        assert got == 1 - x * x + x**4
        # at the default cap of 4 the x1^4 term is beyond the cap
        y = var("x1")
        assert series_inverse(1 + y * y) == 1 - y * y

    def test_exp_nilpotent(self):
        x = var("x1", R1_8)
        assert series_exp(x * x) == 1 + x * x + x**4 * Fraction(1, 2)
        assert series_exp(FormPoly.constant(R1, 0)) == FormPoly.constant(R1, 1)

    def test_components(self):
        x = var("x1", R1_8)
        f = 1 + x * x + x**4
        assert series_component(f, 8) == x**4
        a = var("alpha")
        ax = a * var("x1")
        assert series_component(ax, 3) == ax
        total = sum((f.component(w) for w in range(0, 9)), FormPoly.constant(R1_8, 0))
        assert total == f

    def test_integrate_t(self):
        r0, s, t = var("r0"), var("s"), var("t")
        assert series_integrate_t(r0 + t * s) == r0 + s * Fraction(1, 2)
        assert series_integrate_t(FormPoly.constant(R1, 1)) == FormPoly.constant(R1, 1)
        assert series_integrate_t(t * t) == FormPoly.constant(R1, Fraction(1, 3))

    def test_t_cap(self):
        t = var("t")
        assert (t ** R1.t_cap).coefficient(R1.mono(t=R1.t_cap)) == 1
        assert (t ** (R1.t_cap + 1)).is_zero()

    def test_json_roundtrip(self):
        f = var("x1") * var("x1") * Fraction(-3, 7) + var("u") + 2
        assert FormPoly.from_json(R1, f.to_json()) == f
        assert f.to_json()["x1^2"] == "-3/7"

    def test_non_unit_inverse(self):
        with pytest.raises(NotInvertible):
            var("x1").inverse()

    def test_registry_mismatch(self):
        with pytest.raises(StructureError):
            var("x1") + FormPoly.var(Registry.for_dim(2), "x1")

    def test_coefficient_by_string(self):
        f = var("x1") * var("u") * 5
        assert f.coefficient("x1*u") == 5
        assert f.coefficient({"x1": 1, "u": 1}) == 5

    def test_diff(self):
        x = var("x1")
        assert (x * x).diff("x1") == x * 2


class TestFormQSeries:
    def test_promotion(self):
        x = var("x1")
        f = x * QSeries({0: 1, 8: 1}, 32)
        assert isinstance(f, FormQSeries)
        assert f.coefficient(R1.mono(x1=1)) == QSeries({0: 1, 8: 1}, 32)

    def test_cell_views_agree(self):
        x = var("x1")
        f = (1 + x * QSeries({4: 2}, 40)) * (1 - x * QSeries({8: 1}, 40))
        for m in f.monomials():
            for n, c in f.coefficient(m).coeffs.items():
                assert f.q_coefficient(n).coefficient(m) == c

    def test_unit_inverse(self):
        x = var("x1")
        f = 1 + x * QSeries({0: 1, 8: 1}, 32) + QSeries({8: 3}, 32)
        assert (f * f.inverse()).first_difference(FormQSeries.constant(R1, 1, 32)) is None

    def test_exp_log(self):
        x = var("x1")
        f = x * QSeries({0: 1, 8: 1}, 32) + QSeries({8: 3}, 32)
        back = f.exp().log()
        assert back.first_difference(f) is None

    def test_non_unit_inverse(self):
        with pytest.raises(NotInvertible):
            (var("x1") * QSeries({0: 1}, 16)).inverse()

    def test_evaluate_and_t_action(self):
        x = var("x1")
        f = x * QSeries({0: 1, 4: 2}, 40)
        img = f.t_action()
        assert img.coefficient(R1.mono(x1=1)) == QSeries({0: 1, 4: -2}, 40)
        vals = f.evaluate(1j)
        assert vals[R1.mono(x1=1)] == pytest.approx(1 + 2 * math.exp(-math.pi))

    def test_integrate_and_component(self):
        t, s = var("t"), var("s")
        f = t * s * QSeries({0: 1, 8: 1}, 16)
        got = f.integrate_t()
        assert got.coefficient(R1.mono(s=1)) == QSeries({0: Fraction(1, 2), 8: Fraction(1, 2)}, 16)
        assert got.component(2).first_difference(got) is None
        assert got.component(4).is_zero()
