"""Exact truncated series.

Three carriers share one set of truncation rules:

* :class:`QSeries` -- a series in ``q`` on the eighth-integer grid: index ``n``
  stands for ``q**(n/8)``.  Indices ``>= trunc`` are unknown.
* :class:`FormPoly` -- a polynomial in formal Chern roots ``x1..x{2d}``, the
  line-bundle roots ``u``, ``vbar``, the transgression generators ``r0``, ``s``
  (all of weight 2), a square-zero odd generator ``alpha`` (weight 1) and an
  integration parameter ``t`` (weight 0).  Monomials above ``degree_cap`` are
  discarded.
* :class:`FormQSeries` -- a ``FormPoly``-valued ``QSeries``.

All scalars are :class:`fractions.Fraction`.  Values are immutable.
"""

from __future__ import annotations

import cmath
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

from .errors import DomainError, NotInvertible, NotNilpotent, StructureError

Rational = Fraction

#: truncation index of exactly-known data (polynomials, constants)
UNBOUNDED = 1 << 40

EXTRA_EVEN = ("u", "vbar", "r0", "s")


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"exact scalar expected, got {type(c).__name__}")


def _is_scalar(c) -> bool:
    return isinstance(c, (int, Fraction)) and not isinstance(c, bool)


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Registry:
    """Variable layout plus the weight and ``t``-degree caps of a form algebra."""

    n_roots: int
    degree_cap: int
    t_cap: int

    @classmethod
    def for_dim(cls, d: int, degree_cap: int | None = None, t_cap: int | None = None) -> "Registry":
        cap = 4 * d if degree_cap is None else degree_cap
        return cls(2 * d, cap, cap if t_cap is None else t_cap)

    @cached_property
    def names(self) -> tuple[str, ...]:
        xs = tuple(f"x{j}" for j in range(1, self.n_roots + 1))
        return xs + EXTRA_EVEN + ("alpha", "t")

    @cached_property
    def weights(self) -> tuple[int, ...]:
        return (2,) * (self.n_roots + len(EXTRA_EVEN)) + (1, 0)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    @property
    def alpha_index(self) -> int:
        return self.n_roots + len(EXTRA_EVEN)

    @property
    def t_index(self) -> int:
        return self.n_roots + len(EXTRA_EVEN) + 1

    @cached_property
    def one(self) -> tuple[int, ...]:
        return (0,) * len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise StructureError(f"unknown variable {name!r}") from None

    def mono(self, exps: dict[str, int] | None = None, **kw: int) -> tuple[int, ...]:
        m = list(self.one)
        for name, e in {**(exps or {}), **kw}.items():
            m[self.index(name)] = e
        return tuple(m)

    def weight(self, mono: tuple[int, ...]) -> int:
        return sum(map(operator.mul, self.weights, mono))

    def admissible(self, mono: tuple[int, ...]) -> bool:
        return (
            mono[self.alpha_index] <= 1
            and mono[self.t_index] <= self.t_cap
            and self.weight(mono) <= self.degree_cap
        )

    def mono_mul(self, a: tuple[int, ...], b: tuple[int, ...]):
        m = tuple(map(operator.add, a, b))
        if m[self.alpha_index] > 1 or m[self.t_index] > self.t_cap:
            return None
        return m

    def format_mono(self, mono: tuple[int, ...]) -> str:
        parts = []
        for name, e in zip(self.names, mono):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def parse_mono(self, text: str) -> tuple[int, ...]:
        if text == "1":
            return self.one
        exps = {}
        for part in text.split("*"):
            name, _, e = part.partition("^")
            exps[name] = int(e) if e else 1
        return self.mono(exps)


def _check_registry(a, b) -> None:
    if a.registry != b.registry:
        raise StructureError(f"registry mismatch: {a.registry} vs {b.registry}")


# ---------------------------------------------------------------------------
# one-variable q-series


def _qmul(a: dict, b: dict, trunc: int) -> dict:
    out: dict[int, Fraction] = {}
    bs = sorted(b.items())
    for na, ca in a.items():
        lim = trunc - na
        for nb, cb in bs:
            if nb >= lim:
                break
            n = na + nb
            out[n] = out.get(n, 0) + ca * cb
    return {n: c for n, c in out.items() if c}


def _qadd(a: dict, b: dict, trunc: int, sign: int = 1) -> dict:
    out = {n: c for n, c in a.items() if n < trunc}
    for n, c in b.items():
        if n < trunc:
            out[n] = out.get(n, 0) + sign * c
    return {n: c for n, c in out.items() if c}


def _qpowers(tau: complex, indices) -> dict[int, complex]:
    if tau.imag <= 0:
        raise DomainError(f"Im(tau) must be positive, got {tau}")
    return {n: cmath.exp(2j * math.pi * tau * n / 8) for n in indices}


def _t_phase(n: int) -> complex:
    return cmath.exp(2j * math.pi * n / 8)


class QSeries:
    """Truncated series in ``q**(1/8)`` with exact rational coefficients."""

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict[int, object] | None = None, trunc: int = UNBOUNDED):
        clean = {}
        for n, c in (coeffs or {}).items():
            if n < 0:
                raise ValueError("negative q-exponents are not supported")
            c = _frac(c)
            if c and n < trunc:
                clean[n] = c
        self.coeffs = clean
        self.trunc = trunc

    @classmethod
    def _raw(cls, coeffs: dict, trunc: int) -> "QSeries":
        obj = cls.__new__(cls)
        obj.coeffs = coeffs
        obj.trunc = min(trunc, UNBOUNDED)
        return obj

    @classmethod
    def constant(cls, c, trunc: int = UNBOUNDED) -> "QSeries":
        return cls({0: c}, trunc)

    @classmethod
    def monomial(cls, n: int, c=1, trunc: int = UNBOUNDED) -> "QSeries":
        return cls({n: c}, trunc)

    def __getitem__(self, n: int) -> Fraction:
        if n >= self.trunc:
            raise IndexError(f"index {n} beyond truncation {self.trunc}")
        return self.coeffs.get(n, Fraction(0))

    def min_index(self) -> int:
        return min(self.coeffs) if self.coeffs else self.trunc

    def is_zero(self) -> bool:
        return not self.coeffs

    def truncate(self, trunc: int) -> "QSeries":
        t = min(trunc, self.trunc)
        return QSeries._raw({n: c for n, c in self.coeffs.items() if n < t}, t)

    def _coerce(self, other):
        if isinstance(other, QSeries):
            return other
        if _is_scalar(other):
            return QSeries.constant(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = min(self.trunc, o.trunc)
        return QSeries._raw(_qadd(self.coeffs, o.coeffs, t), t)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw({n: -c for n, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = min(self.trunc, o.trunc)
        return QSeries._raw(_qadd(self.coeffs, o.coeffs, t, -1), t)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if _is_scalar(other):
            c = _frac(other)
            return QSeries._raw({n: c * v for n, v in self.coeffs.items()} if c else {}, self.trunc)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = min(self.trunc + o.min_index(), o.trunc + self.min_index(), UNBOUNDED)
        return QSeries._raw(_qmul(self.coeffs, o.coeffs, t), t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / _frac(other))
        return self * series_inverse(other)

    def __pow__(self, k: int) -> "QSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = QSeries.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if _is_scalar(other):
            other = QSeries.constant(other, self.trunc)
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    __hash__ = None

    def first_difference(self, other: "QSeries") -> int | None:
        """Lowest index below both truncations where the coefficients differ."""
        t = min(self.trunc, other.trunc)
        bad = [n for n in set(self.coeffs) | set(other.coeffs)
               if n < t and self.coeffs.get(n, 0) != other.coeffs.get(n, 0)]
        return min(bad) if bad else None

    def inverse(self) -> "QSeries":
        a0 = self.coeffs.get(0)
        if not a0:
            raise NotInvertible("q-series without a nonzero constant term")
        inv0 = 1 / a0
        terms = sorted((n, c) for n, c in self.coeffs.items() if n)
        out = {0: inv0}
        for n in range(1, self.trunc if self.trunc < UNBOUNDED else 1):
            s = 0
            for k, ak in terms:
                if k > n:
                    break
                bk = out.get(n - k)
                if bk:
                    s += ak * bk
            if s:
                out[n] = -inv0 * s
        if self.trunc >= UNBOUNDED and terms:
            raise NotInvertible("inverse of a non-constant polynomial needs a truncation")
        return QSeries._raw(out, self.trunc)

    def exp(self) -> "QSeries":
        if self.coeffs.get(0):
            raise NotNilpotent("exp needs a zero constant term")
        if self.trunc >= UNBOUNDED and self.coeffs:
            raise NotNilpotent("exp of an untruncated q-series does not terminate")
        terms = sorted(self.coeffs.items())
        out = {0: Fraction(1)}
        for n in range(1, self.trunc if self.coeffs else 1):
            s = 0
            for k, ak in terms:
                if k > n:
                    break
                en = out.get(n - k)
                if en:
                    s += k * ak * en
            if s:
                out[n] = s / n
        return QSeries._raw(out, self.trunc)

    def evaluate(self, tau: complex) -> complex:
        tau = complex(tau)
        pw = _qpowers(tau, self.coeffs)
        return sum((float(c) * pw[n] for n, c in self.coeffs.items()), 0j)

    def t_action(self):
        return series_t_action(self)

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"({c})*q^({Fraction(n, 8)})" for n, c in sorted(self.coeffs.items()))
        tail = "" if self.trunc >= UNBOUNDED else f" + O(q^({Fraction(self.trunc, 8)}))"
        return f"QSeries({body}{tail})"


# ---------------------------------------------------------------------------
# graded polynomials


def _nilpotent_power_sum(f, one, coeff):
    """sum_k coeff(k) f^k, stopping at the first vanishing power."""
    result = one * coeff(0)
    term = one
    k = 0
    while True:
        k += 1
        term = term * f
        # q-valued powers can keep a growing truncation; stop once past the result's
        if term.is_zero():
            return result
        if not isinstance(term, FormPoly) and term.min_index() >= result.trunc:
            return result
        c = coeff(k)
        if c:
            result = result + term * c


class FormPoly:
    """Truncated graded-commutative polynomial over a :class:`Registry`."""

    __slots__ = ("registry", "terms")

    def __init__(self, registry: Registry, terms: dict | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            if isinstance(m, str):
                m = registry.parse_mono(m)
            if len(m) != len(registry.names):
                raise StructureError("monomial length does not match registry")
            c = _frac(c)
            if c and registry.admissible(m):
                clean[m] = clean.get(m, 0) + c
        self.registry = registry
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def _raw(cls, registry: Registry, terms: dict) -> "FormPoly":
        obj = cls.__new__(cls)
        obj.registry = registry
        obj.terms = terms
        return obj

    @classmethod
    def constant(cls, registry: Registry, c=1) -> "FormPoly":
        return cls(registry, {registry.one: c})

    @classmethod
    def var(cls, registry: Registry, name: str, c=1) -> "FormPoly":
        return cls(registry, {registry.mono({name: 1}): c})

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> Fraction:
        return self.terms.get(self.registry.one, Fraction(0))

    def coefficient(self, mono) -> Fraction:
        if isinstance(mono, str):
            mono = self.registry.parse_mono(mono)
        elif isinstance(mono, dict):
            mono = self.registry.mono(mono)
        return self.terms.get(mono, Fraction(0))

    def weights(self) -> set[int]:
        return {self.registry.weight(m) for m in self.terms}

    def _coerce(self, other):
        if isinstance(other, FormPoly):
            _check_registry(self, other)
            return other
        if _is_scalar(other):
            return FormPoly.constant(self.registry, other)
        return None

    def __add__(self, other):
        if isinstance(other, (QSeries, FormQSeries)):
            return FormQSeries.from_poly(self) + other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return FormPoly._raw(self.registry, {m: c for m, c in out.items() if c})

    __radd__ = __add__

    def __neg__(self):
        return FormPoly._raw(self.registry, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (QSeries, FormQSeries)):
            return FormQSeries.from_poly(self) - other
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        if isinstance(other, QSeries):
            return other - FormQSeries.from_poly(self)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (QSeries, FormQSeries)):
            return FormQSeries.from_poly(self) * other
        if _is_scalar(other):
            c = _frac(other)
            return FormPoly._raw(self.registry, {m: c * v for m, v in self.terms.items()} if c else {})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        reg = self.registry
        cap = reg.degree_cap
        bl = [(mb, reg.weight(mb), cb) for mb, cb in o.terms.items()]
        out: dict = {}
        for ma, ca in self.terms.items():
            wa = reg.weight(ma)
            for mb, wb, cb in bl:
                if wa + wb > cap:
                    continue
                m = reg.mono_mul(ma, mb)
                if m is not None:
                    out[m] = out.get(m, 0) + ca * cb
        return FormPoly._raw(reg, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / _frac(other))
        return self * series_inverse(other)

    def __pow__(self, k: int) -> "FormPoly":
        if k < 0:
            return self.inverse() ** (-k)
        result = FormPoly.constant(self.registry, 1)
        for _ in range(k):
            result = result * self
            if result.is_zero():
                break
        return result

    def __eq__(self, other):
        if _is_scalar(other):
            other = FormPoly.constant(self.registry, other)
        if not isinstance(other, FormPoly):
            return NotImplemented
        return self.registry == other.registry and self.terms == other.terms

    __hash__ = None

    def component(self, w: int) -> "FormPoly":
        reg = self.registry
        return FormPoly._raw(reg, {m: c for m, c in self.terms.items() if reg.weight(m) == w})

    def inverse(self) -> "FormPoly":
        c0 = self.constant_term()
        if not c0:
            raise NotInvertible("form without a weight-0 unit part")
        g = self * (1 / c0) - 1
        if any(self.registry.weight(m) == 0 for m in g.terms):
            raise NotInvertible("weight-0 part must be a constant (t-dependent units are not supported)")
        one = FormPoly.constant(self.registry, 1)
        return _nilpotent_power_sum(-g, one, lambda k: 1) * (1 / c0)

    def exp(self) -> "FormPoly":
        if any(self.registry.weight(m) == 0 for m in self.terms):
            raise NotNilpotent("exp argument has a weight-0 part")
        one = FormPoly.constant(self.registry, 1)
        return _nilpotent_power_sum(self, one, lambda k: Fraction(1, math.factorial(k)))

    def integrate_t(self) -> "FormPoly":
        ti = self.registry.t_index
        out: dict = {}
        for m, c in self.terms.items():
            e = m[ti]
            mm = m[:ti] + (0,) + m[ti + 1:]
            out[mm] = out.get(mm, 0) + c / (e + 1)
        return FormPoly._raw(self.registry, {m: c for m, c in out.items() if c})

    def diff(self, name: str) -> "FormPoly":
        i = self.registry.index(name)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                out[m[:i] + (m[i] - 1,) + m[i + 1:]] = c * m[i]
        return FormPoly._raw(self.registry, out)

    def recap(self, registry: Registry) -> "FormPoly":
        """Re-home into a registry with the same variables and a smaller cap."""
        if registry.names != self.registry.names:
            raise StructureError("variable layouts differ")
        return FormPoly(registry, self.terms)

    def to_json(self) -> dict[str, str]:
        fmt = self.registry.format_mono
        return {fmt(m): str(c) for m, c in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, registry: Registry, data: dict[str, str]) -> "FormPoly":
        return cls(registry, {registry.parse_mono(k): Fraction(v) for k, v in data.items()})

    def __repr__(self):
        if not self.terms:
            return "FormPoly(0)"
        fmt = self.registry.format_mono
        return "FormPoly(" + " + ".join(f"({c})*{fmt(m)}" for m, c in sorted(self.terms.items())) + ")"


# ---------------------------------------------------------------------------
# form-valued q-series


class FormQSeries:
    """A q-series whose coefficients are :class:`FormPoly` values.

    ``cells`` maps a monomial to a ``{q-index: Fraction}`` dict; one
    q-truncation ``trunc`` is shared by all monomials.
    """

    __slots__ = ("registry", "cells", "trunc")

    def __init__(self, registry: Registry, cells: dict | None = None, trunc: int = UNBOUNDED):
        clean = {}
        for m, q in (cells or {}).items():
            if isinstance(m, str):
                m = registry.parse_mono(m)
            if not registry.admissible(m):
                continue
            if isinstance(q, QSeries):
                q = q.coeffs
            qq = QSeries(q, trunc).coeffs
            if qq:
                clean[m] = qq
        self.registry = registry
        self.cells = clean
        self.trunc = trunc

    @classmethod
    def _raw(cls, registry: Registry, cells: dict, trunc: int) -> "FormQSeries":
        obj = cls.__new__(cls)
        obj.registry = registry
        obj.cells = cells
        obj.trunc = min(trunc, UNBOUNDED)
        return obj

    @classmethod
    def from_poly(cls, p: FormPoly, trunc: int = UNBOUNDED) -> "FormQSeries":
        return cls._raw(p.registry, {m: {0: c} for m, c in p.terms.items()}, trunc)

    @classmethod
    def from_qseries(cls, registry: Registry, f: QSeries) -> "FormQSeries":
        cells = {registry.one: dict(f.coeffs)} if f.coeffs else {}
        return cls._raw(registry, cells, f.trunc)

    @classmethod
    def constant(cls, registry: Registry, c=1, trunc: int = UNBOUNDED) -> "FormQSeries":
        return cls.from_poly(FormPoly.constant(registry, c), trunc)

    def is_zero(self) -> bool:
        return not self.cells

    def min_index(self) -> int:
        return min((min(q) for q in self.cells.values()), default=self.trunc)

    def monomials(self) -> list[tuple[int, ...]]:
        return sorted(self.cells)

    def coefficient(self, mono) -> QSeries:
        if isinstance(mono, str):
            mono = self.registry.parse_mono(mono)
        elif isinstance(mono, dict):
            mono = self.registry.mono(mono)
        return QSeries._raw(dict(self.cells.get(mono, {})), self.trunc)

    def q_coefficient(self, n: int) -> FormPoly:
        """The form multiplying ``q**(n/8)``."""
        if n >= self.trunc:
            raise IndexError(f"index {n} beyond truncation {self.trunc}")
        return FormPoly._raw(self.registry, {m: q[n] for m, q in self.cells.items() if n in q})

    def truncate(self, trunc: int) -> "FormQSeries":
        t = min(trunc, self.trunc)
        cells = {}
        for m, q in self.cells.items():
            qq = {n: c for n, c in q.items() if n < t}
            if qq:
                cells[m] = qq
        return FormQSeries._raw(self.registry, cells, t)

    def recap(self, registry: Registry) -> "FormQSeries":
        if registry.names != self.registry.names:
            raise StructureError("variable layouts differ")
        cells = {m: dict(q) for m, q in self.cells.items() if registry.admissible(m)}
        return FormQSeries._raw(registry, cells, self.trunc)

    def _coerce(self, other):
        if isinstance(other, FormQSeries):
            _check_registry(self, other)
            return other
        if isinstance(other, FormPoly):
            _check_registry(self, other)
            return FormQSeries.from_poly(other)
        if isinstance(other, QSeries):
            return FormQSeries.from_qseries(self.registry, other)
        if _is_scalar(other):
            return FormQSeries.constant(self.registry, other)
        return None

    def _add(self, o: "FormQSeries", sign: int) -> "FormQSeries":
        t = min(self.trunc, o.trunc)
        cells = {}
        for m in set(self.cells) | set(o.cells):
            q = _qadd(self.cells.get(m, {}), o.cells.get(m, {}), t, sign)
            if q:
                cells[m] = q
        return FormQSeries._raw(self.registry, cells, t)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._add(o, 1)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._add(o, -1)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o._add(self, -1)

    def __neg__(self):
        return self * -1

    def __mul__(self, other):
        if _is_scalar(other):
            c = _frac(other)
            if not c:
                return FormQSeries._raw(self.registry, {}, self.trunc)
            return FormQSeries._raw(
                self.registry, {m: {n: c * v for n, v in q.items()} for m, q in self.cells.items()}, self.trunc
            )
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        reg = self.registry
        cap = reg.degree_cap
        trunc = min(self.trunc + o.min_index(), o.trunc + self.min_index(), UNBOUNDED)
        bl = [(mb, reg.weight(mb), sorted(qb.items())) for mb, qb in o.cells.items()]
        out: dict = {}
        for ma, qa in self.cells.items():
            wa = reg.weight(ma)
            qa_items = list(qa.items())
            for mb, wb, qb in bl:
                if wa + wb > cap:
                    continue
                m = reg.mono_mul(ma, mb)
                if m is None:
                    continue
                acc = out.get(m)
                if acc is None:
                    acc = out[m] = {}
                for na, ca in qa_items:
                    lim = trunc - na
                    for nb, cb in qb:
                        if nb >= lim:
                            break
                        n = na + nb
                        acc[n] = acc.get(n, 0) + ca * cb
        cells = {}
        for m, q in out.items():
            q = {n: c for n, c in q.items() if c}
            if q:
                cells[m] = q
        return FormQSeries._raw(reg, cells, trunc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / _frac(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, k: int) -> "FormQSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = FormQSeries.constant(self.registry, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, FormQSeries):
            return NotImplemented
        return self.registry == other.registry and self.trunc == other.trunc and self.cells == other.cells

    __hash__ = None

    def first_difference(self, other) -> int | None:
        """Lowest q-index (below both truncations) where any monomial differs."""
        o = self._coerce(other)
        t = min(self.trunc, o.trunc)
        best = None
        for m in set(self.cells) | set(o.cells):
            a, b = self.cells.get(m, {}), o.cells.get(m, {})
            for n in set(a) | set(b):
                if n < t and a.get(n, 0) != b.get(n, 0) and (best is None or n < best):
                    best = n
        return best

    def _unit_split(self):
        one = self.registry.one
        c0 = self.cells.get(one, {}).get(0, Fraction(0))
        return c0

    def inverse(self) -> "FormQSeries":
        c0 = self._unit_split()
        if not c0:
            raise NotInvertible("(q^0, weight-0) coefficient is zero")
        g = self * (1 / c0) - 1
        reg = self.registry
        if any(reg.weight(m) == 0 and 0 in q for m, q in g.cells.items()):
            raise NotInvertible("t-dependent unit parts are not supported")
        if self.trunc >= UNBOUNDED and any(n for q in g.cells.values() for n in q):
            raise NotInvertible("inverse of a q-polynomial needs a truncation")
        one = FormQSeries.constant(reg, 1)
        return (_nilpotent_power_sum(-g, one, lambda k: 1) * (1 / c0)).truncate(self.trunc)

    def exp(self) -> "FormQSeries":
        reg = self.registry
        if any(reg.weight(m) == 0 and 0 in q for m, q in self.cells.items()):
            raise NotNilpotent("exp argument has a nonzero unit part")
        if self.trunc >= UNBOUNDED and any(n for q in self.cells.values() for n in q):
            raise NotNilpotent("exp of an untruncated q-series does not terminate")
        one = FormQSeries.constant(reg, 1)
        return _nilpotent_power_sum(self, one, lambda k: Fraction(1, math.factorial(k))).truncate(self.trunc)

    def log(self) -> "FormQSeries":
        """log of a series with unit part exactly 1."""
        if self._unit_split() != 1:
            raise NotInvertible("log needs unit part 1")
        g = self - 1
        one = FormQSeries.constant(self.registry, 1)
        return _nilpotent_power_sum(g, one, lambda k: Fraction((-1) ** (k + 1), k) if k else 0).truncate(self.trunc)

    def component(self, w: int) -> "FormQSeries":
        reg = self.registry
        cells = {m: dict(q) for m, q in self.cells.items() if reg.weight(m) == w}
        return FormQSeries._raw(reg, cells, self.trunc)

    def integrate_t(self) -> "FormQSeries":
        ti = self.registry.t_index
        out: dict = {}
        for m, q in self.cells.items():
            e = m[ti]
            mm = m[:ti] + (0,) + m[ti + 1:]
            acc = out.setdefault(mm, {})
            for n, c in q.items():
                acc[n] = acc.get(n, 0) + c / (e + 1)
        cells = {}
        for m, q in out.items():
            q = {n: c for n, c in q.items() if c}
            if q:
                cells[m] = q
        return FormQSeries._raw(self.registry, cells, self.trunc)

    def diff(self, name: str) -> "FormQSeries":
        i = self.registry.index(name)
        cells = {}
        for m, q in self.cells.items():
            e = m[i]
            if e:
                cells[m[:i] + (e - 1,) + m[i + 1:]] = {n: c * e for n, c in q.items()}
        return FormQSeries._raw(self.registry, cells, self.trunc)

    def evaluate(self, tau: complex) -> dict[tuple[int, ...], complex]:
        tau = complex(tau)
        pw = _qpowers(tau, {n for q in self.cells.values() for n in q})
        return {m: sum((float(c) * pw[n] for n, c in q.items()), 0j) for m, q in self.cells.items()}

    def t_action(self):
        return series_t_action(self)

    def __repr__(self):
        fmt = self.registry.format_mono
        body = "; ".join(f"{fmt(m)}: {QSeries._raw(q, self.trunc)!r}" for m, q in sorted(self.cells.items()))
        return f"FormQSeries({body or '0'})"


# ---------------------------------------------------------------------------
# numeric-only image of tau -> tau + 1 off the half-integer grid


@dataclass(frozen=True)
class PhasedSeries:
    """Series with complex coefficients; produced by ``series_t_action`` when a
    stored index is not a multiple of 4 and the result is no longer rational."""

    cells: dict
    trunc: int

    def evaluate(self, tau: complex):
        tau = complex(tau)
        pw = _qpowers(tau, {n for q in self.cells.values() for n in q})
        vals = {m: sum((c * pw[n] for n, c in q.items()), 0j) for m, q in self.cells.items()}
        return vals[None] if set(vals) == {None} else vals


# ---------------------------------------------------------------------------
# functional interface

Series = Union[QSeries, FormPoly, FormQSeries]


def series_arith(op: str, a, b=None):
    """Apply ``op`` in {add, sub, mul, neg, scalar_mul} to exact series."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "scalar_mul":
        if not _is_scalar(b):
            raise TypeError("scalar_mul needs a rational scalar")
        return a * b
    raise ValueError(f"unknown op {op!r}")


def series_inverse(f):
    if _is_scalar(f):
        if not f:
            raise NotInvertible("zero")
        return 1 / _frac(f)
    return f.inverse()


def series_exp(f):
    return f.exp()


def series_component(f, w: int):
    return f.component(w)


def series_integrate_t(f):
    return f.integrate_t()


def series_eval_numeric(f, tau: complex):
    """Numeric value at ``tau``; ``q**(n/8)`` means ``exp(2*pi*i*tau*n/8)``."""
    return f.evaluate(tau)


def tail_bound(f, tau: complex) -> float:
    """Geometric estimate of the neglected tail at ``tau``.

    ``max|c| * r**trunc / (1 - r)`` with ``r = |exp(2*pi*i*tau/8)|``.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError(f"Im(tau) must be positive, got {tau}")
    if f.trunc >= UNBOUNDED:
        return 0.0
    r = math.exp(-2 * math.pi * tau.imag / 8)
    if isinstance(f, QSeries):
        cs = f.coeffs.values()
    else:
        cs = [c for q in f.cells.values() for c in q.values()]
    big = max((abs(float(c)) for c in cs), default=0.0)
    return big * r ** f.trunc / (1 - r)


def series_t_action(f):
    """Image under ``tau -> tau + 1``: index ``n`` picks up ``exp(2*pi*i*n/8)``.

    Exact (a QSeries / FormQSeries) when every index is a multiple of 4;
    otherwise a :class:`PhasedSeries` for numeric use.
    """
    if isinstance(f, QSeries):
        if all(n % 4 == 0 for n in f.coeffs):
            return QSeries._raw({n: (-c if n % 8 else c) for n, c in f.coeffs.items()}, f.trunc)
        return PhasedSeries({None: {n: complex(c) * _t_phase(n) for n, c in f.coeffs.items()}}, f.trunc)
    if isinstance(f, FormPoly):
        return f
    if all(n % 4 == 0 for q in f.cells.values() for n in q):
        cells = {m: {n: (-c if n % 8 else c) for n, c in q.items()} for m, q in f.cells.items()}
        return FormQSeries._raw(f.registry, cells, f.trunc)
    return PhasedSeries(
        {m: {n: complex(c) * _t_phase(n) for n, c in q.items()} for m, q in f.cells.items()}, f.trunc
    )
