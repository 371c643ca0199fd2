"""Jacobi theta functions as exact q-series, plus a literal numeric backend.

Conventions: ``q = exp(2*pi*i*tau)`` and every q-series lives on the
``q**(1/8)`` grid of :mod:`modcancel.series`.  Two-variable blocks use the
substitution ``v = x / (2*pi*i)`` so that ``exp(2*pi*i*v) = exp(x)`` and all
coefficients are rational.  ``theta'(0, tau)`` is stored divided by ``pi``.
"""

from __future__ import annotations

import cmath
import contextlib
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from . import univariate as uv
from .errors import DomainError, NotNilpotent, ZeroFunction
from .series import UNBOUNDED, FormPoly, FormQSeries, QSeries


class ThetaKind(Enum):
    TH = "theta"
    TH1 = "theta1"
    TH2 = "theta2"
    TH3 = "theta3"


# test hook: named corruptions applied to otherwise exact outputs
_FAULTS: set[str] = set()


@contextlib.contextmanager
def inject_fault(name: str):
    """Temporarily corrupt one exact object (``"delta2"`` flips a coefficient)."""
    _FAULTS.add(name)
    try:
        yield
    finally:
        _FAULTS.discard(name)


def _nfactors(n8: int) -> int:
    return n8 // 8 + 1


def _factor(index: int, sign: int, n8: int) -> QSeries:
    """``1 + sign * q**(index/8)``."""
    return QSeries({0: 1, index: sign}, n8)


def _euler(n8: int) -> QSeries:
    """prod (1 - q^n)."""
    out = QSeries.constant(1, n8)
    for n in range(1, _nfactors(n8) + 1):
        out = out * _factor(8 * n, -1, n8)
    return out


def theta_null(kind: ThetaKind, n8: int) -> QSeries:
    """``theta_k(0, tau)`` truncated below index ``n8``."""
    if kind is ThetaKind.TH:
        raise ZeroFunction("theta(0, tau) vanishes identically; use theta_prime_null")
    out = _euler(n8)
    for n in range(1, _nfactors(n8) + 1):
        if kind is ThetaKind.TH1:
            f = _factor(8 * n, 1, n8)
            out = out * f * f
        else:
            f = _factor(8 * n - 4, -1 if kind is ThetaKind.TH2 else 1, n8)
            out = out * f * f
    if kind is ThetaKind.TH1:
        out = out * QSeries({1: 2})
        out = out.truncate(n8)
    return out


def theta_prime_null(n8: int) -> QSeries:
    """``theta'(0, tau) / pi = 2 q^(1/8) prod (1 - q^n)^3``."""
    e = _euler(n8)
    return (QSeries({1: 2}) * e * e * e).truncate(n8)


def jacobi_check(n8: int, nulls: dict[ThetaKind, QSeries] | None = None) -> bool:
    """Exact test of ``theta'(0) = pi * theta1(0) theta2(0) theta3(0)`` below ``n8``.

    ``nulls`` may override individual theta-nulls (used for mutation tests).
    """
    nulls = dict(nulls or {})
    t = [nulls.get(k) or theta_null(k, n8) for k in (ThetaKind.TH1, ThetaKind.TH2, ThetaKind.TH3)]
    rhs = (t[0] * t[1] * t[2]).truncate(n8)
    lhs = theta_prime_null(n8)
    return rhs.trunc == lhs.trunc == n8 and lhs.first_difference(rhs) is None


def _sigma(n: int, power: int) -> int:
    return sum(m**power for m in range(1, n + 1) if n % m == 0)


def eisenstein_e2(n8: int) -> QSeries:
    """``E2 = 1 - 24 sum sigma_1(n) q^n`` below index ``n8``."""
    coeffs = {0: 1}
    for n in range(1, (n8 - 1) // 8 + 1):
        coeffs[8 * n] = -24 * _sigma(n, 1)
    return QSeries(coeffs, n8)


@dataclass(frozen=True)
class ModularPair:
    delta: QSeries
    epsilon: QSeries
    group: str
    weights: tuple[int, int] = (2, 4)


GROUPS = {1: "Gamma0(2)", 2: "Gamma^0(2)", 3: "Gamma_theta"}


@lru_cache(maxsize=32)
def _fourth_powers(n8: int) -> tuple[QSeries, QSeries, QSeries]:
    return tuple(theta_null(k, n8) ** 4 for k in (ThetaKind.TH1, ThetaKind.TH2, ThetaKind.TH3))


def delta_eps(i: int, n8: int) -> ModularPair:
    """The level-2 pair ``(delta_i, eps_i)`` of weights 2 and 4."""
    t1, t2, t3 = _fourth_powers(n8)
    if i == 1:
        d, e = (t2 + t3) * Fraction(1, 8), t2 * t3 * Fraction(1, 16)
    elif i == 2:
        d, e = -(t1 + t3) * Fraction(1, 8), t1 * t3 * Fraction(1, 16)
    elif i == 3:
        d, e = (t1 - t2) * Fraction(1, 8), -(t1 * t2) * Fraction(1, 16)
    else:
        raise ValueError(f"delta/eps index must be 1, 2 or 3, got {i}")
    d, e = d.truncate(n8), e.truncate(n8)
    if i == 2 and "delta2" in _FAULTS:
        d = d + QSeries.monomial(4, 1, n8)
    return ModularPair(d, e, GROUPS[i])


# ---------------------------------------------------------------------------
# two-variable blocks


@lru_cache(maxsize=None)
def _log_coefficients(kind: ThetaKind, kmax: int, n8: int) -> tuple[QSeries, ...]:
    """``l_k`` for ``k = 0..kmax`` with ``log B_kind(x) = sum_k l_k x^(2k)``."""
    n = 2 * kmax + 1
    if kind is ThetaKind.TH:
        head = uv.log(uv.ahat_factor(n), n)
    elif kind is ThetaKind.TH1:
        head = uv.log(uv.cosh_half(n), n)
    else:
        head = [Fraction(0)] * n
    out = []
    for k in range(kmax + 1):
        coeffs: dict[int, Fraction] = {0: head[2 * k]}
        if k:
            fact = math.factorial(2 * k)
            if kind in (ThetaKind.TH, ThetaKind.TH1):
                for big_n in range(1, (n8 - 1) // 8 + 1):
                    s = 0
                    for m in range(1, big_n + 1):
                        if big_n % m == 0:
                            sign = 1 if kind is ThetaKind.TH or m % 2 else -1
                            s += sign * m ** (2 * k - 1)
                    coeffs[8 * big_n] = Fraction(2 * s, fact)
            else:
                for h in range(1, (n8 - 1) // 4 + 1):
                    s = 0
                    for m in range(1, h + 1):
                        if h % m == 0 and (h // m) % 2:
                            sign = -1 if kind is ThetaKind.TH2 else (1 if m % 2 else -1)
                            s += sign * m ** (2 * k - 1)
                    coeffs[4 * h] = Fraction(2 * s, fact)
        out.append(QSeries(coeffs, n8))
    return tuple(out)


def _check_arg(arg: FormPoly) -> None:
    reg = arg.registry
    if any(reg.weight(m) == 0 for m in arg.terms):
        raise NotNilpotent("theta block argument has a weight-0 part")


def _powers(arg: FormPoly, top: int) -> list[FormPoly]:
    out = [FormPoly.constant(arg.registry, 1)]
    for _ in range(top):
        out.append(out[-1] * arg)
    return out


def _kmax(arg: FormPoly) -> int:
    w = min(arg.weights(), default=2)
    return max(arg.registry.degree_cap // (2 * w), 0)


def log_theta_block(kind: ThetaKind, arg: FormPoly, n8: int) -> FormQSeries:
    """``log B_kind(arg)`` as a form-valued q-series."""
    _check_arg(arg)
    reg = arg.registry
    if arg.is_zero():
        return FormQSeries._raw(reg, {}, n8)
    kmax = _kmax(arg)
    ls = _log_coefficients(kind, kmax, n8)
    pw = _powers(arg, 2 * kmax)
    out = FormQSeries._raw(reg, {}, n8)
    for k in range(1, kmax + 1):
        out = out + FormQSeries.from_poly(pw[2 * k]) * ls[k]
    return out


def theta_block(kind: ThetaKind, arg: FormPoly, n8: int) -> FormQSeries:
    """Normalized two-variable block ``B_kind(arg)``.

    ``B(x) = x theta'(0)/theta(x)`` for ``TH`` and ``theta_k(x)/theta_k(0)``
    otherwise, under ``v = x/(2 pi i)``.  Built from divisor-sum expansions of
    ``log B``; the bundle-calculus builders in :mod:`modcancel.charforms`
    reach the same series through the product formulas instead.
    """
    return log_theta_block(kind, arg, n8).exp()


def theta_log_block(kind: ThetaKind, arg: FormPoly, n8: int) -> FormQSeries:
    """``l_kind(arg)``, the derivative of ``log B_kind`` in its argument."""
    if kind is ThetaKind.TH:
        raise ValueError("log blocks are defined for TH1, TH2, TH3")
    _check_arg(arg)
    reg = arg.registry
    if arg.is_zero():
        return FormQSeries._raw(reg, {}, n8)
    kmax = _kmax(arg) + 1
    ls = _log_coefficients(kind, kmax, n8)
    pw = _powers(arg, 2 * kmax)
    out = FormQSeries._raw(reg, {}, n8)
    for k in range(1, kmax + 1):
        out = out + FormQSeries.from_poly(pw[2 * k - 1]) * (ls[k] * (2 * k))
    return out


# ---------------------------------------------------------------------------
# numeric backend


def _check_tau(tau: complex) -> complex:
    tau = complex(tau)
    if tau.imag <= 0:
        raise DomainError(f"Im(tau) must be positive, got {tau}")
    return tau


def numeric_theta(kind: ThetaKind, v: complex, tau: complex, nmax: int = 60) -> complex:
    """Literal product definition at ``(v, tau)`` with ``nmax`` factors."""
    tau = _check_tau(tau)
    pi = math.pi
    e = cmath.exp(2j * pi * v)
    ei = 1 / e
    q = cmath.exp(2j * pi * tau)
    out = 1 + 0j
    for j in range(1, nmax + 1):
        qj = q**j
        qh = cmath.exp(2j * pi * tau * (j - 0.5))
        if kind is ThetaKind.TH:
            out *= (1 - qj) * (1 - e * qj) * (1 - ei * qj)
        elif kind is ThetaKind.TH1:
            out *= (1 - qj) * (1 + e * qj) * (1 + ei * qj)
        elif kind is ThetaKind.TH2:
            out *= (1 - qj) * (1 - e * qh) * (1 - ei * qh)
        else:
            out *= (1 - qj) * (1 + e * qh) * (1 + ei * qh)
    q8 = cmath.exp(2j * pi * tau / 8)
    if kind is ThetaKind.TH:
        out *= 2 * q8 * cmath.sin(pi * v)
    elif kind is ThetaKind.TH1:
        out *= 2 * q8 * cmath.cos(pi * v)
    return out


def numeric_theta_prime(kind: ThetaKind, v: complex, tau: complex, h: float = 1e-5, nmax: int = 60) -> complex:
    """Central finite difference in ``v``."""
    return (numeric_theta(kind, v + h, tau, nmax) - numeric_theta(kind, v - h, tau, nmax)) / (2 * h)


def numeric_log_derivative(kind: ThetaKind, v: complex, tau: complex, nmax: int = 60) -> complex:
    """``d/dv log theta_kind(v, tau)`` from the logarithmic derivative of the product."""
    tau = _check_tau(tau)
    pi = math.pi
    tpi = 2j * pi
    e = cmath.exp(tpi * v)
    ei = 1 / e
    q = cmath.exp(tpi * tau)
    if kind is ThetaKind.TH:
        out = pi * cmath.cos(pi * v) / cmath.sin(pi * v)
    elif kind is ThetaKind.TH1:
        out = -pi * cmath.sin(pi * v) / cmath.cos(pi * v)
    else:
        out = 0j
    sign = -1 if kind in (ThetaKind.TH, ThetaKind.TH2) else 1
    for j in range(1, nmax + 1):
        y = q**j if kind in (ThetaKind.TH, ThetaKind.TH1) else cmath.exp(tpi * tau * (j - 0.5))
        out += tpi * (sign * e * y / (1 + sign * e * y) - sign * ei * y / (1 + sign * ei * y))
    return out


def numeric_theta_prime_null(tau: complex, nmax: int = 60) -> complex:
    """``theta'(0, tau) = 2 pi q^(1/8) prod (1 - q^n)^3``."""
    tau = _check_tau(tau)
    q = cmath.exp(2j * math.pi * tau)
    out = 2 * math.pi * cmath.exp(2j * math.pi * tau / 8)
    for j in range(1, nmax + 1):
        out *= (1 - q**j) ** 3
    return out


def numeric_e2(tau: complex, nmax: int = 200) -> complex:
    tau = _check_tau(tau)
    q = cmath.exp(2j * math.pi * tau)
    return 1 - 24 * sum(_sigma(n, 1) * q**n for n in range(1, nmax + 1))


def numeric_delta_eps(i: int, tau: complex, nmax: int = 60) -> tuple[complex, complex]:
    t1, t2, t3 = (numeric_theta(k, 0, tau, nmax) ** 4 for k in (ThetaKind.TH1, ThetaKind.TH2, ThetaKind.TH3))
    if i == 1:
        return (t2 + t3) / 8, t2 * t3 / 16
    if i == 2:
        return -(t1 + t3) / 8, t1 * t3 / 16
    if i == 3:
        return (t1 - t2) / 8, -t1 * t2 / 16
    raise ValueError(f"delta/eps index must be 1, 2 or 3, got {i}")


__all__ = [
    "ThetaKind",
    "ModularPair",
    "GROUPS",
    "UNBOUNDED",
    "theta_null",
    "theta_prime_null",
    "jacobi_check",
    "eisenstein_e2",
    "delta_eps",
    "theta_block",
    "log_theta_block",
    "theta_log_block",
    "numeric_theta",
    "numeric_theta_prime",
    "numeric_log_derivative",
    "numeric_theta_prime_null",
    "numeric_e2",
    "numeric_delta_eps",
    "inject_fault",
]
