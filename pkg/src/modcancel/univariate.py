"""Taylor coefficients of the scalar functions the engine substitutes into forms.

Series are plain lists of ``Fraction`` indexed by power, truncated to a fixed
length ``n`` (coefficients of ``y**0 .. y**(n-1)``).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial


def mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, ai in enumerate(a[:n]):
        if ai:
            for j, bj in enumerate(b[: n - i]):
                out[i + j] += ai * bj
    return out


def inverse(a: list[Fraction], n: int) -> list[Fraction]:
    if not a or a[0] == 0:
        raise ZeroDivisionError("series with zero constant term")
    inv0 = 1 / Fraction(a[0])
    out = [inv0] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        s = sum((a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        out[k] = -inv0 * s
    return out


def log(a: list[Fraction], n: int) -> list[Fraction]:
    """log of a series with constant term 1, via log(f)' = f'/f."""
    if a[0] != 1:
        raise ValueError("log needs constant term 1")
    a = (list(a) + [Fraction(0)] * n)[:n]
    da = [k * a[k] for k in range(1, n)] + [Fraction(0)]
    q = mul(da, inverse(a, n), n)
    return [Fraction(0)] + [q[k - 1] / k for k in range(1, n)]


def exp(a: list[Fraction], n: int) -> list[Fraction]:
    if a and a[0] != 0:
        raise ValueError("exp needs zero constant term")
    a = (list(a) + [Fraction(0)] * n)[:n]
    out = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        out[k] = sum((j * a[j] * out[k - j] for j in range(1, k + 1)), Fraction(0)) / k
    return out


def rescale(a: list[Fraction], c) -> list[Fraction]:
    """Coefficients of f(c*y) given those of f(y)."""
    c = Fraction(c)
    return [ak * c**k for k, ak in enumerate(a)]


def cosh(n: int) -> list[Fraction]:
    return [Fraction(1, factorial(k)) if k % 2 == 0 else Fraction(0) for k in range(n)]


def sinh(n: int) -> list[Fraction]:
    return [Fraction(1, factorial(k)) if k % 2 == 1 else Fraction(0) for k in range(n)]


def sinhc(n: int) -> list[Fraction]:
    """sinh(y)/y."""
    return [Fraction(1, factorial(k + 1)) if k % 2 == 0 else Fraction(0) for k in range(n)]


def ahat_factor(n: int) -> list[Fraction]:
    """(x/2)/sinh(x/2) in powers of x."""
    return rescale(inverse(sinhc(n), n), Fraction(1, 2))


def lhat_factor(n: int) -> list[Fraction]:
    """x/tanh(x/2) = 2 * y cosh(y)/sinh(y) at y = x/2."""
    y_coth = mul(cosh(n), inverse(sinhc(n), n), n)
    return [2 * c for c in rescale(y_coth, Fraction(1, 2))]


def cosh_half(n: int) -> list[Fraction]:
    """cosh(x/2)."""
    return rescale(cosh(n), Fraction(1, 2))
