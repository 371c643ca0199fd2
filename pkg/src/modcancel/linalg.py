"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction


def solve(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Solve ``rows @ x = rhs`` exactly.

    Returns ``(x, consistent, free)`` where free unknowns are set to 0 and
    ``free`` lists their column indices.  ``x`` is ``None`` when inconsistent.
    """
    n = len(rows[0]) if rows else 0
    m = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    if any(row[n] for row in m[r:]):
        return None, False, [c for c in range(n) if c not in pivots]
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = m[i][n]
    return x, True, [c for c in range(n) if c not in pivots]
