"""Characteristic forms at the level of formal Chern roots.

Normalization: the engine variable for a Chern root is ``x`` with
``ch = e^x + e^-x`` for each root pair, ``p1(TM) = sum x_j^2``,
``p1(xi) = u^2`` and ``Ahat = prod (x_j/2)/sinh(x_j/2)``.

Two independent routes produce the q-deformed forms:

* :func:`bundle_form` multiplies Chern characters of exterior and symmetric
  powers via their generating functions (products over ``1 +- y e^w``);
* :func:`q_form` exponentiates sums of theta log-blocks
  (:func:`modcancel.theta.log_theta_block`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import univariate as uv
from .errors import CapError, NoSolution, SpecError
from .linalg import solve
from .series import FormPoly, FormQSeries, QSeries, Registry
from .theta import ThetaKind, eisenstein_e2, log_theta_block, theta_log_block


@dataclass(frozen=True)
class GeometrySpec:
    """Input data: dimension ``4d``, exponent vectors ``a`` and ``b`` of
    length ``k``, whether the auxiliary rank-2 bundle is present, and the
    q-truncation index ``n8`` (eighth powers of q)."""

    d: int
    k: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    has_eta: bool = False
    n8: int = 64
    registry: Registry = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "b", tuple(int(v) for v in self.b))
        if self.d < 1 or self.k < 1:
            raise SpecError("d and k must be positive")
        if len(self.a) != self.k or len(self.b) != self.k:
            raise SpecError(f"a and b must have length k={self.k}")
        if self.n8 < 1:
            raise SpecError("n8 must be positive")
        if self.registry is None:
            object.__setattr__(self, "registry", Registry.for_dim(self.d))

    def with_eta(self, flag: bool = True) -> "GeometrySpec":
        return GeometrySpec(self.d, self.k, self.a, self.b, flag, self.n8, self.registry)

    def with_n8(self, n8: int) -> "GeometrySpec":
        return GeometrySpec(self.d, self.k, self.a, self.b, self.has_eta, n8, self.registry)


def substitute(coeffs: list[Fraction], arg: FormPoly) -> FormPoly:
    """``sum_n coeffs[n] * arg**n`` for a nilpotent ``arg``."""
    reg = arg.registry
    out = FormPoly.constant(reg, coeffs[0] if coeffs else 0)
    power = FormPoly.constant(reg, 1)
    for c in coeffs[1:]:
        power = power * arg
        if power.is_zero():
            break
        if c:
            out = out + power * c
    return out


def _nterms(reg: Registry) -> int:
    return reg.degree_cap // 2 + 1


def _var(reg: Registry, name: str) -> FormPoly:
    return FormPoly.var(reg, name)


def roots(reg: Registry) -> list[FormPoly]:
    return [_var(reg, f"x{j}") for j in range(1, reg.n_roots + 1)]


def ahat_form(d: int, registry: Registry | None = None) -> FormPoly:
    """``prod_j (x_j/2)/sinh(x_j/2)``."""
    reg = registry or Registry.for_dim(d)
    f = uv.ahat_factor(_nterms(reg))
    out = FormPoly.constant(reg, 1)
    for x in roots(reg)[: 2 * d]:
        out = out * substitute(f, x)
    return out


def lhat_form(d: int, registry: Registry | None = None) -> FormPoly:
    """``prod_j x_j/tanh(x_j/2)``."""
    reg = registry or Registry.for_dim(d)
    f = uv.lhat_factor(_nterms(reg))
    out = FormPoly.constant(reg, 1)
    for x in roots(reg)[: 2 * d]:
        out = out * substitute(f, x)
    return out


def exp_form(arg: FormPoly) -> FormPoly:
    return substitute([Fraction(1, 1)] + [Fraction(1, _fact(n)) for n in range(1, _nterms(arg.registry) + 1)], arg)


def _fact(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def ch_line(m: int, var: str = "u", reduced: bool = False, registry: Registry | None = None) -> FormPoly:
    """``e^(m var) + e^(-m var)`` (minus 2 when reduced)."""
    reg = registry or Registry.for_dim(1)
    w = _var(reg, var) * m
    out = exp_form(w) + exp_form(-w)
    return out - 2 if reduced else out


def cosh_half(arg: FormPoly) -> FormPoly:
    """``cosh(arg/2)``."""
    return substitute(uv.cosh_half(_nterms(arg.registry)), arg)


def ch_tangent(registry: Registry) -> FormPoly:
    """``ch(T_C M) = sum_j (e^x_j + e^-x_j)``."""
    out = FormPoly.constant(registry, 0)
    for x in roots(registry):
        out = out + exp_form(x) + exp_form(-x)
    return out


def p1_tm(registry: Registry) -> FormPoly:
    out = FormPoly.constant(registry, 0)
    for x in roots(registry):
        out = out + x * x
    return out


def anomaly_polynomial(spec: GeometrySpec) -> FormPoly:
    """``p1(TM) - sum_t (a_t^2 + 2 b_t^2) p1(xi)``."""
    reg = spec.registry
    u = _var(reg, "u")
    coeff = sum(a * a + 2 * b * b for a, b in zip(spec.a, spec.b))
    return p1_tm(reg) - u * u * coeff


# ---------------------------------------------------------------------------
# bundle calculus


@dataclass(frozen=True)
class VirtualBundle:
    """Formal difference of sums of complexified rank-2 real bundles.

    Each entry ``(w, m)`` stands for ``m`` copies of a bundle with Chern roots
    ``+-w``.
    """

    pairs: tuple[tuple[FormPoly, int], ...]

    @classmethod
    def line(cls, arg: FormPoly, mult: int = 1) -> "VirtualBundle":
        return cls(((arg, mult),))

    def __add__(self, other: "VirtualBundle") -> "VirtualBundle":
        return VirtualBundle(self.pairs + other.pairs)

    def scaled(self, m: int) -> "VirtualBundle":
        return VirtualBundle(tuple((w, c * m) for w, c in self.pairs))

    @property
    def rank(self) -> int:
        return sum(2 * m for _, m in self.pairs)

    def ch(self, reduced: bool = True) -> FormPoly:
        out = None
        for w, m in self.pairs:
            term = (exp_form(w) + exp_form(-w) - (2 if reduced else 0)) * m
            out = term if out is None else out + term
        return out


def _one_plus(y: QSeries, w: FormPoly, sign: int) -> FormQSeries:
    """``1 + sign * y * e^w``."""
    return FormQSeries.from_poly(exp_form(w)) * (y * sign) + 1


def ch_exterior(bundle: VirtualBundle, y: QSeries) -> FormQSeries:
    """``ch Lambda_y`` of the reduced virtual bundle."""
    reg = bundle.pairs[0][0].registry
    out = FormQSeries.constant(reg, 1)
    for w, m in bundle.pairs:
        f = _one_plus(y, w, 1) * _one_plus(y, -w, 1) * ((1 + y) * (1 + y)).inverse()
        out = out * (f ** m if m >= 0 else f.inverse() ** (-m))
    return out


def ch_symmetric(bundle: VirtualBundle, y: QSeries) -> FormQSeries:
    """``ch S_y`` of the reduced virtual bundle."""
    reg = bundle.pairs[0][0].registry
    out = FormQSeries.constant(reg, 1)
    for w, m in bundle.pairs:
        f = ((1 - y) * (1 - y)) * (_one_plus(y, w, -1) * _one_plus(y, -w, -1)).inverse()
        out = out * (f ** m if m >= 0 else f.inverse() ** (-m))
    return out


# slot bundles of the three family members: (integral, +half-integral, -half-integral)
_SLOTS = {1: ("A", "B", "B"), 2: ("B", "B", "A"), 3: ("B", "A", "B")}


def _slot_bundles(spec: GeometrySpec, eta_arg: FormPoly | None) -> dict[str, VirtualBundle]:
    reg = spec.registry
    u = _var(reg, "u")
    a = VirtualBundle(tuple((u * at, 1) for at in spec.a))
    b = VirtualBundle(tuple((u * bt, 1) for bt in spec.b))
    if eta_arg is not None:
        a = a + VirtualBundle.line(eta_arg, -2)
        b = b + VirtualBundle.line(eta_arg, 1)
    return {"A": a, "B": b}


def _default_eta(spec: GeometrySpec, eta_arg: FormPoly | None, barred: bool) -> FormPoly | None:
    if not barred:
        return None
    if not spec.has_eta:
        raise SpecError("this form needs the auxiliary bundle (has_eta=True)")
    return eta_arg if eta_arg is not None else _var(spec.registry, "vbar")


def _parse_member(which: str, prefixes: tuple[str, ...]) -> tuple[str, int]:
    for p in prefixes:
        if which.startswith(p) and which[len(p):] in ("1", "2", "3"):
            return p, int(which[len(p):])
    raise ValueError(f"unknown form {which!r}")


def witten_bundle_ch(which: str, spec: GeometrySpec, eta_arg: FormPoly | None = None) -> FormQSeries:
    """Chern character of the q-graded bundle ``which`` in
    {theta1, theta2, theta3, theta_bar1, theta_bar2, theta_bar3}."""
    prefix, member = _parse_member(which, ("theta_bar", "theta"))
    eta = _default_eta(spec, eta_arg, prefix == "theta_bar")
    reg, n8 = spec.registry, spec.n8
    slots = _slot_bundles(spec, eta)
    v_int, v_plus, v_minus = (slots[s] for s in _SLOTS[member])
    # one root pair +-x_j per j, rank 4d
    tangent = VirtualBundle(tuple((x, 1) for x in roots(reg)))
    out = FormQSeries.constant(reg, 1, n8)
    for n in range(1, n8 // 8 + 2):
        if 8 * n < n8:
            y = QSeries.monomial(8 * n, 1, n8)
            out = out * ch_symmetric(tangent, y) * ch_exterior(v_int, y)
        if 8 * n - 4 < n8:
            y = QSeries.monomial(8 * n - 4, 1, n8)
            out = out * ch_exterior(v_plus, y) * ch_exterior(v_minus, -y)
    return out


def _prefactor(spec: GeometrySpec, member: int, eta: FormPoly | None) -> FormPoly:
    """``2^k prod cosh(w/2)^m`` over the integral-slot root pairs."""
    slots = _slot_bundles(spec, eta)
    out = FormPoly.constant(spec.registry, 2 ** spec.k)
    for w, m in slots[_SLOTS[member][0]].pairs:
        c = cosh_half(w)
        out = out * (c ** m if m >= 0 else c.inverse() ** (-m))
    return out


def _anomaly_exp_arg(spec: GeometrySpec) -> FormQSeries:
    e2 = eisenstein_e2(spec.n8)
    return FormQSeries.from_poly(anomaly_polynomial(spec) * Fraction(1, 24)) * e2


_BUNDLE_OF = {"Q": "theta", "Qbar": "theta_bar", "Phi": "theta_bar"}


def bundle_form(which: str, spec: GeometrySpec, eta_arg: FormPoly | None = None) -> FormQSeries:
    """``exp(E2 P/24) * prefactor * Ahat * ch(bundle)``, all degrees retained."""
    prefix, member = _parse_member(which, ("Qbar", "Phi", "Q"))
    eta = _default_eta(spec, eta_arg, prefix != "Q")
    if prefix == "Phi" and eta_arg is None:
        eta = _var(spec.registry, "r0") + _var(spec.registry, "s") * _var(spec.registry, "t")
    reg = spec.registry
    bundle = witten_bundle_ch(f"{_BUNDLE_OF[prefix]}{member}", spec, eta)
    pre = _prefactor(spec, member, eta) * ahat_form(spec.d, reg)
    return _anomaly_exp_arg(spec).exp() * pre * bundle


# theta kind attached to each slot position
_SLOT_KINDS = (ThetaKind.TH1, ThetaKind.TH3, ThetaKind.TH2)


def q_form(which: str, spec: GeometrySpec, eta_arg: FormPoly | None = None) -> FormQSeries:
    """Theta-product form ``which`` in {Q1..Q3, Qbar1..Qbar3, Phi1..Phi3}.

    ``Q_i`` has no auxiliary bundle, ``Qbar_i`` evaluates its blocks at
    ``eta_arg`` (default ``vbar``) and ``Phi_i`` at ``eta_arg`` (default
    ``r0 + t*s``).  All weights up to the registry cap are returned.
    """
    prefix, member = _parse_member(which, ("Qbar", "Phi", "Q"))
    reg, n8 = spec.registry, spec.n8
    eta = _default_eta(spec, eta_arg, prefix != "Q")
    if prefix == "Phi" and eta_arg is None:
        eta = _var(reg, "r0") + _var(reg, "s") * _var(reg, "t")
    slots = _slot_bundles(spec, eta)
    log_sum = _anomaly_exp_arg(spec)
    for x in roots(reg):
        log_sum = log_sum + log_theta_block(ThetaKind.TH, x, n8)
    for kind, slot in zip(_SLOT_KINDS, _SLOTS[member]):
        for w, m in slots[slot].pairs:
            log_sum = log_sum + log_theta_block(kind, w, n8) * m
    return log_sum.exp() * (2 ** spec.k)


# log-block combinations for the transgressed forms: coefficients on (l1, l2, l3)
LAMBDA_COEFFS = {1: (-2, 1, 1), 2: (1, -2, 1), 3: (1, 1, -2)}


def lambda_combination(member: int, arg: FormPoly, n8: int) -> FormQSeries:
    kinds = (ThetaKind.TH1, ThetaKind.TH2, ThetaKind.TH3)
    out = FormQSeries._raw(arg.registry, {}, n8)
    for kind, c in zip(kinds, LAMBDA_COEFFS[member]):
        out = out + theta_log_block(kind, arg, n8) * c
    return out


def cs_integrand(member: int, spec: GeometrySpec) -> FormQSeries:
    """``Phi_i(r_t) * alpha * Lambda_i(r_t)`` with ``r_t = r0 + t s``."""
    reg = spec.registry
    r_t = _var(reg, "r0") + _var(reg, "s") * _var(reg, "t")
    phi = q_form(f"Phi{member}", spec, r_t)
    return phi * _var(reg, "alpha") * lambda_combination(member, r_t, spec.n8)


def cs_form(which: str, spec: GeometrySpec) -> FormQSeries:
    """Top (weight ``4d-1``) part of the transgressed form ``which`` in
    {CSPhi1, CSPhi2, CSPhi3}, up to one overall constant."""
    _, member = _parse_member(which, ("CSPhi",))
    if not spec.has_eta:
        raise SpecError("transgressed forms need the auxiliary bundle (has_eta=True)")
    reg = spec.registry
    if reg.degree_cap < 4 * spec.d - 1:
        raise CapError(f"degree_cap {reg.degree_cap} < {4 * spec.d - 1}")
    if reg.t_cap < 2 * spec.d:
        raise CapError(f"t_cap {reg.t_cap} < {2 * spec.d}")
    return cs_integrand(member, spec).integrate_t().component(4 * spec.d - 1)


# ---------------------------------------------------------------------------
# coefficient probe


@dataclass(frozen=True)
class ProbeResult:
    lam: Fraction
    mu: Fraction
    residual: FormPoly
    free: tuple[str, ...]

    @cached_property
    def exact(self) -> bool:
        return self.residual.is_zero()


def agw_probe(d: int = 3) -> ProbeResult:
    """Solve ``Lhat^(4d) = lam (Ahat ch T_C M)^(4d) + mu Ahat^(4d)`` exactly.

    Free unknowns of an underdetermined system are set to 0 and named in
    ``free``; an inconsistent system raises :class:`NoSolution`.
    """
    reg = Registry.for_dim(d)
    w = 4 * d
    ahat = ahat_form(d, reg)
    target = lhat_form(d, reg).component(w)
    basis = [(ahat * ch_tangent(reg)).component(w), ahat.component(w)]
    monos = sorted(set(target.terms).union(*(b.terms for b in basis)))
    rows = [[b.coefficient(m) for b in basis] for m in monos]
    rhs = [target.coefficient(m) for m in monos]
    x, ok, free = solve(rows, rhs)
    if not ok:
        raise NoSolution("Lhat top component is outside the span")
    residual = target - basis[0] * x[0] - basis[1] * x[1]
    return ProbeResult(x[0], x[1], residual, tuple(("lambda", "mu")[i] for i in free))
