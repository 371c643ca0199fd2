"""Acceptance criteria, one test each.

Every test prints a single ``[criterion N] PASS|FAIL ...`` line with its
runtime.  Run ``python3 tests/test_acceptance.py`` to get just those lines.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

import pytest

from modcancel import verifier as V
from modcancel.charforms import GeometrySpec, bundle_form, q_form

TAUS = V.DEFAULT_TAUS


def _report(n: int, ok: bool, elapsed: float, budget: float | None, detail: str) -> None:
    within = budget is None or elapsed < budget
    verdict = "PASS" if ok and within else "FAIL"
    limit = f" (budget {budget:g} s)" if budget else ""
    line = f"[criterion {n}] {verdict} {elapsed:.2f}s{limit} {detail}"
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()
    assert ok, line
    assert within, line


def _run(n, budget, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    _report(n, ok, time.perf_counter() - t0, budget, detail)


def crit1():
    jac = V.jacobi_check(168)
    exp_ok = V.delta_eps_expansion_ok(64)
    return jac and exp_ok, f"jacobi through q^20: {jac}; delta/eps leading terms: {exp_ok}"


def crit2():
    errs = {
        "theta": V.theta_law_errors(TAUS),
        "theta_prime_null": V.theta_prime_null_law_error(TAUS),
        "e2": V.e2_law_error(TAUS),
        "delta_eps": V.delta_eps_law_error(TAUS),
    }
    fd = V.theta_prime_law_errors(TAUS)
    ok = max(errs.values()) <= 1e-8 and fd <= 1e-5
    return ok, f"max law error {max(errs.values()):.2e}, finite-difference laws {fd:.2e}"


def crit3():
    bad = []
    for d, k, a, b in [(1, 1, (2,), (1,)), (1, 2, (1, 2), (2, 1)), (2, 1, (3,), (1,))]:
        sp = GeometrySpec(d, k, a, b, True, n8=64)
        for which in ("Q1", "Q2", "Q3", "Qbar1", "Qbar2", "Qbar3"):
            x, y = bundle_form(which, sp), q_form(which, sp)
            if x.trunc < 64 or x.first_difference(y) is not None:
                bad.append((d, k, which))
    return not bad, f"18 cell-exact comparisons through q^8, mismatches: {bad or 'none'}"


THM31_SPECS = [(1, 1, (1,), (1,)), (1, 2, (1, 2), (2, 1)), (2, 1, (2,), (1,)), (2, 2, (1, 3), (2, 2))]


def crit4():
    out = []
    for d, k, a, b in THM31_SPECS:
        r = V.check_ab_cancellation(GeometrySpec(d, k, a, b, n8=64))
        out.append(r.status == "pass" and all(r.extracted["h_matches_prediction"])
                   and r.extracted["reconstruction_first_difference"] is None)
    return all(out), f"decomposition, reconstruction and h_0/h_1 per configuration: {out}"


COR_CHOICES = [((1,), (1,)), ((0,), (0,)), ((-2,), (3,)), ((1, -1), (0, 2))]


def crit5():
    res = {}
    for cid in V.COROLLARIES:
        res[cid] = all(V.check_corollary(cid, GeometrySpec(1, len(a), a, b)).status == "pass" for a, b in COR_CHOICES)
    return all(res.values()), f"{len(COR_CHOICES)} (a,b) choices each: {res}"


def crit6():
    out = []
    for d, a, b in [(1, 1, 1), (1, 2, 1), (2, 2, 1)]:
        sp = GeometrySpec(d, 1, (a,), (b,), n8=64)
        r = V.check_eta_cancellation(sp)
        s = V.check_s_relation("Qbar", sp, TAUS)
        m = [V.check_modularity(f"Qbar{i}", spec=sp).status for i in (1, 2, 3)]
        three_term = len(r.extracted["h_matches_prediction"]) == 2 if d == 2 else True
        out.append(r.status == "pass" and three_term and s.status == "pass" and m == ["pass"] * 3)
    return all(out), f"(d,a,b) in (1,1,1),(1,2,1),(2,2,1): {out}"


def crit7():
    worst, tails, ok = 0.0, 0.0, True
    for d, k, a, b in [(1, 1, (1,), (2,)), (2, 1, (2,), (1,)), (2, 2, (1, 3), (2, 2))]:
        sp = GeometrySpec(d, k, a, b)
        for kind in ("Q", "Qbar", "CS"):
            r = V.check_s_relation(kind, sp, TAUS, 1e-8)
            ok &= r.status == "pass"
            worst = max(worst, r.numeric_max_error or 0.0)
            tails = max(tails, r.extracted["max_relative_tail"])
    ok &= tails <= 1e-9
    return ok, f"max per-monomial error {worst:.2e}, max relative tail {tails:.2e}"


def crit8():
    ok, worst = True, 0.0
    for d, k, a, b in [(1, 1, (2,), (1,)), (2, 1, (2,), (1,))]:
        sp = GeometrySpec(d, k, a, b, n8=64)
        r = V.check_transgression(sp, TAUS)
        ok &= r.extracted["t_relations_first_difference"] == [None, None, None]
        ok &= all(v == 0 for v in r.extracted["additive_term_coefficient_sums"].values())
        for prefix in ("Q", "Qbar", "CSPhi"):
            for i in (1, 2, 3):
                m = V.check_modularity(f"{prefix}{i}", spec=sp, taus=TAUS, tol=1e-6)
                ok &= m.status == "pass"
                worst = max(worst, m.numeric_max_error)
    for fid in ("delta1", "delta2", "delta3", "eps1", "eps2", "eps3"):
        m = V.check_modularity(fid, taus=TAUS, tol=1e-6)
        ok &= m.status == "pass"
        worst = max(worst, m.numeric_max_error)
    return ok, f"T-relations exact, anomaly sums zero, generator checks max error {worst:.2e}"


def crit9():
    r = V.check_agw(3)
    e = r.extracted
    ok = e["residual_zero"] and r.status == ("pass" if (e["lambda"], e["mu"]) == ("1", "-32") else "flagged")
    return ok, f"status {r.status}: solved (lambda, mu) = ({e['lambda']}, {e['mu']}) vs stated (1, -32)"


def crit10():
    sys.path.insert(0, str(Path(__file__).parent))
    import test_properties as P

    suites = {
        "ring axioms": [P.test_ring_qseries, P.test_ring_formpoly, P.test_ring_formqseries],
        "inverse": [P.test_inverse_qseries, P.test_inverse_formpoly, P.test_inverse_formqseries],
        "exp": [P.test_exp_homomorphism, P.test_exp_log_inverts_exp],
        "truncation": [P.test_truncation_products_commute_with_truncation, P.test_truncation_inverse],
        "decomposition": [P.test_decomposition_round_trip],
    }
    for fns in suites.values():
        for fn in fns:
            fn()
    return P.N >= 100, f"{len(suites)} property suites, {P.N} examples per property"


CRITERIA = [
    (1, 5, crit1),
    (2, 5, crit2),
    (3, 30, crit3),
    (4, 60, crit4),
    (5, 30, crit5),
    (6, None, crit6),
    (7, None, crit7),
    (8, None, crit8),
    (9, 120, crit9),
    (10, None, crit10),
]


@pytest.fixture(autouse=True)
def _fresh_cache():
    V.clear_cache()
    yield


@pytest.mark.parametrize("n,budget,fn", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(n, budget, fn):
    _run(n, budget, fn)


if __name__ == "__main__":
    failed = 0
    for n, budget, fn in CRITERIA:
        V.clear_cache()
        try:
            _run(n, budget, fn)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
