"""Transgressed (Chern-Simons) forms: exact T-relations on the half-integral
grid, numeric S-relations, modularity over the three level-2 groups, and the
coefficient probe for the dimension-12 L-hat identity.

    python3 demos/transgressed_forms.py
"""

from modcancel.charforms import GeometrySpec, cs_form
from modcancel import verifier as V

spec = GeometrySpec(d=1, k=1, a=(2,), b=(1,), has_eta=True)
cs1 = cs_form("CSPhi1", spec)
print(f"top (weight 3) part of CSPhi1: {len(cs1.cells)} monomials, e.g.")
for m in sorted(cs1.cells)[:3]:
    print(f"  {spec.registry.format_mono(m):<16} {cs1.coefficient(m).truncate(17)!r}")

r = V.check_transgression(spec)
print("\nT-relations first difference:", r.extracted["t_relations_first_difference"])
print("additive terms cancel in each combination:", r.extracted["additive_term_coefficient_sums"])
print(f"S-relations max error {r.extracted['s_relation_error']:.1e}, "
      f"log-derivative laws {r.extracted['log_derivative_law_error']:.1e}")

for i in (1, 2, 3):
    m = V.check_modularity(f"CSPhi{i}", spec=spec)
    print(f"  {m.id:<34} {m.status} ({m.numeric_max_error:.1e})")

probe = V.check_agw(3)
e = probe.extracted
print(f"\nL-hat probe in dimension 12: lambda = {e['lambda']}, mu = {e['mu']}, residual zero: {e['residual_zero']}")
print(f"stated pair {tuple(e['stated'])}; status {probe.status}")
