"""Walk through the exact theta-null expansions and the numeric laws they obey.

    python3 demos/theta_foundations.py
"""

from modcancel.series import QSeries
from modcancel.theta import ThetaKind, delta_eps, eisenstein_e2, jacobi_check, theta_null
from modcancel import verifier as V


def show(name: str, f: QSeries, upto: int = 4) -> None:
    cut = f.truncate(min(f.trunc, 8 * upto + 1))
    print(f"  {name:<8} {cut!r}")


print("Theta-nulls on the q^(1/8) grid:")
for kind in (ThetaKind.TH1, ThetaKind.TH2, ThetaKind.TH3):
    show(kind.value, theta_null(kind, 33))

print("\nJacobi identity theta'(0) = pi theta1 theta2 theta3 through q^20:", jacobi_check(168))

print("\nLevel-2 forms (weights 2 and 4):")
for i in (1, 2, 3):
    p = delta_eps(i, 17)
    show(f"delta{i}", p.delta, 2)
    show(f"eps{i}", p.epsilon, 2)

show("E2", eisenstein_e2(41))

print("\nNumeric transformation laws at three tau samples (relative errors):")
print(f"  theta S/T laws          {V.theta_law_errors():.1e}")
print(f"  derivative laws (FD)    {V.theta_prime_law_errors():.1e}")
print(f"  E2 quasimodularity      {V.e2_law_error():.1e}")
print(f"  delta/eps S-laws        {V.delta_eps_law_error():.1e}")
print(f"  FD error ratio h=1e-2 vs 1e-3: {V.finite_difference_order():.1f} (second order gives 100)")
