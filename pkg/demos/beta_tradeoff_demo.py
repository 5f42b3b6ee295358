"""How the reference amplitude |beta| trades diagonal against
off-diagonal accuracy.

Small |beta| barely disturbs the count statistics, so populations are
measured cleanly but the far off-diagonal bands are hopelessly amplified
by the pseudo-inverse; large |beta| spreads the counts and equalizes the
errors.  This script tabulates Monte Carlo standard errors per element
over an ensemble of seeds.

Run from the repository root:  python3 demos/beta_tradeoff_demo.py
"""

import numpy as np

from bectomo import beta_tradeoff_report, density_from_vector, squeezed_coefficients

rho = density_from_vector(squeezed_coefficients(1.0, 2.0, 6))
n1 = rho.n_trunc
betas = [0.05, 0.3, 1.1, 1.5]
print(f"state: squeezed (x0 = 1, r = 2), N1 = {n1}; "
      f"3e5 runs/phase, 30 seeds per |beta|\n")

records = beta_tradeoff_report(rho, betas, runs=300000, seeds=list(range(30)))


def agg(beta, band):
    vals = [r["std_err"] for r in records
            if r["beta"] == beta and r["col"] - r["row"] == band]
    return np.mean(vals)


print(f"{'|beta|':>7} {'diag err':>12} {'band-3 err':>12} {'corner err':>12}")
for beta in betas:
    print(f"{beta:>7.2f} {agg(beta, 0):>12.2e} {agg(beta, 3):>12.2e} "
          f"{agg(beta, n1):>12.2e}")

print("\ndiagonals are cheapest at small |beta|; the corner band needs "
      "|beta| of order 1.")
print("the same table is available as:  bectomo beta-tradeoff --scenario fig2 "
      "--out tradeoff.csv")
