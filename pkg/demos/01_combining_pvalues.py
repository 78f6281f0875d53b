"""Combining p-values across studies.

A feature tested in n studies yields n elementary p-values. A combining
method turns them into a single global-null p-value, and, more generally,
into a partial conjunction p-value P^{u/n} testing "the feature has an
effect in at least u studies". This script walks through the available
combiners and the effect of the partial conjunction parameter u.
"""

from pcfdr import (
    BONFERRONI,
    FISHER,
    SIMES,
    STOUFFER,
    combine_pvalues,
    pc_pvalue,
    simes_storey,
    storey_pi0,
)

p = [0.001, 0.02, 0.04, 0.3, 0.8]
print(f"elementary p-values: {p}\n")

print("global-null combined p-values (u = 1):")
for method in (FISHER, STOUFFER, SIMES, BONFERRONI, simes_storey(0.5)):
    print(f"  {method.kind:14s} {combine_pvalues(p, method):.6f}")

print("\npartial conjunction p-values (Simes), sweeping u:")
for u in range(1, len(p) + 1):
    print(f"  P^{u}/{len(p)} = {pc_pvalue(p, u, SIMES):.6f}")

# The Simes-Storey combiner adapts to the fraction of true nulls among
# the studies via Storey's estimator.
print(f"\nStorey pi0 estimate at lambda=0.5: {storey_pi0(p, 0.5):.4f}")
print(f"Simes-Storey combined p-value:      "
      f"{combine_pvalues(p, simes_storey(0.5)):.6f}")
