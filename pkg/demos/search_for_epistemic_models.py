"""Search for the most epistemic model of two fixed preparations.

The optimizer asks: over all ontological models that reproduce the Born rule
for |0> and |+> under Z and X measurements, how much of the |+> distribution
can sit inside the support of the |0> distribution? Response functions can be
restricted to deterministic patterns without loss (any stochastic response is
a mixture of patterns, and remixing preserves both the Born constraints and
the objective), which turns the search into a small exact LP. A brute-force
scan over explicitly discretized models approaches the same number as its
grid is refined.
"""

from ontolab import (
    KET_PLUS,
    KET_ZERO,
    X_MEASUREMENT,
    Z_MEASUREMENT,
    brute_force_overlap,
    max_overlap_lp,
    omega,
    quantum_overlap,
    validate,
)

states = [KET_ZERO, KET_PLUS]
measurements = [Z_MEASUREMENT, X_MEASUREMENT]

optimum, witness = max_overlap_lp(
    states, measurements, state_ids=("zero", "plus"), measurement_ids=("Z", "X")
)
print(f"LP optimum (mass of |+> on supp |0>): {optimum:.6f}")

report = validate(witness)
print(f"witness model validates: {report.passed} "
      f"(worst residual {report.worst.max_residual:.1e})")
print(f"witness omega(zero, plus): {omega(witness, 'zero', 'plus'):.6f}")
print(f"quantum overlap of the pair: {quantum_overlap(KET_ZERO, KET_PLUS):.6f}")

# the scan discretizes mass assignments, so it matches only up to grid error
scan = brute_force_overlap(states, measurements)
print(f"brute-force scan at resolution 0.001: {scan:.6f}")
assert abs(scan - optimum) <= 2e-3
