"""Check the sampled CHSH estimator against exact expectations."""

from ontolab import (
    PHI_PLUS,
    chsh_expectation,
    chsh_monte_carlo,
    chsh_optimal_value,
    schmidt_pair_state,
)

for label, state in (("phi+", PHI_PLUS), ("schmidt 0.8", schmidt_pair_state(0.8))):
    exact, setting = chsh_optimal_value(state)
    assert abs(chsh_expectation(state, setting) - exact) < 1e-12

    print(f"{label}: exact CHSH {exact:.6f}")
    for n in (10**3, 10**4, 10**5, 10**6):
        est, se = chsh_monte_carlo(state, setting, n, seed=11)
        sigma = abs(est - exact) / se
        print(f"  n={n:>7}  estimate={est:.5f}  stderr={se:.5f}  ({sigma:.2f} sigma)")
    print()
