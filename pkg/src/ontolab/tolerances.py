"""Central numeric tolerances.

Every comparison in the package goes through one of these constants (or a
per-model override of DEFAULT_BORN_TOLERANCE), so the precision story lives
in one place.
"""

from __future__ import annotations

# Exact linear algebra: norms, orthogonality, global-phase checks.
ALGEBRAIC_TOL = 1e-12

# Anything that went through an iterative optimizer or an LP pivot chain.
OPTIMIZATION_TOL = 1e-9

# Default Born-rule residual allowed when validating a model.  Discretized
# models declare a looser per-model value.
DEFAULT_BORN_TOLERANCE = 1e-6

# Mass below this is treated as measure zero when taking supports.
DEFAULT_SUPPORT_EPSILON = 1e-12

# Probability-distribution bookkeeping (weight sums, response-row sums).
DISTRIBUTION_TOL = 1e-9

# Pairs with quantum overlap below this are refused by omega(): the ratio
# 0/0 carries no information about epistemicity.
NEAR_ORTHOGONAL_EPS = 1e-9
