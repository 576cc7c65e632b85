"""Optimization searches for the largest epistemic overlap.

Two formulations are provided.  `max_overlap_lp` works at the level of a
finite ontic space: each ontic state is a deterministic response pattern
(one outcome per measurement), the variables are the per-preparation masses
on those patterns, and Born reproduction becomes a set of linear equalities.
Restricting to deterministic patterns loses no generality for this
objective: at fixed Born constraints any stochastic response table is a
mass-preserving mixture of deterministic ones, so every feasible stochastic
model projects onto a feasible deterministic-pattern allocation with the
same overlap (tests certify this against a stochastic brute force on small
instances).  `max_overlap_with_chsh` works at the level of the mass budget:
overlap mass can contribute at most 2 to a CHSH expectation while the
remaining mass can contribute up to 4, so demanding a CHSH value caps the
overlap mass.

Both have independent brute-force oracles, and `chsh_monte_carlo` estimates
CHSH values by seeded sampling for cross-checking expectation formulas.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import ConsistencyError, TooLargeError
from .models import (
    EpistemicState,
    ModelMeasurement,
    OnticSpace,
    OntologicalModel,
    Preparation,
    ResponseFunction,
    validate,
)
from .quantum import (
    ChshSetting,
    ProjectiveMeasurement,
    QuantumState,
    bloch_observable,
    born_probability,
    quantum_overlap,
)
from .simplex import lexicographically_smallest_optimum
from .tolerances import ALGEBRAIC_TOL, NEAR_ORTHOGONAL_EPS

_IDENTITY_2 = np.eye(2, dtype=complex)


def _default_ids(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(count))


def _objective_cells(
    states: list[QuantumState], measurements: list[ProjectiveMeasurement], phi_index: int
) -> list[tuple[int, int]]:
    """(measurement index, outcome index) pairs whose basis vector is the
    objective state phi.  Patterns must select all of them to lie in the
    core of phi; an empty list leaves the core unconstrained."""
    phi = states[phi_index]
    cells = []
    for mi, meas in enumerate(measurements):
        for k, vec in enumerate(meas.basis):
            if quantum_overlap(vec, phi) >= 1.0 - 1e-12:
                cells.append((mi, k))
                break
    return cells


def max_overlap_lp(
    states: list[QuantumState],
    measurements: list[ProjectiveMeasurement],
    ontic_count: int | None = None,
    objective_pair: tuple[int, int] = (0, 1),
    state_ids: tuple[str, ...] | None = None,
    measurement_ids: tuple[str, ...] | None = None,
) -> tuple[float, OntologicalModel]:
    """Maximum mass the second objective state can place on the first one's
    response core, subject to Born reproduction of every (state, measurement)
    pair, together with a witness model achieving it.

    Ontic states are the deterministic response patterns over `measurements`;
    `ontic_count` may pad the witness's space beyond the pattern count but
    never shrink it.  Ties between optimal allocations are broken toward the
    lexicographically smallest mass vector, so the witness is reproducible.
    """
    if not states:
        raise ValueError("at least one state required")
    dim = states[0].dimension
    if any(s.dimension != dim for s in states):
        raise ValueError("all states must share one dimension")
    if any(m.dimension != dim for m in measurements):
        raise ValueError("measurements must match the state dimension")
    phi_index, psi_index = objective_pair
    for idx in (phi_index, psi_index):
        if not 0 <= idx < len(states):
            raise ValueError(f"objective index {idx} out of range")

    sids = state_ids or _default_ids("s", len(states))
    mids = measurement_ids or _default_ids("m", len(measurements))
    if len(sids) != len(states) or len(set(sids)) != len(sids):
        raise ValueError("state_ids must be unique, one per state")
    if len(mids) != len(measurements) or len(set(mids)) != len(mids):
        raise ValueError("measurement_ids must be unique, one per measurement")

    patterns = list(itertools.product(*[range(len(m.labels)) for m in measurements]))
    n_pat = len(patterns)
    if ontic_count is None:
        ontic_count = n_pat
    if ontic_count < n_pat:
        raise ValueError(f"ontic_count {ontic_count} below the pattern count {n_pat}")

    cells = _objective_cells(states, measurements, phi_index)
    core = [p for p in range(n_pat) if all(patterns[p][mi] == k for mi, k in cells)]

    n_var = len(states) * n_pat
    a_eq: list[list[float]] = []
    b_eq: list[float] = []
    names: list[str] = []
    for si, state in enumerate(states):
        row = [0.0] * n_var
        for p in range(n_pat):
            row[si * n_pat + p] = 1.0
        a_eq.append(row)
        b_eq.append(1.0)
        names.append(f"norm[{sids[si]}]")
        for mi, meas in enumerate(measurements):
            for k, label in enumerate(meas.labels):
                row = [0.0] * n_var
                for p in range(n_pat):
                    if patterns[p][mi] == k:
                        row[si * n_pat + p] = 1.0
                a_eq.append(row)
                b_eq.append(born_probability(state, meas, label))
                names.append(f"born[{sids[si]},{mids[mi]},{label}]")

    c = [0.0] * n_var
    for p in core:
        c[psi_index * n_pat + p] = 1.0
    solution = lexicographically_smallest_optimum(
        c, a_eq=a_eq, b_eq=b_eq, maximize=True, row_names=names
    )

    pattern_labels = ["p" + "".join(str(k) for k in pat) for pat in patterns]
    labels = pattern_labels + [f"pad{j}" for j in range(ontic_count - n_pat)]
    xi_tables: dict[str, dict[str, tuple[float, ...]]] = {mid: {} for mid in mids}
    for p, pat in enumerate(patterns):
        for mi, mid in enumerate(mids):
            row = [0.0] * len(measurements[mi].labels)
            row[pat[mi]] = 1.0
            xi_tables[mid][pattern_labels[p]] = tuple(row)
    for j in range(ontic_count - n_pat):
        for mi, mid in enumerate(mids):
            xi_tables[mid][f"pad{j}"] = xi_tables[mid][pattern_labels[0]]

    preparations = {}
    for si, state in enumerate(states):
        weights = {}
        for p in range(n_pat):
            w = solution.x[si * n_pat + p]
            if w > 1e-15:  # drop pivot noise, keep genuine mass
                weights[pattern_labels[p]] = float(w)
        preparations[sids[si]] = Preparation(ket=state, mu=EpistemicState(weights))
    model_measurements = {
        mid: ModelMeasurement(
            projective=measurements[mi],
            xi=ResponseFunction(xi_tables[mid], n_outcomes=len(measurements[mi].labels)),
        )
        for mi, mid in enumerate(mids)
    }
    witness = OntologicalModel(
        space=OnticSpace(labels=tuple(labels), sectors={}),
        preparations=preparations,
        measurements=model_measurements,
    )
    report = validate(witness)
    if not report.passed:
        raise ConsistencyError(
            f"witness model failed validation: worst residual {report.worst.max_residual!r}"
        )
    return float(solution.value), witness


def _chsh_range_check(alpha_sq: float, chsh_value: float) -> float:
    if not NEAR_ORTHOGONAL_EPS < alpha_sq < 1.0 - NEAR_ORTHOGONAL_EPS:
        raise ValueError(f"alpha_sq must lie strictly inside (0, 1), got {alpha_sq!r}")
    top = 2.0 * math.sqrt(1.0 + 4.0 * alpha_sq * (1.0 - alpha_sq))
    if chsh_value < 2.0 - 1e-9 or chsh_value > top + 1e-9:
        raise ValueError(
            f"chsh_value {chsh_value!r} outside the reproducible range [2, {top!r}]"
        )
    return top


def max_overlap_with_chsh(alpha_sq: float, chsh_value: float) -> float:
    """Largest total overlap mass compatible with a CHSH expectation.

    Solves: maximize m_phi + m_perp subject to the per-region contribution
    cap 2*(m_phi + m_perp) + 4*(1 - m_phi - m_perp) >= chsh_value and the
    quantum-overlap caps m_phi <= alpha_sq, m_perp <= 1 - alpha_sq.
    """
    _chsh_range_check(alpha_sq, chsh_value)
    solution = lexicographically_smallest_optimum(
        c=[1.0, 1.0],
        a_ub=[[2.0, 2.0], [1.0, 0.0], [0.0, 1.0]],
        b_ub=[4.0 - chsh_value, alpha_sq, 1.0 - alpha_sq],
        maximize=True,
        row_names=["chsh_floor", "cap_phi", "cap_perp"],
    )
    return float(solution.value)


def grid_search_overlap_with_chsh(
    alpha_sq: float, chsh_value: float, resolution: float = 1e-3
) -> float:
    """Brute-force grid oracle for max_overlap_with_chsh (vectorized scan)."""
    _chsh_range_check(alpha_sq, chsh_value)
    if resolution < 1e-3 - 1e-15:
        raise ValueError("resolutions below 1e-3 are not supported")
    m1 = np.unique(np.concatenate([np.arange(0.0, alpha_sq, resolution), [alpha_sq]]))
    m2 = np.unique(np.concatenate([np.arange(0.0, 1.0 - alpha_sq, resolution), [1.0 - alpha_sq]]))
    total = m1[:, None] + m2[None, :]
    feasible = 2.0 * total + 4.0 * (1.0 - total) >= chsh_value - 1e-12
    if not feasible.any():
        raise ValueError("no feasible grid point; chsh_value out of range")
    return float(total[feasible].max())


def brute_force_overlap(
    states: list[QuantumState],
    measurements: list[ProjectiveMeasurement],
    objective_pair: tuple[int, int] = (0, 1),
    grid_resolution: float = 1e-3,
    node_cap: int = 2_000_000,
) -> float:
    """Exhaustive-grid oracle for max_overlap_lp on tiny instances.

    Searches integer mass allocations (units of grid_resolution) over the
    deterministic response patterns for the objective state.  Only that
    state's block matters: the constraints never couple different
    preparations and the objective touches one of them.  Born sums may miss
    their targets by at most two grid units, which brackets the continuous
    optimum within 2*grid_resolution.  A depth-first scan with interval
    pruning keeps the node count workable; instances that still exceed
    node_cap are refused rather than silently truncated.
    """
    if len(states) > 3 or len(measurements) > 3:
        raise TooLargeError("brute force supports at most 3 states and 3 measurements")
    if grid_resolution < 1e-3 - 1e-15:
        raise ValueError("resolutions below 1e-3 are not supported")
    phi_index, psi_index = objective_pair
    for idx in (phi_index, psi_index):
        if not 0 <= idx < len(states):
            raise ValueError(f"objective index {idx} out of range")
    psi = states[psi_index]

    patterns = list(itertools.product(*[range(len(m.labels)) for m in measurements]))
    n_pat = len(patterns)
    cells = _objective_cells(states, measurements, phi_index)
    in_core = [all(patterns[p][mi] == k for mi, k in cells) for p in range(n_pat)]

    units = round(1.0 / grid_resolution)
    slack = 2  # grid units of Born residual allowed per constraint
    constraints = []  # (pattern membership mask, target units)
    for mi, meas in enumerate(measurements):
        for k, label in enumerate(meas.labels):
            member = [patterns[p][mi] == k for p in range(n_pat)]
            constraints.append((member, born_probability(psi, meas, label) * units))

    # Process core patterns first so the objective bound prunes early.
    order = sorted(range(n_pat), key=lambda p: not in_core[p])
    best = -1
    nodes = 0
    alloc = [0] * n_pat

    def recurse(depth: int, remaining: int, obj: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > node_cap:
            raise TooLargeError(f"node cap {node_cap} exceeded; shrink the instance or coarsen the grid")
        core_left = sum(1 for d in range(depth, n_pat) if in_core[order[d]])
        if obj + (remaining if core_left else 0) <= best:
            return
        for member, target in constraints:
            current = sum(alloc[order[d]] for d in range(depth) if member[order[d]])
            open_cap = remaining if any(member[order[d]] for d in range(depth, n_pat)) else 0
            if current - target > slack or target - (current + open_cap) > slack:
                return
        if depth == n_pat - 1:
            alloc[order[depth]] = remaining
            ok = True
            for member, target in constraints:
                total = sum(alloc[order[d]] for d in range(n_pat) if member[order[d]])
                if abs(total - target) > slack:
                    ok = False
                    break
            if ok:
                final = obj + (remaining if in_core[order[depth]] else 0)
                if final > best:
                    best = final
            alloc[order[depth]] = 0
            return
        for u in range(remaining, -1, -1):
            alloc[order[depth]] = u
            gain = u if in_core[order[depth]] else 0
            recurse(depth + 1, remaining - u, obj + gain)
        alloc[order[depth]] = 0

    recurse(0, units, 0)
    if best < 0:
        raise ValueError("no grid allocation satisfies the Born constraints within slack")
    return best / units


def chsh_monte_carlo(
    state: QuantumState,
    setting: ChshSetting,
    samples: int,
    seed: int = 42,
) -> tuple[float, float]:
    """Seeded sampling estimate of a CHSH expectation with its standard error.

    Each round picks one of the four setting pairs uniformly and draws the
    outcome pair from the exact joint distribution of that pair, so the
    estimator is unbiased for E(a0,b0)+E(a0,b1)+E(a1,b0)-E(a1,b1).  The
    standard error combines the per-cell binomial errors; it is zero when
    every cell is deterministic.
    """
    if samples < 1000:
        raise ValueError("at least 1000 samples required for a stable error estimate")
    if state.dimension != 4:
        raise ValueError("CHSH sampling needs a two-qubit state")
    rng = np.random.default_rng(seed)
    cell_counts = rng.multinomial(samples, [0.25] * 4)
    psi = state.amplitudes

    estimate = 0.0
    variance = 0.0
    cell = 0
    for i, a_dir in enumerate(setting.alice):
        a_obs = bloch_observable(a_dir)
        for j, b_dir in enumerate(setting.bob):
            b_obs = bloch_observable(b_dir)
            m_a = np.vdot(psi, np.kron(a_obs, _IDENTITY_2) @ psi).real
            m_b = np.vdot(psi, np.kron(_IDENTITY_2, b_obs) @ psi).real
            corr = np.vdot(psi, np.kron(a_obs, b_obs) @ psi).real
            pmf = np.array(
                [
                    (1.0 + m_a + m_b + corr),  # (+1, +1)
                    (1.0 + m_a - m_b - corr),  # (+1, -1)
                    (1.0 - m_a + m_b - corr),  # (-1, +1)
                    (1.0 - m_a - m_b + corr),  # (-1, -1)
                ]
            ) / 4.0
            if pmf.min() < -ALGEBRAIC_TOL:
                raise ConsistencyError(f"joint outcome distribution has negative mass {pmf.min()!r}")
            pmf = np.clip(pmf, 0.0, None)
            pmf /= pmf.sum()
            n_cell = int(cell_counts[cell])
            if n_cell == 0:
                raise ValueError("a setting cell received no samples; increase the sample count")
            counts = rng.multinomial(n_cell, pmf)
            e_cell = (counts[0] + counts[3] - counts[1] - counts[2]) / n_cell
            sign = -1.0 if (i, j) == (1, 1) else 1.0
            estimate += sign * e_cell
            variance += (1.0 - e_cell**2) / n_cell
            cell += 1
    return float(estimate), float(math.sqrt(variance))
