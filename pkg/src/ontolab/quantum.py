"""States, projective measurements and CHSH machinery for one and two qubits.

Conventions
-----------
* Kets are dense complex vectors over the computational basis; two-qubit
  basis order is |00>, |01>, |10>, |11>.
* Observables with two outcomes are written as Bloch vectors n, meaning the
  operator n.sigma with eigenvalues +1 / -1.
* The CHSH combination is B = A0(B0+B1) + A1(B0-B1); |<B>| <= 2 for local
  models, 2*sqrt(2) for quantum states, 4 algebraically.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConsistencyError, DimensionError
from .tolerances import ALGEBRAIC_TOL, OPTIMIZATION_TOL

Array = np.ndarray

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

LOCAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
ALGEBRAIC_BOUND = 4.0


@dataclass(frozen=True)
class QuantumState:
    """Normalized pure state of one qubit (dim 2) or two qubits (dim 4)."""

    amplitudes: Array

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape not in ((2,), (4,)):
            raise DimensionError(f"state must have dimension 2 or 4, got shape {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ALGEBRAIC_TOL:
            raise ValueError(f"state not normalized: |psi| = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]

    def inner(self, other: "QuantumState") -> complex:
        """<self|other>."""
        if self.dimension != other.dimension:
            raise DimensionError("inner product between states of different dimension")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "QuantumState") -> "QuantumState":
        return QuantumState(np.kron(self.amplitudes, other.amplitudes))


def ket(*amplitudes: complex) -> QuantumState:
    """Build a state from raw amplitudes, normalizing exactly-normalizable input."""
    return QuantumState(np.asarray(amplitudes, dtype=np.complex128))


KET_ZERO = ket(1, 0)
KET_ONE = ket(0, 1)
KET_PLUS = ket(1 / math.sqrt(2), 1 / math.sqrt(2))
KET_MINUS = ket(1 / math.sqrt(2), -1 / math.sqrt(2))


def quantum_overlap(a: QuantumState, b: QuantumState) -> float:
    """|<a|b>|^2."""
    return float(abs(a.inner(b)) ** 2)


def bloch_vector(state: QuantumState) -> Array:
    """Bloch vector of a single-qubit pure state."""
    if state.dimension != 2:
        raise DimensionError("bloch_vector defined for qubits only")
    a, b = state.amplitudes
    return np.array(
        [2 * (np.conj(a) * b).real, 2 * (np.conj(a) * b).imag, abs(a) ** 2 - abs(b) ** 2]
    )


def state_from_bloch(n: Array) -> QuantumState:
    """Qubit pure state with the given unit Bloch vector."""
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > ALGEBRAIC_TOL:
        raise ValueError("Bloch vector must be unit length")
    theta = math.acos(min(1.0, max(-1.0, n[2])))
    phi = math.atan2(n[1], n[0])
    return QuantumState(
        np.array([math.cos(theta / 2), math.sin(theta / 2) * complex(math.cos(phi), math.sin(phi))])
    )


def schmidt_pair_state(alpha_sq: float, rel_phase: float = 0.0) -> QuantumState:
    """Two-qubit state sqrt(alpha_sq)|00> + e^{i phase} sqrt(1-alpha_sq)|11>."""
    if not 0.0 <= alpha_sq <= 1.0:
        raise ValueError("alpha_sq must lie in [0, 1]")
    a = math.sqrt(alpha_sq)
    b = math.sqrt(1.0 - alpha_sq) * complex(math.cos(rel_phase), math.sin(rel_phase))
    return QuantumState(np.array([a, 0, 0, b], dtype=np.complex128))


PHI_PLUS = schmidt_pair_state(0.5)


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Complete orthonormal basis with one label per outcome."""

    basis: tuple[QuantumState, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.basis) == 0:
            raise ValueError("measurement needs at least one outcome")
        dim = self.basis[0].dimension
        if any(s.dimension != dim for s in self.basis):
            raise DimensionError("all basis states must share one dimension")
        if len(self.basis) != dim:
            raise ValueError("basis must be complete (one vector per dimension)")
        if len(self.labels) != len(self.basis):
            raise ValueError("one label per basis vector required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("outcome labels must be unique")
        for i in range(dim):
            for j in range(i + 1, dim):
                if abs(self.basis[i].inner(self.basis[j])) > ALGEBRAIC_TOL:
                    raise ValueError(
                        f"basis vectors {self.labels[i]!r} and {self.labels[j]!r} not orthogonal"
                    )

    @property
    def dimension(self) -> int:
        return self.basis[0].dimension

    def outcome_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown outcome label {label!r}") from None


def measurement_from_bloch(n: Array, labels: tuple[str, str] = ("0", "1")) -> ProjectiveMeasurement:
    """Two-outcome qubit measurement of n.sigma; first label is the +1 outcome."""
    plus = state_from_bloch(np.asarray(n, dtype=float))
    minus = state_from_bloch(-np.asarray(n, dtype=float))
    return ProjectiveMeasurement((plus, minus), labels)


Z_MEASUREMENT = ProjectiveMeasurement((KET_ZERO, KET_ONE), ("0", "1"))
X_MEASUREMENT = ProjectiveMeasurement((KET_PLUS, KET_MINUS), ("0", "1"))


def born_probability(state: QuantumState, measurement: ProjectiveMeasurement, outcome: str) -> float:
    """Born-rule probability |<phi_k|psi>|^2 of one outcome."""
    if state.dimension != measurement.dimension:
        raise DimensionError("state and measurement dimensions differ")
    k = measurement.outcome_index(outcome)
    return quantum_overlap(measurement.basis[k], state)


def born_distribution(state: QuantumState, measurement: ProjectiveMeasurement) -> dict[str, float]:
    """All outcome probabilities; sums to 1 within ALGEBRAIC_TOL."""
    probs = {label: born_probability(state, measurement, label) for label in measurement.labels}
    total = sum(probs.values())
    if abs(total - 1.0) > ALGEBRAIC_TOL:
        raise ConsistencyError(f"outcome probabilities sum to {total!r}, not 1")
    return probs


def _unit3(v: Array, name: str) -> Array:
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > ALGEBRAIC_TOL:
        raise ValueError(f"{name} must be unit length, got |v| = {np.linalg.norm(v)!r}")
    return v


@dataclass(frozen=True)
class ChshSetting:
    """Two Bloch observables per party: Alice (a0, a1), Bob (b0, b1)."""

    alice: tuple[Array, Array]
    bob: tuple[Array, Array]

    def __post_init__(self):
        a0, a1 = self.alice
        b0, b1 = self.bob
        object.__setattr__(self, "alice", (_unit3(a0, "a0"), _unit3(a1, "a1")))
        object.__setattr__(self, "bob", (_unit3(b0, "b0"), _unit3(b1, "b1")))


def bloch_observable(n: Array) -> Array:
    """n.sigma as a 2x2 Hermitian matrix."""
    n = _unit3(n, "bloch vector")
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


CHSH_ZX_SETTING = ChshSetting(
    alice=(np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0])),
    bob=(
        np.array([1.0, 0.0, 1.0]) / math.sqrt(2),
        np.array([-1.0, 0.0, 1.0]) / math.sqrt(2),
    ),
)


def chsh_operator(setting: ChshSetting) -> Array:
    a0 = bloch_observable(setting.alice[0])
    a1 = bloch_observable(setting.alice[1])
    b0 = bloch_observable(setting.bob[0])
    b1 = bloch_observable(setting.bob[1])
    return np.kron(a0, b0 + b1) + np.kron(a1, b0 - b1)


def chsh_expectation(state: QuantumState, setting: ChshSetting) -> float:
    """<psi| A0(B0+B1) + A1(B0-B1) |psi> for a two-qubit state."""
    if state.dimension != 4:
        raise DimensionError("CHSH expectation needs a two-qubit state")
    op = chsh_operator(setting)
    value = np.vdot(state.amplitudes, op @ state.amplitudes)
    if abs(value.imag) > ALGEBRAIC_TOL:
        raise ConsistencyError(f"CHSH expectation came out complex: {value!r}")
    value = float(value.real)
    if abs(value) > TSIRELSON_BOUND + OPTIMIZATION_TOL:
        raise ConsistencyError(f"CHSH expectation {value!r} exceeds the quantum bound")
    return value


def correlation_matrix(state: QuantumState) -> Array:
    """3x3 matrix T_ij = <sigma_i x sigma_j> of a two-qubit state."""
    if state.dimension != 4:
        raise DimensionError("correlation matrix needs a two-qubit state")
    t = np.empty((3, 3))
    for i, si in enumerate(_PAULIS):
        for j, sj in enumerate(_PAULIS):
            t[i, j] = np.vdot(state.amplitudes, np.kron(si, sj) @ state.amplitudes).real
    return t


def _normalize_or(v: Array, fallback: Array) -> Array:
    n = np.linalg.norm(v)
    return v / n if n > 1e-15 else fallback


def _seesaw(t: Array, b0: Array, b1: Array, iterations: int = 300) -> tuple[float, Array, Array, Array, Array]:
    # Alternate closed-form best responses; the CHSH value is monotone
    # nondecreasing along the iteration, so convergence is to a local max.
    a0 = _normalize_or(t @ (b0 + b1), np.array([0.0, 0.0, 1.0]))
    a1 = _normalize_or(t @ (b0 - b1), np.array([1.0, 0.0, 0.0]))
    value = -np.inf
    for _ in range(iterations):
        b0 = _normalize_or(t.T @ (a0 + a1), b0)
        b1 = _normalize_or(t.T @ (a0 - a1), b1)
        a0 = _normalize_or(t @ (b0 + b1), a0)
        a1 = _normalize_or(t @ (b0 - b1), a1)
        new = float(np.linalg.norm(t @ (b0 + b1)) + np.linalg.norm(t @ (b0 - b1)))
        if new - value < 1e-15:
            value = new
            break
        value = new
    return value, a0, a1, b0, b1


def _seesaw_start_directions() -> list[Array]:
    dirs = []
    for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (0, -1, 0), (0, 0, -1),
              (1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1),
              (1, 1, 1), (1, -1, -1)):
        a = np.asarray(v, dtype=float)
        dirs.append(a / np.linalg.norm(a))
    return dirs


def chsh_optimal_value(state: QuantumState) -> tuple[float, ChshSetting]:
    """Maximum CHSH expectation of a state alpha|00> + beta|11>.

    Returns the closed-form optimum 2*sqrt(1 + 4|alpha|^2|beta|^2) together
    with a setting that achieves it.  The value is independently recomputed
    by numerical maximization (coarse multistart + alternating refinement of
    the Bloch angles) and the two routes must agree to OPTIMIZATION_TOL.
    """
    if state.dimension != 4:
        raise DimensionError("optimal CHSH value needs a two-qubit state")
    amps = state.amplitudes
    if abs(amps[1]) > ALGEBRAIC_TOL or abs(amps[2]) > ALGEBRAIC_TOL:
        raise ValueError("state must have the form alpha|00> + beta|11>")
    alpha_sq = abs(amps[0]) ** 2
    beta_sq = abs(amps[3]) ** 2
    closed_form = 2.0 * math.sqrt(1.0 + 4.0 * alpha_sq * beta_sq)

    t = correlation_matrix(state)
    best = (-np.inf, None)
    starts = _seesaw_start_directions()
    for i, b0 in enumerate(starts):
        for b1 in starts[i + 1:]:
            value, a0, a1, c0, c1 = _seesaw(t, b0, b1)
            if value > best[0]:
                best = (value, (a0, a1, c0, c1))
    numeric, (a0, a1, b0, b1) = best
    if abs(numeric - closed_form) > OPTIMIZATION_TOL:
        raise ConsistencyError(
            f"closed form {closed_form!r} and numeric maximum {numeric!r} disagree"
        )
    setting = ChshSetting(alice=(a0, a1), bob=(b0, b1))
    achieved = chsh_expectation(state, setting)
    if abs(achieved - closed_form) > OPTIMIZATION_TOL:
        raise ConsistencyError(f"returned setting achieves {achieved!r}, expected {closed_form!r}")
    return closed_form, setting


def clone_output(machine_basis: tuple[QuantumState, QuantumState], state: QuantumState) -> QuantumState:
    """Output of the unitary copier built for an orthonormal qubit pair.

    The machine maps |phi>|r> -> |phi>|phi> and |phi_perp>|r> -> |phi_perp>|phi_perp>;
    by linearity an input alpha|phi> + beta|phi_perp> comes out as the
    entangled state alpha|phi,phi> + beta|phi_perp,phi_perp>, not as two copies.
    """
    phi, phi_perp = machine_basis
    if phi.dimension != 2 or phi_perp.dimension != 2 or state.dimension != 2:
        raise DimensionError("cloning machine is defined for qubits")
    if abs(phi.inner(phi_perp)) > ALGEBRAIC_TOL:
        raise ValueError("machine basis must be orthonormal")
    alpha = phi.inner(state)
    beta = phi_perp.inner(state)
    out = alpha * np.kron(phi.amplitudes, phi.amplitudes) + beta * np.kron(
        phi_perp.amplitudes, phi_perp.amplitudes
    )
    return QuantumState(out)
