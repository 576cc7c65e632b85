"""Finite ontological models: ontic spaces, epistemic states, response
functions, Born-rule validation, and the structural predicates that separate
epistemic from ontic readings of a model.

A model pairs each preparation with a distribution mu(lambda|psi) over a
finite label set and each measurement with response rows xi(k|lambda).  It
reproduces quantum theory when sum_lambda xi(k|lambda) mu(lambda|psi) matches
the Born probability for every preparation/outcome pair, within the model's
declared tolerance.  Numeric invariants (weight sums, response rows) are
checked by `validate`, not by constructors, so defective models can be built
on purpose and diagnosed.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

from .errors import ConsistencyError, FormatError, UndecidableError
from .quantum import ProjectiveMeasurement, QuantumState, born_probability, quantum_overlap
from .tolerances import (
    ALGEBRAIC_TOL,
    DEFAULT_BORN_TOLERANCE,
    DEFAULT_SUPPORT_EPSILON,
    DISTRIBUTION_TOL,
    NEAR_ORTHOGONAL_EPS,
)


class Sector(str, enum.Enum):
    """Coarse location tag for a label in a composite-system model."""

    LOCAL_A = "LOCAL_A"
    LOCAL_B = "LOCAL_B"
    PRODUCT = "PRODUCT"
    GLOBAL = "GLOBAL"
    NONLOCAL = "NONLOCAL"


@dataclass(frozen=True)
class OnticSpace:
    """Finite set of ontic labels, optionally sector-tagged."""

    labels: tuple[str, ...]
    sectors: dict[str, Sector | None] = field(default_factory=dict)

    def __post_init__(self):
        if not self.labels:
            raise ValueError("ontic space must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("ontic labels must be unique")
        unknown = set(self.sectors) - set(self.labels)
        if unknown:
            raise ValueError(f"sector tags for unknown labels: {sorted(unknown)}")

    def sector(self, label: str) -> Sector | None:
        return self.sectors.get(label)


@dataclass(frozen=True)
class EpistemicState:
    """Distribution over ontic labels; absent keys carry zero weight.

    Invariants (checked by validate): weights >= 0, sum to 1 within 1e-9.
    """

    weights: dict[str, float]

    def __post_init__(self):
        for label, w in self.weights.items():
            if type(w) not in (int, float):
                raise TypeError(f"weight for {label!r} must be a real number, got {w!r}")

    def mass_on(self, labels) -> float:
        return sum(self.weights.get(l, 0.0) for l in labels)

    def total(self) -> float:
        return sum(self.weights.values())


@dataclass(frozen=True)
class ResponseFunction:
    """Per-label outcome probability rows xi(k|lambda).

    Invariants (checked by validate): entries in [0, 1], rows sum to 1
    within 1e-9, every ontic label covered.
    """

    table: dict[str, tuple[float, ...]]
    n_outcomes: int

    def __post_init__(self):
        for label, row in self.table.items():
            if any(type(p) not in (int, float) for p in row):
                raise TypeError(f"row for {label!r} must hold real numbers, got {row!r}")

    def row(self, label: str) -> tuple[float, ...] | None:
        return self.table.get(label)


@dataclass(frozen=True)
class Preparation:
    ket: QuantumState
    mu: EpistemicState


@dataclass(frozen=True)
class ModelMeasurement:
    projective: ProjectiveMeasurement
    xi: ResponseFunction


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic map on an ontic label set (lambda -> lambda')."""

    labels: tuple[str, ...]
    rows: dict[str, dict[str, float]]

    def __post_init__(self):
        label_set = set(self.labels)
        if set(self.rows) - label_set:
            raise ValueError("transition rows for unknown labels")
        for src, row in self.rows.items():
            if set(row) - label_set:
                raise ValueError(f"transition row {src!r} targets unknown labels")
            total = sum(row.values())
            if abs(total - 1.0) > DISTRIBUTION_TOL or any(p < -DISTRIBUTION_TOL for p in row.values()):
                raise ValueError(f"transition row {src!r} is not a distribution (sum {total!r})")

    def to_json(self) -> str:
        obj = {
            "labels": list(self.labels),
            "rows": {
                src: {dst: self.rows[src].get(dst, 0.0) for dst in self.labels if dst in self.rows[src]}
                for src in self.labels
                if src in self.rows
            },
        }
        return json.dumps(obj, separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "TransitionMatrix":
        obj = json.loads(text)
        problems = []
        if not isinstance(obj, dict):
            raise FormatError(["transition document must be a JSON object"])
        for key in obj:
            if key not in ("labels", "rows"):
                problems.append(f"unknown key {key!r}")
        labels = obj.get("labels")
        rows = obj.get("rows")
        if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
            problems.append("labels must be a list of strings")
        if not isinstance(rows, dict):
            problems.append("rows must be an object")
        if problems:
            raise FormatError(problems)
        return TransitionMatrix(tuple(labels), {s: dict(r) for s, r in rows.items()})


@dataclass(frozen=True)
class OntologicalModel:
    """Ontic space + preparations + measurements + declared tolerances."""

    space: OnticSpace
    preparations: dict[str, Preparation]
    measurements: dict[str, ModelMeasurement]
    born_tolerance: float = DEFAULT_BORN_TOLERANCE
    support_epsilon: float = DEFAULT_SUPPORT_EPSILON

    @property
    def dimension(self) -> int:
        for prep in self.preparations.values():
            return prep.ket.dimension
        for meas in self.measurements.values():
            return meas.projective.dimension
        raise ValueError("model has neither preparations nor measurements")


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationRecord:
    preparation: str
    measurement: str
    max_residual: float
    worst_outcome: str


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    born_tolerance: float
    structural_errors: tuple[str, ...]
    invariant_errors: tuple[str, ...]
    records: tuple[ValidationRecord, ...]

    @property
    def worst(self) -> ValidationRecord | None:
        return max(self.records, key=lambda r: r.max_residual, default=None)

    def to_dict(self) -> dict:
        worst = self.worst
        return {
            "passed": self.passed,
            "born_tolerance": self.born_tolerance,
            "structural_errors": list(self.structural_errors),
            "invariant_errors": list(self.invariant_errors),
            "records": [
                {
                    "preparation": r.preparation,
                    "measurement": r.measurement,
                    "max_residual": r.max_residual,
                    "worst_outcome": r.worst_outcome,
                }
                for r in self.records
            ],
            "worst": None
            if worst is None
            else {
                "preparation": worst.preparation,
                "measurement": worst.measurement,
                "max_residual": worst.max_residual,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def validate(model: OntologicalModel, tolerance: float | None = None) -> ValidationReport:
    """Check a model against the Born rule and its own bookkeeping.

    Structural failures (missing response rows, unknown labels, wrong row
    width) are reported separately from numeric ones (weights or rows that
    fail their distribution invariants, Born residuals above tolerance).
    The report is deterministic: identical models give identical bytes.
    """
    tol = model.born_tolerance if tolerance is None else tolerance
    structural: list[str] = []
    invariant: list[str] = []
    label_set = set(model.space.labels)

    dim = None
    for pid, prep in model.preparations.items():
        if dim is None:
            dim = prep.ket.dimension
        elif prep.ket.dimension != dim:
            structural.append(f"preparation {pid!r} has dimension {prep.ket.dimension}, expected {dim}")
        unknown = set(prep.mu.weights) - label_set
        if unknown:
            structural.append(f"preparation {pid!r} weights unknown labels {sorted(unknown)}")
        negative = [l for l, w in prep.mu.weights.items() if w < -DISTRIBUTION_TOL]
        if negative:
            invariant.append(f"preparation {pid!r} has negative weights at {sorted(negative)}")
        total = prep.mu.total()
        if abs(total - 1.0) > DISTRIBUTION_TOL:
            invariant.append(f"preparation {pid!r} weights sum to {total!r}")

    for mid, meas in model.measurements.items():
        if dim is not None and meas.projective.dimension != dim:
            structural.append(
                f"measurement {mid!r} has dimension {meas.projective.dimension}, expected {dim}"
            )
        n_out = len(meas.projective.basis)
        if meas.xi.n_outcomes != n_out:
            structural.append(
                f"measurement {mid!r} response declares {meas.xi.n_outcomes} outcomes, basis has {n_out}"
            )
        missing = [l for l in model.space.labels if l not in meas.xi.table]
        if missing:
            structural.append(f"measurement {mid!r} response missing labels {missing}")
        unknown = set(meas.xi.table) - label_set
        if unknown:
            structural.append(f"measurement {mid!r} response has unknown labels {sorted(unknown)}")
        for label in model.space.labels:
            row = meas.xi.table.get(label)
            if row is None:
                continue
            if len(row) != n_out:
                structural.append(f"measurement {mid!r} row {label!r} has width {len(row)}")
                continue
            if any(p < -DISTRIBUTION_TOL or p > 1.0 + DISTRIBUTION_TOL for p in row):
                invariant.append(f"measurement {mid!r} row {label!r} leaves [0,1]")
            if abs(sum(row) - 1.0) > DISTRIBUTION_TOL:
                invariant.append(f"measurement {mid!r} row {label!r} sums to {sum(row)!r}")

    records: list[ValidationRecord] = []
    numeric_failed = False
    for pid, prep in model.preparations.items():
        for mid, meas in model.measurements.items():
            if prep.ket.dimension != meas.projective.dimension:
                continue
            n_out = len(meas.projective.basis)
            acc = [0.0] * n_out
            defect = False
            for label, w in prep.mu.weights.items():
                row = meas.xi.table.get(label)
                if row is None or len(row) != n_out:
                    defect = True
                    continue
                for k in range(n_out):
                    acc[k] += row[k] * w
            if defect:
                continue  # already reported structurally
            worst_k, worst_res = 0, -1.0
            for k, outcome in enumerate(meas.projective.labels):
                res = abs(acc[k] - born_probability(prep.ket, meas.projective, outcome))
                if res > worst_res:
                    worst_k, worst_res = k, res
            records.append(
                ValidationRecord(
                    preparation=pid,
                    measurement=mid,
                    max_residual=worst_res,
                    worst_outcome=meas.projective.labels[worst_k],
                )
            )
            if worst_res > tol:
                numeric_failed = True

    passed = not structural and not invariant and not numeric_failed
    return ValidationReport(
        passed=passed,
        born_tolerance=tol,
        structural_errors=tuple(structural),
        invariant_errors=tuple(invariant),
        records=tuple(records),
    )


# ---------------------------------------------------------------------------
# supports, cores and the structural predicates


def support(model: OntologicalModel, preparation_id: str) -> tuple[str, ...]:
    """Labels carrying more than support_epsilon mass for one preparation."""
    prep = model.preparations[preparation_id]
    eps = model.support_epsilon
    return tuple(l for l in model.space.labels if prep.mu.weights.get(l, 0.0) > eps)


def xi_support(model: OntologicalModel, measurement_id: str, outcome: str) -> tuple[str, ...]:
    """Labels where the response to this outcome exceeds support_epsilon."""
    meas = model.measurements[measurement_id]
    k = meas.projective.outcome_index(outcome)
    eps = model.support_epsilon
    return tuple(
        l for l in model.space.labels if meas.xi.table.get(l, (0.0,) * (k + 1))[k] > eps
    )


def xi_core(model: OntologicalModel, measurement_id: str, outcome: str) -> tuple[str, ...]:
    """Labels where this outcome is certain (response >= 1 - support_epsilon)."""
    meas = model.measurements[measurement_id]
    k = meas.projective.outcome_index(outcome)
    eps = model.support_epsilon
    out = []
    for l in model.space.labels:
        row = meas.xi.table.get(l)
        if row is not None and row[k] >= 1.0 - eps:
            out.append(l)
    return tuple(out)


def is_outcome_deterministic(model: OntologicalModel) -> bool:
    """True when every response entry is 0 or 1 within support_epsilon."""
    eps = model.support_epsilon
    for meas in model.measurements.values():
        for row in meas.xi.table.values():
            for p in row:
                if eps < p < 1.0 - eps:
                    return False
    return True


def reciprocity_matches(model: OntologicalModel) -> list[tuple[str, str, str]]:
    """(preparation, measurement, outcome) triples where the prepared ket is a
    basis vector of the measurement (up to global phase)."""
    matches = []
    for pid, prep in model.preparations.items():
        for mid, meas in model.measurements.items():
            if prep.ket.dimension != meas.projective.dimension:
                continue
            for outcome, basis_state in zip(meas.projective.labels, meas.projective.basis):
                if quantum_overlap(prep.ket, basis_state) >= 1.0 - ALGEBRAIC_TOL:
                    matches.append((pid, mid, outcome))
    return matches


def is_reciprocal(model: OntologicalModel) -> bool:
    """True when support(psi) equals the certainty core of the matching outcome
    for every preparation that appears as a measurement basis vector.

    Preparations without a matching measurement cannot be tested; if none
    match at all, reciprocity is undecidable and an error is raised rather
    than a guess returned.
    """
    matches = reciprocity_matches(model)
    if not matches:
        raise UndecidableError(
            "no preparation matches any measurement basis vector; reciprocity is undecidable"
        )
    for pid, mid, outcome in matches:
        if set(support(model, pid)) != set(xi_core(model, mid, outcome)):
            return False
    return True


def is_maximally_epistemic(model: OntologicalModel, omega_tol: float | None = None) -> bool:
    """Outcome-deterministic and reciprocal, cross-checked against overlaps.

    The structural route (determinism + reciprocity) must agree with the
    overlap route (omega = 1 within omega_tol for every implemented
    nonorthogonal preparation pair); disagreement raises ConsistencyError
    because the two are equivalent for models that validate.
    """
    from .epistemic import nonorthogonal_pairs, omega  # local import, no cycle

    tol = model.born_tolerance if omega_tol is None else omega_tol
    structural = is_outcome_deterministic(model) and is_reciprocal(model)
    pairs = nonorthogonal_pairs(model)
    if not pairs:
        return structural
    overlap_route = all(abs(omega(model, phi, psi) - 1.0) <= tol for phi, psi in pairs)
    if structural != overlap_route:
        raise ConsistencyError(
            f"structural verdict {structural} disagrees with overlap verdict {overlap_route}"
        )
    return structural


# ---------------------------------------------------------------------------
# JSON serialization
#
# Canonical form: compact separators, keys in schema order, weights emitted
# in ontic-label order.  dump(load(dump(m))) == dump(m) holds bit for bit
# because floats are written with Python's shortest round-trip repr.

_SCHEMA_KEYS = {"dimension", "tolerance", "support_epsilon", "ontic_states", "preparations", "measurements"}


def _ket_to_json(state: QuantumState) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]


def _ket_from_json(obj, where: str, dimension: int, problems: list[str]) -> QuantumState | None:
    if (
        not isinstance(obj, list)
        or len(obj) != dimension
        or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(v, (int, float)) for v in p)
            for p in obj
        )
    ):
        problems.append(f"{where}: ket must be a list of {dimension} [re, im] pairs")
        return None
    import numpy as np

    try:
        return QuantumState(np.array([complex(p[0], p[1]) for p in obj]))
    except Exception as exc:  # normalization or dimension failure
        problems.append(f"{where}: {exc}")
        return None


def model_to_json(model: OntologicalModel) -> str:
    obj: dict = {"dimension": model.dimension, "tolerance": model.born_tolerance}
    if model.support_epsilon != DEFAULT_SUPPORT_EPSILON:
        obj["support_epsilon"] = model.support_epsilon
    states = []
    for label in model.space.labels:
        entry: dict = {"id": label}
        sector = model.space.sector(label)
        if sector is not None:
            entry["sector"] = sector.value
        states.append(entry)
    obj["ontic_states"] = states
    obj["preparations"] = {
        pid: {
            "ket": _ket_to_json(prep.ket),
            "mu": {l: prep.mu.weights[l] for l in model.space.labels if l in prep.mu.weights},
        }
        for pid, prep in model.preparations.items()
    }
    obj["measurements"] = {
        mid: {
            "basis": [_ket_to_json(b) for b in meas.projective.basis],
            "xi": {l: list(meas.xi.table[l]) for l in model.space.labels if l in meas.xi.table},
        }
        for mid, meas in model.measurements.items()
    }
    return json.dumps(obj, separators=(",", ":"))


def model_from_json(text: str) -> OntologicalModel:
    """Parse the model interchange format, rejecting unknown keys.

    Schema violations are collected exhaustively and raised together as a
    FormatError.  Numeric invariants are left to `validate`.
    """
    obj = json.loads(text)
    problems: list[str] = []
    if not isinstance(obj, dict):
        raise FormatError(["model document must be a JSON object"])
    for key in obj:
        if key not in _SCHEMA_KEYS:
            problems.append(f"unknown top-level key {key!r}")
    dimension = obj.get("dimension")
    if dimension not in (2, 4):
        problems.append("dimension must be 2 or 4")
        dimension = 2
    tolerance = obj.get("tolerance")
    if not isinstance(tolerance, (int, float)) or tolerance <= 0:
        problems.append("tolerance must be a positive number")
        tolerance = DEFAULT_BORN_TOLERANCE
    support_epsilon = obj.get("support_epsilon", DEFAULT_SUPPORT_EPSILON)
    if not isinstance(support_epsilon, (int, float)) or support_epsilon < 0:
        problems.append("support_epsilon must be a nonnegative number")
        support_epsilon = DEFAULT_SUPPORT_EPSILON

    labels: list[str] = []
    sectors: dict[str, Sector | None] = {}
    raw_states = obj.get("ontic_states")
    if not isinstance(raw_states, list) or not raw_states:
        problems.append("ontic_states must be a nonempty list")
        raw_states = []
    for i, entry in enumerate(raw_states):
        if not isinstance(entry, dict) or "id" not in entry:
            problems.append(f"ontic_states[{i}] must be an object with an 'id'")
            continue
        for key in entry:
            if key not in ("id", "sector"):
                problems.append(f"ontic_states[{i}]: unknown key {key!r}")
        label = entry["id"]
        if not isinstance(label, str):
            problems.append(f"ontic_states[{i}]: id must be a string")
            continue
        if label in sectors:
            problems.append(f"duplicate ontic label {label!r}")
            continue
        sector = None
        if "sector" in entry:
            try:
                sector = Sector(entry["sector"])
            except ValueError:
                problems.append(f"ontic_states[{i}]: unknown sector {entry['sector']!r}")
        labels.append(label)
        sectors[label] = sector
    label_set = set(labels)

    preparations: dict[str, Preparation] = {}
    raw_preps = obj.get("preparations")
    if not isinstance(raw_preps, dict):
        problems.append("preparations must be an object")
        raw_preps = {}
    for pid, entry in raw_preps.items():
        if not isinstance(entry, dict):
            problems.append(f"preparation {pid!r} must be an object")
            continue
        for key in entry:
            if key not in ("ket", "mu"):
                problems.append(f"preparation {pid!r}: unknown key {key!r}")
        ket_state = _ket_from_json(entry.get("ket"), f"preparation {pid!r}", dimension, problems)
        mu = entry.get("mu")
        if not isinstance(mu, dict) or not all(
            isinstance(l, str) and isinstance(w, (int, float)) for l, w in mu.items()
        ):
            problems.append(f"preparation {pid!r}: mu must map labels to numbers")
            mu = {}
        unknown = set(mu) - label_set
        if unknown:
            problems.append(f"preparation {pid!r}: mu has unknown labels {sorted(unknown)}")
        if ket_state is not None:
            preparations[pid] = Preparation(ket_state, EpistemicState({l: float(w) for l, w in mu.items()}))

    measurements: dict[str, ModelMeasurement] = {}
    raw_meas = obj.get("measurements")
    if not isinstance(raw_meas, dict):
        problems.append("measurements must be an object")
        raw_meas = {}
    for mid, entry in raw_meas.items():
        if not isinstance(entry, dict):
            problems.append(f"measurement {mid!r} must be an object")
            continue
        for key in entry:
            if key not in ("basis", "xi"):
                problems.append(f"measurement {mid!r}: unknown key {key!r}")
        basis_raw = entry.get("basis")
        if not isinstance(basis_raw, list) or not basis_raw:
            problems.append(f"measurement {mid!r}: basis must be a nonempty list")
            continue
        basis = []
        for k, ket_obj in enumerate(basis_raw):
            state = _ket_from_json(ket_obj, f"measurement {mid!r} basis[{k}]", dimension, problems)
            if state is not None:
                basis.append(state)
        if len(basis) != len(basis_raw):
            continue
        try:
            projective = ProjectiveMeasurement(tuple(basis), tuple(str(k) for k in range(len(basis))))
        except Exception as exc:
            problems.append(f"measurement {mid!r}: {exc}")
            continue
        xi_raw = entry.get("xi")
        if not isinstance(xi_raw, dict):
            problems.append(f"measurement {mid!r}: xi must be an object")
            xi_raw = {}
        table: dict[str, tuple[float, ...]] = {}
        for label, row in xi_raw.items():
            if label not in label_set:
                problems.append(f"measurement {mid!r}: xi has unknown label {label!r}")
                continue
            if not isinstance(row, list) or len(row) != len(basis) or not all(
                isinstance(p, (int, float)) for p in row
            ):
                problems.append(
                    f"measurement {mid!r}: xi row {label!r} must be a list of {len(basis)} numbers"
                )
                continue
            table[label] = tuple(float(p) for p in row)
        measurements[mid] = ModelMeasurement(projective, ResponseFunction(table, len(basis)))

    if problems:
        raise FormatError(problems)
    return OntologicalModel(
        space=OnticSpace(tuple(labels), sectors),
        preparations=preparations,
        measurements=measurements,
        born_tolerance=float(tolerance),
        support_epsilon=float(support_epsilon),
    )


def load_model(path) -> OntologicalModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(fh.read())


def save_model(model: OntologicalModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))
