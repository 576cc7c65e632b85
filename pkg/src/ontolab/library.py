"""Reference models and fixture data.

Three families of single-qubit models, each exact or near-exact for the
Z/X preparation and measurement set:

* psi-complete: one ontic state per preparation, Born-rule response rows.
  Indeterministic but reciprocal; every nonorthogonal overlap is zero.
* threshold: a hidden threshold variable, uniform over [-1/2, 1/2] in eight
  bins, outcome +1 when the variable clears -(n.m)/2.  Outcome-deterministic
  but not reciprocal; overlaps are zero because each preparation keeps its
  own copy of the variable.
* ks-qubit: a direction lattice over the Bloch sphere with mass
  proportional to the positive part of the alignment and hemisphere
  response functions.  Outcome-deterministic and reciprocal; every overlap
  ratio approaches 1 as the lattice refines, at the cost of Born residuals
  at the discretization scale.

The module also builds the five reference assignment tables and writes all
fixtures to the packaged data directory.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from .models import (
    EpistemicState,
    ModelMeasurement,
    OnticSpace,
    OntologicalModel,
    Preparation,
    ResponseFunction,
    load_model,
    model_to_json,
)
from .quantum import (
    KET_MINUS,
    KET_ONE,
    KET_PLUS,
    KET_ZERO,
    X_MEASUREMENT,
    Z_MEASUREMENT,
    ProjectiveMeasurement,
    QuantumState,
    bloch_vector,
    born_distribution,
)
from .tables import (
    AssignmentTable,
    SettingGrid,
    TemporalOrder,
    load_table,
    table_to_json,
)

_DEFAULT_KETS: dict[str, QuantumState] = {
    "zero": KET_ZERO,
    "one": KET_ONE,
    "plus": KET_PLUS,
    "minus": KET_MINUS,
}
_DEFAULT_MEASUREMENTS: dict[str, ProjectiveMeasurement] = {
    "Z": Z_MEASUREMENT,
    "X": X_MEASUREMENT,
}


def data_dir() -> Path:
    """Fixture directory; ONTOLAB_DATA_DIR overrides the packaged one."""
    override = os.environ.get("ONTOLAB_DATA_DIR")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def psi_complete_model(
    kets: dict[str, QuantumState] | None = None,
    measurements: dict[str, ProjectiveMeasurement] | None = None,
) -> OntologicalModel:
    """One ontic state per preparation; responses are the Born rows."""
    kets = dict(_DEFAULT_KETS if kets is None else kets)
    measurements = dict(_DEFAULT_MEASUREMENTS if measurements is None else measurements)
    space = OnticSpace(labels=tuple(kets), sectors={})
    preparations = {
        pid: Preparation(ket=k, mu=EpistemicState({pid: 1.0})) for pid, k in kets.items()
    }
    model_measurements = {}
    for mid, pm in measurements.items():
        rows = {
            pid: tuple(born_distribution(k, pm)[o] for o in pm.labels)
            for pid, k in kets.items()
        }
        model_measurements[mid] = ModelMeasurement(
            projective=pm, xi=ResponseFunction(rows, n_outcomes=len(pm.labels))
        )
    return OntologicalModel(
        space=space, preparations=preparations, measurements=model_measurements
    )


def threshold_qubit_model(bins: int = 8) -> OntologicalModel:
    """Hidden-threshold model on (preparation, bin) labels.

    The threshold variable is uniform over [-1/2, 1/2]; measuring along m on
    a preparation with Bloch vector n yields +1 when the variable is at
    least -(n.m)/2, reproducing (1 + n.m)/2.  Bin centers make this exact
    whenever n.m is a multiple of 2/bins, which covers the Z/X set.
    """
    if bins < 2 or bins % 2:
        raise ValueError("bins must be an even count of at least 2")
    centers = [-0.5 + (j + 0.5) / bins for j in range(bins)]
    labels = tuple(f"{pid}:{j}" for pid in _DEFAULT_KETS for j in range(bins))
    space = OnticSpace(labels=labels, sectors={})
    preparations = {
        pid: Preparation(
            ket=k,
            mu=EpistemicState({f"{pid}:{j}": 1.0 / bins for j in range(bins)}),
        )
        for pid, k in _DEFAULT_KETS.items()
    }
    bloch = {pid: bloch_vector(k) for pid, k in _DEFAULT_KETS.items()}
    model_measurements = {}
    for mid, pm in _DEFAULT_MEASUREMENTS.items():
        direction = bloch_vector(pm.basis[0])
        rows = {}
        for pid in _DEFAULT_KETS:
            cut = -float(np.dot(bloch[pid], direction)) / 2.0
            for j, center in enumerate(centers):
                plus = 1.0 if center >= cut else 0.0
                rows[f"{pid}:{j}"] = (plus, 1.0 - plus)
        model_measurements[mid] = ModelMeasurement(
            projective=pm, xi=ResponseFunction(rows, n_outcomes=2)
        )
    return OntologicalModel(
        space=space, preparations=preparations, measurements=model_measurements
    )


def _fibonacci_directions(cells: int) -> np.ndarray:
    """Near-uniform direction lattice on the unit sphere."""
    i = np.arange(cells)
    z = 1.0 - (2.0 * i + 1.0) / cells
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    phi = 2.0 * math.pi * golden * i
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def ks_qubit_model(
    cells: int = 4000,
    kets: dict[str, QuantumState] | None = None,
    measurements: dict[str, ProjectiveMeasurement] | None = None,
    born_tolerance: float = 1e-2,
) -> OntologicalModel:
    """Direction-lattice model: mass max(0, n.lambda) and hemisphere responses.

    Outcome-deterministic and reciprocal by construction; Born residuals
    shrink roughly like 1/sqrt(cells), so the stored tolerance reflects the
    discretization scale rather than float error.  An even cell count keeps
    every lattice direction off the Z equator, which the reciprocity check
    needs (support taken strictly above zero mass).
    """
    if cells < 100:
        raise ValueError("at least 100 cells required for a meaningful lattice")
    if cells % 2:
        raise ValueError("cell count must be even to keep the lattice off the equator")
    kets = dict(_DEFAULT_KETS if kets is None else kets)
    measurements = dict(_DEFAULT_MEASUREMENTS if measurements is None else measurements)
    directions = _fibonacci_directions(cells)
    labels = tuple(f"c{i}" for i in range(cells))
    space = OnticSpace(labels=labels, sectors={})

    preparations = {}
    for pid, k in kets.items():
        weights = np.clip(directions @ bloch_vector(k), 0.0, None)
        weights /= weights.sum()
        preparations[pid] = Preparation(
            ket=k,
            mu=EpistemicState(
                {labels[i]: float(w) for i, w in enumerate(weights) if w > 0.0}
            ),
        )

    model_measurements = {}
    for mid, pm in measurements.items():
        axis = bloch_vector(pm.basis[0])
        plus = directions @ axis >= 0.0
        rows = {
            labels[i]: ((1.0, 0.0) if plus[i] else (0.0, 1.0)) for i in range(cells)
        }
        model_measurements[mid] = ModelMeasurement(
            projective=pm, xi=ResponseFunction(rows, n_outcomes=2)
        )
    return OntologicalModel(
        space=space,
        preparations=preparations,
        measurements=model_measurements,
        born_tolerance=born_tolerance,
        support_epsilon=0.0,
    )


# ---------------------------------------------------------------------------
# reference assignment tables


def reference_tables() -> dict[str, AssignmentTable]:
    """The five named assignment tables used throughout the tests.

    i: fully local; ii: only the first party's outcome shifts with the
    remote setting; iii: mirror case; iv: both directions shift; v: a 3x3
    one-way table whose evolution under sequential measurement is the
    worked example for the constraint rules.
    """
    g2 = SettingGrid(("sx", "sy"), ("sx", "sy"))
    tables = {
        "table_i": AssignmentTable(
            g2,
            {
                ("sx", "sx"): (1, 1),
                ("sx", "sy"): (1, -1),
                ("sy", "sx"): (-1, 1),
                ("sy", "sy"): (-1, -1),
            },
        ),
        "table_ii": AssignmentTable(
            g2,
            {
                ("sx", "sx"): (1, 1),
                ("sx", "sy"): (1, 1),
                ("sy", "sx"): (1, 1),
                ("sy", "sy"): (-1, 1),
            },
        ),
        "table_iii": AssignmentTable(
            g2,
            {
                ("sx", "sx"): (1, 1),
                ("sx", "sy"): (1, 1),
                ("sy", "sx"): (1, 1),
                ("sy", "sy"): (1, -1),
            },
        ),
        "table_iv": AssignmentTable(
            g2,
            {
                ("sx", "sx"): (1, 1),
                ("sx", "sy"): (1, 1),
                ("sy", "sx"): (1, -1),
                ("sy", "sy"): (-1, -1),
            },
        ),
    }
    g3 = SettingGrid(("sz", "sx", "sy"), ("sz", "sx", "sy"))
    entries = {}
    for x in g3.alice:
        for y in g3.bob:
            b = -1 if (x == "sy" and y in ("sz", "sx")) else 1
            entries[(x, y)] = (1, b)
    tables["table_v"] = AssignmentTable(g3, entries, TemporalOrder.ALICE_FIRST)
    return tables


# ---------------------------------------------------------------------------
# fixture files

_KS_FIXTURE_CELLS = (1000, 4000, 16000)


def list_reference_data() -> list[str]:
    """Names of the packaged fixture files."""
    names = ["psi_complete.json", "threshold_qubit.json", "search_basic.json"]
    names += [f"ks_qubit_{n}.json" for n in _KS_FIXTURE_CELLS]
    names += [f"{key}.json" for key in reference_tables()]
    return sorted(names)


def load_reference_model(name: str) -> OntologicalModel:
    """Load a packaged model fixture by file name (with or without .json)."""
    if not name.endswith(".json"):
        name += ".json"
    path = data_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"no fixture {name!r} in {data_dir()}")
    return load_model(path)


def load_reference_table(name: str) -> AssignmentTable:
    if not name.endswith(".json"):
        name += ".json"
    path = data_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"no fixture {name!r} in {data_dir()}")
    return load_table(path)


_SEARCH_BASIC = (
    '{"states":{"zero":[[1.0,0.0],[0.0,0.0]],"one":[[0.0,0.0],[1.0,0.0]],'
    '"plus":[[0.7071067811865476,0.0],[0.7071067811865476,0.0]]},'
    '"measurements":{"Z":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]],'
    '"X":[[[0.7071067811865476,0.0],[0.7071067811865476,0.0]],'
    '[[0.7071067811865476,0.0],[-0.7071067811865476,0.0]]]},'
    '"objective":["zero","plus"]}'
)


def write_reference_data(target: Path | None = None) -> list[Path]:
    """Regenerate every fixture file; returns the paths written.

    Construction is deterministic, so regenerating must reproduce the
    packaged bytes (a test pins this).
    """
    target = data_dir() if target is None else Path(target)
    target.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name: str, text: str) -> None:
        path = target / name
        path.write_text(text, encoding="utf-8")
        written.append(path)

    put("psi_complete.json", model_to_json(psi_complete_model()))
    put("threshold_qubit.json", model_to_json(threshold_qubit_model()))
    for n in _KS_FIXTURE_CELLS:
        put(f"ks_qubit_{n}.json", model_to_json(ks_qubit_model(n)))
    for key, table in reference_tables().items():
        put(f"{key}.json", table_to_json(table))
    put("search_basic.json", _SEARCH_BASIC)
    return written
