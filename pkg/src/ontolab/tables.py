"""Deterministic assignment tables for two parties and their ontic typing.

A table records, for every pair of local settings (x, y), the outcome pair
(a, b) a joint ontic state would produce.  Parameter independence can fail
in two directions: Alice's outcome may depend on Bob's setting (written
A<-B) or Bob's on Alice's (A->B).  The four cases give the type tags:

    TYPE_1    both directions independent (local reality for both parties)
    TYPE_2I   only A<-B dependence
    TYPE_2II  only A->B dependence
    TYPE_2III both directions

Local measurement evolves a table under four rules: the measured party's
recorded outcome for the chosen setting is preserved (R1); the remote
party's observables take definite values copied from the chosen setting's
row (R2); no parameter dependence appears in a direction that had none (R3);
type-1 tables stay type 1 (R4).  The post-measurement state is a constraint
set, not a single table; its tag tracks the localization protocol: the first
mover's measurement collapses a both-ways table to the one-way tag of the
fixed temporal order, and the second party's measurement lands TYPE_1.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, OrderingError, TooLargeError

Array = np.ndarray


class TemporalOrder(str, enum.Enum):
    ALICE_FIRST = "ALICE_FIRST"
    BOB_FIRST = "BOB_FIRST"


class OnticTypeTag(str, enum.Enum):
    TYPE_1 = "TYPE_1"
    TYPE_2I = "TYPE_2I"
    TYPE_2II = "TYPE_2II"
    TYPE_2III = "TYPE_2III"


@dataclass(frozen=True)
class SettingGrid:
    """Ordered measurement labels for each party."""

    alice: tuple[str, ...]
    bob: tuple[str, ...]

    def __post_init__(self):
        for name, settings in (("alice", self.alice), ("bob", self.bob)):
            if not settings:
                raise ValueError(f"{name} needs at least one setting")
            if len(set(settings)) != len(settings):
                raise ValueError(f"{name} settings must be unique")
            if any("," in s for s in settings):
                raise ValueError("setting labels must not contain commas")


_OUTCOMES = (1, -1)


@dataclass(frozen=True)
class AssignmentTable:
    """Complete deterministic outcome assignment over a setting grid."""

    grid: SettingGrid
    entries: dict[tuple[str, str], tuple[int, int]]
    order: TemporalOrder = TemporalOrder.ALICE_FIRST

    def __post_init__(self):
        expected = {(x, y) for x in self.grid.alice for y in self.grid.bob}
        got = set(self.entries)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise ValueError(f"table incomplete: missing {missing}, extraneous {extra}")
        for cell, pair in self.entries.items():
            if (
                len(pair) != 2
                or any(type(v) is not int or v not in _OUTCOMES for v in pair)
            ):
                raise ValueError(f"cell {cell} must hold two outcomes from {{+1, -1}}, got {pair!r}")

    def a(self, x: str, y: str) -> int:
        return self.entries[(x, y)][0]

    def b(self, x: str, y: str) -> int:
        return self.entries[(x, y)][1]


@dataclass(frozen=True)
class PiWitness:
    """One demonstrated parameter dependence: the named party's outcome for
    `setting` differs across the two remote settings."""

    party: str
    setting: str
    remote_pair: tuple[str, str]
    outcomes: tuple[int, int]


@dataclass(frozen=True)
class PiReport:
    alice_independent: bool
    bob_independent: bool
    witnesses: tuple[PiWitness, ...]


def check_parameter_independence(table: AssignmentTable) -> PiReport:
    """Both directions of parameter independence, with the first violating
    triple (in grid order) as witness for each broken direction."""
    witnesses: list[PiWitness] = []
    alice_ok = True
    for x in table.grid.alice:
        if not alice_ok:
            break
        for y1, y2 in itertools.combinations(table.grid.bob, 2):
            v1, v2 = table.a(x, y1), table.a(x, y2)
            if v1 != v2:
                witnesses.append(PiWitness("A", x, (y1, y2), (v1, v2)))
                alice_ok = False
                break
    bob_ok = True
    for y in table.grid.bob:
        if not bob_ok:
            break
        for x1, x2 in itertools.combinations(table.grid.alice, 2):
            v1, v2 = table.b(x1, y), table.b(x2, y)
            if v1 != v2:
                witnesses.append(PiWitness("B", y, (x1, x2), (v1, v2)))
                bob_ok = False
                break
    return PiReport(alice_independent=alice_ok, bob_independent=bob_ok, witnesses=tuple(witnesses))


def check_outcome_independence(table: AssignmentTable) -> bool:
    """Deterministic tables factorize given (x, y, lambda); always True.

    Present so model audits can record the check explicitly rather than
    assume it."""
    return True


@dataclass(frozen=True)
class OnticType:
    tag: OnticTypeTag
    witnesses: tuple[PiWitness, ...]


_TAG_BY_FLAGS = {
    (True, True): OnticTypeTag.TYPE_1,
    (False, True): OnticTypeTag.TYPE_2I,
    (True, False): OnticTypeTag.TYPE_2II,
    (False, False): OnticTypeTag.TYPE_2III,
}


def classify(table: AssignmentTable) -> OnticType:
    """Type tag from the two parameter-independence directions."""
    report = check_parameter_independence(table)
    tag = _TAG_BY_FLAGS[(report.alice_independent, report.bob_independent)]
    return OnticType(tag=tag, witnesses=report.witnesses)


def marginal_table(table: AssignmentTable, party: str) -> dict[str, int]:
    """The party's own setting -> outcome map, defined only when that party's
    outcomes ignore the remote setting."""
    report = check_parameter_independence(table)
    if party == "A":
        if not report.alice_independent:
            raise ValueError("Alice's outcomes depend on Bob's setting: no local reality to report")
        return {x: table.a(x, table.grid.bob[0]) for x in table.grid.alice}
    if party == "B":
        if not report.bob_independent:
            raise ValueError("Bob's outcomes depend on Alice's setting: no local reality to report")
        return {y: table.b(table.grid.alice[0], y) for y in table.grid.bob}
    raise ValueError(f"party must be 'A' or 'B', got {party!r}")


# ---------------------------------------------------------------------------
# evolution under local measurement


def _first_mover(order: TemporalOrder) -> str:
    return "A" if order is TemporalOrder.ALICE_FIRST else "B"


def _step_tag(tag: OnticTypeTag, order: TemporalOrder, second_step: bool) -> OnticTypeTag:
    if tag is OnticTypeTag.TYPE_1 or second_step:
        return OnticTypeTag.TYPE_1
    if tag is OnticTypeTag.TYPE_2III:
        return OnticTypeTag.TYPE_2II if order is TemporalOrder.ALICE_FIRST else OnticTypeTag.TYPE_2I
    return tag


@dataclass(frozen=True)
class PostMeasurementConstraint:
    """Admissible post-measurement tables, summarized.

    `realized_outcomes` are the values the measured party's chosen setting
    can take (more than one only if that outcome depended on the remote
    setting).  `remote_fixed` pins every remote observable per R2.  Free
    settings of the measured party may vary across remote settings only when
    `remote_dependence_allowed` (per R3).  `result_type` is the conservative
    tag after this step; `admissible_types` adds TYPE_1 when the constraints
    also admit fully local tables.
    """

    grid: SettingGrid
    order: TemporalOrder
    party: str
    setting: str
    realized_outcomes: tuple[int, ...]
    remote_fixed: dict[str, int]
    free_settings: tuple[str, ...]
    remote_dependence_allowed: bool
    result_type: OnticTypeTag
    admissible_types: tuple[OnticTypeTag, ...]

    def count(self) -> int:
        """Number of admissible tables, without enumerating them."""
        remote = self.grid.bob if self.party == "A" else self.grid.alice
        per_row = 2 ** len(remote) if self.remote_dependence_allowed else 2
        return len(self.realized_outcomes) * per_row ** len(self.free_settings)

    def admissible_tables(self, limit: int | None = None):
        """Deterministic enumeration of every admissible post-measurement table."""
        own, remote = (
            (self.grid.alice, self.grid.bob) if self.party == "A" else (self.grid.bob, self.grid.alice)
        )
        if self.remote_dependence_allowed:
            row_choices = list(itertools.product(_OUTCOMES, repeat=len(remote)))
        else:
            row_choices = [(v,) * len(remote) for v in _OUTCOMES]
        count = 0
        for realized in self.realized_outcomes:
            for combo in itertools.product(row_choices, repeat=len(self.free_settings)):
                rows = dict(zip(self.free_settings, combo))
                rows[self.setting] = (realized,) * len(remote)
                entries = {}
                for x in self.grid.alice:
                    for y in self.grid.bob:
                        if self.party == "A":
                            entries[(x, y)] = (rows[x][self.grid.bob.index(y)], self.remote_fixed[y])
                        else:
                            entries[(x, y)] = (self.remote_fixed[x], rows[y][self.grid.alice.index(x)])
                yield AssignmentTable(self.grid, entries, self.order)
                count += 1
                if limit is not None and count >= limit:
                    return

    def sample(self, rng: np.random.Generator) -> AssignmentTable:
        """One admissible table drawn uniformly over the constraint choices."""
        own, remote = (
            (self.grid.alice, self.grid.bob) if self.party == "A" else (self.grid.bob, self.grid.alice)
        )
        realized = self.realized_outcomes[rng.integers(len(self.realized_outcomes))]
        rows = {self.setting: (realized,) * len(remote)}
        for s in self.free_settings:
            if self.remote_dependence_allowed:
                rows[s] = tuple(int(v) for v in rng.choice(_OUTCOMES, size=len(remote)))
            else:
                rows[s] = (int(rng.choice(_OUTCOMES)),) * len(remote)
        entries = {}
        for x in self.grid.alice:
            for y in self.grid.bob:
                if self.party == "A":
                    entries[(x, y)] = (rows[x][self.grid.bob.index(y)], self.remote_fixed[y])
                else:
                    entries[(x, y)] = (self.remote_fixed[x], rows[y][self.grid.alice.index(x)])
        return AssignmentTable(self.grid, entries, self.order)

    def to_dict(self) -> dict:
        return {
            "party": self.party,
            "setting": self.setting,
            "realized_outcomes": list(self.realized_outcomes),
            "remote_fixed": dict(self.remote_fixed),
            "free_settings": list(self.free_settings),
            "remote_dependence_allowed": self.remote_dependence_allowed,
            "result_type": self.result_type.value,
            "admissible_types": [t.value for t in self.admissible_types],
        }


def evolve_local_measurement(
    table: AssignmentTable,
    party: str,
    setting: str,
    prior_measurement: str | None = None,
) -> PostMeasurementConstraint:
    """Constrain the state after `party` measures `setting`.

    Tables that are not TYPE_1 evolve in temporal order: the order's first
    party measures first; pass prior_measurement to record that the other
    party already measured.  TYPE_1 tables may be measured by either party
    at any point (nothing depends on the order).
    """
    if party not in ("A", "B"):
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    own = table.grid.alice if party == "A" else table.grid.bob
    remote = table.grid.bob if party == "A" else table.grid.alice
    if setting not in own:
        raise ValueError(f"setting {setting!r} absent from party {party}'s grid")
    if prior_measurement is not None and prior_measurement not in ("A", "B"):
        raise ValueError(f"prior_measurement must be 'A', 'B' or None, got {prior_measurement!r}")
    if prior_measurement == party:
        raise OrderingError(f"party {party} already measured; the other party moves next")

    typed = classify(table)
    if typed.tag is not OnticTypeTag.TYPE_1:
        first = _first_mover(table.order)
        if prior_measurement is None and party != first:
            raise OrderingError(
                f"table order is {table.order.value}; party {party} cannot measure first"
            )

    if party == "A":
        row = [table.a(setting, y) for y in remote]
        remote_fixed = {y: table.b(setting, y) for y in remote}
        pre_dep = not check_parameter_independence(table).alice_independent
    else:
        row = [table.b(x, setting) for x in remote]
        remote_fixed = {x: table.a(x, setting) for x in remote}
        pre_dep = not check_parameter_independence(table).bob_independent

    realized = tuple(dict.fromkeys(row))
    result = _step_tag(typed.tag, table.order, second_step=prior_measurement is not None)
    admissible = (OnticTypeTag.TYPE_1,) if result is OnticTypeTag.TYPE_1 else (OnticTypeTag.TYPE_1, result)
    return PostMeasurementConstraint(
        grid=table.grid,
        order=table.order,
        party=party,
        setting=setting,
        realized_outcomes=realized,
        remote_fixed=remote_fixed,
        free_settings=tuple(s for s in own if s != setting),
        remote_dependence_allowed=pre_dep,
        result_type=result,
        admissible_types=admissible,
    )


# ---------------------------------------------------------------------------
# exhaustive product-state check


@dataclass(frozen=True)
class Prop1Verdict:
    grid: SettingGrid
    order: TemporalOrder
    anchor: tuple[str, str]
    tables_enumerated: int
    finals_checked: int
    counterexamples: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "grid": {"A": list(self.grid.alice), "B": list(self.grid.bob)},
            "order": self.order.value,
            "anchor": list(self.anchor),
            "tables_enumerated": self.tables_enumerated,
            "finals_checked": self.finals_checked,
            "counterexamples": list(self.counterexamples),
            "passed": self.passed,
        }


def _classify_batch(a: Array, b: Array) -> Array:
    """Type codes 0..3 (TYPE_1, TYPE_2I, TYPE_2II, TYPE_2III) for stacked tables."""
    pi_a = (a == a[:, :, :1]).all(axis=(1, 2))
    pi_b = (b == b[:, :1, :]).all(axis=(1, 2))
    return (~pi_a).astype(np.int8) + 2 * (~pi_b).astype(np.int8)


_CODE_TO_TAG = (OnticTypeTag.TYPE_1, OnticTypeTag.TYPE_2I, OnticTypeTag.TYPE_2II, OnticTypeTag.TYPE_2III)


def _enumerate_consistent(grid: SettingGrid, anchor_cell: tuple[int, int], lo: int, hi: int) -> tuple[Array, Array]:
    """Tables lo..hi (exclusive) of the anchored enumeration as int8 stacks."""
    nx, ny = len(grid.alice), len(grid.bob)
    free_cells = [(i, j) for i in range(nx) for j in range(ny) if (i, j) != anchor_cell]
    idx = np.arange(lo, hi, dtype=np.int64)
    a = np.empty((idx.size, nx, ny), dtype=np.int8)
    b = np.empty((idx.size, nx, ny), dtype=np.int8)
    a[:, anchor_cell[0], anchor_cell[1]] = 1
    b[:, anchor_cell[0], anchor_cell[1]] = 1
    for j, (xi, yj) in enumerate(free_cells):
        a[:, xi, yj] = 1 - 2 * ((idx >> (2 * j + 1)) & 1).astype(np.int8)
        b[:, xi, yj] = 1 - 2 * ((idx >> (2 * j)) & 1).astype(np.int8)
    return a, b


def _prop1_chunk(grid: SettingGrid, order: TemporalOrder, anchor_cell: tuple[int, int], lo: int, hi: int) -> tuple[int, list[int]]:
    nx = len(grid.alice)
    ax, ay = anchor_cell
    a, b = _enumerate_consistent(grid, anchor_cell, lo, hi)
    n = a.shape[0]
    codes = _classify_batch(a, b)
    bad = np.zeros(n, dtype=bool)

    # Tag bookkeeping: first mover's step, then the second party's step.
    step1 = codes.copy()
    if order is TemporalOrder.ALICE_FIRST:
        step1[codes == 3] = 2
    else:
        step1[codes == 3] = 1
    bad |= step1 == 3  # a both-ways tag must not survive the first measurement
    # Second step lands TYPE_1 by construction; nothing to test at tag level.

    # Table-level: intermediates after the first mover measures the anchor
    # setting have the remote side pinned, so they can never show dependence
    # toward the remote party.
    if order is TemporalOrder.ALICE_FIRST:
        remote_fix = b[:, ax, :]  # (n, ny)
        inter_a = a.copy()
        inter_a[:, ax, :] = 1  # anchor row realizes +1 (always recorded there)
        inter_b = np.broadcast_to(remote_fix[:, None, :], a.shape)
        inter_codes = _classify_batch(inter_a, inter_b)
        bad |= (inter_codes == 2) | (inter_codes == 3)
        # Finals: Alice's column at the anchor Bob setting is pinned by R2 of
        # the second step; her other observables range over both values.
        free_x = [i for i in range(nx) if i != ax]
        had_minus = (a[:, ax, :] == -1).any(axis=1)
        finals = 0
        for r in (1, -1):
            valid = np.ones(n, dtype=bool) if r == 1 else had_minus
            if not valid.any():
                continue
            for combo in itertools.product((1, -1), repeat=len(free_x)):
                fin_a = np.empty_like(a[valid])
                fin_a[:, ax, :] = r
                for i, val in zip(free_x, combo):
                    fin_a[:, i, :] = val
                fin_b = np.broadcast_to(remote_fix[valid][:, None, :], fin_a.shape)
                fin_codes = _classify_batch(fin_a, fin_b)
                if (fin_codes != 0).any():
                    bad_idx = np.flatnonzero(valid)[fin_codes != 0]
                    bad[bad_idx] = True
                finals += int(valid.sum())
    else:
        # Mirror: Bob moves first; swap roles by transposing tables.
        return _prop1_chunk(
            SettingGrid(grid.bob, grid.alice),
            TemporalOrder.ALICE_FIRST,
            (ay, ax),
            lo,
            hi,
        )

    return finals, (np.flatnonzero(bad) + lo).tolist()


def proposition1_check(
    grid: SettingGrid,
    order: TemporalOrder = TemporalOrder.ALICE_FIRST,
    anchor: tuple[str, str] | None = None,
    max_tables: int = 2**20,
    jobs: int = 1,
) -> Prop1Verdict:
    """Exhaustively verify that every deterministic table consistent with a
    product-state anchor row evolves to TYPE_1 after both parties measure
    the anchor settings.

    Enumerates all tables with (a, b) = (+1, +1) at the anchor cell, applies
    the first mover's measurement and then the second party's, and checks
    every reachable final table classifies TYPE_1.  Grids above 4 settings
    per side, or enumerations beyond max_tables, are refused.
    """
    nx, ny = len(grid.alice), len(grid.bob)
    if nx > 4 or ny > 4:
        raise TooLargeError("exhaustive check supports at most 4 settings per side")
    total = 4 ** (nx * ny - 1)
    if total > max_tables:
        raise TooLargeError(f"{total} tables exceed the cap of {max_tables}")
    if anchor is None:
        anchor = (grid.alice[0], grid.bob[0])
    anchor_cell = (grid.alice.index(anchor[0]), grid.bob.index(anchor[1]))

    jobs = max(1, int(jobs))
    bounds = np.linspace(0, total, jobs + 1, dtype=np.int64)
    chunks = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    results = []
    if jobs == 1 or len(chunks) == 1:
        results = [_prop1_chunk(grid, order, anchor_cell, lo, hi) for lo, hi in chunks]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_prop1_chunk, grid, order, anchor_cell, lo, hi) for lo, hi in chunks]
            results = [f.result() for f in futures]

    finals = sum(r[0] for r in results)
    counterexamples: list[int] = []
    for r in results:
        counterexamples.extend(r[1])
    return Prop1Verdict(
        grid=grid,
        order=order,
        anchor=anchor,
        tables_enumerated=total,
        finals_checked=finals,
        counterexamples=tuple(counterexamples),
    )


# ---------------------------------------------------------------------------
# JSON serialization


def table_to_json(table: AssignmentTable) -> str:
    obj = {
        "order": table.order.value,
        "grid": {"A": list(table.grid.alice), "B": list(table.grid.bob)},
        "entries": {
            f"{x},{y}": list(table.entries[(x, y)])
            for x in table.grid.alice
            for y in table.grid.bob
        },
    }
    return json.dumps(obj, separators=(",", ":"))


def table_from_json(text: str) -> AssignmentTable:
    obj = json.loads(text)
    problems: list[str] = []
    if not isinstance(obj, dict):
        raise FormatError(["table document must be a JSON object"])
    for key in obj:
        if key not in ("order", "grid", "entries"):
            problems.append(f"unknown key {key!r}")
    try:
        order = TemporalOrder(obj.get("order"))
    except ValueError:
        problems.append(f"order must be ALICE_FIRST or BOB_FIRST, got {obj.get('order')!r}")
        order = TemporalOrder.ALICE_FIRST
    grid_obj = obj.get("grid")
    if (
        not isinstance(grid_obj, dict)
        or set(grid_obj) != {"A", "B"}
        or not all(
            isinstance(grid_obj.get(k), list) and all(isinstance(s, str) for s in grid_obj[k])
            for k in ("A", "B")
        )
    ):
        problems.append("grid must be an object with string lists 'A' and 'B'")
        grid_obj = {"A": [], "B": []}
    try:
        grid = SettingGrid(tuple(grid_obj["A"]), tuple(grid_obj["B"]))
    except ValueError as exc:
        problems.append(str(exc))
        raise FormatError(problems)
    entries_obj = obj.get("entries")
    if not isinstance(entries_obj, dict):
        problems.append("entries must be an object")
        entries_obj = {}
    entries: dict[tuple[str, str], tuple[int, int]] = {}
    expected = {(x, y) for x in grid.alice for y in grid.bob}
    for key, value in entries_obj.items():
        parts = key.split(",")
        if len(parts) != 2 or (parts[0], parts[1]) not in expected:
            problems.append(f"entry key {key!r} is not an 'x,y' cell of the grid")
            continue
        if (
            not isinstance(value, list)
            or len(value) != 2
            or any(type(v) is not int or v not in (-1, 1) for v in value)
        ):
            problems.append(f"entry {key!r} must be a pair of outcomes from {{-1, 1}}")
            continue
        entries[(parts[0], parts[1])] = (value[0], value[1])
    missing = sorted(expected - set(entries))
    if missing and not problems:
        problems.append(f"entries missing cells {missing}")
    if problems:
        raise FormatError(problems)
    return AssignmentTable(grid, entries, order)


def load_table(path) -> AssignmentTable:
    with open(path, "r", encoding="utf-8") as fh:
        return table_from_json(fh.read())


def save_table(table: AssignmentTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(table_to_json(table))
