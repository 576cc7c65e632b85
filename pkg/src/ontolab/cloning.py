"""Cloning-machine budget analysis at the ontic level.

An ideal cloner for the machine basis (phi, phi_perp) sends an input whose
ontic state lies in the overlap region with phi to the product clone
(phi, phi), and likewise for phi_perp.  Product preparations admit no
nonlocal ontic states, so those output regions contribute at most the local
CHSH value 2.  Only the input mass outside both overlap regions can feed
the nonlocal sector, where the algebraic maximum 4 applies.  Reproducing
the quantum CHSH value of the entangled clone output therefore caps the
overlap mass, which is what bounds the degree of epistemicity.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from .epistemic import check_general_bound, ontic_overlap
from .errors import ConsistencyError, OrthogonalPairError
from .models import OntologicalModel
from .quantum import TSIRELSON_BOUND, quantum_overlap
from .tables import OnticTypeTag
from .tolerances import DISTRIBUTION_TOL, NEAR_ORTHOGONAL_EPS

_LOCAL_CAP = 2.0
_ALGEBRAIC_CAP = 4.0
_DEFAULT_CAPS = {"overlap": _LOCAL_CAP, "rest": _ALGEBRAIC_CAP}


class CloneInputRegion(str, enum.Enum):
    IN_PHI_OVERLAP = "IN_PHI_OVERLAP"
    IN_PHI_PERP_OVERLAP = "IN_PHI_PERP_OVERLAP"
    OUTSIDE = "OUTSIDE"


class CloneOutputRegion(str, enum.Enum):
    PRODUCT_PHI_PHI = "PRODUCT_PHI_PHI"
    PRODUCT_PERP_PERP = "PRODUCT_PERP_PERP"
    UNCONSTRAINED = "UNCONSTRAINED"


@dataclass(frozen=True)
class CloneRouting:
    """Where the cloner sends one input region, and the ontic type of the
    output when the routing pins it down."""

    input_region: CloneInputRegion
    output_region: CloneOutputRegion
    ontic_type: OnticTypeTag | None

    def to_dict(self) -> dict:
        return {
            "input_region": self.input_region.value,
            "output_region": self.output_region.value,
            "ontic_type": None if self.ontic_type is None else self.ontic_type.value,
        }


@dataclass(frozen=True)
class ChshBudget:
    """Mass decomposition of an input distribution over the three cloner
    regions, with the CHSH contribution cap of each region.

    mass_phi and mass_phi_perp are the overlap shares with the machine-basis
    states; mass_rest is everything else.  The overlap shares can never
    exceed the corresponding quantum overlaps alpha_sq and 1 - alpha_sq.
    """

    alpha_sq: float
    mass_phi: float
    mass_phi_perp: float
    mass_rest: float
    chsh_target: float
    per_region_chsh: dict[str, float] = field(default_factory=lambda: dict(_DEFAULT_CAPS))
    # Discretized models overshoot the quantum overlaps by their Born
    # residual scale; the cap and nonnegativity checks must allow that.
    mass_tolerance: float = DISTRIBUTION_TOL

    def __post_init__(self):
        if not NEAR_ORTHOGONAL_EPS < self.alpha_sq < 1.0 - NEAR_ORTHOGONAL_EPS:
            raise ValueError(f"degenerate alpha_sq {self.alpha_sq!r}")
        masses = (self.mass_phi, self.mass_phi_perp, self.mass_rest)
        if any(m < -self.mass_tolerance for m in masses):
            raise ValueError(
                f"region masses must be nonnegative, got {masses}; a negative rest mass "
                "usually means the overlap supports are not disjoint, in which case the "
                "three-region decomposition does not apply"
            )
        if abs(sum(masses) - 1.0) > DISTRIBUTION_TOL:
            raise ValueError(f"region masses sum to {sum(masses)!r}, not 1")
        if self.mass_phi > self.alpha_sq + self.mass_tolerance:
            raise ValueError(
                f"mass_phi {self.mass_phi!r} exceeds the quantum overlap {self.alpha_sq!r}"
            )
        if self.mass_phi_perp > 1.0 - self.alpha_sq + self.mass_tolerance:
            raise ValueError(
                f"mass_phi_perp {self.mass_phi_perp!r} exceeds the quantum overlap "
                f"{1.0 - self.alpha_sq!r}"
            )
        if not 2.0 - 1e-9 <= self.chsh_target <= TSIRELSON_BOUND + 1e-9:
            raise ValueError(f"chsh_target {self.chsh_target!r} outside [2, 2*sqrt(2)]")
        if set(self.per_region_chsh) != {"overlap", "rest"}:
            raise ValueError("per_region_chsh needs exactly the keys 'overlap' and 'rest'")
        if not 0.0 <= self.per_region_chsh["overlap"] <= _LOCAL_CAP + 1e-9:
            raise ValueError("overlap region cap must lie in [0, 2]")
        if not 0.0 <= self.per_region_chsh["rest"] <= _ALGEBRAIC_CAP + 1e-9:
            raise ValueError("rest region cap must lie in [0, 4]")

    def to_dict(self) -> dict:
        return {
            "alpha_sq": self.alpha_sq,
            "mass_phi": self.mass_phi,
            "mass_phi_perp": self.mass_phi_perp,
            "mass_rest": self.mass_rest,
            "chsh_target": self.chsh_target,
            "per_region_chsh": dict(self.per_region_chsh),
            "mass_tolerance": self.mass_tolerance,
        }


def budget_from_model(
    model: OntologicalModel,
    machine_basis: tuple[str, str],
    psi_id: str,
    rest_cap: float | None = None,
) -> ChshBudget:
    """Region masses of psi's epistemic state for a machine basis, with the
    CHSH target set to the quantum value of the ideal clone output.

    rest_cap tightens the unconstrained region's contribution below the
    algebraic maximum 4 (e.g. to the Tsirelson bound); leave None for the
    standard budget.
    """
    phi_id, perp_id = machine_basis
    for pid in (phi_id, perp_id, psi_id):
        if pid not in model.preparations:
            raise KeyError(f"preparation {pid!r} missing from the model")
    phi = model.preparations[phi_id].ket
    perp = model.preparations[perp_id].ket
    if quantum_overlap(phi, perp) > NEAR_ORTHOGONAL_EPS:
        raise ValueError(
            f"machine basis states {phi_id!r} and {perp_id!r} are not orthogonal"
        )
    alpha_sq = quantum_overlap(phi, model.preparations[psi_id].ket)
    if not NEAR_ORTHOGONAL_EPS < alpha_sq < 1.0 - NEAR_ORTHOGONAL_EPS:
        raise OrthogonalPairError(
            f"input {psi_id!r} is orthogonal to one machine basis state "
            f"(overlap {alpha_sq!r}); the clone output is a product state"
        )
    mass_phi = ontic_overlap(model, phi_id, psi_id)
    mass_perp = ontic_overlap(model, perp_id, psi_id)
    caps = dict(_DEFAULT_CAPS)
    if rest_cap is not None:
        caps["rest"] = float(rest_cap)
    return ChshBudget(
        alpha_sq=alpha_sq,
        mass_phi=mass_phi,
        mass_phi_perp=mass_perp,
        mass_rest=1.0 - mass_phi - mass_perp,
        chsh_target=2.0 * math.sqrt(1.0 + 4.0 * alpha_sq * (1.0 - alpha_sq)),
        per_region_chsh=caps,
        mass_tolerance=max(model.born_tolerance, DISTRIBUTION_TOL),
    )


def max_chsh(budget: ChshBudget) -> float:
    """Largest CHSH expectation the region masses can deliver."""
    overlap_cap = budget.per_region_chsh["overlap"]
    rest_cap = budget.per_region_chsh["rest"]
    return overlap_cap * (budget.mass_phi + budget.mass_phi_perp) + rest_cap * budget.mass_rest


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    margin: float
    max_chsh: float
    chsh_target: float

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "margin": self.margin,
            "max_chsh": self.max_chsh,
            "chsh_target": self.chsh_target,
        }


def feasible(budget: ChshBudget) -> Feasibility:
    """Whether the budget can reproduce its CHSH target, with the margin.

    With the standard caps (2 local, 4 algebraic) this is algebraically the
    same question as the general overlap bound, so the verdict is
    cross-checked against it and a disagreement raises ConsistencyError.
    """
    ceiling = max_chsh(budget)
    margin = ceiling - budget.chsh_target
    verdict = margin >= -2e-9
    if budget.per_region_chsh == _DEFAULT_CAPS:
        omega_phi = min(1.0, max(0.0, budget.mass_phi / budget.alpha_sq))
        omega_perp = min(1.0, max(0.0, budget.mass_phi_perp / (1.0 - budget.alpha_sq)))
        quantum_target = 2.0 * math.sqrt(
            1.0 + 4.0 * budget.alpha_sq * (1.0 - budget.alpha_sq)
        )
        if abs(budget.chsh_target - quantum_target) <= 1e-9:
            check = check_general_bound(budget.alpha_sq, omega_phi, omega_perp)
            if check.satisfied != verdict and abs(margin) > 4.0 * budget.mass_tolerance:
                raise ConsistencyError(
                    f"budget verdict {verdict} disagrees with the overlap bound "
                    f"verdict {check.satisfied} (margin {margin!r})"
                )
    return Feasibility(
        feasible=verdict, margin=margin, max_chsh=ceiling, chsh_target=budget.chsh_target
    )


def min_nonlocal_mass(alpha_sq: float) -> float:
    """Least mass outside both overlap regions needed to reach the quantum
    CHSH value of the clone output: solve 2(1-m) + 4m >= 2*sqrt(K)."""
    if not NEAR_ORTHOGONAL_EPS < alpha_sq < 1.0 - NEAR_ORTHOGONAL_EPS:
        raise ValueError(f"degenerate alpha_sq {alpha_sq!r}")
    return math.sqrt(1.0 + 4.0 * alpha_sq * (1.0 - alpha_sq)) - 1.0


_ROUTING = {
    CloneInputRegion.IN_PHI_OVERLAP: (CloneOutputRegion.PRODUCT_PHI_PHI, OnticTypeTag.TYPE_1),
    CloneInputRegion.IN_PHI_PERP_OVERLAP: (CloneOutputRegion.PRODUCT_PERP_PERP, OnticTypeTag.TYPE_1),
    CloneInputRegion.OUTSIDE: (CloneOutputRegion.UNCONSTRAINED, None),
}


def ontic_clone_map(
    model: OntologicalModel,
    machine_basis: tuple[str, str],
    input_label_region: CloneInputRegion | str,
) -> CloneRouting:
    """Route one input region through the cloner.

    Overlap regions land in the corresponding product-clone support, which
    is TYPE_1 (product preparations possess no nonlocal ontic states); the
    outside region is unconstrained and may intersect the nonlocal sector.
    """
    phi_id, perp_id = machine_basis
    for pid in (phi_id, perp_id):
        if pid not in model.preparations:
            raise KeyError(f"preparation {pid!r} missing from the model")
    if quantum_overlap(model.preparations[phi_id].ket, model.preparations[perp_id].ket) > NEAR_ORTHOGONAL_EPS:
        raise ValueError(f"machine basis states {phi_id!r} and {perp_id!r} are not orthogonal")
    try:
        region = CloneInputRegion(input_label_region)
    except ValueError:
        raise ValueError(
            f"unknown input region {input_label_region!r}; expected one of "
            f"{[r.value for r in CloneInputRegion]}"
        ) from None
    output, tag = _ROUTING[region]
    return CloneRouting(input_region=region, output_region=output, ontic_type=tag)


@dataclass(frozen=True)
class CloneSimReport:
    budget: ChshBudget
    feasibility: Feasibility
    routing: tuple[CloneRouting, ...]

    def to_dict(self) -> dict:
        return {
            "budget": self.budget.to_dict(),
            "feasibility": self.feasibility.to_dict(),
            "routing": [r.to_dict() for r in self.routing],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def clone_sim(
    model: OntologicalModel,
    machine_basis: tuple[str, str],
    psi_id: str,
    rest_cap: float | None = None,
) -> CloneSimReport:
    """Full cloning-harness pass: budget, feasibility verdict, and the
    region routing table."""
    budget = budget_from_model(model, machine_basis, psi_id, rest_cap=rest_cap)
    verdict = feasible(budget)
    routing = tuple(
        ontic_clone_map(model, machine_basis, region) for region in CloneInputRegion
    )
    return CloneSimReport(budget=budget, feasibility=verdict, routing=routing)


# ---------------------------------------------------------------------------
# bound sweep


@dataclass(frozen=True)
class SweepRow:
    alpha_sq: float
    chsh_target: float
    max_overlap_mass: float
    min_nonlocal_mass: float
    bound_rhs: float


def bound_sweep(alpha_values, jobs: int = 1) -> list[SweepRow]:
    """Overlap budget across alpha_sq values.

    max_overlap_mass comes from the budget optimizer and bound_rhs from the
    closed form; the two columns must agree, which makes every sweep a
    cross-check of the optimizer against the algebra.
    """
    from .epistemic import general_bound_rhs
    from .search import max_overlap_with_chsh

    values = [float(a) for a in alpha_values]
    for a in values:
        if not NEAR_ORTHOGONAL_EPS < a < 1.0 - NEAR_ORTHOGONAL_EPS:
            raise ValueError(f"degenerate alpha_sq {a!r} in sweep grid")

    def row(a: float) -> SweepRow:
        target = 2.0 * math.sqrt(1.0 + 4.0 * a * (1.0 - a))
        mass = max_overlap_with_chsh(a, target)
        rhs = general_bound_rhs(a)
        if abs(mass - rhs) > 1e-9:
            raise ConsistencyError(
                f"optimizer overlap {mass!r} and closed-form bound {rhs!r} "
                f"disagree at alpha_sq={a!r}"
            )
        return SweepRow(
            alpha_sq=a,
            chsh_target=target,
            max_overlap_mass=mass,
            min_nonlocal_mass=min_nonlocal_mass(a),
            bound_rhs=rhs,
        )

    if jobs <= 1 or len(values) <= 1:
        return [row(a) for a in values]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(row, values))


def sweep_to_csv(rows: list[SweepRow]) -> str:
    lines = ["alpha_sq,chsh_target,max_overlap_mass,min_nonlocal_mass,bound_rhs"]
    for r in rows:
        lines.append(
            f"{r.alpha_sq!r},{r.chsh_target!r},{r.max_overlap_mass!r},"
            f"{r.min_nonlocal_mass!r},{r.bound_rhs!r}"
        )
    return "\n".join(lines) + "\n"
