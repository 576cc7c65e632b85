"""Degree-of-epistemicity computations and the CHSH-derived overlap bounds.

For a validated model, the ontic overlap of an ordered pair is the mass the
second preparation places on the support of the first; dividing by the
quantum overlap |<phi|psi>|^2 gives omega(phi, psi) in [0, 1].  omega = 1 for
every nonorthogonal pair is the quantitative face of maximal epistemicity;
omega = 0 everywhere means distinct preparations never share ontic states.

The bound side: a two-qubit state sqrt(a)|00> + sqrt(1-a)|11> can reach a
CHSH value of 2*sqrt(1 + 4a(1-a)), and a model reproducing that value must
keep a*omega(phi,psi) + (1-a)*omega(phi_perp,psi) below 2 - sqrt(1+4a(1-a)).
At a = 1/2 this is the symmetric bound omega <= 2 - sqrt(2).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .errors import ConsistencyError, OrthogonalPairError
from .models import OntologicalModel, support
from .quantum import quantum_overlap as _ket_overlap
from .tolerances import NEAR_ORTHOGONAL_EPS, OPTIMIZATION_TOL


def symmetric_bound_value() -> float:
    """Overlap cap for a Tsirelson-saturating symmetric pair: 2 - sqrt(2)."""
    return 2.0 - math.sqrt(2.0)


def general_bound_rhs(alpha_sq: float) -> float:
    """Right side of the weighted overlap bound, 2 - sqrt(1 + 4a(1-a))."""
    if not 0.0 <= alpha_sq <= 1.0:
        raise ValueError("alpha_sq must lie in [0, 1]")
    return 2.0 - math.sqrt(1.0 + 4.0 * alpha_sq * (1.0 - alpha_sq))


def quantum_overlap_of(model: OntologicalModel, phi_id: str, psi_id: str) -> float:
    """|<phi|psi>|^2 for two prepared states of the model."""
    phi = model.preparations[phi_id].ket
    psi = model.preparations[psi_id].ket
    return _ket_overlap(phi, psi)


def ontic_overlap(model: OntologicalModel, phi_id: str, psi_id: str) -> float:
    """Mass of mu(.|psi) on the support of mu(.|phi)."""
    psi = model.preparations[psi_id]
    return psi.mu.mass_on(support(model, phi_id))


def omega(model: OntologicalModel, phi_id: str, psi_id: str) -> float:
    """Degree of epistemicity: ontic overlap / quantum overlap.

    Refuses pairs with quantum overlap below NEAR_ORTHOGONAL_EPS; the ratio
    is 0/0 there and means nothing.  A ratio exceeding 1 by more than the
    model's Born tolerance signals a Born violation upstream and raises.
    """
    q = quantum_overlap_of(model, phi_id, psi_id)
    if q < NEAR_ORTHOGONAL_EPS:
        raise OrthogonalPairError(
            f"pair ({phi_id!r}, {psi_id!r}) is orthogonal within {NEAR_ORTHOGONAL_EPS}; omega undefined"
        )
    value = ontic_overlap(model, phi_id, psi_id) / q
    if value > 1.0 + max(model.born_tolerance, OPTIMIZATION_TOL):
        raise ConsistencyError(
            f"omega({phi_id!r}, {psi_id!r}) = {value!r} exceeds 1 beyond tolerance; "
            "the model cannot be reproducing the Born rule"
        )
    return value


def nonorthogonal_pairs(model: OntologicalModel) -> list[tuple[str, str]]:
    """Ordered pairs of distinct preparations with nonnegligible overlap."""
    ids = list(model.preparations)
    return [
        (a, b)
        for a in ids
        for b in ids
        if a != b and quantum_overlap_of(model, a, b) >= NEAR_ORTHOGONAL_EPS
    ]


# ---------------------------------------------------------------------------
# bounds


@dataclass(frozen=True)
class BoundCheck:
    """Outcome of one overlap-bound evaluation; margin = rhs - lhs (signed,
    positive means satisfied) so sweeps can locate the crossing."""

    alpha_sq: float
    lhs: float
    rhs: float
    satisfied: bool
    margin: float


def check_general_bound(alpha_sq: float, omega_phi: float, omega_perp: float) -> BoundCheck:
    """Weighted bound a*omega(phi,psi) + (1-a)*omega(phi_perp,psi) <= rhs."""
    for name, value in (("omega_phi", omega_phi), ("omega_perp", omega_perp)):
        if not -OPTIMIZATION_TOL <= value <= 1.0 + OPTIMIZATION_TOL:
            raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    if alpha_sq < NEAR_ORTHOGONAL_EPS or alpha_sq > 1.0 - NEAR_ORTHOGONAL_EPS:
        raise ValueError("alpha_sq at 0 or 1 leaves no superposition to bound")
    rhs = general_bound_rhs(alpha_sq)
    lhs = alpha_sq * omega_phi + (1.0 - alpha_sq) * omega_perp
    margin = rhs - lhs
    return BoundCheck(alpha_sq=alpha_sq, lhs=lhs, rhs=rhs, satisfied=margin >= -OPTIMIZATION_TOL, margin=margin)


def check_symmetric_bound(omega_phi: float, omega_perp: float) -> BoundCheck:
    """Equal-weight bound omega <= 2 - sqrt(2); unequal inputs delegate to the
    general bound at alpha_sq = 1/2 (same verdict, averaged left side)."""
    return check_general_bound(0.5, omega_phi, omega_perp)


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class PairOverlap:
    phi: str
    psi: str
    q_overlap: float
    o_overlap: float
    omega: float


@dataclass(frozen=True)
class EpistemicityReport:
    pairs: tuple[PairOverlap, ...]
    bound_checks: tuple[BoundCheck, ...]

    def to_dict(self) -> dict:
        return {
            "pairs": [
                {
                    "phi": p.phi,
                    "psi": p.psi,
                    "q_overlap": p.q_overlap,
                    "o_overlap": p.o_overlap,
                    "omega": p.omega,
                }
                for p in self.pairs
            ],
            "bound_checks": [
                {
                    "alpha_sq": b.alpha_sq,
                    "lhs": b.lhs,
                    "rhs": b.rhs,
                    "satisfied": b.satisfied,
                    "margin": b.margin,
                }
                for b in self.bound_checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["phi", "psi", "q_overlap", "o_overlap", "omega"])
        for p in self.pairs:
            writer.writerow([p.phi, p.psi, repr(p.q_overlap), repr(p.o_overlap), repr(p.omega)])
        return buf.getvalue()


def compute_report(
    model: OntologicalModel, pairs: list[tuple[str, str]] | None = None
) -> EpistemicityReport:
    """Overlap table for the given ordered pairs (default: all nonorthogonal
    pairs), plus automatic bound checks.

    A bound check is emitted for every (measurement, psi) combination where
    both basis vectors of a two-outcome measurement are themselves prepared
    states and psi overlaps both: alpha_sq = |<phi|psi>|^2 against
    omega(phi, psi) and omega(phi_perp, psi).
    """
    if pairs is None:
        pairs = nonorthogonal_pairs(model)
    rows = []
    for phi_id, psi_id in pairs:
        q = quantum_overlap_of(model, phi_id, psi_id)
        o = ontic_overlap(model, phi_id, psi_id)
        rows.append(
            PairOverlap(phi=phi_id, psi=psi_id, q_overlap=q, o_overlap=o, omega=omega(model, phi_id, psi_id))
        )

    checks = []
    prep_by_ket = list(model.preparations.items())
    for mid, meas in model.measurements.items():
        if len(meas.projective.basis) != 2:
            continue
        anchors = []
        for basis_state in meas.projective.basis:
            found = None
            for pid, prep in prep_by_ket:
                if prep.ket.dimension == basis_state.dimension and _ket_overlap(prep.ket, basis_state) >= 1.0 - 1e-12:
                    found = pid
                    break
            anchors.append(found)
        if anchors[0] is None or anchors[1] is None:
            continue
        phi_id, perp_id = anchors
        for psi_id in model.preparations:
            if psi_id in (phi_id, perp_id):
                continue
            alpha_sq = quantum_overlap_of(model, phi_id, psi_id)
            if alpha_sq < NEAR_ORTHOGONAL_EPS or alpha_sq > 1.0 - NEAR_ORTHOGONAL_EPS:
                continue
            # discretized models overshoot omega = 1 by O(Born residual);
            # omega() already rejected anything worse, so project onto the
            # valid range before the bound check
            om_phi = min(1.0, omega(model, phi_id, psi_id))
            om_perp = min(1.0, omega(model, perp_id, psi_id))
            checks.append(check_general_bound(alpha_sq, om_phi, om_perp))
    return EpistemicityReport(pairs=tuple(rows), bound_checks=tuple(checks))
