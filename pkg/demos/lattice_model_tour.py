"""Walk through the lattice construction at increasing resolution.

The model covers the qubit Bloch sphere with equal-area cells and prepares
each state as a uniform distribution over the hemisphere facing it. Responses
are deterministic by cell. The Born rule then holds only up to a
discretization residual that shrinks as the cell count grows, while the
overlap ratio for nonorthogonal preparations stays pinned near 1: the model
is about as psi-epistemic as a qubit model gets. The price shows up in the
cloning budget, which goes infeasible the moment a Tsirelson-level CHSH value
is demanded of the clones.
"""

from ontolab import TSIRELSON_BOUND, clone_sim, ks_qubit_model, omega, validate

for cells in (1000, 4000, 16000, 100000):
    model = ks_qubit_model(cells)
    report = validate(model)
    print(f"cells={cells:>6}  max Born residual={report.worst.max_residual:.2e}  "
          f"passed={report.passed}")

model = ks_qubit_model(100000)

print()
print("overlap ratios at 100000 cells:")
for phi, psi in (("zero", "plus"), ("one", "plus"), ("zero", "minus")):
    print(f"  omega({phi}, {psi}) = {omega(model, phi, psi):.6f}")

# now ask the ontic clone map to also win a CHSH game
sim = clone_sim(model, ("zero", "one"), "plus")
f = sim.feasibility
print()
print(f"clone feasibility vs CHSH target {TSIRELSON_BOUND:.6f}:")
print(f"  feasible = {f.feasible}")
print(f"  max CHSH with this much overlap = {f.max_chsh:.6f}")
print(f"  margin = {f.margin:.6f}")
