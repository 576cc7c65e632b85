"""Step a deterministic assignment table through two local measurements."""

import json

import numpy as np

from ontolab import classify, evolve_local_measurement, reference_tables, table_to_json

tables = reference_tables()
table = tables["table_v"]

print("starting table (classification:", classify(table).tag.value + "):")
print(table_to_json(table))

# Alice measures sz first. Outcomes she could see are fixed by the table,
# Bob's column must stay intact, and her remaining settings may now depend
# on what she found.
step1 = evolve_local_measurement(table, "A", "sz")
print("after A measures sz:")
print(json.dumps(step1.to_dict(), indent=2))
print("admissible successor tables:", step1.count())

rng = np.random.default_rng(7)
successor = step1.sample(rng)
print()
print("one admissible successor, reclassified:", classify(successor).tag.value)

# a second measurement on the other wing collapses the remaining freedom
step2 = evolve_local_measurement(successor, "B", "sx", prior_measurement="A")
print("after B measures sx:", step2.to_dict()["result_type"],
      "with", step2.count(), "admissible tables")

for i, final in enumerate(step2.admissible_tables()):
    tag = classify(final).tag.value
    print(f"  final table {i}: {tag}")
