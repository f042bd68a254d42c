"""
The Dyson realization, entry by entry
=====================================

Build the Dyson images of the Chevalley generators for U_q[sl(2)] and
watch the Cartan relation hold exactly as Laurent polynomials in q.
"""

# exact-laurent keeps every matrix entry a Laurent polynomial in q
from uqboson import build_dyson, make_backend, qint, compose
be = make_backend("exact-laurent")
r = build_dyson(1, 3, 5, be)

# h1 is diagonal: p - 2l on the state |l>
print("h1:", [str(v) for v in r.ops["h1"].diagonal_values(be.zero())])

# e1 carries the factor [p - N]; f1 is a bare creation operator
for i, j, v in r.ops["e1"].entries():
    print(f"e1 |{j}> -> {v} |{i}>")

###############################################################################
# The commutator [e1, f1] lands on [p - 2l] along the diagonal.
# The top state is skipped: f1 would leave the truncated space there.

c = compose(r.ops["e1"], r.ops["f1"]) - compose(r.ops["f1"], r.ops["e1"])
for l in range(r.L):
    print(l, c.entry(l, l, be.zero()), "==", qint(3 - 2 * l))

###############################################################################
# The whole standard suite for sl(4), checked on the guarded subspace

from uqboson import standard_suite, check_relation
r3 = build_dyson(3, 2, 5, be)
reports = [check_relation(rel, r3) for rel in standard_suite(3)]
print(sum(x.passed for x in reports), "of", len(reports), "relations hold exactly")
