"""
Setting q = 1
=============

Every q-integer [k] becomes k, and the q-deformed realizations fall back
to the classical boson forms of sl(n+1).
"""

from uqboson import build_dyson, make_backend
from uqboson.repranalysis import classical_limit, classical_limit_for

be = make_backend("exact-laurent")
r = build_dyson(1, 2, 3, be)
for i, j, v in r.ops["e1"].entries():
    print(f"e1 |{j}> -> {v}  ->  {v.at_one()} at q = 1")

print(classical_limit(r).passed)

###############################################################################
# A small grid, both realizations

for kind in ("dyson", "hp"):
    print(kind, all(classical_limit_for(kind, n, p, 5).passed for n in (1, 2) for p in (1, 2, 3)))
