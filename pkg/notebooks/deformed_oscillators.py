"""
q-oscillators and the HP realization
====================================

The deformed oscillators obey [a-, a+]_q = q^(-N).  Composing them gives
exactly the HP matrices.
"""

from uqboson import build_deformed_oscillators, build_hp, build_hp_deformed, make_backend
from uqboson import oscillator_suite, check_relation

be = make_backend("exact-radical")
osc = build_deformed_oscillators(1, 4, be)
for i, j, v in osc.ops["atilde1p"].entries():
    print(f"a+ |{j}> -> {v} |{i}>")

for rel in oscillator_suite(1):
    rep = check_relation(rel, osc)
    print(f"{rep.verdict:<12} {rep.relation}")

###############################################################################
# Entry-wise agreement with the direct square-root formulas

a, b = build_hp(2, 2, 2, be), build_hp_deformed(2, 2, 2, be)
same = all(sorted(a.ops[g].entries()) == sorted(b.ops[g].entries()) for g in a.generators())
print("hp == hp-deformed:", same)
