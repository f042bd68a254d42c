"""
Holstein-Primakoff: a finite block you can trust
================================================

For natural p the HP images split the Fock space into F0 (degree <= p)
and its complement.  On F0 the representation is unitary for q > 0.
"""

from fractions import Fraction
from uqboson import build_hp, build_dyson, make_backend
from uqboson.repranalysis import invariance_check, unitarity_check, f0_dimension

be = make_backend("numeric", q=Fraction(4, 5))
r = build_hp(2, 2, 4, be)
print("F0 dimension:", f0_dimension(2, 2), "of", len(r.basis))
print("F0 invariant:", invariance_check(r, "F0").invariant)
print("F1 invariant:", invariance_check(r, "F1").invariant)

###############################################################################
# e_i^dagger == f_i on F0, to 50 digits

rep = unitarity_check(build_hp(2, 2, 2, be))
print("max deviation:", rep.max_deviation)

###############################################################################
# The Dyson form is not unitary; the check reports where it breaks

dy = unitarity_check(build_dyson(1, 2, 2, be), expect_fail=True)
print("Dyson deviation:", dy.max_deviation, "at", dy.witness)
