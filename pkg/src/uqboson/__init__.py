"""Dyson and Holstein-Primakoff boson realizations of U_q[sl(n+1)] on truncated Fock spaces."""

__version__ = "0.1.0"

from .fock import FockBasis, SparseOp, compose, enumerate_basis, q_commutator  # noqa: E402
from .qscalar import QLaurent, QRadical, make_backend, qint, qnum_eval  # noqa: E402
from .realization import (Realization, build, build_deformed_oscillators, build_dyson,  # noqa: E402
                          build_hp, build_hp_deformed, gl_extend)
from .relcheck import check_relation, oscillator_suite, standard_suite  # noqa: E402
from .dsl import parse_relation, to_text  # noqa: E402

__all__ = [
    "FockBasis", "SparseOp", "compose", "enumerate_basis", "q_commutator",
    "QLaurent", "QRadical", "make_backend", "qint", "qnum_eval",
    "Realization", "build", "build_deformed_oscillators", "build_dyson", "build_hp",
    "build_hp_deformed", "gl_extend",
    "check_relation", "oscillator_suite", "standard_suite", "parse_relation", "to_text",
]
