"""Exact Milnor K-theory mod p^m: symbol-length decompositions with replayable certificates."""

from .decompose import (
    CertifiedDecomposition,
    bound,
    corollary_length2,
    plan,
    t1,
    t2,
    t3,
    t4,
    validate_decomposition,
)
from .fields import QQ, GF, Elem, Field, cyclo, parse_element
from .milnor import (
    Certificate,
    KClassExpr,
    Modulus,
    MoveStep,
    Symbol,
    check_certificate,
    exp_map,
    parse_class,
    shift_map,
)
from .mod3 import SymbolAlgebra, reduced_norm, reduced_trace, t5_recombine, verify_t5_witness
from .witness import Policy, WitnessBundle, WitnessRequest

__all__ = [
    "CertifiedDecomposition", "bound", "corollary_length2", "plan", "t1", "t2", "t3", "t4",
    "validate_decomposition", "QQ", "GF", "Elem", "Field", "cyclo", "parse_element",
    "Certificate", "KClassExpr", "Modulus", "MoveStep", "Symbol", "check_certificate",
    "exp_map", "parse_class", "shift_map", "SymbolAlgebra", "reduced_norm", "reduced_trace",
    "t5_recombine", "verify_t5_witness", "Policy", "WitnessBundle", "WitnessRequest",
]
