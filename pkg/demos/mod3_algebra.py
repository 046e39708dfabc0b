"""The cyclic algebra (a, b) over Q(zeta_9): reduced norm, trace, and a checked witness.

Run: python3 demos/mod3_algebra.py
"""

from milnork.fields import cyclo
from milnork.mod3 import SymbolAlgebra, make_t5_witness, reduced_norm, reduced_trace, verify_t5_witness

F = cyclo(9)
A = SymbolAlgebra(F(2), F(5))
x, y = A.x(), A.y()
print("Nrd(x) =", reduced_norm(A, x), " Nrd(y) =", reduced_norm(A, y))
u = x + y * y
print("u = x + y^2:  Trd =", reduced_trace(A, u), " Nrd =", reduced_norm(A, u))
print("Nrd(u*x) == Nrd(u)*Nrd(x):", reduced_norm(A, u * x) == reduced_norm(A, u) * reduced_norm(A, x))

z, coeffs, gamma, delta = make_t5_witness(A, seed=1)
delta_checked, report = verify_t5_witness(A, z, coeffs, gamma)
print("\nwitness checks:", report)
print("delta =", delta_checked)
