"""Difference of two symbols sharing a tail, and the recursion plan behind the bound.

Run: python3 demos/two_symbols.py
"""

from milnork.decompose import plan, t2
from milnork.fields import QQ
from milnork.milnor import check_certificate
from milnork.witness import make_constructed_instance_t2

print("plan for n = 3, i = 2:")
print(plan("t2", 3, 2))

for n, i in ((2, 1), (2, 2), (3, 3)):
    al, be, _, bundle = make_constructed_instance_t2(n, i, 1, QQ, seed=1)
    d = t2(al, be, i, bundle, m=1)
    ok = check_certificate(d.certificate)
    print(f"\nn={n} i={i}: {len(d)} symbols (bound {d.bound}), "
          f"{len(d.certificate.steps)} steps, {'valid' if ok else 'INVALID'}")
