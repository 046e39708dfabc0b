"""Write p{a, b} mod 4 as at most two symbols, then replay the certificate.

Run: python3 demos/grade2_shift.py
"""

from milnork.decompose import t1
from milnork.fields import QQ
from milnork.milnor import check_certificate
from milnork.witness import WitnessRequest, make_constructed_instance_t1

sym, bundle = make_constructed_instance_t1(2, 1, QQ, seed=3)
x, y = bundle.lookup(WitnessRequest("NormRepresentation", sym.entries))
print("symbol:", sym)
print("norm witness: x =", x, " y =", y)

d = t1(sym, bundle)
print(f"\n{len(d)} symbol(s), bound {d.bound}:")
for c, es in d.terms.terms:
    print(f"  {c} * {{{', '.join(map(str, es))}}}")

cert = d.certificate
print(f"\ncertificate: {len(cert.steps)} steps")
for s in cert.steps:
    print("  ", s.rule, s.terms, s.slots)
print("checker says:", "valid" if check_certificate(cert) else "invalid")
