"""Certificates are checked move by move: perturb one parameter and the replay fails.

Run: python3 demos/tampering.py
"""

from dataclasses import replace

from milnork.decompose import t1
from milnork.fields import QQ
from milnork.milnor import check_certificate
from milnork.witness import make_constructed_instance_t1

sym, bundle = make_constructed_instance_t1(3, 1, QQ, seed=0)
cert = t1(sym, bundle).certificate
print("original valid:", check_certificate(cert).valid)

steps = list(cert.steps)
k = next(j for j, s in enumerate(steps) if s.params)
s = steps[k]
bent = replace(s, params=(s.params[0] + 1,) + s.params[1:])
res = check_certificate(replace(cert, steps=tuple(steps[:k] + [bent] + steps[k + 1:])))
print(f"step {k} ({s.rule}) param {s.params[0]} -> {bent.params[0]}:", res.valid, "at step", res.step, "-", res.reason)

res = check_certificate(replace(cert, steps=tuple(steps[1:])))
print("first step dropped:", res.valid, "-", res.reason)
