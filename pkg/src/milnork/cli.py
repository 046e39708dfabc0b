"""Command-line interface: ``milnork <subcommand> ...``.

Exit codes: 0 success, 1 verification failure or bound violation,
2 missing witness (request as JSON on stderr), 3 parse error, 4 bad flags.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import decompose as dec
from .errors import MilnorError, MissingWitness, OutOfRange, ParseError
from .fields import QQ, Field, parse_element
from .forms import (
    NOT_FOUND,
    PROVABLY_ANISOTROPIC,
    DiagonalForm,
    hilbert_symbol_Q,
    is_isotropic_Q,
    isotropy_witness_search,
)
from .milnor import (
    certificate_from_json,
    check_certificate,
    dumps,
    normalize_over_Q,
    parse_class,
)
from .witness import WitnessBundle

EXIT_OK, EXIT_FAIL, EXIT_MISSING, EXIT_PARSE, EXIT_FLAGS = 0, 1, 2, 3, 4


class FlagError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise FlagError(message)


def _parser():
    p = _Parser(prog="milnork", description="Symbol-length decompositions with checkable certificates.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    d = sub.add_parser("decompose", help="decompose an instance")
    d.add_argument("--theorem", required=True, choices=dec.THEOREMS)
    d.add_argument("--input", default="-")
    d.add_argument("--witnesses")
    d.add_argument("--plan", action="store_true", help="print the recursion plan only")
    d.add_argument("--out")

    v = sub.add_parser("verify", help="check a certificate or decomposition")
    v.add_argument("--cert", default="-")

    g = sub.add_parser("generate", help="write a constructed instance with its witnesses")
    g.add_argument("--theorem", required=True, choices=dec.THEOREMS)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--i", type=int)
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--field", default="Q")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")

    h = sub.add_parser("hilbert", help="Hilbert symbol (a, b)_p over Q")
    h.add_argument("-a", required=True)
    h.add_argument("-b", required=True)
    h.add_argument("-p", required=True, help="a prime or 'inf'")

    i = sub.add_parser("isotropy", help="isotropy of a diagonal form over Q")
    i.add_argument("--form", required=True, help="comma-separated coefficients")
    i.add_argument("--search-height", type=int)

    n = sub.add_parser("normalize", help="canonical form of a class expression over Q")
    n.add_argument("--class", dest="expr", required=True)

    b = sub.add_parser("bounds", help="closed-form bound and plan total")
    b.add_argument("--theorem", required=True, choices=dec.THEOREMS)
    b.add_argument("--n", type=int)
    b.add_argument("--i", type=int)
    return p


# --- I/O -----------------------------------------------------------------------

def _read_json(path):
    try:
        text = sys.stdin.read() if path in (None, "-") else open(path).read()
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _write(doc, path):
    text = dumps(doc)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _elems(xs, fld):
    return tuple(fld(x) for x in xs)


def _instance_doc(theorem, fld, m, symbols=None, **extra):
    doc = {"theorem": theorem, "field": str(fld), "m": m}
    if symbols is not None:
        doc["symbols"] = [[str(e) for e in s] for s in symbols]
    doc.update({k: (str(v) if hasattr(v, "field") else v) for k, v in extra.items()})
    return doc


# --- subcommands -----------------------------------------------------------------

def _generate(a):
    fld = Field.parse(a.field)
    seed = int(os.environ.get("MILNOR_SEED", a.seed))
    try:
        return _generate_with(a, fld, seed)
    except ValueError as exc:
        raise FlagError(str(exc)) from exc


def _generate_with(a, fld, seed):
    from . import witness as W

    t = a.theorem
    if t == "t1":
        sym, bundle = W.make_constructed_instance_t1(a.n, a.m, fld, seed)
        inst = _instance_doc(t, fld, a.m, [sym.entries])
    elif t in ("t2", "corollary"):
        i = a.n if t == "corollary" or a.i is None else a.i
        al, be, _, bundle = W.make_constructed_instance_t2(a.n, i, a.m, fld, seed)
        inst = _instance_doc(t, fld, a.m, [al, be + al[i:]], i=i)
    elif t == "t3":
        syms, _, _, bundle = W.make_constructed_linkage(a.n, a.m, fld, seed)
        inst = _instance_doc(t, fld, a.m, syms)
    elif t == "t4":
        syms, _, _, bundle = W.make_constructed_sivatski(a.m, fld, seed)
        inst = _instance_doc(t, fld, a.m, syms)
    else:
        from .mod3 import make_t5_degenerate

        if a.field == "Q":
            fld = Field.parse("cyclo(9)")
        al, be, ga, bundle = make_t5_degenerate(a.m, fld)
        inst = _instance_doc(t, fld, a.m, alpha=al, beta=be, gamma=ga)
    _write({"instance": inst, "witnesses": bundle.to_json()}, a.out)
    return EXIT_OK


def _plan_for(t, inst):
    n = len(inst["symbols"][0]) if "symbols" in inst else None
    if t in ("t2",):
        return dec.plan(t, n, int(inst.get("i", n)))
    if t in ("t4", "t5"):
        return dec.plan(t)
    return dec.plan(t, n)


def _decompose(a):
    doc = _read_json(a.input)
    inst = doc.get("instance", doc)
    t = a.theorem
    if inst.get("theorem", t) != t and not (t == "corollary" and inst.get("theorem") == "t2"):
        raise FlagError(f"instance is for {inst.get('theorem')}, not {t}")
    if a.plan:
        print(_plan_for(t, inst))
        return EXIT_OK
    wdoc = _read_json(a.witnesses) if a.witnesses else doc.get("witnesses", {"witnesses": []})
    bundle = WitnessBundle.from_json(wdoc)
    fld = Field.parse(inst["field"])
    m = int(inst["m"])
    syms = [_elems(s, fld) for s in inst.get("symbols", [])]
    if t == "t1":
        d = dec.t1(syms[0], bundle, m=m)
    elif t == "t2":
        i = int(inst.get("i", len(syms[0])))
        d = dec.t2(syms[0], syms[1][:i], i, bundle, m=m)
    elif t == "corollary":
        d = dec.corollary_length2(syms[0], syms[1], bundle, m=m)
    elif t == "t3":
        d = dec.t3(syms, None, bundle, m=m)
    elif t == "t4":
        d = dec.t4(syms, None, bundle, m=m)
    else:
        from .mod3 import t5_recombine

        d = t5_recombine(fld(inst["alpha"]), fld(inst["beta"]), fld(inst["gamma"]), m, bundle,
                         extension=bool(inst.get("extension", False)))
    _write(d.to_json(), a.out)
    return EXIT_OK if len(d) <= d.bound else EXIT_FAIL


def _verify(a):
    doc = _read_json(a.cert)
    if "certificate" in doc:
        try:
            dec.validate_decomposition(dec.CertifiedDecomposition.from_json(doc))
        except MilnorError as exc:
            print(f"invalid: {exc}")
            return EXIT_FAIL
        print("valid")
        return EXIT_OK
    res = check_certificate(certificate_from_json(doc))
    if res:
        print("valid")
        return EXIT_OK
    print(f"invalid at step {res.step}: {res.reason}")
    return EXIT_FAIL


def _hilbert(a):
    place = a.p if a.p in ("inf", "oo") else int(a.p)
    print(hilbert_symbol_Q(parse_element(a.a, QQ), parse_element(a.b, QQ), place))
    return EXIT_OK


def _isotropy(a):
    f = DiagonalForm(tuple(parse_element(c.strip(), QQ) for c in a.form.split(",")))
    if a.search_height is None:
        print("isotropic" if is_isotropic_Q(f) else "anisotropic")
        return EXIT_OK
    res = isotropy_witness_search(f, a.search_height)
    if res is PROVABLY_ANISOTROPIC:
        print("anisotropic")
    elif res is NOT_FOUND:
        print("not found")
    else:
        print("isotropic " + ",".join(map(str, res)))
    return EXIT_OK


def _normalize(a):
    print(normalize_over_Q(parse_class(a.expr, QQ)))
    return EXIT_OK


def _bounds(a):
    t = a.theorem
    if t in ("t4", "t5"):
        print(dec.bound(t))
        return EXIT_OK
    if a.n is None:
        raise FlagError(f"--n is required for {t}")
    i = a.i if a.i is not None else (a.n if t == "t2" else None)
    b = dec.bound(t, a.n, i)
    if dec.plan(t, a.n, i).total != b:
        print(f"plan total differs from {b}")
        return EXIT_FAIL
    print(b)
    return EXIT_OK


COMMANDS = {
    "decompose": _decompose,
    "verify": _verify,
    "generate": _generate,
    "hilbert": _hilbert,
    "isotropy": _isotropy,
    "normalize": _normalize,
    "bounds": _bounds,
}


def run(argv=None) -> int:
    try:
        a = _parser().parse_args(argv)
        return COMMANDS[a.cmd](a)
    except FlagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except OutOfRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except MissingWitness as exc:
        print(dumps({"missing": exc.request.to_json()}), file=sys.stderr)
        return EXIT_MISSING
    except (ParseError, KeyError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MilnorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
