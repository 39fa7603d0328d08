"""JSON serialization of operation and morphism tables.

Tables are stored extensionally as sparse matrices: a graded letter set
plus one list of (input word, output word, coefficient) triples per
signature.  Rationals are "p/q" strings.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .exactalg import rat, rat_str
from .symbar import (Letters, Op, OpTable, MorTable, op_degree, mor_degree,
                     ewords)


def letters_to_json(car, max_weight=8):
    return [{"name": str(l), "deg": car.deg1(l)}
            for l in car.letters_upto(max_weight)]


def letters_from_json(data):
    return Letters({d["name"]: int(d["deg"]) for d in data})


def _entries_to_json(comps, src, max_weight):
    entries = []
    for sig in sorted(comps):
        op = comps[sig]
        terms = []
        for w in ewords(src, sig[0], max_weight):
            for z, c in sorted(op(w).items()):
                terms.append({"in": [str(x) for x in w],
                              "out": [str(x) for x in z],
                              "c": rat_str(c)})
        entries.append({"k": sig[0], "l": sig[1], "g": sig[2],
                        "terms": terms})
    return entries


def table_to_json(tab, max_weight=6):
    return {
        "kind": "operations",
        "d": tab.d,
        "letters": letters_to_json(tab.carrier, max_weight),
        "entries": _entries_to_json(tab.ops, tab.carrier, max_weight),
    }


def morphism_to_json(mor, max_weight=6):
    return {
        "kind": "morphism",
        "d": mor.d,
        "source": letters_to_json(mor.src, max_weight),
        "target": letters_to_json(mor.dst, max_weight),
        "entries": _entries_to_json(mor.comps, mor.src, max_weight),
    }


def _entry_ops(entries, d, src, dst, degree_of):
    out = {}
    for entry in entries:
        sig = (int(entry["k"]), int(entry["l"]), int(entry["g"]))
        table = {}
        for t in entry["terms"]:
            win = tuple(t["in"])
            zout = tuple(t["out"])
            table.setdefault(win, {})[zout] = rat(t["c"])
        out[sig] = Op.from_dict(sig[0], sig[1], sig[2], degree_of(d, sig),
                                table, src, dst)
    return out


def table_from_json(data):
    if data.get("kind") != "operations":
        raise ValueError("not an operation table file")
    car = letters_from_json(data["letters"])
    tab = OpTable(int(data["d"]), car)
    for sig, op in _entry_ops(data["entries"], tab.d, car, car,
                              op_degree).items():
        tab.add(op)
    return tab


def morphism_from_json(data):
    if data.get("kind") != "morphism":
        raise ValueError("not a morphism table file")
    src = letters_from_json(data["source"])
    dst = letters_from_json(data["target"])
    mor = MorTable(int(data["d"]), src, dst)
    for sig, op in _entry_ops(data["entries"], mor.d, src, dst,
                              mor_degree).items():
        mor.add(op)
    return mor


def save(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Hamiltonian files.


def hamiltonian_to_json(ctx, alg, H):
    terms = []
    for (w, h), c in sorted(H.terms.items()):
        terms.append({
            "q": [g[2] for g in w if g[0] == "q"],
            "p": [g[2] for g in w if g[0] == "p"],
            "hbar": h,
            "c": rat_str(c),
        })
    return {
        "kind": "hamiltonian",
        "d": alg.d,
        "indices": [{"name": n, "qdeg": alg.qdeg[n],
                     "kappa": rat_str(alg.kappa[n])} for n in alg.names],
        "terms": terms,
    }


def hamiltonian_from_json(data):
    from .weyl import WeylAlgebra, WeylContext, WElement
    if data.get("kind") != "hamiltonian":
        raise ValueError("not a hamiltonian file")
    alg = WeylAlgebra(int(data["d"]),
                      [(i["name"], int(i["qdeg"]), rat(i["kappa"]))
                       for i in data["indices"]])
    ctx = WeylContext([alg])
    H = WElement.zero(ctx)
    for t in data["terms"]:
        gens = [alg.qgen(x) for x in t["q"]] + [alg.pgen(x) for x in t["p"]]
        H = H.add(WElement.monomial(ctx, gens, int(t["hbar"]), rat(t["c"])))
    return ctx, alg, H
