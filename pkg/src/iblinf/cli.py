"""Command-line front end.

Subcommands: verify, check-structure, check-morphism, graphs, transfer,
mc-check, twist, cyclic-cohomology, weyl-check, pipeline.  Reports are
text or JSON with exact rational entries; exit code 0 iff all executed
checks pass.  The IBLINF_WORKERS environment variable bounds the worker
count for the per-signature structure checks.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import iblcheck, ribbon, tables
from .complexes import builtin_complex, builtin_names, builtin_product, \
    m2_from_product
from .cyclic import DualCyclicBar, dibl_ops
from .exactalg import CyclicComplex, verify_cyclic_complex
from .iblcheck import signatures, op_is_zero, relation_residual, \
    morphism_residual, check_hommain
from .report import Report


def _load_complex(spec):
    if spec in builtin_names():
        return builtin_complex(spec)
    return CyclicComplex.load(spec)


def _emit(report, args):
    text = report.dumps() if args.format == "json" else report.to_text()
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


def _workers():
    try:
        return max(1, int(os.environ.get("IBLINF_WORKERS", "1")))
    except ValueError:
        return 1


def cmd_verify(args):
    cx = _load_complex(args.complex)
    report = Report("verify", {"complex": args.complex})
    ok, checks = verify_cyclic_complex(cx)
    for name, cok, detail in checks:
        report.add(name, "pass" if cok else "fail", detail if not cok else "")
    report.time_stage("verify")
    return _emit(report, args)


def _structure_worker(payload):
    cx_json, sig, max_word = payload
    cx = CyclicComplex.from_json(cx_json)
    tab = dibl_ops(cx)
    nz, first = op_is_zero(relation_residual(tab, tuple(sig)), max_word)
    return sig, nz, repr(first) if first else None


def cmd_check_structure(args):
    sigs = signatures(args.max_sig)
    report = Report("check-structure", {
        "complex": args.complex or "", "table": args.table or "",
        "max_sig": args.max_sig, "max_word": args.max_word})
    if args.table:
        tab = tables.table_from_json(tables.load(args.table))
        for sig in sigs:
            nz, first = op_is_zero(relation_residual(tab, sig),
                                   args.max_word)
            report.add_residual("relation %s" % (sig,), nz, first)
    else:
        cx = _load_complex(args.complex)
        nworkers = _workers()
        if nworkers > 1:
            from concurrent.futures import ProcessPoolExecutor
            payloads = [(cx.to_json(), sig, args.max_word) for sig in sigs]
            with ProcessPoolExecutor(max_workers=nworkers) as pool:
                for sig, nz, first in pool.map(_structure_worker, payloads):
                    report.add_residual("relation %s" % (tuple(sig),), nz,
                                        first)
        else:
            tab = dibl_ops(cx)
            for sig in sigs:
                nz, first = op_is_zero(relation_residual(tab, sig),
                                       args.max_word)
                report.add_residual("relation %s" % (sig,), nz, first)
    report.time_stage("check-structure")
    return _emit(report, args)


def cmd_check_morphism(args):
    report = Report("check-morphism", {
        "morphism": args.morphism, "source": args.source,
        "target": args.target, "max_sig": args.max_sig,
        "max_word": args.max_word})
    mor = tables.morphism_from_json(tables.load(args.morphism))
    ptab = tables.table_from_json(tables.load(args.source))
    qtab = tables.table_from_json(tables.load(args.target))
    for sig in signatures(args.max_sig):
        nz, first = op_is_zero(morphism_residual(mor, ptab, qtab, sig),
                               args.max_word)
        report.add_residual("morphism relation %s" % (sig,), nz, first)
    report.time_stage("check-morphism")
    return _emit(report, args)


def cmd_graphs(args):
    valences = None
    if args.valences:
        valences = tuple(int(x) for x in args.valences.split(","))
    found = ribbon.enumerate_graphs(
        args.k, args.l, args.g, max_legs_per_boundary=args.max_legs,
        max_total_valence=args.max_total_valence, valences=valences,
        trivalent=args.trivalent)
    listing = []
    for i, (graph, aut) in enumerate(found):
        item = {
            "code": repr(graph.canonical_code()[0]),
            "aut": aut,
            "legs_per_boundary": [len(graph.face_legs(f))
                                  for f in graph.faces()],
            "interior_edges": graph.num_interior_edges(),
        }
        listing.append(item)
        if args.dot_dir:
            os.makedirs(args.dot_dir, exist_ok=True)
            path = os.path.join(args.dot_dir, "graph_%d_%d_%d_%03d.dot"
                                % (args.k, args.l, args.g, i))
            with open(path, "w") as fh:
                fh.write(graph.dot_export())
    out = {"signature": [args.k, args.l, args.g], "count": len(found),
           "graphs": listing}
    sys.stdout.write(json.dumps(out, indent=1, sort_keys=True) + "\n")
    return 0


def cmd_transfer(args):
    from .transfer import hodge_split, transfer_morphism
    cx = _load_complex(args.complex)
    report = Report("transfer", {
        "complex": args.complex, "max_sig": args.max_sig,
        "max_word": args.max_word, "tree_strategy": args.tree_strategy})
    sub = hodge_split(cx)
    ok, checks = sub.verify()
    for name, cok, _ in [(c[0], c[1], None) for c in checks]:
        report.add("splitting %s" % name, "pass" if cok else "fail")
    sigs = signatures(args.max_sig)
    mor = transfer_morphism(sub, sigs, strategy=args.tree_strategy)
    ptab = dibl_ops(cx)
    qtab = dibl_ops(sub.bx)
    for sig in sigs:
        nz, first = op_is_zero(morphism_residual(mor, ptab, qtab, sig),
                               args.max_word)
        report.add_residual("morphism relation %s" % (sig,), nz, first)
    if args.table_out:
        tables.save(tables.morphism_to_json(mor, args.max_word),
                    args.table_out)
    report.time_stage("transfer")
    return _emit(report, args)


def _builtin_ainf(name, cx):
    from .mc import AinfOps
    return AinfOps.from_m2(cx, m2_from_product(cx, builtin_product(name)))


def cmd_mc_check(args):
    from .mc import AinfOps, mplus_total, MCElement, check_mc
    cx = _load_complex(args.complex)
    report = Report("mc-check", {"complex": args.complex,
                                 "product": args.product,
                                 "max_word": args.max_word})
    aops = _builtin_ainf(args.product, cx)
    ok, bad = aops.check_ainf()
    report.add("a-infinity relations", "pass" if ok else "fail",
               "" if ok else bad)
    ok, bad = aops.check_cyclic()
    report.add("cyclicity", "pass" if ok else "fail", "" if ok else bad)
    tab = dibl_ops(cx)
    mvec = mplus_total(aops, car=tab.carrier)
    mc = MCElement.from_letter_vec(mvec)
    ok, rep = check_mc(tab, mc, max_weight=args.max_word)
    for name, nz, first in rep:
        report.add_residual(name, nz, first[:1] if first else None)
    report.time_stage("mc-check")
    return _emit(report, args)


def cmd_twist(args):
    from .mc import (AinfOps, mplus_total, MCElement, twist_structure,
                     twisted_diff, connes_twisted_diff)
    from .symbar import ewords, vmerge, word_weight
    cx = _load_complex(args.complex)
    report = Report("twist", {"complex": args.complex,
                              "product": args.product,
                              "max_sig": args.max_sig,
                              "max_word": args.max_word})
    aops = _builtin_ainf(args.product, cx)
    tab = dibl_ops(cx)
    car = tab.carrier
    mvec = mplus_total(aops, car=car)
    mc = MCElement.from_letter_vec(mvec)
    pm = twist_structure(tab, mc, signatures(args.max_sig), args.max_word)
    w_out = max(1, args.max_word - 2)
    for sig in signatures(args.max_sig):
        res = relation_residual(pm, sig)
        nz = 0
        first = None
        for w in ewords(car, sig[0], w_out):
            out = {u: c for u, c in res(w).items()
                   if word_weight(car, u) <= w_out}
            nz += len(out)
            if out and first is None:
                first = (w, sorted(out.items())[0])
        report.add_residual("twisted relation %s" % (sig,), nz, first)
    td = twisted_diff(tab, mvec)
    oracle = connes_twisted_diff(aops, car)
    bad = 0
    for w in ewords(car, 1, args.max_word):
        a = {u: c for u, c in td(w).items()
             if word_weight(car, u) <= args.max_word}
        b = {u: c for u, c in oracle(w).items()
             if word_weight(car, u) <= args.max_word}
        if a != b:
            bad += 1
    report.add("twisted differential matches the direct cyclic-complex "
               "differential", "pass" if bad == 0 else "fail",
               "" if bad == 0 else "%d mismatches" % bad)
    report.time_stage("twist")
    return _emit(report, args)


def cmd_cyclic_cohomology(args):
    from .mc import AinfOps, mplus_total, twisted_diff, cyclic_cohomology
    cx = _load_complex(args.complex)
    report = Report("cyclic-cohomology", {"complex": args.complex,
                                          "product": args.product or "",
                                          "max_word": args.max_word})
    tab = dibl_ops(cx)
    car = tab.carrier
    if args.product:
        aops = _builtin_ainf(args.product, cx)
        diff = twisted_diff(tab, mplus_total(aops, car=car))
    else:
        diff = tab.get((1, 1, 0))
    table = cyclic_cohomology(diff, car, args.max_word)
    for row in table:
        report.add("degree %d: dim %d betti %d%s"
                   % (row["degree"], row["dim"], row["betti"],
                      " (stable)" if row["stable"] else ""), "pass")
    report.config["dimension_table"] = table
    report.time_stage("cyclic-cohomology")
    return _emit(report, args)


def cmd_weyl_check(args):
    from .weyl import (check_hamiltonian_shape, master_check,
                       ops_from_hamiltonian, hamiltonian_from_ops)
    ctx, alg, H = tables.hamiltonian_from_json(tables.load(args.hamiltonian))
    report = Report("weyl-check", {"hamiltonian": args.hamiltonian,
                                   "max_sig": args.max_sig})
    ok, checks = check_hamiltonian_shape(ctx, H, alg)
    for name, cok in checks:
        report.add(name, "pass" if cok else "fail")
    hh = master_check(H)
    report.add("master-equation", "pass" if not hh else "fail",
               "" if not hh else "%d nonzero monomials" % len(hh.terms))
    sigs = sorted({(sum(1 for g in w if g[0] == "p"),
                    sum(1 for g in w if g[0] == "q"), h + 1)
                   for (w, h), c in H.terms.items()})
    tab = ops_from_hamiltonian(ctx, alg, H, sigs)
    H2 = hamiltonian_from_ops(ctx, alg, tab, sigs)
    report.add("dictionary-roundtrip",
               "pass" if H2.terms == H.terms else "fail")
    if not hh:
        for sig in signatures(args.max_sig):
            nz, first = op_is_zero(relation_residual(tab, sig), 4)
            report.add_residual("relation %s" % (sig,), nz, first)
    report.time_stage("weyl-check")
    return _emit(report, args)


def cmd_pipeline(args):
    from .transfer import hodge_split, transfer_morphism
    from .mc import (AinfOps, mplus_total, MCElement, check_mc,
                     twist_structure, twisted_diff, connes_twisted_diff,
                     cyclic_cohomology)
    from .symbar import ewords, word_weight
    cx = _load_complex(args.complex)
    report = Report("pipeline", {"complex": args.complex,
                                 "max_sig": args.max_sig,
                                 "max_word": args.max_word,
                                 "tree_strategy": args.tree_strategy})
    ok, checks = verify_cyclic_complex(cx)
    for name, cok, detail in checks:
        report.add("verify: %s" % name, "pass" if cok else "fail",
                   detail if not cok else "")
    report.time_stage("verify")
    if not ok:
        for stage in ("check-structure", "hodge", "transfer", "mc-check",
                      "twist", "cyclic-cohomology"):
            report.add(stage, "skip", "verification failed")
        return _emit(report, args)

    sigs = signatures(args.max_sig)
    tab = dibl_ops(cx)
    structure_ok = True
    for sig in sigs:
        nz, first = op_is_zero(relation_residual(tab, sig), args.max_word)
        report.add_residual("relation %s" % (sig,), nz, first)
        structure_ok = structure_ok and nz == 0
    report.time_stage("check-structure")

    sub = None
    if structure_ok:
        sub = hodge_split(cx)
        hok, hchecks = sub.verify()
        for name, cok, _a in [(c[0], c[1], None) for c in hchecks]:
            report.add("splitting %s" % name, "pass" if cok else "fail")
        report.time_stage("hodge")
        mor = transfer_morphism(sub, sigs, strategy=args.tree_strategy)
        qtab = dibl_ops(sub.bx)
        for sig in sigs:
            nz, first = op_is_zero(morphism_residual(mor, tab, qtab, sig),
                                   args.max_word)
            report.add_residual("transfer morphism %s" % (sig,), nz, first)
        report.time_stage("transfer")
    else:
        report.add("hodge", "skip", "structure checks failed")
        report.add("transfer", "skip", "structure checks failed")

    product = args.product
    if product is None and args.complex in builtin_names():
        try:
            builtin_product(args.complex)
            product = args.complex
        except KeyError:
            product = None
    if product is None:
        report.add("mc-check", "skip", "no product available")
        report.add("twist", "skip", "no product available")
        report.add("cyclic-cohomology", "skip", "no product available")
        return _emit(report, args)

    aops = _builtin_ainf(product, cx)
    car = tab.carrier
    aok, bad = aops.check_ainf()
    report.add("a-infinity relations", "pass" if aok else "fail")
    mvec = mplus_total(aops, car=car)
    mc = MCElement.from_letter_vec(mvec)
    mok, rep = check_mc(tab, mc, max_weight=args.max_word)
    for name, nz, first in rep:
        report.add_residual("mc: %s" % name, nz, first[:1] if first else None)
    report.time_stage("mc-check")

    if mok:
        td = twisted_diff(tab, mvec)
        oracle = connes_twisted_diff(aops, car)
        bad = sum(1 for w in ewords(car, 1, args.max_word)
                  if {u: c for u, c in td(w).items()
                      if word_weight(car, u) <= args.max_word}
                  != {u: c for u, c in oracle(w).items()
                      if word_weight(car, u) <= args.max_word})
        report.add("twisted differential matches the direct "
                   "cyclic-complex differential",
                   "pass" if bad == 0 else "fail")
        report.time_stage("twist")
        table = cyclic_cohomology(td, car, args.max_word)
        report.config["dimension_table"] = table
        report.add("cyclic-cohomology table computed", "pass",
                   "%d degree blocks" % len(table))
        report.time_stage("cyclic-cohomology")
    else:
        report.add("twist", "skip", "Maurer-Cartan check failed")
        report.add("cyclic-cohomology", "skip", "Maurer-Cartan check failed")
    return _emit(report, args)


def _common_out(sp):
    sp.add_argument("--format", choices=("text", "json"), default="text")
    sp.add_argument("--out", help="write the report to a file")


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="iblinf",
        description="exact verification of IBL-infinity structures on "
                    "dual cyclic bar complexes")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="check the cyclic complex axioms")
    sp.add_argument("--complex", required=True,
                    help="builtin name (%s) or JSON file"
                    % ",".join(builtin_names()))
    _common_out(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("check-structure",
                        help="relation residuals per signature")
    sp.add_argument("--complex")
    sp.add_argument("--table", help="operation table JSON file")
    sp.add_argument("--max-sig", type=int, default=7)
    sp.add_argument("--max-word", type=int, default=5)
    _common_out(sp)
    sp.set_defaults(fn=cmd_check_structure)

    sp = sub.add_parser("check-morphism",
                        help="morphism relation residuals per signature")
    sp.add_argument("--morphism", required=True)
    sp.add_argument("--source", required=True,
                    help="operation table JSON of the source")
    sp.add_argument("--target", required=True)
    sp.add_argument("--max-sig", type=int, default=7)
    sp.add_argument("--max-word", type=int, default=5)
    _common_out(sp)
    sp.set_defaults(fn=cmd_check_morphism)

    sp = sub.add_parser("graphs", help="enumerate ribbon graphs")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--max-legs", type=int,
                    help="bound on exterior vertices per boundary")
    sp.add_argument("--max-total-valence", type=int)
    sp.add_argument("--valences", help="comma separated interior valences")
    sp.add_argument("--trivalent", action="store_true")
    sp.add_argument("--dot-dir", help="write DOT files here")
    sp.set_defaults(fn=cmd_graphs)

    sp = sub.add_parser("transfer",
                        help="graph-sum morphism onto the harmonic part")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--max-sig", type=int, default=7)
    sp.add_argument("--max-word", type=int, default=5)
    sp.add_argument("--tree-strategy", choices=("bfs", "dfs"), default="bfs")
    sp.add_argument("--table-out", help="write the morphism table JSON")
    _common_out(sp)
    sp.set_defaults(fn=cmd_transfer)

    sp = sub.add_parser("mc-check", help="Maurer-Cartan equations")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--product", required=True,
                    help="builtin product name (usually = complex name)")
    sp.add_argument("--max-word", type=int, default=5)
    _common_out(sp)
    sp.set_defaults(fn=cmd_mc_check)

    sp = sub.add_parser("twist", help="twisted structure checks")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--product", required=True)
    sp.add_argument("--max-sig", type=int, default=3)
    sp.add_argument("--max-word", type=int, default=5)
    _common_out(sp)
    sp.set_defaults(fn=cmd_twist)

    sp = sub.add_parser("cyclic-cohomology",
                        help="truncated twisted cohomology dimensions")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--product")
    sp.add_argument("--max-word", type=int, default=5)
    _common_out(sp)
    sp.set_defaults(fn=cmd_cyclic_cohomology)

    sp = sub.add_parser("weyl-check",
                        help="master equation and dictionary round trip")
    sp.add_argument("--hamiltonian", required=True)
    sp.add_argument("--max-sig", type=int, default=7)
    _common_out(sp)
    sp.set_defaults(fn=cmd_weyl_check)

    sp = sub.add_parser("pipeline", help="run all stages")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--product")
    sp.add_argument("--max-sig", type=int, default=7)
    sp.add_argument("--max-word", type=int, default=5)
    sp.add_argument("--tree-strategy", choices=("bfs", "dfs"), default="bfs")
    _common_out(sp)
    sp.set_defaults(fn=cmd_pipeline)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
