"""Acceptance suite: ten exact (tolerance-zero) criteria.

Each criterion is one test; a pass/fail line is printed per criterion.
Run with:  pytest tests/test_acceptance.py -v -s
"""

import itertools
import random
from fractions import Fraction

import pytest

from iblinf import linalg
from iblinf.complexes import (builtin_complex, builtin_names, builtin_product,
                              m2_from_product, random_cyclic_complex)
from iblinf.cyclic import DualCyclicBar, dibl_ops
from iblinf.exactalg import verify_cyclic_complex
from iblinf.iblcheck import (signatures, sig_sort_key, relation_residual,
                             extract_P, extract_R, delta_hom, op_is_zero,
                             morphism_residual, check_hommain)
from iblinf.mc import (AinfOps, mplus_total, MCElement, check_mc,
                       twisted_diff, connes_twisted_diff, pushforward_mc,
                       trivalent_pushforward)
from iblinf.ribbon import (RibbonGraph, enumerate_graphs, labellings,
                           default_labelling, edge_frame, eta3,
                           frame_sign_compare)
from iblinf.symbar import (Letters, Op, OpTable, ewords, vmerge, hat_apply,
                           word_weight, multi_first_apply, multi_second_apply)
from iblinf.transfer import (hodge_split, transfer_morphism,
                             marked_edge_tables, canonical_model)
from iblinf.weyl import (WeylAlgebra, WeylContext, WElement, master_check,
                         ops_from_hamiltonian, hamiltonian_from_ops,
                         morphism_from_table, table_from_morphism,
                         identity_morphism_element, weyl_morphism_check)

F = Fraction
SIGS7 = signatures(7)
RNG_SEED = 20260810


def announce(num, ok, text):
    line = "[acceptance] criterion %2d: %s -- %s" % (
        num, "PASS" if ok else "FAIL", text)
    print("\n" + line)
    assert ok, line


def test_criterion_01_dibl_relations():
    """All six dIBL relations vanish identically on words of length <= 6
    for the builtin complexes and 20 random cyclic complexes (dim <= 6)."""
    rng = random.Random(RNG_SEED)
    checked = 0
    for name in builtin_names():
        tab = dibl_ops(builtin_complex(name))
        for sig in SIGS7:
            nz, first = op_is_zero(relation_residual(tab, sig), 6)
            assert nz == 0, (name, sig, first)
        checked += 1
    for i in range(20):
        # keep the large instances block-sparse so each stays in seconds
        dim_max = rng.choice([2, 3, 4, 4, 4, 5, 6])
        cx = random_cyclic_complex(rng, dim_max=dim_max,
                                   basis_change=dim_max <= 4)
        assert verify_cyclic_complex(cx)[0]
        tab = dibl_ops(cx)
        for sig in SIGS7:
            nz, first = op_is_zero(relation_residual(tab, sig), 6)
            assert nz == 0, (cx.to_json(), sig, first)
        checked += 1
    announce(1, True, "dIBL relations on %d complexes, words <= 6" % checked)


def test_criterion_02_signature_order():
    got = signatures(7)
    want = [(1, 1, 0), (1, 2, 0), (2, 1, 0), (1, 1, 1), (1, 3, 0),
            (2, 2, 0), (3, 1, 0)]
    announce(2, got == want, "first seven signatures %s" % (got,))


def fig_graph():
    pairing = {0: 3, 3: 0, 1: 12, 12: 1, 2: 8, 8: 2, 5: 7, 7: 5, 9: 10, 10: 9}
    return RibbonGraph([[0, 1, 2], [3, 4, 5, 6], [7, 8, 9],
                        [10, 11, 12, 13]], pairing)


def test_criterion_03_ribbon_enumeration():
    total = 0
    for (k, l, g, bound) in [(1, 1, 0, 5), (1, 2, 0, 6), (2, 1, 0, 6),
                             (1, 1, 1, 7), (2, 2, 0, 6), (3, 1, 0, 7),
                             (2, 1, 1, 8)]:
        for graph, aut in enumerate_graphs(k, l, g, max_total_valence=bound):
            kk, ll, gg = graph.signature()
            assert kk - graph.num_interior_edges() + ll == 2 - 2 * gg
            total += 1
    for r in range(1, 6):
        found = enumerate_graphs(1, 1, 0, valences=(r,))
        assert len(found) == 1 and found[0][1] == r
    assert fig_graph().signature() == (4, 3, 0)
    assert fig_graph().aut_order() == 2
    # independent exhaustive oracle on small fibers
    from test_ribbon import oracle_classes
    from iblinf.ribbon import _valence_multisets
    for sig, max_legs in [((2, 1, 0), 2), ((1, 2, 0), 1), ((1, 1, 1), 1)]:
        k, l, g = sig
        m = k + l + 2 * g - 2
        smax = l * max_legs
        vlists = set()
        for tot in range(2 * m + l, 2 * m + smax + 1):
            vlists.update(_valence_multisets(k, tot))
        got = enumerate_graphs(k, l, g, max_legs_per_boundary=max_legs,
                               max_total_valence=2 * m + smax)
        want = oracle_classes(sorted(vlists),
                              {"m": m, "sig": sig, "max_legs": max_legs})
        assert len(got) == len(want), (sig, len(got), len(want))
    announce(3, True, "Euler identity on %d graphs; star fibers; "
             "|Aut| = 2 for the (4,3,0) example; oracle counts" % total)


def test_criterion_04_sign_conventions():
    rng = random.Random(RNG_SEED)
    frames_checked = 0
    pairs_checked = 0
    for (k, l, g, bound) in [(2, 1, 0, 6), (1, 2, 0, 6), (2, 2, 0, 6),
                             (1, 1, 1, 7), (3, 1, 0, 7), (2, 1, 1, 8)]:
        for graph, aut in enumerate_graphs(k, l, g, max_total_valence=bound):
            labs = list(labellings(graph))
            rng.shuffle(labs)
            frames = []
            for lab in labs[:4]:
                for strat in ("bfs", "dfs"):
                    fr = edge_frame(graph, lab, strat)
                    assert eta3(graph, lab, fr.edge_darts) == 0, (k, l, g)
                    frames_checked += 1
                    frames.append((lab, fr))
            if graph.num_interior_edges() <= 4:
                for (l1, f1), (l2, f2) in itertools.combinations(frames, 2):
                    holds, data = frame_sign_compare(graph, l1, f1, l2, f2)
                    assert holds, data
                    pairs_checked += 1
    # transfer identical under the two tree strategies
    for name in ("dga4", "acyclic4"):
        sub = hodge_split(builtin_complex(name))
        mb = transfer_morphism(sub, SIGS7, strategy="bfs")
        md = transfer_morphism(sub, SIGS7, strategy="dfs")
        for sig in SIGS7:
            for w in ewords(mb.src, sig[0], 4):
                assert mb.get(sig)(w) == md.get(sig)(w), (name, sig, w)
    announce(4, True, "eta3 = 0 on %d tree frames; sign lemma on %d frame "
             "pairs; BFS = DFS transfers" % (frames_checked, pairs_checked))


def test_criterion_05_transfer_is_morphism():
    rng = random.Random(RNG_SEED)
    for name in ("acyclic2", "dga4", "acyclic4"):
        cx = builtin_complex(name)
        assert not linalg.is_zero_matrix(cx.d)
        sub = hodge_split(cx)
        mor = transfer_morphism(sub, SIGS7)
        ptab = dibl_ops(cx)
        qtab = dibl_ops(sub.bx)
        for sig in SIGS7:
            nz, first = op_is_zero(morphism_residual(mor, ptab, qtab, sig), 5)
            assert nz == 0, (name, sig, first)
        # word-length shift 2(2-2g-k-l) on every output
        for sig in SIGS7:
            chi = 2 - 2 * sig[2] - sig[0] - sig[1]
            f = mor.get(sig)
            for w in ewords(mor.src, sig[0], 5):
                win = word_weight(mor.src, w)
                for u in f(w):
                    assert word_weight(mor.dst, u) == win + 2 * chi
        # Claims 1-5 (the marked-edge identities) on all words <= 4
        data = mor.transfer_data
        fid, fpi = marked_edge_tables(data, SIGS7)
        p110 = ptab.get((1, 1, 0))
        q110 = qtab.get((1, 1, 0))
        from test_transfer import _claim_rhs4, _claim_rhs5
        for sig in [(1, 1, 0), (1, 2, 0), (2, 1, 0), (1, 1, 1)]:
            f = mor.get(sig)
            for w in ewords(data.src_car, sig[0], 4):
                lhs = dict(fpi.get(sig)(w))
                vmerge(lhs, fid.get(sig)(w), -1)
                rhs = {}
                for u, c in hat_apply(p110, w).items():
                    vmerge(rhs, f(u), c)
                for u, c in f(w).items():
                    vmerge(rhs, hat_apply(q110, u), -c)
                assert lhs == rhs, ("claim 3", name, sig, w)
                assert dict(fpi.get(sig)(w)) == \
                    _claim_rhs4(mor, qtab, sig, w), ("claim 4", name, sig, w)
                assert dict(fid.get(sig)(w)) == \
                    _claim_rhs5(mor, ptab, sig, w), ("claim 5", name, sig, w)
    announce(5, True, "morphism relations at 7 signatures, W = 5, and "
             "Claims 1-5 on acyclic2/dga4/acyclic4")


def test_criterion_06_delta_closedness():
    rng = random.Random(RNG_SEED)
    done = 0
    # delta P at the first signature carrying no dIBL operation
    for i in range(5):
        cx = random_cyclic_complex(rng, dim_max=4)
        tab = dibl_ops(cx)
        sig = (1, 1, 1)
        P = extract_P(tab, sig)
        b = tab.get((1, 1, 0))
        nz, first = op_is_zero(delta_hom(P, b, b), 4)
        assert nz == 0, (cx.to_json(), first)
        done += 1
    # delta R at the first unverified signature of a transfer prefix
    for i in range(5):
        cx = random_cyclic_complex(rng, dim_max=4, n_choices=(3,))
        sub = hodge_split(cx)
        mor = transfer_morphism(sub, SIGS7[:3])
        ptab = dibl_ops(cx)
        qtab = dibl_ops(sub.bx)
        R = extract_R(mor, ptab, qtab, (1, 1, 1))
        nz, first = op_is_zero(
            delta_hom(R, qtab.get((1, 1, 0)), ptab.get((1, 1, 0))), 3)
        assert nz == 0, (cx.to_json(), first)
        done += 1
    announce(6, True, "delta P = 0 and delta R = 0 on %d random instances"
             % done)


def test_criterion_07_maurer_cartan():
    rng = random.Random(RNG_SEED)
    for name in ("point", "circle", "sphere2", "torus2", "dga4"):
        cx = builtin_complex(name)
        aops = AinfOps.from_m2(cx, m2_from_product(cx, builtin_product(name)))
        tab = dibl_ops(cx)
        car = tab.carrier
        mvec = mplus_total(aops, car=car)
        mc = MCElement.from_letter_vec(mvec)
        ok, rep = check_mc(tab, mc, max_weight=6)
        assert ok, (name, rep)
        td = twisted_diff(tab, mvec)
        oracle = connes_twisted_diff(aops, car)
        for w in ewords(car, 1, 6):
            a = {u: c for u, c in td(w).items() if word_weight(car, u) <= 6}
            b = {u: c for u, c in oracle(w).items()
                 if word_weight(car, u) <= 6}
            assert a == b, (name, w)
            sq = {}
            for u, c in td(w).items():
                if word_weight(car, u) <= 7:
                    vmerge(sq, td(u), c)
            assert not {k: v for k, v in sq.items()
                        if word_weight(car, k) <= 6}, (name, w)
    # seeded non-associative products are detected
    from test_mc import cyclic_random_tensor
    cx = builtin_complex("torus2")
    car = DualCyclicBar(cx)
    tab = dibl_ops(cx)
    detected = 0
    for _ in range(6):
        tensor = cyclic_random_tensor(rng, cx, car)
        if not tensor:
            continue
        m2 = {}
        dim = cx.dim
        from iblinf.symbar import vadd
        for i in range(dim):
            for j in range(dim):
                vec = {}
                for a in range(dim):
                    cw = car.canonical((i, j, a))
                    if cw is None:
                        continue
                    val = tensor.get(cw[0])
                    if not val:
                        continue
                    tval = val * cw[1]
                    for b in range(dim):
                        inv = cx.ginv[b][a]
                        if inv:
                            vadd(vec, b, tval * inv)
                vec = {b: c for b, c in vec.items()
                       if c and cx.eta(b) == cx.eta(i) + cx.eta(j) + 1}
                if vec:
                    m2[(i, j)] = vec
        if not m2:
            continue
        aops = AinfOps(cx, {2: m2})
        if not aops.check_cyclic()[0]:
            continue
        mvec = mplus_total(aops, car=car)
        ok, rep = check_mc(tab, MCElement.from_letter_vec(mvec), max_weight=6)
        if not ok:
            detected += 1
    assert detected >= 2
    announce(7, True, "MC equations, twisted differential = Connes "
             "differential (W <= 6), %d seeded failures detected" % detected)


def test_criterion_08_pushforward():
    cx = builtin_complex("dga4")
    aops = AinfOps.from_m2(cx, m2_from_product(cx, builtin_product("dga4")))
    tab = dibl_ops(cx)
    mvec = mplus_total(aops, car=tab.carrier)
    mc = MCElement.from_letter_vec(mvec)
    sub = hodge_split(cx)
    mor = transfer_morphism(sub, SIGS7)
    tdata = mor.transfer_data
    W = 4
    fm = pushforward_mc(mor, mc, lg_bound=2, max_weight=W)
    assert fm.get((1, 0)), "push-forward vanished unexpectedly"
    for lg in ((1, 0), (2, 0)):
        triv = trivalent_pushforward(tdata, mvec, lg, W)
        ind = {k: v for k, v in fm.get(lg).items()
               if word_weight(tdata.tgt_car, k) <= W}
        assert ind == triv, (lg, ind, triv)
    qtab = dibl_ops(sub.bx)
    ok, rep = check_mc(qtab, fm, max_weight=W, lg_bound=2)
    assert ok, rep
    announce(8, True, "f_* m2+ equals the trivalent graph sums at (1,0) "
             "and (2,0), word <= 4, and satisfies MC downstream")


def test_criterion_09_weyl_equivalence():
    rng = random.Random(RNG_SEED)
    alg = WeylAlgebra(0, [("u", 0, 1), ("x", -1, 1), ("y", -2, 1)])
    ctx = WeylContext([alg])
    car = alg.carrier()

    def random_table():
        tab = OpTable(0, car)
        for sig in SIGS7[:4]:
            k, l, g = sig
            table = {}
            for w in ewords(car, k, k):
                din = sum(car.deg1(c) for c in w)
                out = {}
                for z in ewords(car, l, l):
                    if sum(car.deg1(c) for c in z) - din == -1 \
                            and rng.random() < 0.6:
                        out[z] = F(rng.randrange(-2, 3))
                out = {a: b for a, b in out.items() if b}
                if out:
                    table[w] = out
            if table:
                tab.add(Op.from_dict(k, l, g, -1, table, car, car))
        return tab

    cases = []
    tabp = OpTable(0, car)
    tabp.add(Op.from_dict(1, 1, 0, -1, {("u",): {("x",): F(2)}}, car, car))
    cases.append(tabp)
    tabp2 = OpTable(0, car)
    tabp2.add(Op.from_dict(1, 2, 0, -1, {("u",): {("x", "u"): F(1)}},
                           car, car))
    cases.append(tabp2)
    for _ in range(10):
        cases.append(random_table())
    npass = nfail = 0
    for tab in cases:
        residuals_zero = all(
            op_is_zero(relation_residual(tab, sig), 4)[0] == 0
            for sig in SIGS7)
        H = hamiltonian_from_ops(ctx, alg, tab, SIGS7[:4])
        master_zero = not master_check(H)
        assert master_zero == residuals_zero
        # dictionary round trip is exact
        tab2 = ops_from_hamiltonian(ctx, alg, H, SIGS7[:4])
        H2 = hamiltonian_from_ops(ctx, alg, tab2, SIGS7[:4])
        assert H2.terms == H.terms
        npass += master_zero
        nfail += not master_zero
    assert npass >= 2 and nfail >= 2
    # the identity-morphism Weyl element passes the morphism equation
    aplus = WeylAlgebra(0, [("x", -1, 1), ("y", -1, 1)], side="+")
    aminus = WeylAlgebra(0, [("x", -1, 1), ("y", -1, 1)], side="-")
    mctx = WeylContext([aplus, aminus])
    Hp = WElement.monomial(
        mctx, [aplus.qgen("x"), aplus.qgen("y"), aplus.pgen("x")], -1, 1)
    Hm = WElement.monomial(
        mctx, [aminus.qgen("x"), aminus.qgen("y"), aminus.pgen("x")], -1, 1)
    Fel = identity_morphism_element(mctx, aplus, aminus)
    ok, bad = weyl_morphism_check(mctx, aplus, aminus, Fel, Hp, Hm, pmax=4)
    assert ok, bad
    announce(9, True, "master equation iff residuals on %d tables "
             "(%d pass, %d fail); exact round trips; identity morphism"
             % (len(cases), npass, nfail))


def test_criterion_10_canonical_model():
    sigs4 = signatures(4)
    # acyclic2-based dual cyclic bar complex: H = 0 within the truncation
    cx = builtin_complex("acyclic2")
    ptab = dibl_ops(cx)
    qtab, fmor, hdata = canonical_model(ptab, sigs4, max_weight=4)
    assert qtab.carrier.letters_upto(4) == []
    for sig in sigs4:
        nz, first = op_is_zero(relation_residual(qtab, sig), 4)
        assert nz == 0, (sig, first)
        nz, first = op_is_zero(morphism_residual(fmor, qtab, ptab, sig), 4)
        assert nz == 0, (sig, first)
    # dga4 exercises a step with nontrivial homology and differential
    cx = builtin_complex("dga4")
    ptab = dibl_ops(cx)
    qtab, fmor, hdata = canonical_model(ptab, sigs4, max_weight=3)
    for sig in sigs4:
        nz, first = op_is_zero(relation_residual(qtab, sig), 3)
        assert nz == 0, (sig, first)
        nz, first = op_is_zero(morphism_residual(fmor, qtab, ptab, sig), 3)
        assert nz == 0, (sig, first)
    # fixed point for d = 0
    cx = builtin_complex("circle")
    ptab = dibl_ops(cx)
    qtab, fmor, hdata = canonical_model(ptab, sigs4, max_weight=4)
    hcar = qtab.carrier
    assert len(hcar.letters_upto(4)) == len(ptab.carrier.letters_upto(4))
    for sig in sigs4[1:]:
        for w in ewords(hcar, sig[0], 4):
            assert not fmor.get(sig)(w)
    announce(10, True, "canonical model: residuals vanish at 4 signatures "
             "on acyclic2 and dga4; d = 0 complexes are fixed points")
