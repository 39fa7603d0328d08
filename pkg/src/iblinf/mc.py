"""Maurer-Cartan elements and twisting on dual cyclic bar complexes.

A cyclic A-infinity structure on (A, <,>, d) gives elements
m+_k in B^cyc*_{k+1} A via m+_k(x_0..x_k) = (-1)^(n-2) <m_k(x_0..x_{k-1}), x_k>;
for a cyclic DGA the element m+ = m+_2 is Maurer-Cartan for the dIBL
structure, the twisted differential is dual to the Hochschild
differential on Connes' cyclic complex, and everything can be pushed
forward along IBL-infinity morphisms.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import iblcheck
from .cyclic import DualCyclicBar
from .symbar import (Op, OpTable, vadd, vmerge, sort_word, hat_apply,
                     multi_second_apply, factorial, op_degree, ewords,
                     word_weight)
from .iblcheck import sig_sort_key, _compositions

F = Fraction


class AinfOps:
    """Operations m_k : A[1]^(x k) -> A[1] of degree +1, as index tensors
    {k: {input word: {output index: coeff}}}; m_1 is the differential."""

    def __init__(self, cx, tensors):
        self.cx = cx
        self.tensors = {}
        for k, table in tensors.items():
            self.tensors[int(k)] = {tuple(w): dict(v)
                                    for w, v in table.items() if v}

    @classmethod
    def from_m2(cls, cx, m2):
        """m_1 = d plus a binary product tensor {(i,j): {out: coeff}}."""
        m1 = {}
        for i, a, c in cx.d_entries():
            m1.setdefault((i,), {})[a] = c
        return cls(cx, {1: m1, 2: m2})

    def arities(self):
        return sorted(self.tensors)

    def apply(self, k, word):
        """m_k on a basis word; a dict {output index: coeff}."""
        return self.tensors.get(k, {}).get(tuple(word), {})

    def degree_check(self):
        cx = self.cx
        for k, table in self.tensors.items():
            for w, vec in table.items():
                din = sum(cx.eta(i) for i in w)
                for out, c in vec.items():
                    if c and cx.eta(out) != din + 1:
                        return False, (k, w, out)
        return True, None

    def check_ainf(self, arity_max=None):
        """The quadratic relations up to the given output arity."""
        cx = self.cx
        dim = cx.dim
        ks = self.arities()
        if arity_max is None:
            arity_max = max(ks) * 2 - 1
        bad = []
        for r in range(1, arity_max + 1):
            for word in itertools.product(range(dim), repeat=r):
                out = {}
                for l in ks:
                    if l > r:
                        continue
                    k = r + 1 - l
                    if k not in self.tensors:
                        continue
                    for c in range(0, r + 1 - l):
                        inner = word[c:c + l]
                        sgn = (-1) ** (sum(cx.eta(i) for i in word[:c]) % 2)
                        for mid, cm in self.apply(l, inner).items():
                            newword = word[:c] + (mid,) + word[c + l:]
                            for outi, co in self.apply(k, newword).items():
                                vadd(out, outi, sgn * cm * co)
                if out:
                    bad.append((word, out))
        return not bad, bad[:3]

    def check_cyclic(self):
        """Condition (cyc2): <m_k(x_1..x_k), x_0> cyclic-invariant."""
        cx = self.cx
        dim = cx.dim
        bad = []
        for k in self.arities():
            for word in itertools.product(range(dim), repeat=k + 1):
                # word = (x_0, ..., x_k)
                lhs = _pair_mk(self, word[1:], word[0])
                ss = (cx.eta(word[0]) % 2) * \
                    (sum(cx.eta(i) for i in word[1:]) % 2)
                rhs = (-1) ** (ss % 2) * _pair_mk(self, word[:-1], word[-1])
                if lhs != rhs:
                    bad.append((k, word, lhs, rhs))
        return not bad, bad[:3]


def _pair_mk(aops, inword, outx):
    """<m_k(inword), e_outx>."""
    cx = aops.cx
    total = F(0)
    for out, c in aops.apply(len(inword), inword).items():
        total += c * cx.pairing[out][outx]
    return total


def mplus(aops, car=None, check=True):
    """The elements m+_k in B^cyc*_{k+1} A for k >= 2, as letter Vecs.

    Returns a dict {k: Vec}; raises if the cyclicity precondition fails.
    """
    cx = aops.cx
    car = car or DualCyclicBar(cx)
    if check:
        ok, bad = aops.check_cyclic()
        if not ok:
            raise ValueError("product is not cyclic: %s" % (bad,))
    sgn = (-1) ** ((cx.n - 2) % 2)
    out = {}
    for k in aops.arities():
        if k < 2:
            continue
        vec = {}
        for u in car._letters_len(k + 1):
            # m+_k(x_0..x_k) with (x_0..x_k) = canonical word u
            val = sgn * _pair_mk(aops, u[:-1], u[-1])
            if val:
                vec[u] = val
        # consistency: the tensor must be cyclic, i.e. reading any orbit
        # word must reproduce the stored coefficient
        if check:
            for u, val in vec.items():
                for w, s in car.orbit(u).items():
                    direct = sgn * _pair_mk(aops, w[:-1], w[-1])
                    if direct != s * val:
                        raise ValueError("m+ fails cyclic symmetry at %s" % (w,))
        if vec:
            out[k] = vec
    return out


def mplus_total(aops, car=None, max_weight=None, check=True):
    """The aggregate m+ as a single letter-level Vec."""
    out = {}
    for k, vec in mplus(aops, car=car, check=check).items():
        if max_weight is not None and k + 1 > max_weight:
            continue
        vmerge(out, vec)
    return out


class MCElement:
    """Components m_{l,g} in E_l C, stored as Vecs over E words."""

    def __init__(self, comps):
        self.comps = {k: dict(v) for k, v in comps.items() if v}

    @classmethod
    def from_letter_vec(cls, vec):
        return cls({(1, 0): {(u,): c for u, c in vec.items()}})

    def get(self, lg):
        return self.comps.get(lg, {})

    def lgs(self):
        return sorted(self.comps, key=lambda lg: (lg[0] + 2 * lg[1], -lg[1]))

    def filtration_ok(self, carrier):
        """Word-length filtration: ||m_{l,g}|| >= 2 chi_{0,l,g}, strict
        for (1,0) and (2,0)."""
        for (l, g), vec in self.comps.items():
            chi = 2 - 2 * g - l
            for w in vec:
                wt = word_weight(carrier, w)
                if wt < 2 * chi or (wt == 2 * chi and (l, g) in ((1, 0), (2, 0))):
                    return False
        return True


def mc_residual(tab, mc, lg, max_weight):
    """The (0,l,g) component of hat-p(e^m), exactly, within the word
    length truncation."""
    l, g = lg
    out = {}
    carrier = tab.carrier
    lgs = list(mc.comps)
    for psig in tab.sigs():
        km, lm, gm = psig
        p = tab.get(psig)
        for r in range(1, km + 1):
            for svec in _compositions(km, r):
                for tup in _mc_tuples(lgs, r):
                    lsum = sum(t[0] for t in tup)
                    gsum = sum(t[1] for t in tup)
                    if lsum + lm - km != l:
                        continue
                    if gsum + gm != g + r - km:
                        continue
                    if any(s > t[0] for s, t in zip(svec, tup)):
                        continue
                    coeff = F(1, factorial(r))
                    _apply_p_to_m_product(tab, p, svec,
                                          [mc.get(t) for t in tup],
                                          coeff, out, max_weight)
    return out


def _mc_tuples(lgs, r):
    yield from itertools.product(lgs, repeat=r)


def _apply_p_to_m_product(tab, p, svec, mvecs, coeff, out, max_weight):
    """hat-p o_{s_1..s_r} (m_1 ... m_r) accumulated into ``out``."""
    carrier = tab.carrier
    combos = [((), F(1))]
    for vec in mvecs:
        nxt = []
        for blocks, c in combos:
            for w, cw in vec.items():
                nxt.append((blocks + (w,), c * cw))
        combos = nxt
    for blocks, c in combos:
        flat = tuple(itertools.chain.from_iterable(blocks))
        offs = []
        o = 0
        for w in blocks:
            offs.append((o, o + len(w)))
            o += len(w)
        choice_sets = [list(itertools.combinations(range(a, b), s))
                       for (a, b), s in zip(offs, svec)]
        for choices in itertools.product(*choice_sets):
            chosen = tuple(itertools.chain.from_iterable(choices))
            from .symbar import split_sign
            s2 = split_sign(carrier, flat, chosen)
            sw = sort_word(carrier, tuple(flat[i] for i in chosen))
            if sw is None:
                continue
            v2 = p(sw[0])
            if not v2:
                continue
            rem = tuple(flat[i] for i in range(len(flat))
                        if i not in set(chosen))
            for z, c2 in v2.items():
                final = sort_word(carrier, z + rem)
                if final is None:
                    continue
                if max_weight is not None and \
                   word_weight(carrier, final[0]) > max_weight:
                    continue
                vadd(out, final[0], c * coeff * c2 * s2 * sw[1] * final[1])


def check_mc(tab, mc, max_weight, lg_bound=4):
    """Verify hat-p(e^m) = 0 componentwise within the truncation.

    For a dIBL table with a single m_{1,0} the two classical equations
    are reported separately as well.
    """
    report = []
    dibl_like = set(tab.sigs()) <= {(1, 1, 0), (2, 1, 0), (1, 2, 0)}
    single = list(mc.comps) == [(1, 0)]
    if dibl_like and single:
        m = mc.get((1, 0))
        p110, p210, p120 = (tab.get((1, 1, 0)), tab.get((2, 1, 0)),
                            tab.get((1, 2, 0)))
        eq1 = {}
        for w, c in m.items():
            vmerge(eq1, p110(w), c)
        for w1, c1 in m.items():
            for w2, c2 in m.items():
                sw = sort_word(tab.carrier, w1 + w2)
                if sw is None:
                    continue
                vmerge(eq1, p210(sw[0]), F(c1 * c2 * sw[1], 2))
        eq1 = {k: v for k, v in eq1.items()
               if word_weight(tab.carrier, k) <= max_weight}
        report.append(("mc-equation", len(eq1),
                       sorted(eq1.items())[:1]))
        eq2 = {}
        for w, c in m.items():
            vmerge(eq2, p120(w), c)
        eq2 = {k: v for k, v in eq2.items()
               if word_weight(tab.carrier, k) <= max_weight}
        report.append(("cobracket-vanishing", len(eq2),
                       sorted(eq2.items())[:1]))
    lgs = [(l, g) for l in range(1, lg_bound + 1)
           for g in range(0, (lg_bound - l) // 2 + 1)]
    for lg in lgs:
        res = mc_residual(tab, mc, lg, max_weight)
        report.append(("p(e^m) at (0,%d,%d)" % lg, len(res),
                       sorted(res.items())[:1]))
    ok = all(n == 0 for _, n, _ in report)
    return ok, report


# ---------------------------------------------------------------------------
# Twisted structures.


def twisted_diff(tab, mvec):
    """p110 + p210(m+, .) as an Op on the carrier (word length grows)."""
    p110 = tab.get((1, 1, 0))
    p210 = tab.get((2, 1, 0))
    car = tab.carrier

    def fn(word):
        out = dict(p110(word))
        (x,) = word
        for u, c in mvec.items():
            sw = sort_word(car, (u, x))
            if sw is None:
                continue
            vmerge(out, p210(sw[0]), c * sw[1])
        return out

    return Op(1, 1, 0, -1, fn, car, car, name="twisted-d", audit=False)


def connes_twisted_diff(aops, car):
    """Independent implementation of the twisted differential: the dual
    Hochschild differential, phi -> sum_c +- phi(m_k(x_c..), x_{c+k}, ..)."""
    cx = aops.cx

    def on_letter(u):
        out = {}
        omap = car.orbit(u)
        candidates = set()
        dim = cx.dim
        for w in omap:
            y0 = w[0]
            for k in aops.arities():
                for zs, vec in aops.tensors.get(k, {}).items():
                    if vec.get(y0):
                        cand = car.canonical(zs + w[1:])
                        if cand is not None:
                            candidates.add(cand[0])
        for wc in candidates:
            r = len(wc)
            total = F(0)
            for k in aops.arities():
                if r - k + 1 < 1:
                    continue
                for c in range(r):
                    rot = wc[c:] + wc[:c]
                    inner = rot[:k]
                    rest = rot[k:]
                    nu = (sum(cx.eta(i) for i in wc[:c]) % 2) * \
                        (sum(cx.eta(i) for i in wc[c:]) % 2)
                    for mid, cm in aops.apply(k, inner).items():
                        s = car.coeff(u, (mid,) + rest)
                        if s:
                            total += (-1) ** nu * cm * s
            if total:
                out[wc] = total
        return out

    def fn(word):
        (u,) = word
        return {(w,): c for w, c in on_letter(u).items()}

    return Op(1, 1, 0, -1, fn, car, car, name="connes-d", audit=False)


def twist_structure(tab, mc, sigs, max_weight):
    """The twisted table p^m within the truncation (word lengths beyond
    the bound are dropped)."""
    out = OpTable(tab.d, tab.carrier)
    carrier = tab.carrier
    lgs = list(mc.comps)
    for sig in sigs:
        k, l, g = sig

        def make(sig=sig, k=k, l=l, g=g):
            def fn(word):
                res = {}
                for psig in tab.sigs():
                    km, lm, gm = psig
                    p = tab.get(psig)
                    # r = 0 term: the hat of p itself, diagonal part
                    if psig == sig:
                        vmerge(res, p(word))
                    for r in range(1, km + 1):
                        for svec in _svecs_for_twist(km, r, k):
                            for tup in _mc_tuples(lgs, r):
                                lsum = sum(t[0] for t in tup)
                                gsum = sum(t[1] for t in tup)
                                ssum = sum(svec)
                                t_in = km - ssum  # inputs taken from the word
                                if lsum - ssum + lm + (k - t_in) != l:
                                    continue
                                if gsum + gm + km - k - r != g:
                                    continue
                                coeff = F(1, factorial(r))
                                _twist_term(tab, p, svec, t_in,
                                            [mc.get(t) for t in tup],
                                            word, coeff, res, max_weight)
                out2 = {w: c for w, c in res.items()
                        if word_weight(carrier, w) <= max_weight}
                return out2
            return fn

        out.add(Op(k, l, g, op_degree(tab.d, sig), make(), carrier, carrier,
                   name="pm%s" % (sig,), audit=False))
    return out


def _svecs_for_twist(km, r, k):
    """s_i >= 1 per m factor; p also takes t >= 0 letters of the word."""
    for total in range(r, km + 1):
        for svec in _compositions(total, r):
            yield svec


def _twist_term(tab, p, svec, t_in, mvecs, word, coeff, out, max_weight):
    """hat-p consuming s_i letters of each m_i and t_in input letters."""
    carrier = tab.carrier
    if t_in < 0 or t_in > len(word):
        return
    combos = [((), F(1))]
    for vec in mvecs:
        nxt = []
        for blocks, c in combos:
            for w, cw in vec.items():
                nxt.append((blocks + (w,), c * cw))
        combos = nxt
    from .symbar import split_sign
    for blocks, c in combos:
        mflat = tuple(itertools.chain.from_iterable(blocks))
        pool = mflat + tuple(word)
        offs = []
        o = 0
        for w in blocks:
            offs.append((o, o + len(w)))
            o += len(w)
        choice_sets = [list(itertools.combinations(range(a, b), s))
                       for (a, b), s in zip(offs, svec)]
        base_in = len(mflat)
        input_sets = list(itertools.combinations(
            range(base_in, base_in + len(word)), t_in))
        for choices in itertools.product(*choice_sets):
            pre = tuple(itertools.chain.from_iterable(choices))
            for insel in input_sets:
                chosen = pre + insel
                s2 = split_sign(carrier, pool, chosen)
                sw = sort_word(carrier, tuple(pool[i] for i in chosen))
                if sw is None:
                    continue
                v2 = p(sw[0])
                if not v2:
                    continue
                rem = tuple(pool[i] for i in range(len(pool))
                            if i not in set(chosen))
                for z, c2 in v2.items():
                    final = sort_word(carrier, z + rem)
                    if final is None:
                        continue
                    vadd(out, final[0],
                         c * coeff * c2 * s2 * sw[1] * final[1])


# ---------------------------------------------------------------------------
# Push-forward along a morphism.


def ef_em_component(mor, mc, lg, max_weight):
    """<e^f(e^m)>_{(0,l,g)}: all outputs of the m blocks feed the f blocks.

    A term with m blocks of total Euler characteristic chi_m produces
    outputs of word length (flat m-weight) + 2(chi_{0,l,g} - chi_m),
    which prunes the enumeration exactly against the truncation.
    """
    from .symbar import block_sign, _assignments, _eval_blocks, \
        tuples_with_sums
    l, g = lg
    out = {}
    lgs = list(mc.comps)
    fsigs = mor.sigs()
    carrier = mor.src
    chi_tot = 2 - 2 * g - l
    minw = {t: min(word_weight(carrier, w) for w in mc.get(t))
            for t in lgs}
    for rp in range(1, 4 * max_weight + 4):
        any_alive = False
        for mtup in _mc_tuples(lgs, rp):
            lplus = sum(t[0] for t in mtup)
            gplus = sum(t[1] for t in mtup)
            chi_m = sum(2 - 2 * t[1] - t[0] for t in mtup)
            budget = max_weight - 2 * (chi_tot - chi_m)
            if sum(minw[t] for t in mtup) > budget:
                continue
            any_alive = True
            combos = [((), F(1), 0)]
            for t in mtup:
                vec = mc.get(t)
                nxt = []
                for blocks, c, wt in combos:
                    for w, cw in vec.items():
                        w2 = wt + word_weight(carrier, w)
                        if w2 <= budget:
                            nxt.append((blocks + (w,), c * cw, w2))
                combos = nxt
            if not combos:
                continue
            for rm in range(1, min(lplus, l) + 1):
                gsum = g + rp + rm - 1 - lplus - gplus
                if gsum < 0:
                    continue
                for ftup in tuples_with_sums(fsigs, rm, lplus, l, gsum):
                    coeff = F(1, factorial(rp) * factorial(rm))
                    fs = [mor.get(s) for s in ftup]
                    for blocks, c, wt in combos:
                        flat = tuple(itertools.chain.from_iterable(blocks))
                        for labels in _assignments(len(flat),
                                                   [f.k for f in fs]):
                            sgn = block_sign(carrier, flat, labels)
                            pieces = [[] for _ in fs]
                            for pos, b in enumerate(labels):
                                pieces[b].append(flat[pos])
                            _eval_blocks(fs, pieces, sgn, mor.dst, out,
                                         scale=c * coeff)
        if not any_alive and rp > l + 2 * g + 2:
            break
    return {w: c for w, c in out.items()
            if word_weight(mor.dst, w) <= max_weight}


def ef_em_apply(mor, mc, sig, word, max_weight):
    """<e^f(e^m .)>_{k,l,g} evaluated on an E_k word: the m blocks and
    the input letters are all consumed by the f blocks."""
    from .symbar import block_sign, _assignments, _eval_blocks
    k, l, g = sig
    if len(word) != k:
        return {}
    out = {}
    lgs = list(mc.comps)
    fsigs = mor.sigs()
    carrier = mor.src
    for rp in range(0, 4 * max_weight + 4):
        for mtup in _mc_tuples(lgs, rp):
            lplus = sum(t[0] for t in mtup)
            gplus = sum(t[1] for t in mtup)
            combos = [((), F(1))]
            for t in mtup:
                vec = mc.get(t)
                nxt = []
                for blocks, c in combos:
                    for w, cw in vec.items():
                        nxt.append((blocks + (w,), c * cw))
                combos = nxt
            if not combos:
                continue
            for rm in range(1, k + lplus + 1):
                gsum = g - gplus - lplus + rp + rm - 1
                if gsum < 0:
                    continue
                for ftup in symbar_tuples(fsigs, rm, k + lplus, l, gsum):
                    coeff = F(1, factorial(rp) * factorial(rm))
                    fs = [mor.get(s) for s in ftup]
                    for blocks, c in combos:
                        flat = tuple(itertools.chain.from_iterable(blocks)) \
                            + tuple(word)
                        if len(flat) != sum(f.k for f in fs):
                            continue
                        for labels in _assignments(len(flat),
                                                   [f.k for f in fs]):
                            sgn = block_sign(carrier, flat, labels)
                            pieces = [[] for _ in fs]
                            for pos, b in enumerate(labels):
                                pieces[b].append(flat[pos])
                            _eval_blocks(fs, pieces, sgn, mor.dst, out,
                                         scale=c * coeff)
        if rp > 2 * max_weight + l + 2 * g + 2:
            break
    return {w: c for w, c in out.items()
            if word_weight(mor.dst, w) <= max_weight}


def symbar_tuples(sigs, r, ksum, lsum, gsum):
    from .symbar import tuples_with_sums
    yield from tuples_with_sums(sigs, r, ksum, lsum, gsum)


def pushforward_mc(mor, mc, lg_bound, max_weight):
    """f_* m by signature induction on e^f(e^m) = e^(f_* m)."""
    lgs = [(l, g) for l in range(1, lg_bound + 1)
           for g in range(0, (lg_bound + 1 - l) // 2 + 1)]
    lgs.sort(key=lambda lg: (lg[0] + 2 * lg[1], -lg[1]))
    target = {}
    carrier = mor.dst
    for lg in lgs:
        l, g = lg
        vec = ef_em_component(mor, mc, lg, max_weight)
        # subtract disconnected products of previously computed components
        for r in range(2, l + 1):
            for tup in _mc_tuples(sorted(target), r):
                if sum(t[0] for t in tup) != l:
                    continue
                if sum(t[1] for t in tup) != g + r - 1:
                    continue
                coeff = -F(1, factorial(r))
                combos = [((), F(1))]
                for t in tup:
                    v = target[t]
                    nxt = []
                    for blocks, c in combos:
                        for w, cw in v.items():
                            nxt.append((blocks + (w,), c * cw))
                    combos = nxt
                for blocks, c in combos:
                    flat = tuple(itertools.chain.from_iterable(blocks))
                    sw = sort_word(carrier, flat)
                    if sw is None:
                        continue
                    if word_weight(carrier, sw[0]) > max_weight:
                        continue
                    vadd(vec, sw[0], coeff * c * sw[1])
        vec = {w: c for w, c in vec.items() if c}
        if vec:
            target[lg] = vec
    return MCElement(target)


def trivalent_pushforward(tdata, mvec, lg, max_weight):
    """The trivalent ribbon-graph state sum for (f_* m+_2)_{l,g} (the
    explicit description of the push-forward of the DGA Maurer-Cartan
    element): m+_2 at every interior vertex, the pairing-dual of the
    homotopy on interior edges."""
    from .transfer import state_sum, output_to_ewords
    from .ribbon import enumerate_graphs
    l, g = lg
    out = {}
    gs = -1 if (tdata.sub.cx.n - 3) & 1 else 1
    # trivalent graphs with k vertices have s = k - 2(l + 2g - 2) legs;
    # the output word length bound makes the k range finite
    for k in range(1, max_weight + 2 * (l + 2 * g - 2) + 1):
        m = k + l + 2 * g - 2
        s = 3 * k - 2 * m
        if m < 0 or s < l or s > max_weight:
            continue
        graphs = enumerate_graphs(k, l, g, trivalent=True)
        if not graphs:
            continue
        # every interior vertex carries the whole element m+_2: feed the
        # Vec into each multilinear slot of the state sum
        inputs = tuple(dict(mvec) for _ in range(k))
        for graph, aut in graphs:
            part = state_sum(tdata.sub.cx, graph, inputs, tdata.gtensor,
                             tdata.src_car, strategy=tdata.strategy,
                             aut=aut)
            output_to_ewords(tdata, out, part, coef=gs)
    return {w: c for w, c in out.items()
            if word_weight(tdata.tgt_car, w) <= max_weight}


# ---------------------------------------------------------------------------
# Genus-zero master equation.


def check_genus0_master(tab, mfamily, max_weight, l_bound=None):
    """p110 m_(l) + hat-p120(m_(l-1)) + 1/2 sum hat-p210(m_(i) m_(l-i+1)) = 0.

    ``mfamily``: dict l -> E_l Vec with m_(1) the aggregate m+.
    """
    carrier = tab.carrier
    p110 = tab.get((1, 1, 0))
    p210 = tab.get((2, 1, 0))
    p120 = tab.get((1, 2, 0))
    report = []
    l_bound = l_bound or max(mfamily) + 1
    for l in range(1, l_bound + 1):
        res = {}
        for w, c in mfamily.get(l, {}).items():
            vmerge(res, hat_apply(p110, w), c)
        for w, c in mfamily.get(l - 1, {}).items():
            vmerge(res, hat_apply(p120, w), c)
        for i in range(1, l + 1):
            j = l - i + 1
            for w1, c1 in mfamily.get(i, {}).items():
                for w2, c2 in mfamily.get(j, {}).items():
                    sw = sort_word(carrier, w1 + w2)
                    if sw is None:
                        continue
                    vmerge(res, hat_apply(p210, sw[0]),
                           F(c1 * c2 * sw[1], 2))
        res = {w: c for w, c in res.items()
               if word_weight(carrier, w) <= max_weight}
        report.append((l, len(res), sorted(res.items())[:1]))
    ok = all(n == 0 for _, n, _ in report)
    return ok, report


# ---------------------------------------------------------------------------
# Truncated cyclic cohomology.


def cyclic_cohomology(diff_op, carrier, max_weight, degree_window=None):
    """Exact Betti numbers of the word-length-truncated complex under a
    square-zero degree(-1) operator, with a stability flag comparing the
    cutoffs W-1 and W."""
    from . import linalg

    def betti(cutoff):
        letters = [x for x in carrier.letters_upto(cutoff)]
        by_deg = {}
        for x in letters:
            by_deg.setdefault(carrier.deg1(x), []).append(x)
        ranks = {}
        dims = {d: len(ls) for d, ls in by_deg.items()}
        for d, ls in sorted(by_deg.items()):
            tgt = by_deg.get(d - 1, [])
            tidx = {x: i for i, x in enumerate(tgt)}
            mat = [[F(0)] * len(ls) for _ in range(len(tgt))]
            for j, x in enumerate(ls):
                for u, c in diff_op((x,)).items():
                    if word_weight(carrier, u) > cutoff:
                        continue
                    mat[tidx[u[0]]][j] = c
            ranks[d] = linalg.rank(mat) if tgt and ls else 0
        bettis = {}
        for d in dims:
            bettis[d] = dims[d] - ranks.get(d, 0) - ranks.get(d + 1, 0)
        return dims, ranks, bettis

    dims1, ranks1, b1 = betti(max_weight - 1) if max_weight > 1 \
        else ({}, {}, {})
    dims2, ranks2, b2 = betti(max_weight)
    degrees = sorted(set(b1) | set(b2))
    if degree_window is not None:
        degrees = [d for d in degrees if degree_window[0] <= d <= degree_window[1]]
    table = []
    for d in degrees:
        table.append({
            "degree": d,
            "dim": dims2.get(d, 0),
            "rank_out": ranks2.get(d, 0),
            "betti": b2.get(d, 0),
            "betti_prev_cutoff": b1.get(d, 0),
            "stable": b1.get(d, None) == b2.get(d, 0),
        })
    return table
