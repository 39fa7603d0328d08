"""Relation and morphism verification for IBL-infinity structures.

Everything is verified on truncations: a statement is checked for all
signatures up to a position in the linear order and on all basis words
up to a word-length bound.  All arithmetic is exact.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import symbar
from .symbar import (Op, OpTable, MorTable, vadd, vmerge, vscale, vsub,
                     hat_apply, compose_s_apply, multi_first_apply,
                     multi_second_apply, odot_apply, ef_component,
                     efef_component, factorial, tuples_with_sums,
                     op_degree, mor_degree, ewords, sort_word)

# ---------------------------------------------------------------------------
# Signature order.


def sig_sort_key(sig):
    k, l, g = sig
    return (k + l + 2 * g, -g, k)


def sig_lt(a, b):
    """a strictly precedes b in the linear order on signatures."""
    return sig_sort_key(a) < sig_sort_key(b)


def signatures(count, kmin=1):
    """The first ``count`` signatures in the linear order."""
    out = []
    bound = 2
    while len(out) < count:
        out = [s for s in _sigs_measure_upto(bound, kmin)]
        out.sort(key=sig_sort_key)
        bound += 1
    return out[:count]


def _sigs_measure_upto(m, kmin):
    for k in range(kmin, m + 1):
        for l in range(1, m + 1):
            for g in range(0, (m - k - l) // 2 + 1):
                if k + l + 2 * g <= m:
                    yield (k, l, g)


# ---------------------------------------------------------------------------
# Structure relations.


def _pairs_for_residual(sig, exclude_boundary=False):
    """Admissible ((k1,l1,g1),(k2,l2,g2),s) triples of eq. (BL4)."""
    k, l, g = sig
    for s in range(1, g + 2):
        for k1 in range(1, k + s):
            k2 = k + s - k1
            if k2 < 1:
                continue
            for l1 in range(max(1, s), l + s):
                l2 = l + s - l1
                if l2 < 1:
                    continue
                for g1 in range(0, g + 2 - s):
                    g2 = g + 1 - s - g1
                    if g2 < 0:
                        continue
                    if k2 < s:
                        continue
                    if exclude_boundary and ((k1, l1, g1) == (1, 1, 0)
                                             or (k2, l2, g2) == (1, 1, 0)):
                        continue
                    yield (k1, l1, g1), (k2, l2, g2), s


def relation_residual(tab, sig, strict=False):
    """The connected relation sum at ``sig`` as an Op E_k -> E_l.

    Vanishing of this map for every signature in a downward-closed range
    is the IBL-infinity structure equation.
    """
    k, l, g = sig

    def fn(word):
        out = {}
        for sig1, sig2, s in _pairs_for_residual(sig):
            p1 = tab.get(sig1)
            p2 = tab.get(sig2)
            if p1 is None or p2 is None:
                if strict and (p1 is None or p2 is None):
                    raise KeyError("missing table entries %s / %s" % (sig1, sig2))
                continue
            vmerge(out, compose_s_apply(p2, s, p1, word))
        return out

    return Op(k, l, g, op_degree(tab.d, sig) - 1, fn, tab.carrier, tab.carrier,
              name="residual%s" % (sig,))


def extract_P(tab, sig, strict=False):
    """P_{k,l,g}: the residual with the two boundary terms stripped."""
    k, l, g = sig

    def fn(word):
        out = {}
        for sig1, sig2, s in _pairs_for_residual(sig, exclude_boundary=True):
            p1 = tab.get(sig1)
            p2 = tab.get(sig2)
            if p1 is None or p2 is None:
                if strict:
                    raise KeyError("missing table entries %s / %s" % (sig1, sig2))
                continue
            vmerge(out, compose_s_apply(p2, s, p1, word))
        return out

    return Op(k, l, g, op_degree(tab.d, sig) - 1, fn, tab.carrier, tab.carrier,
              name="P%s" % (sig,))


def op_is_zero(op, max_weight, kwords=None):
    """Number of nonzero output coefficients of ``op`` over all canonical
    basis words of weight <= max_weight (0 means the map vanishes)."""
    nonzero = 0
    first = None
    words = kwords if kwords is not None else ewords(op.src, op.k, max_weight)
    for w in words:
        out = op(w)
        if out:
            nonzero += len(out)
            if first is None:
                first = (w, sorted(out.items())[0])
    return nonzero, first


def check_structure(tab, sigs, max_weight, strict=False):
    """Residual norms per signature; 0 = relation holds on the truncation."""
    report = []
    for sig in sigs:
        res = relation_residual(tab, sig, strict=strict)
        nonzero, first = op_is_zero(res, max_weight)
        report.append((sig, nonzero, first))
    return report


# ---------------------------------------------------------------------------
# The boundary operator on Hom spaces.


def delta_hom(op, p_dst, p_src):
    """delta(op) = hat p_dst o op - (-1)^|op| op o hat p_src."""
    sgn = -1 if (op.degree & 1) == 0 else 1
    # delta(phi) = d phi + (-1)^(|phi|+1) phi d

    def fn(word):
        out = {}
        mid = op(word)
        for u, c in mid.items():
            vmerge(out, hat_apply(p_dst, u), c)
        pre = hat_apply(p_src, word)
        for u, c in pre.items():
            vmerge(out, op(u), c * sgn)
        return out

    return Op(op.k, op.l, op.g, op.degree - 1, fn, op.src, op.dst,
              name="delta(%s)" % op.name)


# ---------------------------------------------------------------------------
# Morphism relations.


def _first_sum_terms(mor, pplus, sig):
    """Terms ((f-sigs), svec, p-sig) of the first sum of eq. (mor4)."""
    k, l, g = sig
    for psig in pplus.sigs():
        kp, lp, gp = psig
        for r in range(1, l + 1):
            ksum = k + lp - kp
            gsum = g + r - lp - gp
            if ksum < r or gsum < 0:
                continue
            for svec in _compositions(lp, r):
                for tup in tuples_with_sums(mor.sigs(), r, ksum, l, gsum):
                    if any(s > t[0] for s, t in zip(svec, tup)):
                        continue
                    yield tup, svec, psig


def _second_sum_terms(mor, pminus, sig):
    k, l, g = sig
    for psig in pminus.sigs():
        km, lm, gm = psig
        for r in range(1, k + 1):
            lsum = l + km - lm
            gsum = g + r - km - gm
            if lsum < r or gsum < 0:
                continue
            for svec in _compositions(km, r):
                for tup in tuples_with_sums(mor.sigs(), r, k, lsum, gsum):
                    if any(s > t[1] for s, t in zip(svec, tup)):
                        continue
                    yield tup, svec, psig


def _compositions(total, parts):
    """All ways to write total = s_1+...+s_parts with s_i >= 1."""
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def morphism_residual(mor, pplus, pminus, sig, skip_extremes=False):
    """The connected morphism relation at ``sig`` as an Op E_k C+ -> E_l C-.

    With ``skip_extremes`` the two terms containing the p-components of
    signature ``sig`` itself are dropped; by the structure of the relation
    this is the expression R-tilde used in inductive constructions.
    """
    k, l, g = sig

    def skip(tup, psig):
        # R-tilde keeps only f components strictly below sig and p
        # components strictly between (1,1,0) and sig
        if not skip_extremes:
            return False
        if psig == sig or psig == (1, 1, 0):
            return True
        return any(not sig_lt(s, sig) for s in tup)

    def fn(word):
        out = {}
        for tup, svec, psig in _first_sum_terms(mor, pplus, sig):
            if skip(tup, psig):
                continue
            fs = [mor.get(s) for s in tup]
            p = pplus.get(psig)
            if p is None or any(f is None for f in fs):
                continue
            multi_first_apply(fs, svec, p, word,
                              scale=Fraction(1, factorial(len(fs))), out=out)
        for tup, svec, psig in _second_sum_terms(mor, pminus, sig):
            if skip(tup, psig):
                continue
            fs = [mor.get(s) for s in tup]
            p = pminus.get(psig)
            if p is None or any(f is None for f in fs):
                continue
            multi_second_apply(p, svec, fs, word,
                               scale=-Fraction(1, factorial(len(fs))), out=out)
        return out

    name = "Rtilde%s" % (sig,) if skip_extremes else "mor-residual%s" % (sig,)
    return Op(k, l, g, mor_degree(mor.d, sig) - 1, fn, mor.src, mor.dst,
              name=name)


def rtilde(mor, pplus, pminus, sig):
    return morphism_residual(mor, pplus, pminus, sig, skip_extremes=True)


def extract_R(mor, pplus, pminus, sig):
    """R_{k,l,g} = residual - (f o hat p110 - hat p110 o f)."""
    res = morphism_residual(mor, pplus, pminus, sig)
    f = mor.get(sig)
    b_src = pplus.get((1, 1, 0))
    b_dst = pminus.get((1, 1, 0))

    def fn(word):
        out = dict(res(word))
        if f is not None:
            if b_src is not None:
                for u, c in hat_apply(b_src, word).items():
                    vmerge(out, f(u), -c)
            if b_dst is not None:
                for u, c in f(word).items():
                    vmerge(out, hat_apply(b_dst, u), c)
        return out

    return Op(sig[0], sig[1], sig[2], mor_degree(mor.d, sig) - 1, fn,
              mor.src, mor.dst, name="R%s" % (sig,))


def check_morphism(mor, pplus, pminus, sigs, max_weight):
    report = []
    for sig in sigs:
        res = morphism_residual(mor, pplus, pminus, sig)
        nonzero, first = op_is_zero(res, max_weight)
        report.append((sig, nonzero, first))
    return report


def check_hommain(sig, max_weight, tab=None, mor=None, pplus=None, pminus=None,
                  presigs=None):
    """delta-closedness of P (part 1) and of R (part 2) at ``sig``,
    assuming the relations hold for the preceding signatures.

    Returns (status, detail); status is "pass", "fail" or "skipped".
    """
    presigs = presigs or [s for s in signatures(64)
                          if sig_lt(s, sig)]
    if tab is not None:
        for s in presigs:
            nz, first = op_is_zero(relation_residual(tab, s), max_weight)
            if nz:
                return "skipped", "structure relation fails at %s" % (s,)
        P = extract_P(tab, sig)
        b = tab.get((1, 1, 0))
        dP = delta_hom(P, b, b)
        nz, first = op_is_zero(dP, max_weight)
        return ("pass" if nz == 0 else "fail",
                "delta P nonzeros=%d %s" % (nz, first if nz else ""))
    else:
        for s in presigs:
            nz, first = op_is_zero(morphism_residual(mor, pplus, pminus, s),
                                   max_weight)
            if nz:
                return "skipped", "morphism relation fails at %s" % (s,)
        R = extract_R(mor, pplus, pminus, sig)
        dR = delta_hom(R, pminus.get((1, 1, 0)), pplus.get((1, 1, 0)))
        nz, first = op_is_zero(dR, max_weight)
        return ("pass" if nz == 0 else "fail",
                "delta R nonzeros=%d %s" % (nz, first if nz else ""))


def check_composition_identity(f, gmor, ptab_b, ptab_c, ptab_d, sig,
                               max_weight, sigs=None):
    """Part (3): R(f o g) = (1/L!) f110^L o R(g) + R(f) o (1/K!) g110^K
    + delta C(f, g), verified exactly on the truncation."""
    K, L, G = sig
    sigs = sigs or [s for s in signatures(64) if sig_sort_key(s)
                    <= sig_sort_key(sig)]
    composed = compose_morphisms(f, gmor, sigs)
    lhs = extract_R(composed, ptab_b, ptab_d, sig)
    Rg = extract_R(gmor, ptab_b, ptab_c, sig)
    Rf = extract_R(f, ptab_c, ptab_d, sig)
    f110 = f.get((1, 1, 0))
    g110 = gmor.get((1, 1, 0))
    C = composition_defect(f, gmor, composed, sig)
    dC = delta_hom(C, ptab_d.get((1, 1, 0)), ptab_b.get((1, 1, 0)))
    nonzero = 0
    first = None
    for w in ewords(gmor.src, K, max_weight):
        want = dict(dC(w))
        coeff = Fraction(1, factorial(L))
        for u, c in Rg(w).items():
            vmerge(want, odot_apply([f110] * L, u, f.dst), c * coeff)
        coeff = Fraction(1, factorial(K))
        mid = odot_apply([g110] * K, w, gmor.dst)
        for u, c in mid.items():
            vmerge(want, Rf(u), c * coeff)
        got = lhs(w)
        diff = dict(got)
        vmerge(diff, want, -1)
        if diff:
            nonzero += len(diff)
            if first is None:
                first = (w, sorted(diff.items())[0])
    return nonzero, first


def composition_defect(f, gmor, composed, sig):
    """C_{K,L,G}(f,g) = (f o g)_{K,L,G} - (1/L!) f110^L o g_{K,L,G}
    - f_{K,L,G} o (1/K!) g110^K."""
    K, L, G = sig

    def fn(word):
        out = dict(composed.get(sig)(word)) if composed.get(sig) else {}
        gK = gmor.get(sig)
        f110 = f.get((1, 1, 0))
        if gK is not None and f110 is not None:
            mid = gK(word)
            coeff = Fraction(1, factorial(L))
            for u, c in mid.items():
                vmerge(out, odot_apply([f110] * L, u, f.dst), -c * coeff)
        fK = f.get(sig)
        g110 = gmor.get((1, 1, 0))
        if fK is not None and g110 is not None:
            coeff = Fraction(1, factorial(K))
            mid = odot_apply([g110] * K, word, gmor.dst)
            for u, c in mid.items():
                vmerge(out, fK(u), -c * coeff)
        return out

    return Op(K, L, G, mor_degree(f.d, sig), fn, gmor.src, f.dst,
              name="C%s" % (sig,))


# ---------------------------------------------------------------------------
# Composition of morphisms.


def compose_morphisms(fminus, fplus, sigs):
    """f with e^f = e^{f-} e^{f+}, solved inductively in the linear order.

    The middle carriers must agree (same letters and degrees); words are
    passed through directly, and the degree audit catches mismatches.
    """
    h = MorTable(fminus.d, fplus.src, fminus.dst)
    for sig in sorted(sigs, key=sig_sort_key):
        k, l, g = sig

        def make(sig=sig, k=k, l=l, g=g):
            def fn(word):
                out = efef_component(fminus, fplus, sig, word)
                # subtract the disconnected products of lower components
                for r in range(2, min(k, l) + 1):
                    gsum = g + r - 1
                    if gsum < 0:
                        continue
                    coeff = Fraction(1, factorial(r))
                    for tup in tuples_with_sums(h.sigs(), r, k, l, gsum):
                        fs = [h.get(s) for s in tup]
                        vmerge(out, odot_apply(fs, word, h.dst), -coeff)
                return out
            return fn

        h.add(Op(k, l, g, mor_degree(h.d, sig), make(), h.src, h.dst,
                 name="comp%s" % (sig,)))
    return h


def identity_morphism(d, carrier, audit=True):
    m = MorTable(d, carrier, carrier)
    m.add(Op(1, 1, 0, 0, lambda w: {w: Fraction(1)}, carrier, carrier,
             name="id", audit=audit))
    return m


def linear_morphism(d, src, dst, letter_map, name="f110"):
    """Linear morphism from a letter-level map (dict letter -> Vec)."""
    m = MorTable(d, src, dst)

    def fn(word):
        (x,) = word
        return {(u,): c for u, c in letter_map.get(x, {}).items()} \
            if not callable(letter_map) else \
            {(u,): c for u, c in letter_map(x).items()}

    m.add(Op(1, 1, 0, 0, fn, src, dst, name=name))
    return m


# ---------------------------------------------------------------------------
# The chain-level path object.


class PathCarrier:
    """Letters of F C = C + C + C[1]: pairs (slot, letter), slot in 0..2."""

    def __init__(self, base):
        self.base = base

    def deg1(self, letter):
        slot, x = letter
        d = self.base.deg1(x)
        return d - 1 if slot == 2 else d

    def weight(self, letter):
        return self.base.weight(letter[1])

    def sort_key(self, letter):
        slot, x = letter
        return (slot, self.base.sort_key(x))

    def letters_upto(self, max_weight):
        out = []
        for slot in (0, 1, 2):
            for x in self.base.letters_upto(max_weight):
                out.append((slot, x))
        return out


class PathObjectChain:
    """The chain-level path object F C = C + C + C[1] with its structure
    maps; all letter-level Vec maps."""

    def __init__(self, carrier, p110):
        self.base = carrier
        self.car = PathCarrier(carrier)
        self.p110 = p110

    def q110(self, letter):
        slot, x = letter
        out = {}
        if slot == 0:
            for u, c in self.p110((x,)).items():
                vadd(out, (0, u[0]), c)
            vadd(out, (2, x), -1)
        elif slot == 1:
            for u, c in self.p110((x,)).items():
                vadd(out, (1, u[0]), c)
            vadd(out, (2, x), 1)
        else:
            for u, c in self.p110((x,)).items():
                vadd(out, (2, u[0]), -c)
        return out

    def iota(self, x):
        return {(0, x): Fraction(1), (1, x): Fraction(1)}

    def eps(self, i, letter):
        slot, x = letter
        if slot == i:
            return {x: Fraction(1)}
        return {}

    def homotopy0(self, letter):
        """H with qH + Hq = iota eps_0 - id."""
        slot, x = letter
        if slot == 2:
            return {(1, x): Fraction(-1)}
        return {}

    def homotopy1(self, letter):
        """H' with qH' + H'q = iota eps_1 - id."""
        slot, x = letter
        if slot == 2:
            return {(0, x): Fraction(1)}
        return {}

    def right_inverse(self, i, x):
        """rho(c_0, c_1) = (c_0, c_1, 0): component feeding slot i."""
        return {(i, x): Fraction(1)}

    def q_op(self, d):
        return Op(1, 1, 0, -1, lambda w: {(u,): c for u, c
                                          in self.q110(w[0]).items()},
                  self.car, self.car, name="q110")

    def verify(self, max_weight):
        """All chain-level path object identities on the letter basis."""
        checks = []
        letters = self.base.letters_upto(max_weight)
        plett = self.car.letters_upto(max_weight)

        def lm_apply(f, vec):
            out = {}
            for x, c in vec.items():
                vmerge(out, f(x), c)
            return out

        ok = True
        for x in letters:
            v = lm_apply(lambda l: self.q110(l), self.iota(x))
            w = {}
            for u, c in self.p110((x,)).items():
                vmerge(w, self.iota(u[0]), c)
            if v != w:
                ok = False
        checks.append(("iota-chain-map", ok))
        for i in (0, 1):
            ok = all(lm_apply(lambda l: self.eps(i, l), self.iota(x))
                     == {x: Fraction(1)} for x in letters)
            checks.append(("eps%d-iota-is-id" % i, ok))
        ok = True
        for l in plett:
            v = lm_apply(self.q110, self.q110(l))
            if v:
                ok = False
        checks.append(("q-squared", ok))
        for name, hom, i in (("qH+Hq-eps0", self.homotopy0, 0),
                             ("qH+Hq-eps1", self.homotopy1, 1)):
            ok = True
            for l in plett:
                v = lm_apply(self.q110, hom(l))
                vmerge(v, lm_apply(hom, self.q110(l)))
                target = {}
                for x, c in self.eps(i, l).items():
                    vmerge(target, self.iota(x), c)
                vadd(target, l, -1)
                if v != target:
                    ok = False
            checks.append((name, ok))
        ok = True
        for i in (0, 1):
            for x in letters:
                v = lm_apply(lambda l: self.eps(i, l), self.right_inverse(i, x))
                if v != {x: Fraction(1)}:
                    ok = False
                other = lm_apply(lambda l: self.eps(1 - i, l),
                                 self.right_inverse(i, x))
                if other:
                    ok = False
        checks.append(("right-inverse", ok))
        return all(c[1] for c in checks), checks


def path_object_chain(carrier, p110):
    return PathObjectChain(carrier, p110)


# ---------------------------------------------------------------------------
# Homotopy adjustment (the h' trick).


def lm_compose(f, g):
    """(f o g) for letter-level Vec maps."""
    def h(x):
        out = {}
        for y, c in g(x).items():
            vmerge(out, f(y), c)
        return out
    return h


def lm_sub(f, g):
    def h(x):
        out = dict(f(x))
        vmerge(out, g(x), -1)
        return out
    return h


def lm_id(x):
    return {x: Fraction(1)}


def homotopy_adjust(h, i, e, f=None, g=None, check=None):
    """Lemma-style adjusted homotopy.

    ``h`` is any chain homotopy with d h + h d = i e - id on B, ``e i = id``.
    Set h' = (id - i e) h (id - i e); then for a chain map f : A -> B with
    ef = 0 the map H = h' f satisfies f + d H +- H d = 0 and e H = 0, and
    for g : B -> A with g i = 0 the map H = g h' satisfies g + d H +- H d = 0
    and H i = 0.
    """
    ie = lm_compose(i, e)
    proj = lm_sub(lm_id, ie)
    hprime = lm_compose(proj, lm_compose(h, proj))
    if f is not None:
        return lm_compose(hprime, f)
    if g is not None:
        return lm_compose(g, hprime)
    return hprime
