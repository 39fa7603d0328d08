"""Differential Weyl algebras and their dictionary with IBL-infinity data.

One rewriting engine handles everything: generators carry degrees and a
global normal order (q's left of p's); the only nontrivial relation is

    p_g * q_g - (-1)^(|p_g||q_g|) q_g * p_g = kappa_g hbar.

Left and right actions are star products followed by setting the
appropriate variables to zero:  ->A (X) = (A * X)|_{p=0}  and
X <- A = (X * A)|_{q=0}.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .symbar import (Letters, Op, OpTable, MorTable, vadd, vmerge, sort_word,
                     factorial, op_degree, mor_degree, ewords)
from .iblcheck import signatures, sig_sort_key

F = Fraction


class WeylAlgebra:
    """Weyl algebra on an index set; generators ("q", side, i), ("p", side, i).

    ``side`` tags the algebra in morphism computations ("+" / "-" / "").
    """

    def __init__(self, d, indices, side=""):
        # indices: list of (name, qdeg, kappa)
        self.d = d
        self.side = side
        self.names = [x[0] for x in indices]
        self.qdeg = {x[0]: x[1] for x in indices}
        self.kappa = {x[0]: F(x[2]) for x in indices}
        self.pdeg = {x[0]: 2 * d - x[1] for x in indices}

    def qgen(self, name):
        return ("q", self.side, name)

    def pgen(self, name):
        return ("p", self.side, name)

    def carrier(self):
        return Letters({name: self.qdeg[name] for name in self.names})


class WeylContext:
    """Degrees, normal order and contraction data for a set of algebras."""

    def __init__(self, algebras):
        self.algebras = list(algebras)
        self.deg = {}
        self.order = {}
        self.kappa = {}
        pos = 0
        for alg in self.algebras:
            for name in alg.names:
                self.deg[alg.qgen(name)] = alg.qdeg[name]
                self.deg[alg.pgen(name)] = alg.pdeg[name]
                self.kappa[(alg.pgen(name), alg.qgen(name))] = \
                    alg.kappa[name]
        # global order: all q's before all p's
        for alg in self.algebras:
            for name in alg.names:
                self.order[alg.qgen(name)] = (0, pos, name)
            pos += 1
        for alg in self.algebras:
            for name in alg.names:
                self.order[alg.pgen(name)] = (1, pos, name)
            pos += 1
        self._memo = {}

    def normal_order(self, seq):
        """Normal form of a generator word: dict (word, hbar shift) -> coeff."""
        seq = tuple(seq)
        hit = self._memo.get(seq)
        if hit is not None:
            return hit
        out = self._normal_order(seq)
        self._memo[seq] = out
        return out

    def _normal_order(self, seq):
        for i in range(len(seq) - 1):
            a, b = seq[i], seq[i + 1]
            if self.order[a] > self.order[b]:
                sgn = -1 if (self.deg[a] & 1) and (self.deg[b] & 1) else 1
                swapped = seq[:i] + (b, a) + seq[i + 2:]
                out = {}
                for k, c in self.normal_order(swapped).items():
                    vadd(out, k, c * sgn)
                kap = self.kappa.get((a, b))
                if kap:
                    contracted = seq[:i] + seq[i + 2:]
                    for (w, h), c in self.normal_order(contracted).items():
                        vadd(out, (w, h + 1), c * kap)
                return out
            if a == b and (self.deg[a] & 1):
                return {}
        for a, b in zip(seq, seq[1:]):
            if a == b and (self.deg[a] & 1):
                return {}
        return {(seq, 0): F(1)}


class WElement:
    """Linear combination of normal-ordered monomials times hbar powers."""

    def __init__(self, ctx, terms=None):
        self.ctx = ctx
        self.terms = dict(terms or {})

    def __bool__(self):
        return bool(self.terms)

    def copy(self):
        return WElement(self.ctx, self.terms)

    @classmethod
    def monomial(cls, ctx, gens, hpow=0, coeff=1):
        out = {}
        for (w, h), c in ctx.normal_order(tuple(gens)).items():
            vadd(out, (w, h + hpow), c * F(coeff))
        return cls(ctx, out)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def one(cls, ctx):
        return cls(ctx, {((), 0): F(1)})

    def add(self, other, scale=1):
        out = dict(self.terms)
        for k, c in other.terms.items():
            vadd(out, k, c * F(scale))
        return WElement(self.ctx, out)

    def scale(self, c):
        return WElement(self.ctx, {k: v * F(c) for k, v in self.terms.items()})

    def star(self, other):
        out = {}
        for (w1, h1), c1 in self.terms.items():
            for (w2, h2), c2 in other.terms.items():
                for (w, h), c in self.ctx.normal_order(w1 + w2).items():
                    vadd(out, (w, h + h1 + h2), c * c1 * c2)
        return WElement(self.ctx, out)

    def kill(self, kind, side):
        """Set all generators ("p"/"q", side, *) to zero."""
        out = {}
        for (w, h), c in self.terms.items():
            if any(g[0] == kind and g[1] == side for g in w):
                continue
            vadd(out, (w, h), c)
        return WElement(self.ctx, out)

    def degree_set(self):
        return {sum(self.ctx.deg[g] for g in w)
                + 2 * _ctx_d(self.ctx) * h
                for (w, h), c in self.terms.items()}

    def counts(self, kind, side):
        return {sum(1 for g in w if g[0] == kind and g[1] == side)
                for (w, h), c in self.terms.items()}

    def component(self, k, l, g, src_side, dst_side):
        """Part with p(src)-degree k, q(dst)-degree l at hbar^(g-1)."""
        out = {}
        for (w, h), c in self.terms.items():
            pk = sum(1 for x in w if x[0] == "p" and x[1] == src_side)
            ql = sum(1 for x in w if x[0] == "q" and x[1] == dst_side)
            if pk == k and ql == l and h == g - 1:
                out[(w, h)] = c
        return WElement(self.ctx, out)

    def commutator(self, other):
        da = self.degree_set()
        db = other.degree_set()
        if len(da) > 1 or len(db) > 1:
            raise ValueError("commutator needs homogeneous elements")
        sgn = -1 if (da and db and (da.pop() & 1) and (db.pop() & 1)) else 1
        return self.star(other).add(other.star(self), -sgn)


def _ctx_d(ctx):
    return ctx.algebras[0].d


# ---------------------------------------------------------------------------
# Hamiltonians and the dictionary with operation tables.


def check_hamiltonian_shape(ctx, H, alg):
    """Degree -1 homogeneity and the exactness conditions H|p=0 = H|q=0 = 0."""
    checks = []
    degs = H.degree_set()
    checks.append(("degree-minus-one", degs <= {-1}))
    ok = all(any(g[0] == "p" and g[1] == alg.side for g in w)
             and any(g[0] == "q" and g[1] == alg.side for g in w)
             for (w, h), c in H.terms.items())
    checks.append(("vanishing-at-p0-q0", ok))
    return all(c[1] for c in checks), checks


def master_check(H):
    """H * H as an element (zero iff the master equation holds)."""
    return H.star(H)


def word_element(ctx, alg, word, hpow=0, coeff=1):
    return WElement.monomial(ctx, [alg.qgen(x) for x in word], hpow, coeff)


def act_left(ctx, A, alg_src, X):
    """->A (X) = (A * X) with the p's of alg_src set to zero afterwards."""
    return A.star(X).kill("p", alg_src.side)


def act_right(ctx, X, A, alg_src):
    """X <- A = (X * A) with the q's of alg_src set to zero afterwards."""
    return X.star(A).kill("q", alg_src.side)


def ops_from_hamiltonian(ctx, alg, H, sigs):
    """The operation table p_{k,l,g} = (1/hbar^k) -> H_{k,l,g}."""
    car = alg.carrier()
    tab = OpTable(alg.d, car)
    for sig in sigs:
        k, l, g = sig
        Hk = H.component(k, l, g, alg.side, alg.side)

        def make(Hk=Hk, k=k, g=g):
            def fn(word):
                X = word_element(ctx, alg, word)
                res = act_left(ctx, Hk, alg, X)
                out = {}
                for (w, h), c in res.terms.items():
                    if h != g - 1 + k:
                        raise AssertionError("hbar bookkeeping failure")
                    letters = tuple(x[2] for x in w)
                    if any(x[0] != "q" for x in w):
                        continue
                    out[letters] = out.get(letters, 0) + c
                return {w: c for w, c in out.items() if c}
            return fn

        tab.add(Op(k, l, g, op_degree(alg.d, sig), make(), car, car,
                   name="pW%s" % (sig,)))
    return tab


def hamiltonian_from_ops(ctx, alg, tab, sigs, max_weight=None):
    """H_{k,l,g} = (1/k!) sum (1/prod kappa) p(q_gs) p_gs, summed over
    ordered index tuples."""
    car = alg.carrier()
    total = WElement.zero(ctx)
    for sig in sigs:
        k, l, g = sig
        p = tab.get(sig)
        if p is None:
            continue
        for tup in itertools.product(alg.names, repeat=k):
            sw = sort_word(car, tup)
            if sw is None:
                continue
            vec = p(sw[0])
            if not vec:
                continue
            kprod = F(1)
            for x in tup:
                kprod *= alg.kappa[x]
            coeff = F(1, factorial(k)) / kprod * sw[1]
            pgens = [alg.pgen(x) for x in tup]
            for out_word, c in vec.items():
                gens = [alg.qgen(x) for x in out_word] + pgens
                total = total.add(
                    WElement.monomial(ctx, gens, g - 1, c * coeff))
    return total


# ---------------------------------------------------------------------------
# Morphisms.


def morphism_from_table(ctx, alg_plus, alg_minus, mor, sigs):
    """F = sum (1/k!) sum (1/prod kappa) f(q+_gs) p+_gs hbar^{g-1}."""
    car = alg_plus.carrier()
    total = WElement.zero(ctx)
    for sig in sigs:
        k, l, g = sig
        f = mor.get(sig)
        if f is None:
            continue
        for tup in itertools.product(alg_plus.names, repeat=k):
            sw = sort_word(car, tup)
            if sw is None:
                continue
            vec = f(sw[0])
            if not vec:
                continue
            kprod = F(1)
            for x in tup:
                kprod *= alg_plus.kappa[x]
            coeff = F(1, factorial(k)) / kprod * sw[1]
            pgens = [alg_plus.pgen(x) for x in tup]
            for out_word, c in vec.items():
                gens = [alg_minus.qgen(x) for x in out_word] + pgens
                total = total.add(
                    WElement.monomial(ctx, gens, g - 1, c * coeff))
    return total


def table_from_morphism(ctx, alg_plus, alg_minus, Fel, sigs, d=None):
    d = alg_plus.d if d is None else d
    src = alg_plus.carrier()
    dst = alg_minus.carrier()
    mor = MorTable(d, src, dst)
    for sig in sigs:
        k, l, g = sig
        Fk = Fel.component(k, l, g, alg_plus.side, alg_minus.side)

        def make(Fk=Fk, k=k, g=g):
            def fn(word):
                X = word_element(ctx, alg_plus, word)
                res = act_left(ctx, Fk, alg_plus, X)
                out = {}
                for (w, h), c in res.terms.items():
                    if any(x[0] != "q" or x[1] != alg_minus.side for x in w):
                        continue
                    if h != g - 1 + k:
                        raise AssertionError("hbar bookkeeping failure")
                    letters = tuple(x[2] for x in w)
                    out[letters] = out.get(letters, 0) + c
                return {w: c for w, c in out.items() if c}
            return fn

        mor.add(Op(k, l, g, mor_degree(d, sig), make(), src, dst,
                   name="fW%s" % (sig,)))
    return mor


def exp_element(Fel, pmax, src_side):
    """e^F truncated at p(src)-degree <= pmax (each monomial of F has at
    least one p, so the series is finite on the truncation)."""
    ctx = Fel.ctx
    out = WElement.one(ctx)
    power = WElement.one(ctx)
    fact = 1
    for r in range(1, pmax + 1):
        power = power.star(Fel)
        power = WElement(ctx, {
            (w, h): c for (w, h), c in power.terms.items()
            if sum(1 for g in w if g[0] == "p" and g[1] == src_side) <= pmax})
        fact *= r
        out = out.add(power, F(1, fact))
        if not power:
            break
    return out


def check_exactness(Fel, alg_plus, alg_minus):
    return all(any(g[0] == "p" and g[1] == alg_plus.side for g in w)
               and any(g[0] == "q" and g[1] == alg_minus.side for g in w)
               for (w, h), c in Fel.terms.items())


def weyl_morphism_check(ctx, alg_plus, alg_minus, Fel, Hplus, Hminus, pmax):
    """The defect ->H- e^F - e^F <-H+ truncated at p+ degree <= pmax.

    Returns (ok, nonzero components keyed by (k, l, g))."""
    eF = exp_element(Fel, pmax, alg_plus.side)
    lhs = act_left(ctx, Hminus, alg_minus, eF)
    rhs = act_right(ctx, eF, Hplus, alg_plus)
    defect = lhs.add(rhs, -1)
    bad = {}
    for (w, h), c in defect.terms.items():
        pk = sum(1 for x in w if x[0] == "p" and x[1] == alg_plus.side)
        ql = sum(1 for x in w if x[0] == "q" and x[1] == alg_minus.side)
        if pk > pmax:
            continue
        # the (k,l,g) relation component sits at hbar^(g-1)
        key = (pk, ql, h + 1)
        bad[key] = bad.get(key, 0) + 1
    return (not bad), bad


def identity_morphism_element(ctx, alg_plus, alg_minus):
    """(1/hbar) sum (1/kappa) q-_g p+_g for matched index sets."""
    total = WElement.zero(ctx)
    for name in alg_plus.names:
        total = total.add(WElement.monomial(
            ctx, [alg_minus.qgen(name), alg_plus.pgen(name)], -1,
            F(1) / alg_plus.kappa[name]))
    return total


# ---------------------------------------------------------------------------
# Homotopies over R[s, ds].


class SPoly:
    """Polynomial in s with WElement coefficients."""

    def __init__(self, ctx, coeffs=None):
        self.ctx = ctx
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}

    @classmethod
    def const(cls, el):
        return cls(el.ctx, {0: el})

    def get(self, i):
        return self.coeffs.get(i, WElement.zero(self.ctx))

    def add(self, other, scale=1):
        out = dict(self.coeffs)
        for i, el in other.coeffs.items():
            cur = out.get(i, WElement.zero(self.ctx))
            out[i] = cur.add(el, scale)
        return SPoly(self.ctx, out)

    def star(self, other):
        out = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                cur = out.get(i + j, WElement.zero(self.ctx))
                out[i + j] = cur.add(a.star(b))
        return SPoly(self.ctx, out)

    def dds(self):
        """d/ds."""
        out = {}
        for i, el in self.coeffs.items():
            if i >= 1:
                out[i - 1] = el.scale(i)
        return SPoly(self.ctx, out)

    def at(self, s):
        total = WElement.zero(self.ctx)
        for i, el in self.coeffs.items():
            total = total.add(el, F(s) ** i)
        return total

    def kill(self, kind, side):
        return SPoly(self.ctx, {i: el.kill(kind, side)
                                for i, el in self.coeffs.items()})

    def is_zero(self):
        return all(not el for el in self.coeffs.values())


def exp_spoly(Fs, pmax, src_side):
    ctx = Fs.ctx
    out = SPoly.const(WElement.one(ctx))
    power = SPoly.const(WElement.one(ctx))
    fact = 1
    for r in range(1, pmax + 1):
        power = power.star(Fs)
        power = SPoly(ctx, {
            i: WElement(ctx, {(w, h): c for (w, h), c in el.terms.items()
                              if sum(1 for g in w
                                     if g[0] == "p" and g[1] == src_side)
                              <= pmax})
            for i, el in power.coeffs.items()})
        fact *= r
        out = out.add(power, F(1, fact))
        if power.is_zero():
            break
    return out


def weyl_homotopy_check(ctx, alg_plus, alg_minus, Fs, Ks, F0, F1, Hplus,
                        Hminus, pmax):
    """Endpoint conditions and the flow equation

        d/ds e^F(s) - ->[H-, K(s)] e^F(s) - e^F(s) <-[K(s), H+] = 0

    checked coefficient-wise per s power.  No search is performed.
    """
    checks = []
    checks.append(("endpoint-0", Fs.at(0).add(F0, -1).terms == {}))
    checks.append(("endpoint-1", Fs.at(1).add(F1, -1).terms == {}))
    eF = exp_spoly(Fs, pmax, alg_plus.side)
    lhs = eF.dds()
    for i, K in Ks.coeffs.items():
        brm = Hminus.commutator(K)
        brp = K.commutator(Hplus)
        for j, E in eF.coeffs.items():
            term1 = brm.star(E).kill("p", alg_minus.side)
            term2 = E.star(brp).kill("q", alg_plus.side)
            cur = lhs.get(i + j)
            lhs = SPoly(ctx, {**lhs.coeffs,
                              i + j: cur.add(term1, -1).add(term2, -1)})
    # truncate p+ degree
    bad = {}
    for i, el in lhs.coeffs.items():
        for (w, h), c in el.terms.items():
            pk = sum(1 for x in w if x[0] == "p" and x[1] == alg_plus.side)
            if pk <= pmax:
                bad[(i, (w, h))] = c
    checks.append(("flow-equation", not bad))
    return all(c[1] for c in checks), checks, bad
