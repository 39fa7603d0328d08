"""The reduced symmetric bar algebra E C over a graded letter set.

Elements of E_k C are formal linear combinations of symmetric words
c_1...c_k of homogeneous letters.  Words are stored as tuples sorted by
the carrier's letter order with the Koszul sign absorbed; a word with a
repeated letter of odd degree is zero.

Operations p : E_k -> E_l are stored as their connected part, evaluated
on canonical words; the hat extension, the products (odot) and the
partial compositions o_s are implemented as evaluation rules on words.

Evaluating an ordered tuple of homogeneous operators on blocks of
letters uses the tensor convention: f_j picks up the Koszul sign of
moving past the input blocks of f_1..f_{j-1}.  This is what makes
f_1 odot f_2 = (-1)^(|f_1||f_2|) f_2 odot f_1 hold.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

# ---------------------------------------------------------------------------
# Carriers: a carrier knows the letters of C[1], their degrees and weights.


class Letters:
    """A plain finite graded letter set (weight 1 per letter)."""

    def __init__(self, degs):
        self._degs = dict(degs)
        self._order = {l: i for i, l in enumerate(self._degs)}

    def deg1(self, letter):
        return self._degs[letter]

    def weight(self, letter):
        return 1

    def sort_key(self, letter):
        return self._order[letter]

    def letters_upto(self, max_weight):
        return list(self._degs)


# ---------------------------------------------------------------------------
# Words and Koszul bookkeeping.  A Vec is a dict word -> Fraction.


def vadd(acc, key, c):
    if not c:
        return
    cur = acc.get(key)
    if cur is None:
        acc[key] = c
    else:
        cur += c
        if cur:
            acc[key] = cur
        else:
            del acc[key]


def vscale(vec, c):
    if not c:
        return {}
    return {k: v * c for k, v in vec.items()}


def vmerge(acc, vec, c=1):
    for k, v in vec.items():
        vadd(acc, k, v * c)


def vsub(a, b):
    out = dict(a)
    vmerge(out, b, -1)
    return out


def sort_word(carrier, letters):
    """Canonical form of a word.  Returns (word, sign) or None if zero."""
    lst = list(letters)
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and carrier.sort_key(lst[j - 1]) > carrier.sort_key(lst[j]):
            if (carrier.deg1(lst[j - 1]) & 1) and (carrier.deg1(lst[j]) & 1):
                sign = -sign
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            j -= 1
    for a, b in zip(lst, lst[1:]):
        if a == b and (carrier.deg1(a) & 1):
            return None
    return tuple(lst), sign


def word_deg(carrier, word):
    return sum(carrier.deg1(l) for l in word)


def word_weight(carrier, word):
    return sum(carrier.weight(l) for l in word)


def split_sign(carrier, word, idxs):
    """Koszul sign moving the letters at ``idxs`` (ascending) to the front,
    both parts keeping their induced order."""
    sign = 1
    sel = set(idxs)
    jumped = 0
    for p, l in enumerate(word):
        par = carrier.deg1(l) & 1
        if p in sel:
            if par and (jumped & 1):
                sign = -sign
        else:
            jumped ^= par
    return sign


def block_sign(carrier, word, labels):
    """Koszul sign of the stable sort of ``word`` by the block ``labels``."""
    sign = 1
    pars = [carrier.deg1(l) & 1 for l in word]
    n = len(word)
    for i in range(n):
        if not pars[i]:
            continue
        for j in range(i + 1, n):
            if labels[i] > labels[j] and pars[j]:
                sign = -sign
    return sign


def ewords(carrier, k, max_weight):
    """All canonical E_k words of total weight <= max_weight."""
    letters = sorted(carrier.letters_upto(max_weight), key=carrier.sort_key)
    out = []

    def rec(start, left, budget, word):
        if left == 0:
            out.append(tuple(word))
            return
        for i in range(start, len(letters)):
            l = letters[i]
            w = carrier.weight(l)
            if w * left > budget:
                continue
            if word and word[-1] == l and (carrier.deg1(l) & 1):
                continue
            word.append(l)
            rec(i, left - 1, budget - w, word)
            word.pop()

    rec(0, k, max_weight, [])
    return out


# ---------------------------------------------------------------------------
# Operations.


class Op:
    """A connected linear map E_k(src) -> E_l(dst) of fixed signature.

    ``fn`` evaluates on a canonical word and returns a Vec; results are
    memoised and every output term checked against the declared degree.
    """

    def __init__(self, k, l, g, degree, fn, src, dst, name="", audit=True):
        self.k, self.l, self.g = k, l, g
        self.sig = (k, l, g)
        self.degree = degree
        self.fn = fn
        self.src = src
        self.dst = dst
        self.name = name or "op%s" % (self.sig,)
        self.audit = audit
        self._cache = {}

    def __call__(self, word):
        if len(word) != self.k:
            raise ValueError("%s applied to a word of length %d"
                             % (self.name, len(word)))
        hit = self._cache.get(word)
        if hit is not None:
            return hit
        out = self.fn(word)
        if self.audit and out:
            din = word_deg(self.src, word)
            for w, c in out.items():
                if word_deg(self.dst, w) - din != self.degree:
                    raise AssertionError("%s degree audit failed on %s -> %s"
                                         % (self.name, word, w))
        self._cache[word] = out
        return out

    @staticmethod
    def from_dict(k, l, g, degree, table, src, dst, name=""):
        data = {w: dict(v) for w, v in table.items()}

        def fn(word):
            return dict(data.get(word, {}))

        return Op(k, l, g, degree, fn, src, dst, name=name)


def zero_op(k, l, g, degree, src, dst, name="zero"):
    return Op(k, l, g, degree, lambda w: {}, src, dst, name=name)


def op_degree(d, sig):
    k, l, g = sig
    return -2 * d * (k + g - 1) - 1


def mor_degree(d, sig):
    k, l, g = sig
    return -2 * d * (k + g - 1)


class OpTable:
    """A signature-indexed family p_{k,l,g} on one carrier."""

    def __init__(self, d, carrier):
        self.d = d
        self.carrier = carrier
        self.ops = {}

    def add(self, op):
        if op.degree != op_degree(self.d, op.sig):
            raise ValueError("operation %s has the wrong declared degree" % (op.sig,))
        self.ops[op.sig] = op
        return op

    def get(self, sig):
        return self.ops.get(sig)

    def sigs(self):
        return list(self.ops)


class MorTable:
    """A signature-indexed family f_{k,l,g} : E(src) -> E(dst)."""

    def __init__(self, d, src, dst):
        self.d = d
        self.src = src
        self.dst = dst
        self.comps = {}

    def add(self, op):
        if op.degree != mor_degree(self.d, op.sig):
            raise ValueError("morphism component %s has the wrong degree" % (op.sig,))
        self.comps[op.sig] = op
        return op

    def get(self, sig):
        return self.comps.get(sig)

    def sigs(self):
        return list(self.comps)


# ---------------------------------------------------------------------------
# Hat extension, products, partial compositions.


def hat_apply(op, word):
    """Evaluate the hat extension of ``op`` on a word of any length."""
    src, dst = op.src, op.dst
    m = len(word)
    if m < op.k:
        return {}
    out = {}
    for idxs in itertools.combinations(range(m), op.k):
        s1 = split_sign(src, word, idxs)
        sel = set(idxs)
        sub = tuple(word[i] for i in idxs)
        rest = tuple(word[i] for i in range(m) if i not in sel)
        for u, c in op(sub).items():
            sw = sort_word(dst, u + rest)
            if sw is None:
                continue
            vadd(out, sw[0], c * s1 * sw[1])
    return out


def _eval_blocks(fs, pieces, sign0, dst, out, extra=(), scale=1):
    """Apply f_i to its letter block, multiply results in block order,
    append ``extra`` letters, canonical-sort, accumulate into ``out``.

    Includes the operator-crossing signs: f_j moves past the input
    blocks of f_1..f_{j-1}.
    """
    per = []
    cross = 0
    for f, piece in zip(fs, pieces):
        if f.degree & 1:
            if cross & 1:
                sign0 = -sign0
        sw = sort_word(f.src, piece)
        if sw is None:
            return
        vec = f(sw[0])
        if not vec:
            return
        per.append((vec, sw[1]))
        cross ^= word_deg(f.src, piece) & 1
    acc = {(): Fraction(sign0) * scale}
    for vec, s in per:
        nxt = {}
        for prev, cprev in acc.items():
            for u, cu in vec.items():
                key = prev + (u,)
                cur = nxt.get(key, 0) + cprev * cu * s
                nxt[key] = cur
        acc = nxt
    for blocks, c in acc.items():
        if not c:
            continue
        flat = tuple(itertools.chain.from_iterable(blocks)) + tuple(extra)
        sw = sort_word(dst, flat)
        if sw is None:
            continue
        vadd(out, sw[0], c * sw[1])


def _assignments(n, sizes):
    """All assignments of n positions into ordered blocks of given sizes,
    yielded as label lists."""
    if sum(sizes) != n:
        return

    def rec(remaining, b, acc):
        if b == len(sizes):
            yield dict(acc)
            return
        for comb in itertools.combinations(remaining, sizes[b]):
            rest = [i for i in remaining if i not in set(comb)]
            for i in comb:
                acc[i] = b
            yield from rec(rest, b + 1, acc)

    for a in rec(list(range(n)), 0, {}):
        yield [a[i] for i in range(n)]


def odot_apply(fs, word, dst):
    """(f_1 odot ... odot f_r)(word)."""
    if not fs:
        return {}
    src = fs[0].src
    sizes = [f.k for f in fs]
    if sum(sizes) != len(word):
        return {}
    out = {}
    for labels in _assignments(len(word), sizes):
        sgn = block_sign(src, word, labels)
        pieces = [[] for _ in fs]
        for pos, b in enumerate(labels):
            pieces[b].append(word[pos])
        _eval_blocks(fs, pieces, sgn, dst, out)
    return out


def compose_s_apply(op2, s, op1, word):
    """(hat op2 o_s hat op1) on ``word``: exactly s of the inputs of op2
    are outputs of op1."""
    src = op1.src
    mid = op1.dst
    dst = op2.dst
    if s < 0 or s > min(op1.l, op2.k):
        return {}
    m = len(word)
    if m < op1.k + op2.k - s:
        return {}
    out = {}
    for idxs in itertools.combinations(range(m), op1.k):
        s1 = split_sign(src, word, idxs)
        sel = set(idxs)
        sub = tuple(word[i] for i in idxs)
        rest = tuple(word[i] for i in range(m) if i not in sel)
        v1 = op1(sub)
        if not v1:
            continue
        for u, c1 in v1.items():
            pool = u + rest
            lu = len(u)
            for sel2 in itertools.combinations(range(lu), s):
                for sel3 in itertools.combinations(range(lu, len(pool)),
                                                   op2.k - s):
                    chosen = sel2 + sel3
                    s2 = split_sign(mid, pool, chosen)
                    sw = sort_word(mid, tuple(pool[i] for i in chosen))
                    if sw is None:
                        continue
                    v2 = op2(sw[0])
                    if not v2:
                        continue
                    rem = tuple(pool[i] for i in range(len(pool))
                                if i not in set(chosen))
                    base = c1 * s1 * s2 * sw[1]
                    for z, c2 in v2.items():
                        final = sort_word(dst, z + rem)
                        if final is None:
                            continue
                        vadd(out, final[0], base * c2 * final[1])
    return out


def multi_first_apply(fs, svec, p, word, scale=1, out=None):
    """((f_1 odot...odot f_r) o_{s_1..s_r} hat p)(word): a complete
    composition in which f_i consumes exactly s_i outputs of p."""
    src = p.src
    dst = fs[0].dst
    m = len(word)
    if sum(f.k for f in fs) != m - p.k + p.l:
        return {} if out is None else out
    if out is None:
        out = {}
    rest_sizes = [f.k - s for f, s in zip(fs, svec)]
    if any(r < 0 for r in rest_sizes):
        return out
    for idxs in itertools.combinations(range(m), p.k):
        s1 = split_sign(src, word, idxs)
        sel = set(idxs)
        sub = tuple(word[i] for i in idxs)
        rest = tuple(word[i] for i in range(m) if i not in sel)
        v1 = p(sub)
        if not v1:
            continue
        for u, c1 in v1.items():
            pool = u + rest
            for uassign in _assignments(len(u), list(svec)):
                for rassign in _assignments(len(rest), rest_sizes):
                    labels = uassign + rassign
                    sgn = block_sign(src, pool, labels)
                    pieces = [[] for _ in fs]
                    for pos, b in enumerate(labels):
                        pieces[b].append(pool[pos])
                    _eval_blocks(fs, pieces, sgn * s1, dst, out,
                                 scale=c1 * scale)
    return out


def multi_second_apply(p, svec, fs, word, scale=1, out=None):
    """((hat p) o_{s_1..s_r} (f_1 odot...odot f_r))(word): the f_i consume
    the whole input; p takes s_i letters from the output of f_i."""
    src = fs[0].src if fs else p.src
    mid = p.src
    dst = p.dst
    m = len(word)
    if sum(f.k for f in fs) != m:
        return {} if out is None else out
    if out is None:
        out = {}
    for labels in _assignments(m, [f.k for f in fs]):
        sgn0 = block_sign(src, word, labels)
        pieces = [[] for _ in fs]
        for pos, b in enumerate(labels):
            pieces[b].append(word[pos])
        mids = {}
        _eval_blocks_tuple(fs, pieces, sgn0, mids)
        for blocks, c in mids.items():
            flat = tuple(itertools.chain.from_iterable(blocks))
            offs = []
            o = 0
            for u in blocks:
                offs.append((o, o + len(u)))
                o += len(u)
            choice_sets = [list(itertools.combinations(range(a, b), s))
                           for (a, b), s in zip(offs, svec)]
            for choices in itertools.product(*choice_sets):
                chosen = tuple(itertools.chain.from_iterable(choices))
                s2 = split_sign(mid, flat, chosen)
                sw = sort_word(mid, tuple(flat[i] for i in chosen))
                if sw is None:
                    continue
                v2 = p(sw[0])
                if not v2:
                    continue
                rem = tuple(flat[i] for i in range(len(flat))
                            if i not in set(chosen))
                base = c * s2 * sw[1] * scale
                for z, c2 in v2.items():
                    final = sort_word(dst, z + rem)
                    if final is None:
                        continue
                    vadd(out, final[0], base * c2 * final[1])
    return out


def _eval_blocks_tuple(fs, pieces, sign0, acc_out):
    """Like _eval_blocks but accumulates tuples of output words (one per
    block, unflattened and unsorted) -> coefficient."""
    per = []
    cross = 0
    for f, piece in zip(fs, pieces):
        if f.degree & 1:
            if cross & 1:
                sign0 = -sign0
        sw = sort_word(f.src, piece)
        if sw is None:
            return
        vec = f(sw[0])
        if not vec:
            return
        per.append((vec, sw[1]))
        cross ^= sum(f.src.deg1(l) for l in piece) & 1
    acc = {(): Fraction(sign0)}
    for vec, s in per:
        nxt = {}
        for prev, cprev in acc.items():
            for u, cu in vec.items():
                key = prev + (u,)
                nxt[key] = nxt.get(key, 0) + cprev * cu * s
        acc = nxt
    for key, c in acc.items():
        if c:
            acc_out[key] = acc_out.get(key, 0) + c


# ---------------------------------------------------------------------------
# Exponentials.


def factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def tuples_with_sums(sigs, r, ksum, lsum, gsum):
    """Ordered r-tuples of signatures from ``sigs`` with prescribed sums."""
    def rec(i, k, l, g, acc):
        if i == r:
            if k == 0 and l == 0 and g == 0:
                yield tuple(acc)
            return
        rem = r - i - 1
        for s in sigs:
            sk, sl, sg = s
            if sk > k - rem or sl > l - rem or sg > g:
                continue
            acc.append(s)
            yield from rec(i + 1, k - sk, l - sl, g - sg, acc)
            acc.pop()

    yield from rec(0, ksum, lsum, gsum, [])


def ef_component(mor, sig, word):
    """<e^f>_{k,l,g} evaluated on a word (negative g is allowed)."""
    k, l, g = sig
    if len(word) != k:
        return {}
    out = {}
    sigs = mor.sigs()
    for r in range(1, min(k, l) + 1):
        gsum = g + r - 1
        if gsum < 0:
            continue
        coeff = Fraction(1, factorial(r))
        for tup in tuples_with_sums(sigs, r, k, l, gsum):
            fs = [mor.get(s) for s in tup]
            vmerge(out, odot_apply(fs, word, mor.dst), coeff)
    return out


def efef_component(fminus, fplus, sig, word):
    """<e^{f^-} e^{f^+}>_{k,l,g} on a word: complete gluings of all outputs
    of the f^+ blocks into the f^- blocks."""
    k, l, g = sig
    if len(word) != k:
        return {}
    out = {}
    src = fplus.src
    mid = fplus.dst
    dst = fminus.dst
    psigs = fplus.sigs()
    msigs = fminus.sigs()
    for rp in range(1, k + 1):
        for ptup in _tuples_ksum(psigs, rp, k):
            lmid = sum(s[1] for s in ptup)
            gplus = sum(s[2] for s in ptup)
            for rm in range(1, min(l, lmid) + 1):
                for mtup in _tuples_klsum(msigs, rm, lmid, l):
                    gminus = sum(s[2] for s in mtup)
                    if gplus + gminus != rp + rm + g - 1 - lmid:
                        continue
                    coeff = Fraction(1, factorial(rp) * factorial(rm))
                    _complete_glue([fminus.get(s) for s in mtup],
                                   [fplus.get(s) for s in ptup],
                                   word, coeff, src, mid, dst, out)
    return out


def _tuples_ksum(sigs, r, ksum):
    def rec(i, k, acc):
        if i == r:
            if k == 0:
                yield tuple(acc)
            return
        rem = r - i - 1
        for s in sigs:
            if s[0] > k - rem:
                continue
            acc.append(s)
            yield from rec(i + 1, k - s[0], acc)
            acc.pop()

    yield from rec(0, ksum, [])


def _tuples_klsum(sigs, r, ksum, lsum):
    def rec(i, k, l, acc):
        if i == r:
            if k == 0 and l == 0:
                yield tuple(acc)
            return
        rem = r - i - 1
        for s in sigs:
            if s[0] > k - rem or s[1] > l - rem:
                continue
            acc.append(s)
            yield from rec(i + 1, k - s[0], l - s[1], acc)
            acc.pop()

    yield from rec(0, ksum, lsum, [])


def _complete_glue(fms, fps, word, coeff, src, mid, dst, out):
    """Apply the f^+ blocks to a partition of the word, then partition all
    outputs among the f^- blocks."""
    m = len(word)
    if sum(f.k for f in fps) != m:
        return
    for labels in _assignments(m, [f.k for f in fps]):
        sgn0 = block_sign(src, word, labels)
        pieces = [[] for _ in fps]
        for pos, b in enumerate(labels):
            pieces[b].append(word[pos])
        mids = {}
        _eval_blocks_tuple(fps, pieces, sgn0, mids)
        for blocks, c in mids.items():
            flat = tuple(itertools.chain.from_iterable(blocks))
            if len(flat) != sum(f.k for f in fms):
                continue
            for mlabels in _assignments(len(flat), [f.k for f in fms]):
                sgn1 = block_sign(mid, flat, mlabels)
                mpieces = [[] for _ in fms]
                for pos, b in enumerate(mlabels):
                    mpieces[b].append(flat[pos])
                _eval_blocks(fms, mpieces, sgn1, dst, out, scale=c * coeff)
