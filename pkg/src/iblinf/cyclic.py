"""The dual cyclic bar complex of a cyclic cochain complex.

A cyclic cochain phi in B^cyc*_k A is stored through its coefficients
phi_{i_1..i_k} on canonical index words: the lexicographically minimal
cyclic rotation is the canonical key, and

    phi_{i_1..i_k} = (-1)^(eta_{i_k} * sum_{j<k} eta_{i_j}) phi_{i_k i_1..i_{k-1}}

recovers every other coefficient.  Orbits on which this rule forces the
coefficient to vanish are dropped from the basis.

The carrier C = B^cyc* A[2-n] has one letter per canonical word w; its
degree in C[1] is D(w) + n - 3 where D(w) = sum of the eta's of w.
"""

from __future__ import annotations

from fractions import Fraction

from . import symbar
from .symbar import Op, OpTable, vadd


def rotation_sign(cx, word):
    """Sign s with phi_word = s * phi_(right rotation of word)."""
    last = cx.eta(word[-1]) & 1
    if not last:
        return 1
    rest = sum(cx.eta(i) for i in word[:-1]) & 1
    return -1 if rest else 1


def cyclic_orbit(cx, word):
    """All rotations with signs: dict w -> sign, phi_input = sign * phi_w
    read off along the rotation path.  None when the orbit is degenerate."""
    visited = {word: 1}
    cur, sign = word, 1
    for _ in range(len(word) - 1):
        sign *= rotation_sign(cx, cur)
        cur = (cur[-1],) + cur[:-1]
        if cur in visited:
            if visited[cur] != sign:
                return None
        else:
            visited[cur] = sign
    # closing the full cycle must give sign +1
    if len(word) and rotation_sign(cx, cur) * sign != 1:
        return None
    return visited


def canonical_word(cx, word):
    """Canonical cyclic form. Returns (canonical, sign) with
    phi_word = sign * phi_canonical, or None for a degenerate orbit."""
    orb = cyclic_orbit(cx, tuple(word))
    if orb is None:
        return None
    best = min(orb)
    return best, orb[best]


class DualCyclicBar:
    """Carrier whose letters are the canonical cyclic words of B^cyc* A."""

    def __init__(self, cx):
        self.cx = cx
        self.n = cx.n
        self._letters = {}
        self._orbits = {}
        self._canon = {}

    # -- carrier protocol ----------------------------------------------------
    def deg1(self, word):
        return self.bdeg(word) + self.n - 3

    def weight(self, word):
        return len(word)

    def sort_key(self, word):
        return (len(word), word)

    def letters_upto(self, max_weight):
        out = []
        for m in range(1, max_weight + 1):
            out.extend(self._letters_len(m))
        return out

    # -- cyclic word bookkeeping ----------------------------------------------
    def bdeg(self, word):
        """Degree D in B^cyc* A (sum of shifted degrees)."""
        return sum(self.cx.eta(i) for i in word)

    def canonical(self, word):
        word = tuple(word)
        hit = self._canon.get(word, 0)
        if hit != 0:
            return hit
        res = canonical_word(self.cx, word)
        self._canon[word] = res
        return res

    def orbit(self, word):
        """Orbit map of a canonical word: {w: sign} with phi_w = sign*phi_word."""
        hit = self._orbits.get(word, 0)
        if hit != 0:
            return hit
        orb = cyclic_orbit(self.cx, word)
        if orb is not None:
            # phi_input = path_sign * phi_w means phi_w = path_sign * phi_input
            orb = {w: s for w, s in orb.items()}
        self._orbits[word] = orb
        return orb

    def coeff(self, u, word):
        """Coefficient of the basis cochain chi_u at an index word."""
        cw = self.canonical(word)
        if cw is None or cw[0] != u:
            return 0
        return cw[1]

    def _letters_len(self, m):
        hit = self._letters.get(m)
        if hit is not None:
            return hit
        dim = self.cx.dim
        out = []
        import itertools
        for flat in itertools.product(range(dim), repeat=m):
            cw = self.canonical(flat)
            if cw is None or cw[0] != flat:
                continue
            out.append(flat)
        self._letters[m] = out
        return out

    def add_to(self, acc, word, coeff):
        """Accumulate the cyclic functional with value ``coeff`` at ``word``."""
        cw = self.canonical(word)
        if cw is None:
            return
        vadd(acc, cw[0], coeff * cw[1])


def cyclic_symmetrize(cx, tensor):
    """Signed average of a raw coefficient tensor over the Z_k action.

    ``tensor``: dict word -> coefficient, homogeneous.  The result is a
    canonical-form dict; the projection is idempotent on cyclic input.
    """
    words = list(tensor)
    if not words:
        return {}
    k = len(words[0])
    if any(len(w) != k for w in words):
        raise ValueError("words of unequal length")
    degs = {sum(cx.eta(i) for i in w) for w in tensor}
    if len(degs) > 1:
        raise ValueError("inhomogeneous tensor")
    car = DualCyclicBar(cx)
    done = set()
    out = {}
    for word in words:
        cw = car.canonical(word)
        if cw is None or cw[0] in done:
            continue
        canon = cw[0]
        done.add(canon)
        # (P phi)_canon = (1/k) sum over rotations, with path signs
        total = Fraction(0)
        cur, sign = canon, 1
        for _ in range(k):
            c = tensor.get(cur)
            if c:
                total += sign * c
            sign *= rotation_sign(cx, cur)
            cur = (cur[-1],) + cur[:-1]
        if total:
            out[canon] = total / k
    return out


def tensor_of(car, vec, length):
    """Expand a letter-level Vec into the full coefficient tensor on all
    index words of the given length (for tests and oracles)."""
    import itertools
    out = {}
    for w in itertools.product(range(car.cx.dim), repeat=length):
        total = Fraction(0)
        for u, c in vec.items():
            if len(u) != length:
                continue
            s = car.coeff(u, w)
            if s:
                total += s * c
        if total:
            out[w] = total
    return out


# ---------------------------------------------------------------------------
# The three dIBL operations.


def boundary_letter(car, u):
    """bold-d applied to the basis cochain chi_u; a Vec over letters."""
    cx = car.cx
    dim = cx.dim
    omap = car.orbit(u)
    candidates = set()
    for w in omap:
        for j, a in enumerate(w):
            for i in range(dim):
                if cx.d[a][i]:
                    cand = car.canonical(w[:j] + (i,) + w[j + 1:])
                    if cand is not None:
                        candidates.add(cand[0])
    out = {}
    for wc in candidates:
        total = Fraction(0)
        pref = 0
        for j in range(len(wc)):
            i = wc[j]
            for a in range(dim):
                dai = cx.d[a][i]
                if dai:
                    s = car.coeff(u, wc[:j] + (a,) + wc[j + 1:])
                    if s:
                        total += (-1 if pref & 1 else 1) * dai * s
            pref ^= cx.eta(i) & 1
        if total:
            out[wc] = total
    return out


def mu_letters(car, u, v):
    """mu(chi_u, chi_v) as a Vec over letters (coefficient formula)."""
    cx = car.cx
    k1 = len(u) - 1
    k2 = len(v) - 1
    if k1 + k2 < 1:
        raise ValueError("mu needs word lengths adding to at least 3")
    gp = cx.gpairs()
    candidates = set()
    for wu in car.orbit(u):
        for wv in car.orbit(v):
            if cx.ginv[wu[0]][wv[0]]:
                cand = car.canonical(wu[1:] + wv[1:])
                if cand is not None:
                    candidates.add(cand[0])
    out = {}
    k = k1 + k2
    for z in candidates:
        etas = [cx.eta(i) & 1 for i in z]
        total = Fraction(0)
        for c in range(k):
            zz = z[c:] + z[:c]
            x = zz[:k1]
            y = zz[k1:]
            cross = (sum(etas[:c]) & 1) and (sum(etas[c:]) & 1)
            sx = sum(cx.eta(i) for i in x) & 1
            for a, b, gab in gp:
                cu = car.coeff(u, (a,) + x)
                if not cu:
                    continue
                cv = car.coeff(v, (b,) + y)
                if not cv:
                    continue
                sgn = -1 if cross else 1
                if (cx.eta(b) & 1) and sx:
                    sgn = -sgn
                if cx.eta(a) & 1:
                    sgn = -sgn
                total += sgn * gab * cu * cv
        if total:
            out[z] = total
    return out


def delta_tensor(car, u):
    """delta(chi_u) as a dict (x_word, y_word) -> coefficient over canonical
    word pairs (the B^cyc* (x) B^cyc* coefficient tensor)."""
    cx = car.cx
    k = len(u)
    out = {}
    if k < 4:
        return out
    candidates = set()
    for w in car.orbit(u):
        for k1 in range(1, k - 2):
            a = w[0]
            b = w[1 + k1]
            if cx.ginv[a][b]:
                cu = car.canonical(w[1:1 + k1])
                cv = car.canonical(w[2 + k1:])
                if cu is not None and cv is not None:
                    candidates.add((cu[0], cv[0]))
    gp = cx.gpairs()
    for (x, y) in candidates:
        k1, k2 = len(x), len(y)
        ex = [cx.eta(i) & 1 for i in x]
        ey = [cx.eta(j) & 1 for j in y]
        sx = sum(ex) & 1
        total = Fraction(0)
        for c in range(k1):
            xx = x[c:] + x[:c]
            crossx = (sum(ex[:c]) & 1) and (sum(ex[c:]) & 1)
            for cp in range(k2):
                yy = y[cp:] + y[:cp]
                crossy = (sum(ey[:cp]) & 1) and (sum(ey[cp:]) & 1)
                for a, b, gab in gp:
                    cu = car.coeff(u, (a,) + xx + (b,) + yy)
                    if not cu:
                        continue
                    sgn = -1 if crossx else 1
                    if crossy:
                        sgn = -sgn
                    if (cx.eta(b) & 1) and sx:
                        sgn = -sgn
                    if cx.eta(a) & 1:
                        sgn = -sgn
                    total += sgn * gab * cu
        if total:
            out[(x, y)] = total
    return out


def p110_fn(car):
    def fn(word):
        (u,) = word
        return {(w,): c for w, c in boundary_letter(car, u).items()}

    return fn


def p210_fn(car):
    odd_d = (car.n - 3) & 1

    def fn(word):
        phi, psi = word
        if len(phi) + len(psi) < 3:
            return {}
        tw = mu_letters(car, phi, psi)
        if odd_d and (car.bdeg(phi) & 1):
            tw = {w: -c for w, c in tw.items()}
        return {(w,): c for w, c in tw.items()}

    return fn


def p120_fn(car):
    odd_d = (car.n - 3) & 1

    def fn(word):
        (phi,) = word
        tens = delta_tensor(car, phi)
        out = {}
        for (x, y), c in tens.items():
            coeff = Fraction(c, 2)
            if odd_d and (car.bdeg(x) & 1):
                coeff = -coeff
            sw = symbar.sort_word(car, (x, y))
            if sw is None:
                continue
            vadd(out, sw[0], coeff * sw[1])
        return out

    return fn


def dibl_ops(cx, audit=True):
    """The dIBL operation table {p110, p210, p120} on B^cyc* A[2-n]."""
    car = DualCyclicBar(cx)
    d = cx.n - 3
    tab = OpTable(d, car)
    tab.add(Op(1, 1, 0, -1, p110_fn(car), car, car, name="p110", audit=audit))
    tab.add(Op(2, 1, 0, -2 * d - 1, p210_fn(car), car, car, name="p210",
               audit=audit))
    tab.add(Op(1, 2, 0, -1, p120_fn(car), car, car, name="p120", audit=audit))
    return tab


def serialize_cochain(car, vec):
    """JSON form of a letter-level Vec as canonical (word, coeff) pairs."""
    from .exactalg import rat_str
    items = sorted(vec.items())
    return [{"word": [car.cx.basis.labels[i] for i in w], "coeff": rat_str(c)}
            for w, c in items]


def parse_cochain(car, data):
    from .exactalg import rat
    idx = {l: i for i, l in enumerate(car.cx.basis.labels)}
    out = {}
    for item in data:
        word = tuple(idx[l] for l in item["word"])
        car.add_to(out, word, rat(item["coeff"]))
    return out
