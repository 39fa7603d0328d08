"""Built-in cyclic cochain complexes, DGA structures and random generators.

The built-in pairings all come from a graded trace, <u,v> = (-1)^(deg u)
* tr(uv), and the built-in products use m2(u,v) = (-1)^(deg u) u v, which
together satisfy the cyclic compatibility conditions.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import linalg
from .exactalg import CyclicComplex, GradedBasis, complex_from_data

F = Fraction


def _cx(labels, degs, n, pairing, d):
    return complex_from_data(labels, degs, n, pairing, d)


def builtin_complex(name):
    """Registered example complexes."""
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise KeyError("unknown builtin complex %r (known: %s)"
                       % (name, ", ".join(sorted(_BUILTINS))))


def builtin_names():
    return sorted(_BUILTINS)


def _point():
    # one generator of degree 0, n = 0, <e,e> = 1
    return _cx(["e"], [0], 0, [[1]], [[0]])


def _circle():
    # H*(S^1): 1 (deg 0), t (deg 1); n = 1, d = 0
    pairing = [[0, 1], [-1, 0]]
    d = [[0, 0], [0, 0]]
    return _cx(["one", "t"], [0, 1], 1, pairing, d)


def _sphere2():
    # H*(S^2): 1 (deg 0), w (deg 2); n = 2, d = 0
    pairing = [[0, 1], [1, 0]]
    d = [[0, 0], [0, 0]]
    return _cx(["one", "w"], [0, 2], 2, pairing, d)


def _acyclic2():
    # a (deg 1), b = da (deg 2); n = 3
    pairing = [[0, 1], [-1, 0]]
    d = [[0, 0], [1, 0]]
    return _cx(["a", "b"], [1, 2], 3, pairing, d)


def _torus2():
    # H*(T^2): 1, al, be, w; n = 2, d = 0
    pairing = [
        [0, 0, 0, 1],
        [0, 0, -1, 0],
        [0, 1, 0, 0],
        [1, 0, 0, 0],
    ]
    d = [[0] * 4 for _ in range(4)]
    return _cx(["one", "al", "be", "w"], [0, 1, 1, 2], 2, pairing, d)


def _dga4():
    # 1, a, b=da, th; n = 3; products a*a=b, a*b=b*a=-th
    pairing = [
        [0, 0, 0, 1],
        [0, 0, 1, 0],
        [0, -1, 0, 0],
        [-1, 0, 0, 0],
    ]
    d = [
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 0],
    ]
    return _cx(["one", "a", "b", "th"], [0, 1, 2, 3], 3, pairing, d)


def _acyclic4():
    # a (1), b=da (2), c (2), e=dc (3); n = 4 (even, frame-sensitive)
    pairing = [
        [0, 0, 0, 1],
        [0, 0, -1, 0],
        [0, -1, 0, 0],
        [-1, 0, 0, 0],
    ]
    d = [
        [0, 0, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 0],
        [0, 0, 1, 0],
    ]
    return _cx(["a", "b", "c", "e"], [1, 2, 2, 3], 4, pairing, d)


_BUILTINS = {
    "point": _point,
    "circle": _circle,
    "sphere2": _sphere2,
    "acyclic2": _acyclic2,
    "torus2": _torus2,
    "dga4": _dga4,
    "acyclic4": _acyclic4,
}


# ---------------------------------------------------------------------------
# Products of the built-in DGAs, as multiplication tables on basis labels.


def builtin_product(name):
    """Multiplication table {(i,j): {k: coeff}} of the graded algebra
    underlying a builtin DGA (the plain product, not m2)."""
    if name == "point":
        return {(0, 0): {0: F(1)}}
    if name == "circle":
        # Lambda(t): one*x = x, t*t = 0
        return {(0, 0): {0: F(1)}, (0, 1): {1: F(1)}, (1, 0): {1: F(1)}}
    if name == "sphere2":
        return {(0, 0): {0: F(1)}, (0, 1): {1: F(1)}, (1, 0): {1: F(1)}}
    if name == "torus2":
        one, al, be, w = 0, 1, 2, 3
        tab = {}
        for i in range(4):
            tab[(one, i)] = {i: F(1)}
            tab[(i, one)] = {i: F(1)}
        tab[(one, one)] = {one: F(1)}
        tab[(al, be)] = {w: F(1)}
        tab[(be, al)] = {w: F(-1)}
        return tab
    if name == "dga4":
        one, a, b, th = 0, 1, 2, 3
        tab = {}
        for i in range(4):
            tab[(one, i)] = {i: F(1)}
            tab[(i, one)] = {i: F(1)}
        tab[(one, one)] = {one: F(1)}
        tab[(a, a)] = {b: F(1)}
        tab[(a, b)] = {th: F(-1)}
        tab[(b, a)] = {th: F(-1)}
        return tab
    raise KeyError("no builtin product for %r" % name)


def m2_from_product(cx, prod):
    """m2(u,v) = (-1)^(deg u) u v as an index tensor
    {(i,j): {k: coeff}} acting on basis elements."""
    out = {}
    for (i, j), vec in prod.items():
        sgn = -1 if cx.deg(i) & 1 else 1
        out[(i, j)] = {k: sgn * c for k, c in vec.items()}
    return out


# ---------------------------------------------------------------------------
# Random cyclic complexes: assembled from legal blocks, then pushed through
# a random rational change of basis.


def random_cyclic_complex(rng, dim_max=6, n_choices=(0, 1, 2, 3, 4),
                          basis_change=True, acyclic_bias=0.5):
    """A random cyclic cochain complex of dimension <= dim_max."""
    if dim_max < 2:
        raise ValueError("dim_max must be at least 2")
    n = rng.choice(list(n_choices))
    blocks = []  # (labels, degs, pairing-block, d-block)
    dim = 0
    idx = 0
    while dim == 0 or (dim < dim_max and rng.random() < 0.7):
        room = dim_max - dim
        options = ["pair"]
        if n % 4 == 0:
            options.append("single")
        if n % 4 == 3:
            options.append("acyclic2")
        if room >= 4:
            options.append("acyclic4")
        kind = rng.choice(options)
        if kind != "pair" and rng.random() > acyclic_bias and "pair" in options:
            kind = "pair"
        if kind == "single" and room >= 1:
            # self-paired harmonic generator, deg = n/2 with eta odd
            deg = n // 2
            v = F(rng.choice([1, 2, 3, -1, -2]))
            blocks.append(([f"s{idx}"], [deg], [[v]], [[0]]))
            dim += 1
        elif kind == "pair" and room >= 2:
            deg = rng.randrange(-1, n + 2)
            v = F(rng.choice([1, 2, 3, -1, -2]))
            eta1, eta2 = deg - 1, n - deg - 1
            sym = (-1) ** ((eta1 * eta2 + 1) % 2)
            blocks.append(([f"h{idx}", f"k{idx}"], [deg, n - deg],
                           [[0, v], [sym * v, 0]], [[0, 0], [0, 0]]))
            dim += 2
        elif kind == "acyclic2" and room >= 2:
            # da = b with deg a = (n-1)/2 odd; requires n = 3 mod 4
            p = (n - 1) // 2
            v = F(rng.choice([1, 2, -1]))
            blocks.append(([f"a{idx}", f"b{idx}"], [p, p + 1],
                           [[0, v], [-v, 0]], [[0, 0], [1, 0]]))
            dim += 2
        elif kind == "acyclic4" and room >= 4:
            # a, b=da, c, e=dc with <a,e>, <b,c> forced compatible
            p = rng.randrange(-1, n + 1)
            v = F(rng.choice([1, 2, -1]))
            ea, ee = p - 1, n - p - 1
            sym_ae = (-1) ** ((ea * ee + 1) % 2)
            eb, ec = p, n - p - 2
            sym_bc = (-1) ** ((eb * ec + 1) % 2)
            # d-compatibility: <b,c> = -(-1)^(eta_a) <a,e>
            w = -((-1) ** (ea % 2)) * v
            pairing = [
                [0, 0, 0, v],
                [0, 0, w, 0],
                [0, sym_bc * w, 0, 0],
                [sym_ae * v, 0, 0, 0],
            ]
            d = [
                [0, 0, 0, 0],
                [1, 0, 0, 0],
                [0, 0, 0, 0],
                [0, 0, 1, 0],
            ]
            blocks.append(([f"a{idx}", f"b{idx}", f"c{idx}", f"e{idx}"],
                           [p, p + 1, n - p - 1, n - p], pairing, d))
            dim += 4
        else:
            break
        idx += 1

    labels, degs = [], []
    g = [[F(0)] * dim for _ in range(dim)]
    dmat = [[F(0)] * dim for _ in range(dim)]
    off = 0
    for ls, ds, gb, db in blocks:
        m = len(ls)
        labels.extend(ls)
        degs.extend(ds)
        for i in range(m):
            for j in range(m):
                g[off + i][off + j] = F(gb[i][j])
                dmat[off + i][off + j] = F(db[i][j])
        off += m
    cx = complex_from_data(labels, degs, n, g, dmat)
    if basis_change:
        cx = random_basis_change(rng, cx)
    return cx


def random_basis_change(rng, cx, density=0.5):
    """Conjugate by a random degree-preserving invertible rational matrix."""
    dim = cx.dim
    while True:
        t = [[F(0)] * dim for _ in range(dim)]
        for j in range(dim):
            t[j][j] = F(rng.choice([1, 1, 2, -1, 3]))
            for i in range(dim):
                if i != j and cx.deg(i) == cx.deg(j) and rng.random() < density:
                    t[i][j] = F(rng.randrange(-2, 3))
        if linalg.det_sign(t) != 0:
            break
    return apply_basis_change(cx, t)


def apply_basis_change(cx, t):
    """New basis e'_j = sum_i t[i][j] e_i; transforms pairing and d."""
    dim = cx.dim
    tinv = linalg.inverse(t)
    g2 = linalg.matmul(linalg.transpose(t), linalg.matmul(cx.pairing, t))
    d2 = linalg.matmul(tinv, linalg.matmul(cx.d, t))
    labels = tuple("%s'" % l for l in cx.basis.labels)
    return complex_from_data(labels, cx.basis.degs, cx.n, g2, d2)


def random_cochain(rng, car, length, terms=2, coeffs=(1, -1, 2, -2, 3)):
    """A random cyclic cochain of the given word length (letter-level Vec)."""
    letters = car._letters_len(length)
    out = {}
    if not letters:
        return out
    # keep it homogeneous in degree so operations stay homogeneous
    by_deg = {}
    for u in letters:
        by_deg.setdefault(car.bdeg(u), []).append(u)
    deg = rng.choice(sorted(by_deg))
    pool = by_deg[deg]
    for _ in range(min(terms, len(pool))):
        u = rng.choice(pool)
        from .symbar import vadd
        vadd(out, u, Fraction(rng.choice(coeffs)))
    return out
