import itertools
import random
from fractions import Fraction

import pytest

from iblinf import complexes
from iblinf.cyclic import DualCyclicBar


def all_words(dim, length):
    return list(itertools.product(range(dim), repeat=length))


def full_tensor(car, vec, length):
    """Expand a letter-level Vec into the dict of all coefficients."""
    out = {}
    for w in all_words(car.cx.dim, length):
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


def mu_oracle(cx, t1, t2, k1, k2):
    """Brute-force mu on full coefficient tensors, straight from the
    defining double sum (independent of the canonical-orbit route)."""
    k = k1 + k2
    eta = [cx.eta(i) for i in range(cx.dim)]
    out = {}
    for z in all_words(cx.dim, k):
        total = Fraction(0)
        for c in range(1, k + 1):
            e = 0
            for r in range(1, c):
                for s in range(c, k + 1):
                    e += eta[z[r - 1]] * eta[z[s - 1]]
            sx = sum(eta[z[(c - 1 + t) % k]] for t in range(k1))
            for a in range(cx.dim):
                for b in range(cx.dim):
                    gab = cx.ginv[a][b]
                    if not gab:
                        continue
                    w1 = (a,) + tuple(z[(c - 1 + i) % k] for i in range(k1))
                    w2 = (b,) + tuple(z[(c - 1 + k1 + i) % k] for i in range(k2))
                    c1 = t1.get(w1)
                    c2 = t2.get(w2)
                    if not c1 or not c2:
                        continue
                    ee = e + eta[b] * sx + eta[a]
                    total += (-1) ** (ee % 2) * gab * c1 * c2
        if total:
            out[z] = total
    return out


def delta_oracle(cx, t, k):
    """Brute-force delta on a full tensor; returns dict (xword,yword)->coeff."""
    eta = [cx.eta(i) for i in range(cx.dim)]
    out = {}
    for k1 in range(1, k - 2):
        k2 = k - 2 - k1
        for x in all_words(cx.dim, k1):
            for y in all_words(cx.dim, k2):
                total = Fraction(0)
                for c in range(1, k1 + 1):
                    for cp in range(1, k2 + 1):
                        e = 0
                        for r in range(1, c):
                            for s in range(c, k1 + 1):
                                e += eta[x[r - 1]] * eta[x[s - 1]]
                        for r in range(1, cp):
                            for s in range(cp, k2 + 1):
                                e += eta[y[r - 1]] * eta[y[s - 1]]
                        sx = sum(eta[i] for i in x)
                        for a in range(cx.dim):
                            for b in range(cx.dim):
                                gab = cx.ginv[a][b]
                                if not gab:
                                    continue
                                w = ((a,) + tuple(x[(c - 1 + i) % k1]
                                                  for i in range(k1))
                                     + (b,) + tuple(y[(cp - 1 + j) % k2]
                                                    for j in range(k2)))
                                cw = t.get(w)
                                if not cw:
                                    continue
                                ee = e + eta[b] * sx + eta[a]
                                total += (-1) ** (ee % 2) * gab * cw
                if total:
                    out[(x, y)] = total
    return out


def boundary_oracle(cx, t, k):
    """Brute-force bold-d on a full tensor."""
    eta = [cx.eta(i) for i in range(cx.dim)]
    out = {}
    for w in all_words(cx.dim, k):
        total = Fraction(0)
        for j in range(1, k + 1):
            pref = sum(eta[w[i]] for i in range(j - 1))
            for a in range(cx.dim):
                dai = cx.d[a][w[j - 1]]
                if not dai:
                    continue
                rep = w[:j - 1] + (a,) + w[j:]
                c = t.get(rep)
                if c:
                    total += (-1) ** (pref % 2) * dai * c
        if total:
            out[w] = total
    return out


def transport_cochain(cx, cx2, tmat, tensor):
    """Coefficients of a cochain in the new basis e'_j = sum_i t[i][j] e_i."""
    dim = cx.dim
    out = {}
    for w in tensor:
        k = len(w)
        break
    else:
        return out
    for wp in all_words(dim, k):
        total = Fraction(0)
        for w in all_words(dim, k):
            prod = Fraction(1)
            for a, i in zip(wp, w):
                prod *= tmat[i][a]
                if not prod:
                    break
            if not prod:
                continue
            c = tensor.get(w)
            if c:
                total += prod * c
        if total:
            out[wp] = total
    return out


@pytest.fixture
def rng():
    return random.Random(20260810)
