"""Exact scalars, graded bases, Koszul signs and cyclic pairings.

The ground ring is Q, realised by fractions.Fraction.  A cyclic cochain
complex is a finite dimensional graded Q-vector space with a differential
of cochain degree +1 and a nondegenerate pairing of degree -n satisfying

    <dx,y> + (-1)^(deg x - 1) <x,dy> = 0,
    <x,y>  + (-1)^((deg x - 1)(deg y - 1)) <y,x> = 0.

Degrees are stored as cochain degrees; the shifted degree eta = deg - 1
is derived, never stored separately.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg

Scalar = Fraction


def rat(s):
    """Parse an exact rational from "p/q" / "p" strings or numbers."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    return Fraction(str(s))


def rat_str(x):
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def koszul_sign(permutation, degrees):
    """Sign eps(rho) with c_rho(1)...c_rho(k) = eps(rho) c_1...c_k.

    ``permutation`` is a bijection of {1..k} given as the list
    [rho(1),...,rho(k)]; ``degrees`` are the (shifted) degrees of
    c_1..c_k, of which only the parities matter.
    """
    k = len(permutation)
    if len(degrees) != k:
        raise ValueError("permutation and degree list have different lengths")
    if sorted(permutation) != list(range(1, k + 1)):
        raise ValueError("not a bijection of {1..%d}" % k)
    sign = 1
    for i in range(k):
        for j in range(i + 1, k):
            if permutation[i] > permutation[j]:
                if (degrees[permutation[i] - 1] & 1) and (degrees[permutation[j] - 1] & 1):
                    sign = -sign
    return sign


@dataclass(frozen=True)
class GradedBasis:
    """Ordered basis labels with their cochain degrees."""

    labels: tuple
    degs: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.degs):
            raise ValueError("labels and degrees have different lengths")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate basis labels")

    @property
    def dim(self):
        return len(self.labels)

    def eta(self, i):
        """Shifted degree |e_i| = deg e_i - 1."""
        return self.degs[i] - 1


@dataclass
class CyclicComplex:
    """Finite dimensional cyclic cochain complex over Q.

    ``pairing[i][j]`` is g_ij = <e_i, e_j>; ``d[j][i]`` is d^j_i with
    d e_i = sum_j d^j_i e_j.
    """

    basis: GradedBasis
    n: int
    pairing: list
    d: list
    _ginv: list = field(default=None, repr=False)

    @property
    def dim(self):
        return self.basis.dim

    def eta(self, i):
        return self.basis.eta(i)

    def deg(self, i):
        return self.basis.degs[i]

    @property
    def ginv(self):
        """The matrix g^{ij} = <e^i, e^j> (transpose of the inverse of g)."""
        if self._ginv is None:
            self._ginv = dual_basis(self)
        return self._ginv

    def gpairs(self):
        """Nonzero entries of g^{ij} as a list (i, j, value)."""
        return [(i, j, v) for i, row in enumerate(self.ginv)
                for j, v in enumerate(row) if v]

    def dual_vectors(self):
        """Columns c^a with e^a = sum_i c^a[i] e_i."""
        inv = linalg.inverse(self.pairing)
        return [[inv[i][a] for i in range(self.dim)] for a in range(self.dim)]

    def d_entries(self):
        """Nonzero differential entries as (i, a, d^a_i) with de_i = sum d^a_i e_a."""
        out = []
        for i in range(self.dim):
            for a in range(self.dim):
                if self.d[a][i]:
                    out.append((i, a, self.d[a][i]))
        return out

    def to_json(self):
        return {
            "n": self.n,
            "basis": [{"label": l, "deg": d}
                      for l, d in zip(self.basis.labels, self.basis.degs)],
            "pairing": [[rat_str(x) for x in row] for row in self.pairing],
            "d": [[rat_str(x) for x in row] for row in self.d],
        }

    @classmethod
    def from_json(cls, data):
        basis = GradedBasis(tuple(b["label"] for b in data["basis"]),
                            tuple(int(b["deg"]) for b in data["basis"]))
        pairing = [[rat(x) for x in row] for row in data["pairing"]]
        d = [[rat(x) for x in row] for row in data["d"]]
        return cls(basis=basis, n=int(data["n"]), pairing=pairing, d=d)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def complex_from_data(labels, degs, n, pairing, d):
    return CyclicComplex(basis=GradedBasis(tuple(labels), tuple(degs)), n=n,
                         pairing=[[rat(x) for x in row] for row in pairing],
                         d=[[rat(x) for x in row] for row in d])


def dual_basis(cx):
    """g^{ij} with g_ik g^{jk} = delta_i^j; raises on a singular pairing."""
    inv = linalg.inverse(cx.pairing)
    if inv is None:
        raise ValueError("pairing matrix is singular")
    ginv = linalg.transpose(inv)
    n = cx.dim
    for i in range(n):
        for j in range(n):
            s = sum(cx.pairing[i][k] * ginv[j][k] for k in range(n))
            if s != (1 if i == j else 0):
                raise AssertionError("dual basis identity failed at (%d,%d)" % (i, j))
            if ginv[i][j] and (cx.eta(i) + cx.eta(j)) != cx.n - 2:
                raise AssertionError("dual pairing violates the degree constraint")
    return ginv


def verify_cyclic_complex(cx):
    """Check all defining identities.  Returns (ok, list of (name, ok, detail)).

    The first failed identity is reported by name; all checks run regardless.
    """
    checks = []
    dim = cx.dim

    def add(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    # pairing degree: g_ij = 0 unless deg e_i + deg e_j = n
    bad = [(i, j) for i in range(dim) for j in range(dim)
           if cx.pairing[i][j] and cx.deg(i) + cx.deg(j) != cx.n]
    add("pairing-degree", not bad, "nonzero g_ij off degree n at %s" % (bad[:1],))

    # graded antisymmetry g_ij = (-1)^(eta_i eta_j + 1) g_ji
    bad = [(i, j) for i in range(dim) for j in range(dim)
           if cx.pairing[i][j] != (-1) ** ((cx.eta(i) * cx.eta(j) + 1) % 2) * cx.pairing[j][i]]
    add("pairing-antisymmetry", not bad, "g_ij symmetry fails at %s" % (bad[:1],))

    # nondegeneracy
    nondeg = linalg.rank(cx.pairing) == dim
    add("pairing-nondegenerate", nondeg)

    # d raises cochain degree by exactly 1
    bad = [(i, a) for i in range(dim) for a in range(dim)
           if cx.d[a][i] and cx.deg(a) != cx.deg(i) + 1]
    add("d-degree", not bad, "d entry off degree at %s" % (bad[:1],))

    # d o d = 0
    add("d-squared", linalg.is_zero_matrix(linalg.matmul(cx.d, cx.d)))

    # <dx,y> + (-1)^(deg x - 1) <x,dy> = 0 on basis vectors
    bad = []
    for i in range(dim):
        for j in range(dim):
            lhs = sum(cx.d[a][i] * cx.pairing[a][j] for a in range(dim))
            rhs = sum(cx.pairing[i][b] * cx.d[b][j] for b in range(dim))
            if lhs + (-1) ** (cx.eta(i) % 2) * rhs != 0:
                bad.append((i, j))
    add("d-pairing-compatibility", not bad, "fails at %s" % (bad[:1],))

    if nondeg and not bad:
        ginv = linalg.transpose(linalg.inverse(cx.pairing))
        duals = cx.dual_vectors()
        # de^a = (-1)^(eta_a) d^a_c e^c
        bad1 = []
        for a in range(dim):
            lhs = linalg.matvec(cx.d, duals[a])
            rhs = [Fraction(0)] * dim
            for c in range(dim):
                coef = (-1) ** (cx.eta(a) % 2) * cx.d[a][c]
                if coef:
                    rhs = [x + coef * y for x, y in zip(rhs, duals[c])]
            if lhs != rhs:
                bad1.append(a)
        add("dual-differential", not bad1, "de^a identity fails at a=%s" % (bad1[:1],))

        # (-1)^(eta_a) d_a^{a'} g^{ab} + g^{a'b'} d_{b'}^b = 0
        bad2 = []
        for ap in range(dim):
            for b in range(dim):
                s = sum((-1) ** (cx.eta(a) % 2) * cx.d[ap][a] * ginv[a][b]
                        for a in range(dim))
                s += sum(ginv[ap][bp] * cx.d[b][bp] for bp in range(dim))
                if s != 0:
                    bad2.append((ap, b))
        add("dual-pairing-differential", not bad2, "fails at %s" % (bad2[:1],))

    ok = all(c[1] for c in checks)
    return ok, checks


def first_violation(checks):
    for name, ok, detail in checks:
        if not ok:
            return name, detail
    return None
