"""Homotopy transfer onto a subcomplex via ribbon-graph state sums.

Data: a projection Pi onto a subcomplex B of A and a chain homotopy G
with dG + Gd = Pi - id, both compatible with the cyclic pairing.  The
propagator matrix G^{ab} = <G e^a, e^b> labels the interior edges of
ribbon graphs; summing the state sums over all graphs of one signature
yields the components of an IBL-infinity morphism from the dual cyclic
bar complex of A to that of B.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg, ribbon
from .exactalg import CyclicComplex, complex_from_data
from .cyclic import DualCyclicBar
from .symbar import (Op, MorTable, OpTable, vadd, vmerge, sort_word,
                     mor_degree, ewords, factorial)
from .ribbon import (enumerate_graphs, labellings, edge_frame, vertex_word,
                     boundary_word, _edge_key)

F = Fraction


# ---------------------------------------------------------------------------
# Subcomplex data and the rational Hodge splitting.


@dataclass
class SubcomplexData:
    cx: CyclicComplex    # ambient complex A
    bx: CyclicComplex    # induced complex on B
    incl: list           # dim A x dim B matrix, columns = B basis in A
    proj: list           # Pi : A -> A
    hom: list            # G : A -> A

    def verify(self):
        cx = self.cx
        dim = cx.dim
        checks = []
        pp = linalg.matmul(self.proj, self.proj)
        checks.append(("proj-idempotent", pp == self.proj))
        checks.append(("proj-chain-map",
                       linalg.matmul(self.proj, cx.d)
                       == linalg.matmul(cx.d, self.proj)))
        gP = linalg.matmul(linalg.transpose(self.proj), cx.pairing)
        Pg = linalg.matmul(cx.pairing, self.proj)
        checks.append(("proj-selfadjoint", gP == Pg))
        dg_gd = linalg.madd(linalg.matmul(cx.d, self.hom),
                            linalg.matmul(self.hom, cx.d))
        target = linalg.madd(self.proj, linalg.identity(dim), -1)
        checks.append(("homotopy-equation", dg_gd == target))
        # <Gx,y> = (-1)^|x| <x,Gy>  becomes  G^T g = E g G
        lhs = linalg.matmul(linalg.transpose(self.hom), cx.pairing)
        rhs = [[((-1) ** (cx.eta(i) % 2)) * x for x in row]
               for i, row in enumerate(linalg.matmul(cx.pairing, self.hom))]
        checks.append(("homotopy-selfadjoint", lhs == rhs))
        gb = linalg.matmul(linalg.transpose(self.incl),
                           linalg.matmul(cx.pairing, self.incl))
        checks.append(("pairing-nondegenerate-on-B",
                       linalg.rank(gb) == len(gb)))
        return all(c[1] for c in checks), checks

    def propagator(self):
        """G^{ab} = <G e^a, e^b>."""
        duals = self.cx.dual_vectors()
        g = self.cx.pairing
        dim = self.cx.dim
        out = [[F(0)] * dim for _ in range(dim)]
        for a in range(dim):
            ga = linalg.matvec(self.hom, duals[a])
            for b in range(dim):
                out[a][b] = sum((ga[i] * g[i][j] * duals[b][j]
                                 for i in range(dim) for j in range(dim)),
                                F(0))
        return out

    def pi_pairing(self):
        """g^{a-bar b-bar} = <Pi e^a, Pi e^b>."""
        duals = self.cx.dual_vectors()
        g = self.cx.pairing
        dim = self.cx.dim
        out = [[F(0)] * dim for _ in range(dim)]
        for a in range(dim):
            pa = linalg.matvec(self.proj, duals[a])
            for b in range(dim):
                pb = linalg.matvec(self.proj, duals[b])
                out[a][b] = sum((pa[i] * g[i][j] * pb[j]
                                 for i in range(dim) for j in range(dim)),
                                F(0))
        return out


def _induced_complex(cx, incl):
    dimb = len(incl[0]) if incl else 0
    degs = []
    for j in range(dimb):
        ds = {cx.deg(i) for i in range(cx.dim) if incl[i][j]}
        if len(ds) != 1:
            raise ValueError("subcomplex basis vector %d not homogeneous" % j)
        degs.append(ds.pop())
    gb = linalg.matmul(linalg.transpose(incl),
                       linalg.matmul(cx.pairing, incl))
    dimages = linalg.matmul(cx.d, incl)
    db = linalg.solve_matrix(incl, dimages)
    if db is None:
        raise ValueError("B is not a subcomplex (d does not preserve it)")
    labels = ["B%d" % j for j in range(dimb)]
    return complex_from_data(labels, degs, cx.n, gb, db)


def subcomplex_data(cx, incl, proj, hom):
    data = SubcomplexData(cx=cx, bx=_induced_complex(cx, incl),
                          incl=[[F(x) for x in row] for row in incl],
                          proj=[[F(x) for x in row] for row in proj],
                          hom=[[F(x) for x in row] for row in hom])
    ok, checks = data.verify()
    if not ok:
        raise ValueError("subcomplex data violates %s"
                         % [c[0] for c in checks if not c[1]])
    return data


def hodge_split(cx):
    """Harmonic subcomplex data over Q.

    First tries the dot-product route (d* the transpose of d,
    B = ker(dd*+d*d), C = im d*, G = -d* Laplacian^{-1}); if the pairing
    compatibilities fail for this auxiliary metric, the complement C is
    corrected to be pairing-isotropic and orthogonal to B, which always
    succeeds over Q.
    """
    dim = cx.dim
    D = cx.d
    Dt = linalg.transpose(D)
    lap = linalg.madd(linalg.matmul(D, Dt), linalg.matmul(Dt, D))
    bbasis = linalg.nullspace(lap)              # columns
    # C0 = im d*: independent columns of Dt
    piv = linalg.column_space_pivots(Dt)
    cbasis = [[Dt[i][j] for j in piv] for i in range(dim)]
    cvecs = [[cbasis[i][j] for i in range(dim)] for j in range(len(piv))]
    bvecs = [list(v) for v in bbasis]

    data = _assemble_split(cx, bvecs, cvecs)
    if data is not None:
        return data
    # correction: replace C by the graph of a map into ker d making it
    # isotropic and orthogonal to B
    cvecs = _correct_complement(cx, bvecs, cvecs)
    data = _assemble_split(cx, bvecs, cvecs)
    if data is None:
        raise AssertionError("hodge splitting failed verification")
    return data


def _assemble_split(cx, bvecs, cvecs):
    """Pi / G from A = dC + B + C; returns None if verification fails."""
    dim = cx.dim
    dcvecs = [linalg.matvec(cx.d, c) for c in cvecs]
    cols = dcvecs + bvecs + cvecs
    if len(cols) != dim:
        return None
    M = [[cols[j][i] for j in range(dim)] for i in range(dim)]
    Minv = linalg.inverse(M)
    if Minv is None:
        return None
    nb = len(bvecs)
    nc = len(cvecs)
    proj = [[F(0)] * dim for _ in range(dim)]
    hom = [[F(0)] * dim for _ in range(dim)]
    for col in range(dim):
        coords = [Minv[r][col] for r in range(dim)]
        # projection keeps the B block
        pv = [F(0)] * dim
        for j in range(nb):
            coeff = coords[nc + j]
            if coeff:
                pv = [x + coeff * y for x, y in zip(pv, bvecs[j])]
        for i in range(dim):
            proj[i][col] = pv[i]
        # G maps d c_j to -c_j and kills B and C
        gv = [F(0)] * dim
        for j in range(nc):
            coeff = coords[j]
            if coeff:
                gv = [x - coeff * y for x, y in zip(gv, cvecs[j])]
        for i in range(dim):
            hom[i][col] = gv[i]
    incl = [[bvecs[j][i] for j in range(nb)] for i in range(dim)]
    try:
        data = subcomplex_data(cx, incl, proj, hom)
    except ValueError:
        return None
    return data


def _correct_complement(cx, bvecs, cvecs):
    """C' = {c + phi_B(c) + phi_im(c)}: orthogonal to B and isotropic."""
    dim = cx.dim
    g = cx.pairing
    nb = len(bvecs)
    nc = len(cvecs)
    dcvecs = [linalg.matvec(cx.d, c) for c in cvecs]

    def pair(x, y):
        return sum((x[i] * g[i][j] * y[j]
                    for i in range(dim) for j in range(dim)), F(0))

    # phi_B: <phi_B c, b> = -<c, b>; solve against the B gram matrix
    gram = [[pair(bvecs[i], bvecs[j]) for j in range(nb)] for i in range(nb)]
    phib = []
    for c in cvecs:
        if nb:
            rhs = [-pair(c, bvecs[j]) for j in range(nb)]
            # <sum x_i b_i, b_j> = sum x_i gram[i][j]
            sol = linalg.solve(linalg.transpose(gram), rhs)
            v = [F(0)] * dim
            for i, x in enumerate(sol):
                if x:
                    v = [p + x * q for p, q in zip(v, bvecs[i])]
            phib.append(v)
        else:
            phib.append([F(0)] * dim)
    xvecs = [[a + b for a, b in zip(c, p)] for c, p in zip(cvecs, phib)]
    # psi_ij = -S_ij / 2 with S_ij = <X_i, X_j>
    svals = [[pair(xvecs[i], xvecs[j]) for j in range(nc)] for i in range(nc)]
    # solve <c_i, y_j> = psi_ij with y_j in im d = span(d c_t)
    M = [[pair(cvecs[i], dcvecs[t]) for t in range(nc)] for i in range(nc)]
    out = []
    for j in range(nc):
        rhs = [-svals[i][j] / 2 for i in range(nc)]
        sol = linalg.solve(M, rhs)
        y = [F(0)] * dim
        for t, x in enumerate(sol):
            if x:
                y = [p + x * q for p, q in zip(y, dcvecs[t])]
        out.append([a + b for a, b in zip(xvecs[j], y)])
    return out


# ---------------------------------------------------------------------------
# State sums.


def state_sum_labelled(cx, graph, lab, frame, inputs, tensor, car,
                       marked=None):
    """The state-sum contribution of one labelling of one graph.

    ``inputs``: canonical A-index words, one per vertex number.
    ``tensor``: dict (a,b) -> value on regular interior edges.
    ``marked``: optional (edge_key, tensor, extra_sign_exponent).
    Returns a dict over tuples of per-boundary A-index words.
    """
    k = graph.nv
    faces = graph.faces()
    l = len(faces)
    n = cx.n
    vwords = [vertex_word(graph, lab, v) for v in range(k)]
    # inputs may be single canonical words or Vecs (multilinear slots)
    vecs = []
    for num, v in enumerate(lab.vorder):
        entry = inputs[num]
        if isinstance(entry, dict):
            sup = [(u, c) for u, c in entry.items()
                   if len(u) == len(vwords[v])]
        else:
            sup = [(entry, F(1))] if len(entry) == len(vwords[v]) else []
        if not sup:
            return {}
        vecs.append(sup)
    bwords = [boundary_word(graph, lab, f) for f in range(l)]
    edge_items = []
    for t, h in enumerate(frame.edge_darts):
        key = _edge_key(graph, h)
        if marked is not None and key == marked[0]:
            edge_items.append((h, marked[1]))
        else:
            edge_items.append((h, tensor))
    entries = []
    for h, tens in edge_items:
        nz = [(a, b, c) for (a, b), c in tens.items() if c]
        if not nz:
            return {}
        entries.append((h, nz))

    # per-vertex consistent orbit words are found against the edge letters
    vertex_edge_slots = []
    for v in range(k):
        slots = []
        for i, hh in enumerate(vwords[v]):
            if hh in graph.pairing:
                slots.append(i)
        vertex_edge_slots.append(slots)

    out = {}
    eta = [cx.eta(i) for i in range(cx.dim)]
    for assign in itertools.product(*[e[1] for e in entries]):
        letter = {}
        coeff = F(1)
        for (h, _), (a, b, c) in zip(edge_items, assign):
            letter[h] = a
            letter[graph.pairing[h]] = b
            coeff *= c
        # find, per vertex, the orbit words matching the edge letters
        choices = []
        dead = False
        for num, v in enumerate(lab.vorder):
            opts = []
            for u, cu in vecs[num]:
                omap = car.orbit(u)
                for w, sgn in omap.items():
                    if all(w[i] == letter[vwords[v][i]]
                           for i in vertex_edge_slots[v]):
                        opts.append((w, sgn * cu))
            if not opts:
                dead = True
                break
            choices.append((v, opts))
        if dead:
            continue
        for pick in itertools.product(*[c[1] for c in choices]):
            full = dict(letter)
            sgn = 1
            for (v, _), (w, s) in zip(choices, pick):
                sgn *= s
                for i, hh in enumerate(vwords[v]):
                    full[hh] = w[i]
            # eta_1: Koszul sign from the edge order to the vertex order
            edge_order = []
            for h, _ in edge_items:
                edge_order.append(h)
                edge_order.append(graph.pairing[h])
            for f in lab.border:
                edge_order.extend(bwords[f])
            vertex_order = []
            for v in lab.vorder:
                vertex_order.extend(vwords[v])
            pos = {h: i for i, h in enumerate(vertex_order)}
            perm = [pos[h] for h in edge_order]
            pars = [eta[full[h]] & 1 for h in edge_order]
            s1 = 1
            for i in range(len(perm)):
                if not pars[i]:
                    continue
                for j in range(i + 1, len(perm)):
                    if perm[i] > perm[j] and pars[j]:
                        s1 = -s1
            # eta_2: the P_k / P_l conjugation signs
            if (n - 3) & 1:
                tot = 0
                for num, v in enumerate(lab.vorder):
                    dv = sum(eta[full[h]] for h in vwords[v])
                    tot += (k - num - 1) * dv
                for bnum, f in enumerate(lab.border):
                    xb = sum(eta[full[h]] for h in bwords[f])
                    tot += (l - bnum - 1) * xb
                if tot & 1:
                    sgn = -sgn
            if marked is not None:
                t0 = 1 + [i for i, (h, _) in enumerate(edge_items)
                          if _edge_key(graph, h) == marked[0]][0]
                if ((n - 3) * (t0 + marked[2])) & 1:
                    sgn = -sgn
            key = tuple(tuple(full[h] for h in bwords[f])
                        for f in lab.border)
            vadd(out, key, coeff * sgn * s1)
    return out


def state_sum(cx, graph, inputs, tensor, car, marked_extra=None,
              strategy="bfs", aut=None):
    """Sum over all labellings with the combinatorial prefactor
    1/(l! |Aut| prod d(v)); returns a dict over boundary-word tuples.

    ``marked_extra``: None for the plain sum, or a pair
    (per-edge tensor, sign offset) to sum over marked edges.
    """
    faces = graph.faces()
    l = len(faces)
    if aut is None:
        aut = graph.aut_order()
    denom = F(1, factorial(l) * aut)
    for v in range(graph.nv):
        denom /= graph.degree(v)
    out = {}
    for lab in labellings(graph):
        frame = edge_frame(graph, lab, strategy)
        if marked_extra is None:
            part = state_sum_labelled(cx, graph, lab, frame, inputs, tensor,
                                      car)
            vmerge(out, part, denom)
        else:
            mtensor, offset = marked_extra
            for e in graph.edges():
                part = state_sum_labelled(cx, graph, lab, frame, inputs,
                                          tensor, car,
                                          marked=(e, mtensor, offset))
                vmerge(out, part, denom)
    return out


def output_to_ewords(data, out_vec, tuple_vec, coef=1):
    """Convert a boundary-tuple dict over A-index words into E_l words of
    the target carrier, expanding legs through the inclusion."""
    tgt = data.tgt_car
    incl = data.incl
    dimb = len(incl[0]) if incl else 0
    for key, c in tuple_vec.items():
        # expand each A-letter of each boundary word through iota; the
        # coefficient of a basis cochain is the tensor value at its
        # canonical word, so only canonical B-words are collected (the
        # other orbit entries repeat the same information)
        options_per_word = []
        for w in key:
            combos = [()]
            vals = [F(1)]
            for x in w:
                ncombos, nvals = [], []
                for combo, val in zip(combos, vals):
                    for jb in range(dimb):
                        cc = incl[x][jb]
                        if cc:
                            ncombos.append(combo + (jb,))
                            nvals.append(val * cc)
                combos, vals = ncombos, nvals
            keep = []
            for combo, val in zip(combos, vals):
                cwd = tgt.canonical(combo)
                if cwd is None or cwd[0] != combo:
                    continue
                keep.append((combo, val))
            options_per_word.append(keep)
        for choice in itertools.product(*options_per_word):
            letters = []
            val = F(c) * coef
            for bw, v in choice:
                val *= v
                letters.append(bw)
            if not val:
                continue
            sw = sort_word(tgt, letters)
            if sw is None:
                continue
            vadd(out_vec, sw[0], val * sw[1])


@dataclass
class TransferData:
    """Everything needed to evaluate graph-sum morphism components."""

    sub: SubcomplexData
    src_car: DualCyclicBar
    tgt_car: DualCyclicBar
    incl: list
    gtensor: dict      # propagator G^{ab}
    idtensor: dict     # (-1)^eta_a g^{ab}
    pitensor: dict     # (-1)^eta_a g^{a-bar b-bar}
    strategy: str = "bfs"

    @staticmethod
    def build(sub, strategy="bfs"):
        cx = sub.cx
        src = DualCyclicBar(cx)
        tgt = DualCyclicBar(sub.bx)
        gmat = sub.propagator()
        pimat = sub.pi_pairing()
        dim = cx.dim
        gt = {(a, b): gmat[a][b] for a in range(dim) for b in range(dim)
              if gmat[a][b]}
        idt = {}
        pit = {}
        for a in range(dim):
            sa = -1 if cx.eta(a) & 1 else 1
            for b in range(dim):
                if cx.ginv[a][b]:
                    idt[(a, b)] = sa * cx.ginv[a][b]
                if pimat[a][b]:
                    pit[(a, b)] = sa * pimat[a][b]
        return TransferData(sub=sub, src_car=src, tgt_car=tgt, incl=sub.incl,
                            gtensor=gt, idtensor=idt, pitensor=pit,
                            strategy=strategy)

    def graph_sum(self, sig, word, tensor=None, marked=None):
        """(-1)^(n-3) sum over graphs of the given signature with vertex
        valences matching the word (the f_{k,l,g} component, or the
        marked-edge variants f^id / f^Pi)."""
        k, l, g = sig
        if len(word) != k:
            return {}
        valences = tuple(sorted((len(u) for u in word), reverse=True))
        out = {}
        global_sign = -1 if (self.sub.cx.n - 3) & 1 else 1
        tensor = tensor if tensor is not None else self.gtensor
        for graph, aut in enumerate_graphs(k, l, g, valences=valences):
            if marked is None:
                part = state_sum(self.sub.cx, graph, word, tensor,
                                 self.src_car, strategy=self.strategy,
                                 aut=aut)
            else:
                mt = self.idtensor if marked == "id" else self.pitensor
                part = state_sum(self.sub.cx, graph, word, tensor,
                                 self.src_car,
                                 marked_extra=(mt, -k),
                                 strategy=self.strategy, aut=aut)
            output_to_ewords(self, out, part, coef=global_sign)
        return out


def transfer_morphism(sub, sigs, max_weight=None, strategy="bfs"):
    """The morphism table {f_{k,l,g}} of graph sums."""
    data = TransferData.build(sub, strategy=strategy)
    d = sub.cx.n - 3
    mor = MorTable(d, data.src_car, data.tgt_car)
    for sig in sigs:
        def make(sig=sig):
            def fn(word):
                return data.graph_sum(sig, word)
            return fn
        k, l, g = sig
        mor.add(Op(k, l, g, mor_degree(d, sig), make(), data.src_car,
                   data.tgt_car, name="f%s" % (sig,)))
    mor.transfer_data = data
    return mor


def marked_edge_tables(data, sigs):
    """The aggregated maps f^id_{k,l,g} and f^Pi_{k,l,g}."""
    d = data.sub.cx.n - 3
    fid = MorTable(d, data.src_car, data.tgt_car)
    fpi = MorTable(d, data.src_car, data.tgt_car)
    for sig in sigs:
        k, l, g = sig

        def make(sig=sig, which="id"):
            def fn(word):
                return data.graph_sum(sig, word, marked=which)
            return fn

        # the marked-edge maps have the degree of a boundary-composed
        # morphism component (one pairing replaced: degree shifts by -1
        # relative to f, matching f o p110 - q110 o f)
        fid.comps[sig] = Op(k, l, g, mor_degree(d, sig) - 1, make(sig, "id"),
                            data.src_car, data.tgt_car, name="fid%s" % (sig,))
        fpi.comps[sig] = Op(k, l, g, mor_degree(d, sig) - 1, make(sig, "pi"),
                            data.src_car, data.tgt_car, name="fpi%s" % (sig,))
    return fid, fpi


# ---------------------------------------------------------------------------
# Canonical model: homology splitting of a carrier and the inductive step.


class BlockCarrier:
    """Letters ("H", i) indexing homology classes of (letters, p110)."""

    def __init__(self, base, classes):
        # classes: list of (weight, deg1, vec over base letters)
        self.base = base
        self.classes = classes

    def deg1(self, letter):
        return self.classes[letter[1]][1]

    def weight(self, letter):
        return self.classes[letter[1]][0]

    def sort_key(self, letter):
        return letter[1]

    def letters_upto(self, max_weight):
        return [("H", i) for i, (w, _, _) in enumerate(self.classes)
                if w <= max_weight]


def homology_split(carrier, p110, max_weight):
    """Split the truncated letter space under the boundary operator.

    Returns (hcar, f110, pi, h) with f110 : H -> C the cycle-choosing
    embedding, pi : C -> H the projection and h the chain homotopy with
    p110 h + h p110 = id - f110 pi, all letter-level Vec maps.
    """
    letters = carrier.letters_upto(max_weight)
    blocks = {}
    for x in letters:
        blocks.setdefault((carrier.weight(x), carrier.deg1(x)), []).append(x)
    classes = []
    fmap = {}
    packs = {}

    for (w, dgr), ls in sorted(blocks.items()):
        lidx = {x: i for i, x in enumerate(ls)}
        tgt = blocks.get((w, dgr - 1), [])
        tidx = {x: i for i, x in enumerate(tgt)}
        # matrix of p110 from this block
        mat = [[F(0)] * len(ls) for _ in range(len(tgt))]
        for j, x in enumerate(ls):
            for u, c in p110((x,)).items():
                mat[tidx[u[0]]][j] = c
        src = blocks.get((w, dgr + 1), [])
        matin = [[F(0)] * len(src) for _ in range(len(ls))]
        for j, x in enumerate(src):
            for u, c in p110((x,)).items():
                matin[lidx[u[0]]][j] = c
        # ker of mat, im of matin inside this block
        kerb = linalg.nullspace(mat) if tgt else \
            [[F(1) if i == j else F(0) for i in range(len(ls))]
             for j in range(len(ls))]
        impiv = linalg.column_space_pivots(matin) if src else []
        imvecs = [[matin[i][j] for i in range(len(ls))] for j in impiv]
        # homology classes: extend imvecs to a basis of ker
        stacked = [list(v) for v in imvecs]
        hclasses = []
        for v in kerb:
            trial = stacked + [list(v)]
            m2 = [[trial[j][i] for j in range(len(trial))]
                  for i in range(len(ls))]
            if linalg.rank(m2) == len(trial):
                stacked.append(list(v))
                hclasses.append(list(v))
        # complement of ker in the block
        cvecs = []
        allv = stacked[:]
        for j in range(len(ls)):
            unit = [F(1) if i == j else F(0) for i in range(len(ls))]
            trial = allv + [unit]
            m2 = [[trial[t][i] for t in range(len(trial))]
                  for i in range(len(ls))]
            if linalg.rank(m2) == len(trial):
                allv.append(unit)
                cvecs.append(unit)
        for v in hclasses:
            hid = len(classes)
            classes.append((w, dgr, {x: v[i] for i, x in enumerate(ls) if v[i]}))
            fmap[("H", hid)] = dict(classes[-1][2])
        packs[(w, dgr)] = (ls, hclasses, cvecs, imvecs)

    hcar = BlockCarrier(carrier, classes)

    # pi and h need per-block coordinates: iterate blocks again
    pimap = {}
    hmap = {}
    for (w, dgr), pack in packs.items():
        ls, hclasses, cvecs, imvecs = pack
        # basis: d(cvecs of block (w,dgr+1)) live here; build M = [dC | H | C]
        up = packs.get((w, dgr + 1))
        dcs = []
        if up is not None:
            upls = up[0]
            lidx = {x: i for i, x in enumerate(ls)}
            for cv in up[2]:
                vec = [F(0)] * len(ls)
                for i, x in enumerate(upls):
                    if cv[i]:
                        for u, cc in p110((x,)).items():
                            vec[lidx[u[0]]] += cv[i] * cc
                dcs.append(vec)
        cols = dcs + hclasses + cvecs
        if len(cols) != len(ls):
            raise AssertionError("block decomposition size mismatch")
        M = [[cols[j][i] for j in range(len(cols))] for i in range(len(ls))]
        Minv = linalg.inverse(M)
        if Minv is None:
            raise AssertionError("block decomposition singular")
        hoffset = len(dcs)
        # global H ids of this block's classes, in order
        hids = [i for i, (wc, dc, vec) in enumerate(classes)
                if wc == w and dc == dgr]
        for col, x in enumerate(ls):
            coords = [Minv[r][col] for r in range(len(ls))]
            pv = {}
            for t, hid in enumerate(hids):
                c = coords[hoffset + t]
                if c:
                    pv[("H", hid)] = c
            if pv:
                pimap[x] = pv
            hv = {}
            if up is not None:
                upls = up[0]
                for t in range(len(dcs)):
                    c = coords[t]
                    if c:
                        cv = up[2][t]
                        for i, y in enumerate(upls):
                            if cv[i]:
                                vadd(hv, y, c * cv[i])
            if hv:
                hmap[x] = hv

    def f110(x):
        return dict(fmap.get(x, {}))

    def pi(x):
        return dict(pimap.get(x, {}))

    def h(x):
        return dict(hmap.get(x, {}))

    return hcar, f110, pi, h


def _letterwise(mapfn, src, dst):
    """Extend a degree-0 letter map multiplicatively to E words."""
    def apply(word):
        acc = {(): F(1)}
        for x in word:
            nxt = {}
            for prev, c in acc.items():
                for y, cy in mapfn(x).items():
                    nxt[prev + (y,)] = nxt.get(prev + (y,), 0) + c * cy
            acc = nxt
        out = {}
        for letters, c in acc.items():
            sw = sort_word(dst, letters)
            if sw is None:
                continue
            vadd(out, sw[0], c * sw[1])
        return out
    return apply


def telescope_homotopy(hfn, afn, carrier, word):
    """H_L on a symmetric word: the symmetrised telescoping homotopy
    H = sum_i a^(i-1) (x) h (x) id^(L-i), so that
    p110^ H + H p110^ = id - a^(x)L whenever p110 h + h p110 = id - a."""
    L = len(word)
    out = {}
    for perm in itertools.permutations(range(L)):
        # Koszul sign of the permutation on the word letters
        sgn = 1
        pars = [carrier.deg1(c) & 1 for c in word]
        for i in range(L):
            for j in range(i + 1, L):
                if perm[i] > perm[j] and pars[perm[i]] and pars[perm[j]]:
                    sgn = -sgn
        seq = [word[p] for p in perm]
        for islot in range(L):
            cross = sum(carrier.deg1(seq[j]) for j in range(islot)) & 1
            s2 = -1 if cross else 1  # h has odd degree
            acc = {(): F(sgn * s2, factorial(L))}
            dead = False
            for j, x in enumerate(seq):
                fn = afn if j < islot else (hfn if j == islot else None)
                nxt = {}
                if fn is None:
                    for prev, c in acc.items():
                        nxt[prev + (x,)] = nxt.get(prev + (x,), 0) + c
                else:
                    vec = fn(x)
                    if not vec:
                        dead = True
                        break
                    for prev, c in acc.items():
                        for y, cy in vec.items():
                            nxt[prev + (y,)] = nxt.get(prev + (y,), 0) + c * cy
                acc = nxt
            if dead:
                continue
            for letters, c in acc.items():
                sw = sort_word(carrier, letters)
                if sw is None:
                    continue
                vadd(out, sw[0], c * sw[1])
    return out


def canonical_model_step(ptab, hdata, qtab, fmor, sig, max_weight):
    """One step of the canonical-model induction.

    ``hdata`` = (hcar, f110, pi, h) from homology_split; ``qtab`` and
    ``fmor`` hold the components for the preceding signatures and are
    extended in place with q_{K,L,G} and f_{K,L,G}.
    """
    from . import iblcheck
    hcar, f110, pi, h = hdata
    car = ptab.carrier
    K, L, G = sig
    d = ptab.d
    f110_K = _letterwise(f110, hcar, car)
    pi_L = _letterwise(pi, car, hcar)
    rt = iblcheck.rtilde(fmor, qtab, ptab, sig)
    pK = ptab.get(sig)

    def yfn(word):
        out = {}
        mid = f110_K(word)
        if pK is not None:
            for u, c in mid.items():
                vmerge(out, pK(u), c)
        vmerge(out, rt(word), -1)
        return out

    def qfn(word):
        out = {}
        for u, c in yfn(word).items():
            vmerge(out, pi_L(u), c)
        return out

    from .symbar import op_degree
    qtab.add(Op(K, L, G, op_degree(d, sig),
                qfn, hcar, hcar, name="q%s" % (sig,)))

    afn = None

    def a_letter(x):
        out = {}
        for yt, c in pi(x).items():
            vmerge(out, f110(yt), c)
        return out

    def f_klg(word):
        # f_map = (id - P_L) Y;  f = h' o f_map with h' adjusted from the
        # telescoping homotopy built out of h
        y = yfn(word)
        fm = dict(y)
        mid = qfn(word)
        for u, c in mid.items():
            vmerge(fm, f110_K(u), -c)
        # apply h' = (id - ie)(-H_L)(id - ie)
        def ie(vec):
            out = {}
            for u, c in vec.items():
                w1 = pi_L(u)
                for z, cz in w1.items():
                    vmerge(out, f110_K(z), c * cz)
            return out

        def proj(vec):
            out = dict(vec)
            vmerge(out, ie(vec), -1)
            return out

        def minus_HL(vec):
            out = {}
            for u, c in vec.items():
                vmerge(out, telescope_homotopy(h, a_letter, car, u), -c)
            return out

        return proj(minus_HL(proj(fm)))

    fmor.add(Op(K, L, G, mor_degree(d, sig), f_klg, hcar, car,
                name="fcan%s" % (sig,)))
    return qtab, fmor


def canonical_model(ptab, sigs, max_weight):
    """Run the induction for the given signatures; returns (qtab, fmor,
    hdata).  The first signature must be (1,1,0)."""
    from . import iblcheck
    hdata = homology_split(ptab.carrier, ptab.get((1, 1, 0)), max_weight)
    hcar, f110, pi, h = hdata
    d = ptab.d
    qtab = OpTable(d, hcar)
    fmor = MorTable(d, hcar, ptab.carrier)
    from .symbar import op_degree
    qtab.add(Op(1, 1, 0, -1, lambda w: {}, hcar, hcar, name="q110"))
    fmor.add(Op(1, 1, 0, 0,
                _letterwise(f110, hcar, ptab.carrier), hcar, ptab.carrier,
                name="f110"))
    for sig in sorted(sigs, key=iblcheck.sig_sort_key):
        if sig == (1, 1, 0):
            continue
        canonical_model_step(ptab, hdata, qtab, fmor, sig, max_weight)
    return qtab, fmor, hdata
