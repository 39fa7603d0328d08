"""Ribbon graph combinatorics: half-edge structures, boundary cycles,
enumeration up to isomorphism, labellings, spanning-tree edge frames and
the homology orientation sign.

A ribbon graph is stored as a half-edge ("dart") structure on its
interior vertices: ``rot[v]`` lists the darts at vertex v in rotation
order, ``pairing`` is the involution matching the two darts of each
interior edge, and the unmatched darts are legs (exterior edges ending
at degree-one exterior vertices).

Boundary cycles are the orbits of the face permutation
fp(h) = rotation-predecessor(sigma(h)), with sigma(leg) = leg; with
rotations read counterclockwise this keeps each face on the left of its
darts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg


class RibbonGraph:
    def __init__(self, rot, pairing):
        """``rot``: list of dart lists per interior vertex; ``pairing``:
        dict dart -> dart (involution, no fixed points)."""
        self.rot = [list(r) for r in rot]
        self.pairing = dict(pairing)
        self.nv = len(self.rot)
        self.vertex_of = {}
        self.pos_of = {}
        for v, darts in enumerate(self.rot):
            for i, h in enumerate(darts):
                self.vertex_of[h] = v
                self.pos_of[h] = i
        self.darts = sorted(self.vertex_of)
        for h, h2 in self.pairing.items():
            if self.pairing.get(h2) != h or h == h2:
                raise ValueError("pairing is not a fixed-point-free involution")
        self.legs = [h for h in self.darts if h not in self.pairing]
        self._faces = None
        self._canon = None

    # -- basic structure -----------------------------------------------------
    def degree(self, v):
        return len(self.rot[v])

    def next_dart(self, h):
        v = self.vertex_of[h]
        r = self.rot[v]
        return r[(self.pos_of[h] + 1) % len(r)]

    def prev_dart(self, h):
        v = self.vertex_of[h]
        r = self.rot[v]
        return r[(self.pos_of[h] - 1) % len(r)]

    def fp(self, h):
        return self.prev_dart(self.pairing.get(h, h))

    def faces(self):
        """Boundary cycles as tuples of darts (face on the left)."""
        if self._faces is not None:
            return self._faces
        seen = set()
        out = []
        for h in self.darts:
            if h in seen:
                continue
            cyc = []
            cur = h
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = self.fp(cur)
            out.append(tuple(cyc))
        self._faces = out
        return out

    def face_of(self):
        out = {}
        for i, f in enumerate(self.faces()):
            for h in f:
                out[h] = i
        return out

    def face_legs(self, face):
        """Exterior vertices on a boundary cycle, in the induced order."""
        return tuple(h for h in face if h not in self.pairing)

    def edges(self):
        """Interior edges as sorted dart pairs, in a fixed order."""
        out = []
        for h, h2 in sorted(self.pairing.items()):
            if h < h2:
                out.append((h, h2))
        return out

    def num_interior_edges(self):
        return len(self.pairing) // 2

    def signature(self):
        k = self.nv
        m = self.num_interior_edges()
        l = len(self.faces())
        two_g = 2 - k + m - l
        if two_g % 2:
            raise AssertionError("odd Euler defect; broken graph")
        return (k, l, two_g // 2)

    def interior_connected(self):
        if self.nv <= 1:
            return True
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for h in self.rot[v]:
                h2 = self.pairing.get(h)
                if h2 is None:
                    continue
                w = self.vertex_of[h2]
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.nv

    def satisfies_leg_condition(self):
        return all(self.face_legs(f) for f in self.faces())

    # -- canonical form --------------------------------------------------------
    def _code_from_flag(self, h0):
        """Complete invariant of the graph rooted at the flag (dart) h0."""
        ventry = {self.vertex_of[h0]: h0}
        order = [self.vertex_of[h0]]
        edge_ids = {}
        tokens = []
        qi = 0
        while qi < len(order):
            v = order[qi]
            qi += 1
            entry = ventry[v]
            r = self.rot[v]
            start = self.pos_of[entry]
            row = []
            for i in range(len(r)):
                h = r[(start + i) % len(r)]
                h2 = self.pairing.get(h)
                if h2 is None:
                    row.append(-1)
                    continue
                e = (min(h, h2), max(h, h2))
                if e not in edge_ids:
                    edge_ids[e] = len(edge_ids)
                    w = self.vertex_of[h2]
                    if w not in ventry:
                        ventry[w] = h2
                        order.append(w)
                row.append(edge_ids[e])
            tokens.append(tuple(row))
        if len(order) < self.nv:
            raise ValueError("interior part is disconnected")
        return tuple(tokens)

    def canonical_code(self):
        """Minimal flag code and the automorphism group order."""
        if self._canon is not None:
            return self._canon
        best = None
        count = 0
        for h in self.darts:
            code = self._code_from_flag(h)
            if best is None or code < best:
                best, count = code, 1
            elif code == best:
                count += 1
        if best is None:
            # a single vertex with no darts has no flags; treat specially
            best, count = ((),), 1
        self._canon = (best, count)
        return self._canon

    def aut_order(self):
        return self.canonical_code()[1]

    def _bfs_dart_order(self, h0):
        """All darts in the deterministic traversal order rooted at h0."""
        ventry = {self.vertex_of[h0]: h0}
        order = [self.vertex_of[h0]]
        edge_ids = {}
        darts = []
        qi = 0
        while qi < len(order):
            v = order[qi]
            qi += 1
            entry = ventry[v]
            r = self.rot[v]
            start = self.pos_of[entry]
            for i in range(len(r)):
                h = r[(start + i) % len(r)]
                darts.append(h)
                h2 = self.pairing.get(h)
                if h2 is None:
                    continue
                e = (min(h, h2), max(h, h2))
                if e not in edge_ids:
                    edge_ids[e] = len(edge_ids)
                    w = self.vertex_of[h2]
                    if w not in ventry:
                        ventry[w] = h2
                        order.append(w)
        return darts

    def automorphisms(self):
        """All automorphisms as dart permutations (dicts)."""
        if not self.darts:
            return [{}]
        base = self.darts[0]
        base_code = self._code_from_flag(base)
        base_order = self._bfs_dart_order(base)
        out = []
        for h in self.darts:
            if self._code_from_flag(h) != base_code:
                continue
            other = self._bfs_dart_order(h)
            out.append({a: b for a, b in zip(base_order, other)})
        return out

    @staticmethod
    def from_code(code):
        rot = []
        dart = 0
        rows = []
        for row in code:
            darts = list(range(dart, dart + len(row)))
            rot.append(darts)
            rows.append(row)
            dart += len(row)
        ends = {}
        pairing = {}
        flat = [(v, i) for v, row in enumerate(rows) for i in range(len(row))]
        for v, row in enumerate(rows):
            for i, tok in enumerate(row):
                if tok == -1:
                    continue
                if tok in ends:
                    h2 = ends.pop(tok)
                    h = rot[v][i]
                    pairing[h] = h2
                    pairing[h2] = h
                else:
                    ends[tok] = rot[v][i]
        if ends:
            raise ValueError("unmatched edge tokens")
        return RibbonGraph(rot, pairing)

    def relabelled_canonical(self):
        return RibbonGraph.from_code(self.canonical_code()[0])

    # -- export ----------------------------------------------------------------
    def dot_export(self, frame=None, labelling=None):
        """Deterministic DOT text; exterior vertices are open nodes."""
        lines = ["graph ribbon {", "  node [shape=circle];"]
        for v in range(self.nv):
            lab = ""
            if labelling is not None:
                lab = " label=\"v%d\"" % (labelling.vnum[v],)
            lines.append("  v%d [style=filled fillcolor=black "
                         "fontcolor=white%s];" % (v, lab))
        for i, leg in enumerate(sorted(self.legs)):
            lines.append("  x%d [shape=circle style=dashed];" % i)
            lines.append("  v%d -- x%d;" % (self.vertex_of[leg], i))
        oriented = {}
        if frame is not None:
            for idx, h in enumerate(frame.edge_darts):
                e = (min(h, self.pairing[h]), max(h, self.pairing[h]))
                oriented[e] = (idx + 1, h)
        for e in self.edges():
            h, h2 = e
            if e in oriented:
                idx, hd = oriented[e]
                lines.append("  v%d -- v%d [label=\"e%d\" dir=forward];"
                             % (self.vertex_of[hd],
                                self.vertex_of[self.pairing[hd]], idx))
            else:
                lines.append("  v%d -- v%d;" % (self.vertex_of[h],
                                                self.vertex_of[h2]))
        for i, f in enumerate(self.faces()):
            lines.append("  // boundary %d: %d exterior vertices"
                         % (i, len(self.face_legs(f))))
        lines.append("}")
        return "\n".join(lines) + "\n"


def boundary_cycles(graph):
    """Boundary cycles with their exterior-vertex sequences."""
    return [(f, graph.face_legs(f)) for f in graph.faces()]


def signature_of(graph):
    return graph.signature()


# ---------------------------------------------------------------------------
# Enumeration.


def _pairings(slots, m):
    """All ways to pick m disjoint ordered pairs from ``slots`` (as dicts),
    the rest being legs."""
    def rec(avail, left):
        if left == 0:
            yield {}
            return
        if len(avail) < 2 * left:
            return
        first = avail[0]
        rest = avail[1:]
        # first is a leg
        if len(rest) >= 2 * left:
            for p in rec(rest, left):
                yield p
        # first is paired with a later slot
        for i, other in enumerate(rest):
            sub = rest[:i] + rest[i + 1:]
            for p in rec(sub, left - 1):
                p2 = dict(p)
                p2[first] = other
                p2[other] = first
                yield p2

    yield from rec(list(slots), m)


def _valence_multisets(k, total, dmin=1, dmax=None):
    dmax = dmax if dmax is not None else total
    out = []

    def rec(rem, left, lo, acc):
        if left == 0:
            if rem == 0:
                out.append(tuple(acc))
            return
        for d in range(lo, min(dmax, rem - (left - 1) * lo) + 1):
            if rem - d < (left - 1) * d:
                continue
            acc.append(d)
            rec(rem - d, left - 1, d, acc)
            acc.pop()

    rec(total, k, dmin, [])
    # descending order is more natural for vertex valences
    return [tuple(reversed(v)) for v in out]


def enumerate_graphs(k, l, g, max_legs_per_boundary=None,
                     max_total_valence=None, valences=None, trivalent=False):
    """Isomorphism classes of ribbon graphs of signature (k, l, g).

    Returns a list of (RibbonGraph in canonical labelling, aut_order).
    The fiber is cut out either by an explicit valence multiset, by a
    bound on legs per boundary, or by a bound on the total valence.
    """
    m = k + l + 2 * g - 2
    if m < 0:
        return []
    vlists = []
    if valences is not None:
        vlists = [tuple(sorted(valences, reverse=True))]
        if sum(valences) < 2 * m or len(valences) != k:
            return []
    else:
        if trivalent:
            total = 3 * k
            if total < 2 * m + l:
                return []
            vlists = [(3,) * k]
        else:
            if max_total_valence is None:
                if max_legs_per_boundary is None:
                    raise ValueError("need a bound to make the fiber finite")
                max_total_valence = 2 * m + l * max_legs_per_boundary
            vlists = []
            for total in range(max(2 * m + l, k), max_total_valence + 1):
                vlists.extend(_valence_multisets(k, total))
    found = {}
    for vlist in vlists:
        if trivalent and any(d != 3 for d in vlist):
            continue
        rot = []
        base = 0
        for d in vlist:
            rot.append(list(range(base, base + d)))
            base += d
        slots = list(range(base))
        for pairing in _pairings(slots, m):
            try:
                G = RibbonGraph(rot, pairing)
            except ValueError:
                continue
            if not G.interior_connected():
                continue
            if len(G.faces()) != l:
                continue
            if G.signature() != (k, l, g):
                continue
            if not G.satisfies_leg_condition():
                continue
            if max_legs_per_boundary is not None and any(
                    len(G.face_legs(f)) > max_legs_per_boundary
                    for f in G.faces()):
                continue
            try:
                code, aut = G.canonical_code()
            except ValueError:
                continue
            if code not in found:
                found[code] = (RibbonGraph.from_code(code), aut)
    return [found[c] for c in sorted(found)]


# ---------------------------------------------------------------------------
# Labellings.


@dataclass(frozen=True)
class Labelling:
    """A labelling in the sense of the state sum: vertex and boundary
    numberings plus starting half-edges / starting exterior vertices."""

    vorder: tuple       # vertex ids; vorder[i] carries number i+1
    vstart: tuple       # starting dart per vertex id
    border: tuple       # face indices; border[i] carries number i+1
    bstart: tuple       # starting leg per face index

    @property
    def vnum(self):
        return {v: i + 1 for i, v in enumerate(self.vorder)}

    @property
    def bnum(self):
        return {f: i + 1 for i, f in enumerate(self.border)}


def labellings(graph):
    """All labellings of a ribbon graph."""
    faces = graph.faces()
    fl = [graph.face_legs(f) for f in faces]
    vstarts = [graph.rot[v] for v in range(graph.nv)]
    for vorder in itertools.permutations(range(graph.nv)):
        for vstart in itertools.product(*vstarts):
            for border in itertools.permutations(range(len(faces))):
                for bstart in itertools.product(*fl):
                    yield Labelling(vorder, vstart, border, bstart)


def vertex_word(graph, lab, v):
    """Darts at vertex v starting from its labelled starting dart."""
    r = graph.rot[v]
    start = r.index(lab.vstart[v])
    return tuple(r[(start + i) % len(r)] for i in range(len(r)))


def boundary_word(graph, lab, face_idx):
    """Legs of a boundary cycle starting from the labelled starting leg.

    The word is read against the face-permutation direction; this is the
    cyclic order for which the one-vertex star graphs reproduce the dual
    of the inclusion with coefficient exactly one.
    """
    legs = graph.face_legs(graph.faces()[face_idx])
    start = legs.index(lab.bstart[face_idx])
    return tuple(legs[(start - i) % len(legs)] for i in range(len(legs)))


# ---------------------------------------------------------------------------
# Edge frames.


@dataclass
class EdgeFrame:
    """Ordered, oriented interior edges e_1..e_m given as their darts
    (each edge directed along its dart); tree/cotree bookkeeping."""

    edge_darts: list     # dart orienting e_i, in frame order (i = 1..m)
    tree: set            # underlying edges (dart-pairs) of T
    cotree: set          # underlying edges of the dual tree T*
    h1: list             # the remaining 2g oriented darts


class FrameError(Exception):
    pass


def _edge_key(graph, h):
    return (min(h, graph.pairing[h]), max(h, graph.pairing[h]))


def _spanning_tree(graph, lab, strategy):
    """Tree darts parent->child found from vertex number 1, deterministic."""
    root = lab.vorder[0]
    seen = {root}
    tree_darts = {}  # child vertex -> dart (at parent, pointing to child)
    frontier = [root]
    while frontier:
        if strategy == "dfs":
            v = frontier.pop()
        else:
            v = frontier.pop(0)
        for h in vertex_word(graph, lab, v):
            h2 = graph.pairing.get(h)
            if h2 is None:
                continue
            w = graph.vertex_of[h2]
            if w not in seen:
                seen.add(w)
                tree_darts[w] = h
                frontier.append(w)
    if len(seen) != graph.nv:
        raise FrameError("interior part disconnected")
    return tree_darts


def _dual_tree(graph, lab, avoid, strategy):
    """Spanning tree of the dual graph avoiding ``avoid`` (edge keys),
    rooted at boundary number 1.  Returns {child face: dart in parent}."""
    faces = graph.faces()
    face_of = graph.face_of()
    root = lab.border[0]
    seen = {root}
    tree = {}
    frontier = [root]
    while frontier:
        if strategy == "dfs":
            f = frontier.pop()
        else:
            f = frontier.pop(0)
        for h in faces[f]:
            h2 = graph.pairing.get(h)
            if h2 is None:
                continue
            if _edge_key(graph, h) in avoid:
                continue
            f2 = face_of[h2]
            if f2 not in seen:
                seen.add(f2)
                # h lies in the parent face f: orient the primal edge
                # along h so the source face of e* is on its left
                tree[f2] = h
                frontier.append(f2)
    if len(seen) != len(faces):
        raise FrameError("no disjoint dual spanning tree for this tree")
    return tree


def tree_path(graph, tree_darts, lab, frm, to):
    """Darts of the T-path from vertex ``frm`` to vertex ``to``."""
    def to_root(v):
        path = []
        while v != lab.vorder[0]:
            h = tree_darts[v]          # parent -> v
            path.append(h)
            v = graph.vertex_of[h]
        return path

    pa = to_root(frm)   # darts parent->child along frm's ancestry
    pb = to_root(to)
    sa = set(_edge_key(graph, h) for h in pa)
    sb = set(_edge_key(graph, h) for h in pb)
    common = sa & sb
    pa = [h for h in pa if _edge_key(graph, h) not in common]
    pb = [h for h in pb if _edge_key(graph, h) not in common]
    # walk up from frm (reverse darts), then down to to
    walk = [graph.pairing[h] for h in pa]
    walk += list(reversed(pb))
    return walk


def edge_frame(graph, lab, strategy="bfs"):
    """Frame per the tree conventions: T away from vertex 1 numbered so
    that e_i ends at vertex k+1-i, T* away from boundary 1 in increasing
    order, dual-tree primal edges oriented with the source face on their
    left, and the 2g leftover edges oriented compatibly with the
    symplectic intersection form."""
    k = graph.nv
    faces = graph.faces()
    l = len(faces)
    m = graph.num_interior_edges()
    try:
        tree_darts = _spanning_tree(graph, lab, strategy)
        tset = set(_edge_key(graph, h) for h in tree_darts.values())
        dual = _dual_tree(graph, lab, tset, strategy)
    except FrameError:
        # retry over all spanning trees (tree-cotree pairs always exist
        # for cellular embeddings, so this is belt and braces)
        tree_darts = dual = None
        for tchoice in _all_spanning_trees(graph, lab):
            try:
                tset = set(_edge_key(graph, h) for h in tchoice.values())
                dual = _dual_tree(graph, lab, tset, strategy)
                tree_darts = tchoice
                break
            except FrameError:
                continue
        if tree_darts is None:
            raise FrameError("no tree-cotree pair found")
        tset = set(_edge_key(graph, h) for h in tree_darts.values())

    vnum = lab.vnum
    edge_list = [None] * m
    # T edges: e_i ends at vertex k+1-i
    for child, h in tree_darts.items():
        i = k + 1 - vnum[child]
        edge_list[i - 1] = h
    # T* edges: e_{k+s-2} points to boundary s
    bnum = lab.bnum
    cset = set()
    for child_face, h in dual.items():
        s = bnum[child_face]
        edge_list[k + s - 2 - 1] = h
        cset.add(_edge_key(graph, h))
    # remaining 2g edges
    used = tset | cset
    rest = [e for e in graph.edges() if e not in used]
    rest_darts = [e[0] for e in rest]
    if rest_darts:
        cycles = [h1_cycle(graph, tree_darts, lab, h) for h in rest_darts]
        omega = intersection_matrix(graph, cycles)
        if pfaffian_sign(omega) < 0:
            rest_darts[-1] = graph.pairing[rest_darts[-1]]
    for j, h in enumerate(rest_darts):
        edge_list[k + l - 2 + j] = h
    if any(h is None for h in edge_list):
        raise AssertionError("frame assembly incomplete")
    return EdgeFrame(edge_list, tset, cset, rest_darts)


def _all_spanning_trees(graph, lab):
    """All spanning trees of the interior graph as {child: parent-dart}."""
    edges = graph.edges()
    k = graph.nv
    for combo in itertools.combinations(edges, k - 1):
        # check the combo is a tree: connected and acyclic on k vertices
        adj = {v: [] for v in range(k)}
        for (h, h2) in combo:
            adj[graph.vertex_of[h]].append(h)
            adj[graph.vertex_of[h2]].append(h2)
        root = lab.vorder[0]
        seen = {root}
        parent_dart = {}
        stack = [root]
        while stack:
            v = stack.pop()
            for h in adj[v]:
                w = graph.vertex_of[graph.pairing[h]]
                if w not in seen:
                    seen.add(w)
                    parent_dart[w] = h
                    stack.append(w)
        if len(seen) == k:
            yield parent_dart


def h1_cycle(graph, tree_darts, lab, h):
    """The closed walk (list of darts) of the extra edge h plus the tree
    path from its head back to its tail."""
    tail = graph.vertex_of[h]
    head = graph.vertex_of[graph.pairing[h]]
    return [h] + tree_path(graph, tree_darts, lab, head, tail)


# ---------------------------------------------------------------------------
# Intersection numbers of simple cycles on the closed surface.


def _passages(graph, walk):
    """Per-vertex passages (arrival dart, departure dart) of a closed walk."""
    out = []
    n = len(walk)
    for i in range(n):
        prev = walk[i - 1]
        nxt = walk[i]
        arrival = graph.pairing[prev]
        v = graph.vertex_of[nxt]
        if graph.vertex_of[arrival] != v:
            raise ValueError("walk is not closed")
        out.append((v, arrival, nxt))
    return out


def _refined_pos(graph, v):
    """Cyclic order of refined slots (dart, lane) around v; lanes
    -1 (clockwise side), 0 (center), +1 (counterclockwise side)."""
    slots = []
    for h in graph.rot[v]:
        slots.extend([(h, -1), (h, 0), (h, 1)])
    return {s: i for i, s in enumerate(slots)}, len(slots)


def intersection_number(graph, walk_a, walk_b):
    """Signed intersection number of two simple closed walks, with walk_b
    pushed off to its left."""
    pas_a = {}
    for v, arr, dep in _passages(graph, walk_a):
        pas_a.setdefault(v, []).append(((arr, 0), (dep, 0)))
    total = 0
    for v, arr, dep in _passages(graph, walk_b):
        if v not in pas_a:
            continue
        pos, size = _refined_pos(graph, v)
        b_in = pos[(arr, -1)]
        b_out = pos[(dep, 1)]
        for (a_in_s, a_out_s) in pas_a[v]:
            a_in = pos[a_in_s]
            a_out = pos[a_out_s]

            def in_arc(x, start, end):
                # x strictly inside the ccw arc from start to end
                if start < end:
                    return start < x < end
                return x > start or x < end

            if in_arc(b_in, a_in, a_out) and in_arc(b_out, a_out, a_in):
                total += 1
            elif in_arc(b_out, a_in, a_out) and in_arc(b_in, a_out, a_in):
                total -= 1
    return total


def intersection_matrix(graph, cycles):
    n = len(cycles)
    omega = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                omega[i][j] = intersection_number(graph, cycles[i], cycles[j])
    return omega


def pfaffian_sign(omega):
    """Sign of the Pfaffian of an antisymmetric integer matrix."""
    n = len(omega)
    if n == 0:
        return 1
    if n % 2:
        return 0
    total = Fraction(0)
    # recursive expansion along the first row
    if n == 2:
        total = Fraction(omega[0][1])
    else:
        for j in range(1, n):
            a = omega[0][j]
            if not a:
                continue
            idx = [i for i in range(n) if i not in (0, j)]
            sub = [[Fraction(omega[p][q]) for q in idx] for p in idx]
            total += (-1) ** (j + 1) * a * _pf(sub)
    if total > 0:
        return 1
    if total < 0:
        return -1
    return 0


def _pf(mat):
    n = len(mat)
    if n == 0:
        return Fraction(1)
    if n == 2:
        return mat[0][1]
    total = Fraction(0)
    for j in range(1, n):
        a = mat[0][j]
        if not a:
            continue
        idx = [i for i in range(n) if i not in (0, j)]
        sub = [[mat[p][q] for q in idx] for p in idx]
        total += (-1) ** (j + 1) * a * _pf(sub)
    return total


# ---------------------------------------------------------------------------
# The homology orientation sign eta_3.


def _reference_h1_basis(graph):
    """A symplectically oriented H_1 cycle basis from a fixed reference
    tree-cotree frame (independent of any labelling)."""
    lab = default_labelling(graph)
    tree_darts = _spanning_tree(graph, lab, "bfs")
    tset = set(_edge_key(graph, h) for h in tree_darts.values())
    dual = _dual_tree(graph, lab, tset, "bfs")
    cset = set(_edge_key(graph, h) for h in dual.values())
    rest = [e for e in graph.edges() if e not in (tset | cset)]
    darts = [e[0] for e in rest]
    if not darts:
        return [], []
    cycles = [h1_cycle(graph, tree_darts, lab, h) for h in darts]
    omega = intersection_matrix(graph, cycles)
    s = pfaffian_sign(omega)
    if s == 0:
        raise AssertionError("degenerate intersection form")
    flip = s < 0
    if flip:
        cycles[-1] = [graph.pairing[h] for h in reversed(cycles[-1])]
    return darts, cycles


def default_labelling(graph):
    faces = graph.faces()
    return Labelling(tuple(range(graph.nv)),
                     tuple(graph.rot[v][0] for v in range(graph.nv)),
                     tuple(range(len(faces))),
                     tuple(graph.face_legs(f)[0] for f in faces))


def _walk_to_chain(graph, walk, edge_index, orient_dart):
    """Edge chain (coefficients per frame edge) of a closed walk."""
    vec = [Fraction(0)] * len(edge_index)
    for h in walk:
        e = _edge_key(graph, h)
        i = edge_index[e]
        vec[i] += 1 if orient_dart[i] == h else -1
    return vec


def eta3(graph, lab, edge_darts):
    """The orientation sign exponent for a labelled graph with ordered,
    oriented interior edges (0 when the induced and the canonical
    homology orientations agree, 1 otherwise)."""
    m = len(edge_darts)
    k = graph.nv
    faces = graph.faces()
    l = len(faces)
    edge_index = {_edge_key(graph, h): i for i, h in enumerate(edge_darts)}
    if len(edge_index) != m or m != graph.num_interior_edges():
        raise ValueError("edge list does not enumerate the interior edges")
    # boundary matrices in the frame bases
    d2 = [[Fraction(0)] * l for _ in range(m)]
    for jf, face in enumerate(lab.border):
        for h in faces[face]:
            if h not in graph.pairing:
                continue
            e = edge_index[_edge_key(graph, h)]
            d2[e][jf] += 1 if edge_darts[e] == h else -1
    vnum = lab.vnum
    d1 = [[Fraction(0)] * m for _ in range(k)]
    for e, h in enumerate(edge_darts):
        tail = vnum[graph.vertex_of[h]] - 1
        head = vnum[graph.vertex_of[graph.pairing[h]]] - 1
        d1[head][e] += 1
        d1[tail][e] -= 1
    # complements via pivot columns
    piv2 = linalg.column_space_pivots(d2)
    piv1 = linalg.column_space_pivots(d1)
    if len(piv2) != l - 1 or len(piv1) != k - 1:
        raise AssertionError("unexpected boundary ranks")
    # H2 = <f_1+...+f_l>, must span ker d2
    m2 = [[Fraction(0)] * l for _ in range(l)]
    for c, j in enumerate(piv2):
        m2[j][c] = Fraction(1)
    for r in range(l):
        m2[r][l - 1] = Fraction(1)
    s2 = linalg.det_sign(m2)
    # H1: reference symplectic cycle basis expressed in frame coordinates
    darts, cycles = _reference_h1_basis(graph)
    h1vecs = [_walk_to_chain(graph, wlk, edge_index, edge_darts)
              for wlk in cycles]
    m1 = [[Fraction(0)] * m for _ in range(m)]
    col = 0
    for j in piv1:
        m1[j][col] = Fraction(1)
        col += 1
    for vec in h1vecs:
        for r in range(m):
            m1[r][col] = vec[r]
        col += 1
    for j in piv2:
        for r in range(m):
            m1[r][col] = d2[r][j]
        col += 1
    s1 = linalg.det_sign(m1)
    # C0 in the reversed order v_k,...,v_1
    m0 = [[Fraction(0)] * k for _ in range(k)]
    col = 0
    for e in piv1:
        for r in range(k):
            m0[k - 1 - r][col] = d1[r][e]
        col += 1
    for r in range(k):
        m0[r][k - 1] = Fraction(1)
    s0 = linalg.det_sign(m0)
    if 0 in (s0, s1, s2):
        raise AssertionError("singular orientation comparison")
    return 0 if s0 * s1 * s2 > 0 else 1


def frame_sign_compare(graph, lab1, frame1, lab2, frame2):
    """Check sgn(sigma) sgn(tau) sgn(rho) = (-1)^r for two labelled frames
    over the same graph.  Returns (holds, data)."""
    k = graph.nv
    vn1, vn2 = lab1.vnum, lab2.vnum
    sigma = [0] * k
    for v in range(k):
        sigma[vn1[v] - 1] = vn2[v]
    bn1, bn2 = lab1.bnum, lab2.bnum
    l = len(graph.faces())
    tau = [0] * l
    for f in range(l):
        tau[bn1[f] - 1] = bn2[f]
    e1 = [_edge_key(graph, h) for h in frame1.edge_darts]
    e2 = [_edge_key(graph, h) for h in frame2.edge_darts]
    rho = [e2.index(e) + 1 for e in e1]
    r = sum(1 for h1, h2 in zip(frame1.edge_darts,
                                [frame2.edge_darts[e2.index(e)] for e in e1])
            if h1 != h2)
    holds = (_perm_sign(sigma) * _perm_sign(tau) * _perm_sign(rho)
             == (-1) ** (r % 2))
    return holds, {"sigma": sigma, "tau": tau, "rho": rho, "r": r}


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign
