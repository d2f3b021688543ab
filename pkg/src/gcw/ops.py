"""Differentials and algebraic operations on graph sums.

Sign conventions, fixed once and validated by the identity test suites:

* vertex splitting appends the newly created edge *last* in the edge order
  and carries no further sign; all signs come from canonical reordering;
* the cosimplicial pieces ``delta_j`` and the codegeneracies ``s_j`` act
  without per-term signs (``s_j`` moves the deleted edges to the front and
  records that parity); the alternating-sum operator ``delta`` additionally
  carries the Koszul factor (-1)^{#edges} so that ``d`` and ``delta``
  anticommute;
* operadic composition keeps the host graph's edges first, the inserted
  graph's edges last.
"""

from __future__ import annotations

from fractions import Fraction

from .graphs import (
    GC2,
    GRAPHS,
    ICG,
    AdmissibleGraph,
    CanonicalGraph,
    GraphError,
    GraphSum,
    canonical_term,
    degree_of,
    internal_loop_order,
)


def _edges_at(edges, v):
    return [i for i, (a, b) in enumerate(edges) if a == v or b == v]


def _replace_endpoint(edge, old, new):
    a, b = edge
    return (new if a == old else a, new if b == old else b)


def _subsets(items):
    n = len(items)
    for mask in range(1 << n):
        yield [items[i] for i in range(n) if mask >> i & 1]


# ---------------------------------------------------------------------------
# vertex splitting differential
# ---------------------------------------------------------------------------


def _split_vertex_terms(g: AdmissibleGraph, flavor):
    """Yield raw (n, iv, edges) results of splitting every vertex of g."""
    n, iv = g.n_external, g.n_internal
    if flavor == GC2:
        vertices = range(1, iv + 1)
    else:
        vertices = range(1, n + iv + 1)
    for v in vertices:
        incident = _edges_at(g.edges, v)
        val = len(incident)
        new = n + iv + 1  # fresh internal vertex (for GC2 simply vertex iv+1)
        if flavor != GC2 and g.is_external(v):
            # external splits into (external v, fresh internal); any subset of
            # size >= 2 moves over, smaller ones leave an under-trivalent vertex
            for moved in _subsets(incident):
                if len(moved) < 2:
                    continue
                moved_set = set(moved)
                edges = [
                    _replace_endpoint(e, v, new) if i in moved_set else e
                    for i, e in enumerate(g.edges)
                ]
                edges.append((v, new))
                yield n, iv + 1, edges
        else:
            # internal split: unordered bipartition, both halves >= 2; pin the
            # first incident edge to v so each bipartition is counted once
            if val < 4:
                continue
            first, rest = incident[0], incident[1:]
            for moved in _subsets(rest):
                if len(moved) < 2 or val - len(moved) < 2:
                    continue
                moved_set = set(moved)
                edges = [
                    _replace_endpoint(e, v, new) if i in moved_set else e
                    for i, e in enumerate(g.edges)
                ]
                edges.append((v, new))
                yield n, iv + 1, edges


def differential_d(s: GraphSum) -> GraphSum:
    """Vertex-splitting differential; off-flavor split results vanish."""
    out = GraphSum.zero(s.flavor, s.n_external)
    for cg, coeff in s.terms.items():
        for n, iv, edges in _split_vertex_terms(cg.graph, s.flavor):
            c = canonical_term(n, iv, edges, s.flavor)
            if c is not None:
                out.accumulate(c[0], coeff * c[1])
    return out


def d_component(s: GraphSum, i: int) -> GraphSum:
    """The piece of d raising the internal loop order by exactly ``i``."""
    out = GraphSum.zero(s.flavor, s.n_external)
    for cg, coeff in s.terms.items():
        base = cg.loop_order()
        for n, iv, edges in _split_vertex_terms(cg.graph, s.flavor):
            c = canonical_term(n, iv, edges, s.flavor)
            if c is not None and c[0].loop_order() == base + i:
                out.accumulate(c[0], coeff * c[1])
    return out


gc2_differential = differential_d


# ---------------------------------------------------------------------------
# cosimplicial structure
# ---------------------------------------------------------------------------


def _shift_labels(edges, ext_from, n, iv):
    """Raise by one every label >= ext_from (coface relabeling helper)."""

    def sh(v):
        return v + 1 if v >= ext_from else v

    return [(sh(a), sh(b)) for a, b in edges]


def cosimplicial_delta_j(s: GraphSum, j: int) -> GraphSum:
    """The j-th coface ICG(n) -> ICG(n+1), 0 <= j <= n+1, no per-term sign."""
    if s.flavor != ICG:
        raise GraphError("cosimplicial maps are defined on ICG sums")
    n = s.n_external
    if not 0 <= j <= n + 1:
        raise GraphError(f"coface index {j} out of range 0..{n + 1}")
    out = GraphSum.zero(ICG, n + 1)
    for cg, coeff in s.terms.items():
        g = cg.graph
        if j == 0:
            edges = [(a + 1, b + 1) for a, b in g.edges]
            c = canonical_term(n + 1, g.n_internal, edges, ICG)
            if c is not None:
                out.accumulate(c[0], coeff * c[1])
        elif j == n + 1:
            edges = _shift_labels(g.edges, n + 1, n, g.n_internal)
            c = canonical_term(n + 1, g.n_internal, edges, ICG)
            if c is not None:
                out.accumulate(c[0], coeff * c[1])
        else:
            # split external j into j, j+1: distribute its edges over the pair
            shifted = _shift_labels(g.edges, j + 1, n, g.n_internal)
            incident = _edges_at(shifted, j)
            for moved in _subsets(incident):
                moved_set = set(moved)
                edges = [
                    _replace_endpoint(e, j, j + 1) if i in moved_set else e
                    for i, e in enumerate(shifted)
                ]
                c = canonical_term(n + 1, g.n_internal, edges, ICG)
                if c is not None:
                    out.accumulate(c[0], coeff * c[1])
    return out


def cosimplicial_delta(s: GraphSum) -> GraphSum:
    """Alternating sum of cofaces with the Koszul edge-count sign.

    delta(Gamma) = (-1)^{#edges} * sum_j (-1)^j delta_j(Gamma); the edge-count
    factor makes d*delta = -delta*d hold on the nose.
    """
    if s.flavor != ICG:
        raise GraphError("cosimplicial maps are defined on ICG sums")
    n = s.n_external
    out = GraphSum.zero(ICG, n + 1)
    by_edges = {}
    for cg, coeff in s.terms.items():
        by_edges.setdefault(cg.n_edges, GraphSum.zero(ICG, n)).accumulate(cg, coeff)
    for e, part in by_edges.items():
        sign_e = -1 if e % 2 else 1
        for j in range(0, n + 2):
            sign = sign_e * (-1 if j % 2 else 1)
            out = out + sign * cosimplicial_delta_j(part, j)
    return out


def codegeneracy_s_j(s: GraphSum, j: int) -> GraphSum:
    """Delete external vertex j and its edges; sign moves those edges to the front."""
    if s.flavor != ICG:
        raise GraphError("cosimplicial maps are defined on ICG sums")
    n = s.n_external
    if not 1 <= j <= n:
        raise GraphError(f"codegeneracy index {j} out of range 1..{n}")
    out = GraphSum.zero(ICG, n - 1)
    for cg, coeff in s.terms.items():
        g = cg.graph
        deleted = _edges_at(g.edges, j)
        # parity of the stable permutation pulling positions `deleted` to the front
        inversions = sum(p - i for i, p in enumerate(sorted(deleted)))
        sign = -1 if inversions % 2 else 1

        def lower(v):
            return v - 1 if v > j else v

        edges = [
            (lower(a), lower(b)) for i, (a, b) in enumerate(g.edges) if i not in set(deleted)
        ]
        c = canonical_term(n - 1, g.n_internal, edges, ICG)
        if c is not None:
            out.accumulate(c[0], coeff * sign * c[1])
    return out


def merge_externals(s: GraphSum) -> GraphSum:
    """Identify the two external vertices of an ICG(2) sum, keeping all edges.

    Terms acquiring a self-loop or a parallel pair are zero.
    """
    if s.flavor != ICG or s.n_external != 2:
        raise GraphError("merge expects an ICG sum with two external vertices")
    out = GraphSum.zero(ICG, 1)
    for cg, coeff in s.terms.items():
        g = cg.graph
        edges = [(1 if a <= 2 else a - 1, 1 if b <= 2 else b - 1) for a, b in g.edges]
        c = canonical_term(1, g.n_internal, edges, ICG)
        if c is not None:
            out.accumulate(c[0], coeff * c[1])
    return out


# ---------------------------------------------------------------------------
# operadic insertion
# ---------------------------------------------------------------------------


def _insert_graph(ga: AdmissibleGraph, j, gb: AdmissibleGraph, flavor, out, coeff):
    """Accumulate all reconnections of gb into vertex j of ga.

    For GRAPHS/ICG the target is the external vertex j and gb's externals are
    spliced into the external labels; for GC2 every vertex is plain and gb's
    vertices are appended.  Host edges keep their positions, guest edges
    follow.
    """
    if flavor == GC2:
        na = nb = 0
        iva, ivb = ga.n_internal, gb.n_internal
        res_n = 0
        res_iv = iva + ivb - 1

        def map_a(v):
            return v - 1 if v > j else v

        def map_b(v):
            return iva - 1 + v

    else:
        na, nb = ga.n_external, gb.n_external
        iva, ivb = ga.n_internal, gb.n_internal
        res_n = na + nb - 1
        res_iv = iva + ivb

        def map_a(v):
            if v <= na:  # external of the host
                return v if v < j else v + nb - 1
            return res_n + (v - na)  # internals of the host come first

        def map_b(v):
            if v <= nb:
                return j + v - 1
            return res_n + iva + (v - nb)

    targets = [map_b(v) for v in range(1, gb.n_external + gb.n_internal + 1)]
    loose = _edges_at(ga.edges, j)

    def rec(idx, edges):
        if idx == len(loose):
            guest = [(map_b(a), map_b(b)) for a, b in gb.edges]
            c = canonical_term(res_n, res_iv, edges + guest, flavor)
            if c is not None:
                out.accumulate(c[0], coeff * c[1])
            return
        i = loose[idx]
        oa, ob = ga.edges[i]
        keep = ob if oa == j else oa
        for t in targets:
            nxt = list(edges)
            nxt[i] = (map_a(keep), t)
            rec(idx + 1, nxt)

    base = [(map_a(a), map_a(b)) for a, b in ga.edges]
    rec(0, base)


def operadic_insert(a: GraphSum, j: int, b: GraphSum) -> GraphSum:
    """Operadic composition a o_j b for matching flavors (GRAPHS/ICG or GC2)."""
    if a.flavor != b.flavor:
        raise GraphError("operadic insertion needs matching flavors")
    flavor = a.flavor
    if flavor == GC2:
        res_n = 0
    else:
        if not 1 <= j <= a.n_external:
            raise GraphError(f"insertion slot {j} out of range")
        res_n = a.n_external + b.n_external - 1
    out = GraphSum.zero(flavor, res_n)
    for cga, ca in a.terms.items():
        if flavor == GC2 and not 1 <= j <= cga.n_internal:
            raise GraphError(f"insertion slot {j} out of range")
        for cgb, cb in b.terms.items():
            _insert_graph(cga.graph, j, cgb.graph, flavor, out, ca * cb)
    return out


def insert_internal(a: GraphSum, v: int, gamma: GraphSum) -> GraphSum:
    """Insert a GC2 sum at the internal vertex labeled ``v`` of every term of ``a``."""
    if gamma.flavor != GC2:
        raise GraphError("insert_internal expects a GC2 guest")
    if a.flavor not in (ICG, GRAPHS):
        raise GraphError("insert_internal host must be ICG or GRAPHS")
    out = GraphSum.zero(a.flavor, a.n_external)
    for cga, ca in a.terms.items():
        ga = cga.graph
        if not ga.n_external < v <= ga.n_external + ga.n_internal:
            raise GraphError(f"vertex {v} is not internal in every term")
        for cgg, cgamma in gamma.terms.items():
            _insert_internal_graph(ga, v, cgg.graph, a.flavor, out, ca * cgamma)
    return out


def _insert_internal_graph(ga, v, gg, flavor, out, coeff):
    na, iva = ga.n_external, ga.n_internal
    ivg = gg.n_internal
    res_iv = iva - 1 + ivg

    def map_a(w):
        return w - 1 if w > v else w

    def map_g(w):
        return na + iva - 1 + w

    targets = [map_g(w) for w in range(1, ivg + 1)]
    incident = set(_edges_at(ga.edges, v))
    loose = sorted(incident)

    def rec(idx, edges):
        if idx == len(loose):
            guest = [(map_g(a), map_g(b)) for a, b in gg.edges]
            c = canonical_term(na, res_iv, edges + guest, flavor)
            if c is not None:
                out.accumulate(c[0], coeff * c[1])
            return
        i = loose[idx]
        oa, ob = ga.edges[i]
        keep = ob if oa == v else oa
        for t in targets:
            nxt = list(edges)
            nxt[i] = (map_a(keep), t)
            rec(idx + 1, nxt)

    base = [(map_a(a), map_a(b)) for a, b in ga.edges]
    rec(0, base)


def insert_internal_all(a: GraphSum, gamma: GraphSum) -> GraphSum:
    """Sum of insert_internal over every internal vertex of every term."""
    if gamma.flavor != GC2:
        raise GraphError("insert_internal expects a GC2 guest")
    out = GraphSum.zero(a.flavor, a.n_external)
    for cga, ca in a.terms.items():
        ga = cga.graph
        for v in range(ga.n_external + 1, ga.n_external + ga.n_internal + 1):
            for cgg, cgamma in gamma.terms.items():
                _insert_internal_graph(ga, v, cgg.graph, a.flavor, out, ca * cgamma)
    return out


# ---------------------------------------------------------------------------
# GC2 bracket, marking maps, action
# ---------------------------------------------------------------------------


def _single(flavor, cg, coeff=Fraction(1)):
    return GraphSum(flavor, cg.n_external, {cg: coeff})


def gc2_pre_lie(g1: GraphSum, g2: GraphSum) -> GraphSum:
    """Pre-Lie product: sum of insertions of g2 at every vertex of g1."""
    if g1.flavor != GC2 or g2.flavor != GC2:
        raise GraphError("pre-Lie product expects GC2 sums")
    out = GraphSum.zero(GC2, 0)
    for cg1, c1 in g1.terms.items():
        part = _single(GC2, cg1, c1)
        for j in range(1, cg1.n_internal + 1):
            out = out + operadic_insert(part, j, g2)
    return out


def gc2_bracket(g1: GraphSum, g2: GraphSum) -> GraphSum:
    """Graded commutator of the pre-Lie product, degree-homogeneous piecewise."""
    if g1.flavor != GC2 or g2.flavor != GC2:
        raise GraphError("bracket expects GC2 sums")
    out = GraphSum.zero(GC2, 0)
    for cg1, c1 in g1.terms.items():
        d1 = degree_of(cg1.graph, GC2)
        for cg2, c2 in g2.terms.items():
            d2 = degree_of(cg2.graph, GC2)
            a = _single(GC2, cg1, c1)
            b = _single(GC2, cg2, c2)
            sign = -1 if (d1 * d2) % 2 else 1
            out = out + gc2_pre_lie(a, b) - sign * gc2_pre_lie(b, a)
    return out


def mark_one(gamma: GraphSum) -> GraphSum:
    """Mark each vertex as the external vertex once; lands in GRAPHS(1)."""
    if gamma.flavor != GC2:
        raise GraphError("mark_one expects a GC2 sum")
    out = GraphSum.zero(GRAPHS, 1)
    for cg, coeff in gamma.terms.items():
        g = cg.graph
        for v in range(1, g.n_internal + 1):

            def relabel(w):
                if w == v:
                    return 1
                return w + 1 if w < v else w

            edges = [(relabel(a), relabel(b)) for a, b in g.edges]
            c = canonical_term(1, g.n_internal - 1, edges, GRAPHS)
            if c is not None:
                out.accumulate(c[0], coeff * c[1])
    return out


def f_map(gamma: GraphSum) -> GraphSum:
    """Attach a pendant external edge to each vertex in turn; lands in ICG(1).

    The image consists of graphs with exactly one edge at the external vertex,
    the pendant edge sitting first in the order, and preserves loop order.
    """
    if gamma.flavor != GC2:
        raise GraphError("f_map expects a GC2 sum")
    out = GraphSum.zero(ICG, 1)
    for cg, coeff in gamma.terms.items():
        g = cg.graph
        for v in range(1, g.n_internal + 1):
            edges = [(1, v + 1)] + [(a + 1, b + 1) for a, b in g.edges]
            c = canonical_term(1, g.n_internal, edges, ICG)
            if c is not None:
                out.accumulate(c[0], coeff * c[1])
    return out


def dot_action(g1: GraphSum, gr: GraphSum) -> GraphSum:
    """Action of GRAPHS(1) on GRAPHS(r): g1 o_1 gr - (-1)^{deg deg} sum_j gr o_j g1."""
    if g1.flavor != GRAPHS or g1.n_external != 1:
        raise GraphError("dot action expects a GRAPHS(1) left factor")
    if gr.flavor != GRAPHS:
        raise GraphError("dot action expects a GRAPHS right factor")
    r = gr.n_external
    out = GraphSum.zero(GRAPHS, r)
    for cg1, c1 in g1.terms.items():
        d1 = degree_of(cg1.graph, GRAPHS)
        a = _single(GRAPHS, cg1, c1)
        for cgr, cr in gr.terms.items():
            dr = degree_of(cgr.graph, GRAPHS)
            b = _single(GRAPHS, cgr, cr)
            out = out + operadic_insert(a, 1, b)
            sign = -1 if (d1 * dr) % 2 else 1
            for j in range(1, r + 1):
                out = out - sign * operadic_insert(b, j, a)
    return out


def gc2_action(gamma: GraphSum, big: GraphSum) -> GraphSum:
    """gamma . big = mark_one(gamma) dot big + sum over internal-vertex insertions."""
    if gamma.flavor != GC2:
        raise GraphError("gc2_action expects a GC2 left factor")
    host = big if big.flavor == GRAPHS else big.with_flavor(GRAPHS)
    return dot_action(mark_one(gamma), host) + insert_internal_all(host, gamma)


# ---------------------------------------------------------------------------
# wedge gluing
# ---------------------------------------------------------------------------


def wedge(x1: GraphSum, x2: GraphSum) -> GraphSum:
    """Glue two arity-2 sums at their external vertices; lands in GRAPHS(2).

    Edge order: all edges of the first factor, then all edges of the second.
    """
    for x in (x1, x2):
        if x.n_external != 2 or x.flavor not in (ICG, GRAPHS):
            raise GraphError("wedge expects two arity-2 ICG/GRAPHS sums")
    out = GraphSum.zero(GRAPHS, 2)
    for cg1, c1 in x1.terms.items():
        g1 = cg1.graph
        for cg2, c2 in x2.terms.items():
            g2 = cg2.graph

            def map2(v):
                return v if v <= 2 else v + g1.n_internal

            edges = list(g1.edges) + [(map2(a), map2(b)) for a, b in g2.edges]
            c = canonical_term(2, g1.n_internal + g2.n_internal, edges, GRAPHS)
            if c is not None:
                out.accumulate(c[0], c1 * c2 * c[1])
    return out
