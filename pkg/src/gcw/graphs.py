"""Graph data model for internally connected graph complexes.

Vertices are integers.  The first ``n_external`` labels 1..n are external
(labeled, never permuted); the following ``n_internal`` labels n+1..n+iv are
internal (unlabeled, freely permutable).  Edges form an *ordered* list of
unordered vertex pairs; reordering the list by a permutation sigma multiplies
the element by (-1)^|sigma|.  Graphs with a self-loop or a parallel edge pair
represent zero and are never stored.

Three flavors share the model:

* ``ICG``    -- internally connected graphs with n external vertices,
* ``GRAPHS`` -- all admissible graphs with n external vertices,
* ``GC2``    -- connected graphs, no external vertices, all valences >= 3.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

ICG = "ICG"
GRAPHS = "GRAPHS"
GC2 = "GC2"
FLAVORS = (ICG, GRAPHS, GC2)

#: default ceiling on edge counts accepted by the enumerator
DEFAULT_EDGE_BUDGET = 16
#: default ceiling on raw candidate subsets inspected by the enumerator
DEFAULT_CANDIDATE_BUDGET = 5_000_000


class GraphError(ValueError):
    """Raised for structurally malformed graphs (self-loop, parallel edge, bad label)."""


class BudgetError(RuntimeError):
    """Raised when an enumeration request exceeds the configured size budget."""


class ParseError(ValueError):
    """Raised on malformed graph/graph-sum text, with position diagnostics."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


def _norm_edge(a, b):
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class AdmissibleGraph:
    """A labeled representative: ordered edge list over vertices 1..n+iv."""

    n_external: int
    n_internal: int
    edges: tuple

    @property
    def n_vertices(self):
        return self.n_external + self.n_internal

    @property
    def n_edges(self):
        return len(self.edges)

    def is_external(self, v):
        return 1 <= v <= self.n_external

    def adjacency(self):
        adj = {v: [] for v in range(1, self.n_vertices + 1)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def validate_structure(g: AdmissibleGraph):
    """Reject self-loops, parallel edges and out-of-range labels."""
    seen = set()
    for a, b in g.edges:
        if a == b:
            raise GraphError(f"self-loop at vertex {a}")
        if not (1 <= a <= g.n_vertices and 1 <= b <= g.n_vertices):
            raise GraphError(f"edge ({a},{b}) out of range for {g.n_vertices} vertices")
        e = _norm_edge(a, b)
        if e in seen:
            raise GraphError(f"parallel edge ({e[0]},{e[1]})")
        seen.add(e)


def _has_bad_edge(n_vertices, edges):
    seen = set()
    for a, b in edges:
        if a == b or not (1 <= a <= n_vertices and 1 <= b <= n_vertices):
            return True
        e = _norm_edge(a, b)
        if e in seen:
            return True
        seen.add(e)
    return False


def _components(vertices, edges):
    """Connected components of the subgraph spanned by ``vertices``."""
    vs = set(vertices)
    adj = {v: [] for v in vs}
    for a, b in edges:
        if a in vs and b in vs:
            adj[a].append(b)
            adj[b].append(a)
    comps = []
    todo = set(vs)
    while todo:
        start = min(todo)
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        todo -= comp
        comps.append(comp)
    return comps


def internal_loop_order(g: AdmissibleGraph):
    """First Betti number of the internal subgraph (all vertices for GC2-style graphs)."""
    internals = range(g.n_external + 1, g.n_vertices + 1)
    e_int = sum(1 for a, b in g.edges if a > g.n_external and b > g.n_external)
    comps = _components(internals, g.edges)
    return e_int - g.n_internal + len(comps)


def aux_grade(g: AdmissibleGraph):
    """#edges - #internal vertices; preserved by both differentials."""
    return g.n_edges - g.n_internal


def is_admissible(g: AdmissibleGraph, flavor):
    """Flavor membership test: valence, connectivity and connectedness constraints.

    Structural problems (self-loop, parallel edge) must be ruled out first;
    this predicate only decides whether a clean graph spans the flavor.
    """
    n, iv = g.n_external, g.n_internal
    adj = g.adjacency()
    if flavor == GC2:
        if n != 0 or iv == 0:
            return False
        if any(len(adj[v]) < 3 for v in range(1, iv + 1)):
            return False
        return len(_components(range(1, iv + 1), g.edges)) == 1
    internals = list(range(n + 1, g.n_vertices + 1))
    if any(len(adj[v]) < 3 for v in internals):
        return False
    ext_ext = [e for e in g.edges if e[0] <= n and e[1] <= n]
    comps = _components(internals, g.edges)
    # every internal component must reach an external vertex through a leg
    for comp in comps:
        if not any((a in comp) != (b in comp) for a, b in g.edges):
            return False
    if flavor == GRAPHS:
        return True
    if flavor == ICG:
        # exactly one internally connected constituent: either a single
        # internal component carrying all edges, or a lone external-external edge
        if iv == 0:
            return len(ext_ext) == 1 and g.n_edges == 1
        return len(comps) == 1 and not ext_ext
    raise ValueError(f"unknown flavor {flavor!r}")


# ---------------------------------------------------------------------------
# canonical labeling
# ---------------------------------------------------------------------------
#
# External vertices are singleton color classes; internal vertices start in a
# single class.  Colors are refined by neighbor-color multisets to a fixpoint;
# non-discrete partitions branch on the first non-singleton cell.  Among all
# discrete leaves the lexicographically smallest relabeled edge set is the
# canonical form, and the leaves attaining it describe the automorphism group.


def _refine(n_vertices, adj, colors):
    while True:
        sigs = []
        for v in range(1, n_vertices + 1):
            sigs.append((colors[v - 1], tuple(sorted(colors[w - 1] for w in adj[v]))))
        order = sorted(set(sigs))
        rank = {s: i for i, s in enumerate(order)}
        new = tuple(rank[s] for s in sigs)
        if new == colors:
            return colors
        colors = new


def _cells(colors):
    by_color = {}
    for v, c in enumerate(colors, start=1):
        by_color.setdefault(c, []).append(v)
    return [by_color[c] for c in sorted(by_color)]


@functools.lru_cache(maxsize=1 << 18)
def _canonical_data(n_external, n_internal, edge_key):
    """Canonical relabeling of the internal vertices.

    Returns ``(canon_edges, labelings)`` where ``canon_edges`` is the sorted
    tuple of edges under an optimal labeling and ``labelings`` collects every
    optimal map vertex -> canonical label (one per automorphism).
    """
    n_vertices = n_external + n_internal
    adj = {v: [] for v in range(1, n_vertices + 1)}
    for a, b in edge_key:
        adj[a].append(b)
        adj[b].append(a)
    init = tuple(range(n_external)) + (n_external,) * n_internal
    best = [None]
    leaves = []

    def labeling_from(colors):
        # externals keep their labels; internals follow their color rank
        order = sorted(range(n_external + 1, n_vertices + 1), key=lambda v: colors[v - 1])
        lab = list(range(n_vertices + 1))
        for i, v in enumerate(order):
            lab[v] = n_external + 1 + i
        return lab

    def rec(colors):
        colors = _refine(n_vertices, adj, colors)
        cells = _cells(colors)
        target = None
        for cell in cells:
            if len(cell) > 1:
                target = cell
                break
        if target is None:
            lab = labeling_from(colors)
            enc = tuple(sorted(_norm_edge(lab[a], lab[b]) for a, b in edge_key))
            if best[0] is None or enc < best[0]:
                best[0] = enc
                leaves.clear()
                leaves.append(tuple(lab))
            elif enc == best[0]:
                leaves.append(tuple(lab))
            return
        base = max(colors) + 1
        for v in target:
            nxt = list(colors)
            nxt[v - 1] = base
            rec(tuple(nxt))

    rec(init)
    return best[0], tuple(sorted(set(leaves)))


def _perm_parity(perm):
    """Parity (+1/-1) of a permutation given as a list of images of 0..k-1."""
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True, order=True)
class CanonicalGraph:
    """An AdmissibleGraph in canonical labeled form; usable as a dict key."""

    n_external: int
    n_internal: int
    edges: tuple

    @property
    def graph(self):
        return AdmissibleGraph(self.n_external, self.n_internal, self.edges)

    @property
    def n_edges(self):
        return len(self.edges)

    def loop_order(self):
        return internal_loop_order(self.graph)

    def aux_grade(self):
        return aux_grade(self.graph)


def canonicalize(g: AdmissibleGraph):
    """Canonical form of ``g`` with the edge-order sign.

    Returns ``(CanonicalGraph, sign)`` or ``None`` when some automorphism
    induces an odd permutation of the edges, in which case the graph is its
    own negative and represents zero.  Raises :class:`GraphError` on
    self-loops or parallel edges.
    """
    validate_structure(g)
    edge_key = tuple(sorted(_norm_edge(a, b) for a, b in g.edges))
    canon_edges, labelings = _canonical_data(g.n_external, g.n_internal, edge_key)
    lab0 = labelings[0]
    pos = {e: i for i, e in enumerate(canon_edges)}
    # sign: permutation taking the relabeled input order to the canonical order
    perm = [pos[_norm_edge(lab0[a], lab0[b])] for a, b in g.edges]
    sign = _perm_parity(perm)
    if len(labelings) > 1:
        inv0 = [0] * (g.n_vertices + 1)
        for v in range(1, g.n_vertices + 1):
            inv0[lab0[v]] = v
        for lab in labelings[1:]:
            aut_perm = [pos[_norm_edge(lab[inv0[a]], lab[inv0[b]])] for a, b in canon_edges]
            if _perm_parity(aut_perm) < 0:
                return None
    return CanonicalGraph(g.n_external, g.n_internal, canon_edges), sign


def canonical_term(n_external, n_internal, edges, flavor):
    """Gatekeeper used by the operations: drop zero and off-flavor terms.

    Returns ``(CanonicalGraph, sign)`` or ``None``.  Terms with self-loops or
    parallel edges are the zero class, not errors.
    """
    n_vertices = n_external + n_internal
    if _has_bad_edge(n_vertices, edges):
        return None
    g = AdmissibleGraph(n_external, n_internal, tuple(edges))
    if not is_admissible(g, flavor):
        return None
    return canonicalize(g)


# ---------------------------------------------------------------------------
# grading
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedTag:
    flavor: str
    degree: int
    internal_loops: int
    aux_grade: int


def degree_of(g: AdmissibleGraph, flavor):
    e, iv = g.n_edges, g.n_internal
    if flavor == ICG:
        return 1 - e + 2 * iv
    if flavor == GRAPHS:
        return e - 2 * iv
    if flavor == GC2:
        return -2 - e + 2 * iv
    raise ValueError(f"unknown flavor {flavor!r}")


def grading(g, flavor):
    if isinstance(g, CanonicalGraph):
        g = g.graph
    return GradedTag(flavor, degree_of(g, flavor), internal_loop_order(g), aux_grade(g))


def slice_for(flavor, n, degree, aux):
    """Invert the degree/aux-grade relations to (n_internal, n_edges).

    Returns ``None`` when no graph can carry the requested grading.
    """
    if aux < 0:
        return None
    if flavor == ICG:
        iv = degree + aux - 1
        e = aux + iv
    elif flavor == GRAPHS:
        iv = aux - degree
        e = aux + iv
    elif flavor == GC2:
        iv = degree + aux + 2
        e = aux + iv
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    if iv < 0 or e < 0:
        return None
    return iv, e


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

_RECORD_RE = re.compile(
    r"^\s*(ICG|GRAPHS|GC2)\s+n\s*=\s*(\d+)\s+iv\s*=\s*(\d+)\s*;\s*((?:\(\s*\d+\s*,\s*\d+\s*\)\s*)*)$"
)
_PAIR_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)")
_COEFF_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def serialize_graph(g, flavor):
    if isinstance(g, CanonicalGraph):
        g = g.graph
    body = "".join(f"({a},{b})" for a, b in g.edges)
    return f"{flavor} n={g.n_external} iv={g.n_internal} ; {body}"


def parse_graph(text, line=None):
    """Parse one graph record to ``(flavor, AdmissibleGraph)``."""
    m = _RECORD_RE.match(text)
    if not m:
        raise ParseError(f"malformed graph record: {text.strip()!r}", line=line)
    flavor = m.group(1)
    n, iv = int(m.group(2)), int(m.group(3))
    edges = tuple((int(a), int(b)) for a, b in _PAIR_RE.findall(m.group(4)))
    g = AdmissibleGraph(n, iv, edges)
    try:
        validate_structure(g)
    except GraphError as exc:
        raise ParseError(str(exc), line=line) from exc
    return flavor, g


def format_coeff(c: Fraction):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_coeff(text, line=None):
    m = _COEFF_RE.match(text)
    if not m:
        raise ParseError(f"malformed coefficient: {text.strip()!r}", line=line)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError("zero denominator", line=line)
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# graph sums
# ---------------------------------------------------------------------------


class GraphSum:
    """Finite rational linear combination of canonical graphs of one flavor/arity."""

    __slots__ = ("flavor", "n_external", "terms")

    def __init__(self, flavor, n_external, terms=None):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        self.flavor = flavor
        self.n_external = n_external
        self.terms = {}
        if terms:
            for cg, coeff in terms.items():
                if coeff == 0:
                    continue
                if cg.n_external != n_external:
                    raise GraphError("mixed arities in one sum")
                self.terms[cg] = Fraction(coeff)

    @classmethod
    def zero(cls, flavor, n_external):
        return cls(flavor, n_external)

    @classmethod
    def from_graph(cls, g: AdmissibleGraph, flavor, coeff=1):
        """Canonicalize one representative; zero-class graphs give the zero sum."""
        if not is_admissible(g, flavor):
            raise GraphError("graph is not admissible for flavor " + flavor)
        c = canonicalize(g)
        if c is None:
            return cls.zero(flavor, g.n_external)
        cg, sign = c
        return cls(flavor, g.n_external, {cg: Fraction(coeff) * sign})

    def accumulate(self, cg, coeff):
        # internal helper for the operation kernels; keeps the no-zeros invariant
        cur = self.terms.get(cg)
        new = (cur + coeff) if cur is not None else Fraction(coeff)
        if new == 0:
            self.terms.pop(cg, None)
        else:
            self.terms[cg] = new

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def coeff(self, cg):
        return self.terms.get(cg, Fraction(0))

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.items())

    def _check_compatible(self, other):
        if self.flavor != other.flavor or self.n_external != other.n_external:
            raise GraphError(
                f"flavor/arity mismatch: {self.flavor}({self.n_external}) vs "
                f"{other.flavor}({other.n_external})"
            )

    def __add__(self, other):
        self._check_compatible(other)
        out = GraphSum(self.flavor, self.n_external, self.terms)
        for cg, c in other.terms.items():
            out.accumulate(cg, c)
        return out

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        if s == 0:
            return GraphSum.zero(self.flavor, self.n_external)
        return GraphSum(self.flavor, self.n_external, {cg: c * s for cg, c in self.terms.items()})

    def __mul__(self, scalar):
        return self.__rmul__(scalar)

    def __eq__(self, other):
        return (
            isinstance(other, GraphSum)
            and self.flavor == other.flavor
            and self.n_external == other.n_external
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("GraphSum is not hashable")

    def __repr__(self):
        if self.is_zero():
            return f"GraphSum({self.flavor}, n={self.n_external}, 0)"
        return "GraphSum[" + "; ".join(
            f"{format_coeff(c)} {serialize_graph(cg, self.flavor)}" for cg, c in self.items()
        ) + "]"

    def with_flavor(self, flavor):
        """Reinterpret the same graphs in another flavor, dropping off-flavor terms."""
        out = GraphSum.zero(flavor, self.n_external)
        for cg, c in self.terms.items():
            if is_admissible(cg.graph, flavor):
                out.accumulate(cg, c)
        return out

    def restrict_loops(self, predicate):
        return GraphSum(
            self.flavor,
            self.n_external,
            {cg: c for cg, c in self.terms.items() if predicate(cg.loop_order())},
        )

    def loop_component(self, ell):
        return self.restrict_loops(lambda l: l == ell)

    def loop_split(self):
        """Map loop order -> homogeneous component (the LoopGradedSum view)."""
        out = {}
        for cg, c in self.terms.items():
            out.setdefault(cg.loop_order(), GraphSum.zero(self.flavor, self.n_external)).accumulate(cg, c)
        return dict(sorted(out.items()))

    def aux_split(self):
        out = {}
        for cg, c in self.terms.items():
            out.setdefault(cg.aux_grade(), GraphSum.zero(self.flavor, self.n_external)).accumulate(cg, c)
        return dict(sorted(out.items()))

    def max_loop_order(self):
        return max((cg.loop_order() for cg in self.terms), default=0)

    def serialize(self):
        if self.is_zero():
            return f"0 * {self.flavor} n={self.n_external} iv=0 ;"
        return "\n".join(
            f"{format_coeff(c)} * {serialize_graph(cg, self.flavor)}" for cg, c in self.items()
        )


def parse_graph_sum(text, flavor=None, n_external=None):
    """Parse a graph-sum document (one ``coeff * record`` per line)."""
    acc = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "*" not in line:
            raise ParseError("expected 'coeff * graph-record'", line=lineno, column=1)
        coeff_text, _, record = line.partition("*")
        coeff = parse_coeff(coeff_text, line=lineno)
        fl, g = parse_graph(record, line=lineno)
        if flavor is not None and fl != flavor:
            raise ParseError(f"expected flavor {flavor}, got {fl}", line=lineno)
        if acc is None:
            acc = GraphSum.zero(fl, g.n_external)
        if g.n_external != acc.n_external or fl != acc.flavor:
            raise ParseError("mixed flavors/arities in one sum", line=lineno)
        if coeff == 0:
            continue
        if not is_admissible(g, fl):
            raise ParseError("graph is not admissible for its flavor", line=lineno)
        c = canonicalize(g)
        if c is None:
            continue
        cg, sign = c
        acc.accumulate(cg, coeff * sign)
    if acc is None:
        if flavor is None or n_external is None:
            raise ParseError("empty document needs explicit flavor and arity")
        acc = GraphSum.zero(flavor, n_external)
    return acc


# ---------------------------------------------------------------------------
# basis enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BasisSlice:
    """Complete, deterministically ordered list of basis graphs for fixed parameters."""

    flavor: str
    n_external: int
    n_internal: int
    n_edges: int
    graphs: tuple

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def index(self):
        return {cg: i for i, cg in enumerate(self.graphs)}

    def loop_orders(self):
        return tuple(cg.loop_order() for cg in self.graphs)


def _check_budget(count, budget):
    if count > budget:
        raise BudgetError(f"enumeration candidate count {count} exceeds budget {budget}")


def _internal_subgraphs(iv, e_int, connected_required, budget):
    """Distinct (up to iso) simple graphs on iv unlabeled vertices with e_int edges."""
    if iv == 0:
        return [()] if e_int == 0 else []
    pairs = list(itertools.combinations(range(1, iv + 1), 2))
    if e_int > len(pairs):
        return []
    _check_budget(math.comb(len(pairs), e_int), budget)
    seen = {}
    for subset in itertools.combinations(pairs, e_int):
        if connected_required and len(_components(range(1, iv + 1), subset)) != 1:
            continue
        key, _ = _canonical_data(0, iv, tuple(sorted(subset)))
        if key not in seen:
            seen[key] = subset
    return sorted(seen.values())


def _leg_assignments(iv, n_ext, int_degrees, legs_total, min_valence=3):
    """Yield per-internal-vertex external-neighbor sets with the given leg total."""

    def rec(v, remaining):
        if v > iv:
            if remaining == 0:
                yield []
            return
        need = max(0, min_valence - int_degrees[v])
        max_here = min(n_ext, remaining)
        if need > max_here:
            return
        # upper bound prune: the rest can absorb at most n_ext legs each
        if remaining - max_here > (iv - v) * n_ext:
            return
        for k in range(need, max_here + 1):
            for subset in itertools.combinations(range(1, n_ext + 1), k):
                for rest in rec(v + 1, remaining - k):
                    yield [subset] + rest

    yield from rec(1, legs_total)


def enumerate_basis(
    flavor,
    n_external,
    n_internal,
    n_edges,
    edge_budget=DEFAULT_EDGE_BUDGET,
    candidate_budget=DEFAULT_CANDIDATE_BUDGET,
):
    """Materialize the complete basis slice for the given parameters.

    Zero-class graphs (odd edge-permutation automorphism) are excluded.  The
    ordering is lexicographic on the serialized canonical form, so indices are
    reproducible across runs.
    """
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    if n_external < 0 or n_internal < 0 or n_edges < 0:
        raise ValueError("negative slice parameter")
    if n_edges > edge_budget:
        raise BudgetError(f"edge count {n_edges} exceeds budget {edge_budget}")
    if flavor == GC2 and n_external != 0:
        raise GraphError("GC2 graphs carry no external vertices")

    found = set()
    n, iv, e = n_external, n_internal, n_edges
    if 3 * iv > 2 * e:
        return BasisSlice(flavor, n, iv, e, ())

    if flavor == GC2:
        for sub in _internal_subgraphs(iv, e, True, candidate_budget):
            g = AdmissibleGraph(0, iv, tuple(sub))
            if not is_admissible(g, GC2):
                continue
            c = canonicalize(g)
            if c is not None:
                found.add(c[0])
    else:
        ext_pairs = list(itertools.combinations(range(1, n + 1), 2))
        if flavor == ICG:
            ee_range = [1] if (iv == 0 and e == 1) else [0] if iv > 0 else []
        else:
            ee_range = range(0, min(len(ext_pairs), e) + 1)
        for e_ee in ee_range:
            for ee_set in itertools.combinations(ext_pairs, e_ee):
                e_rem = e - e_ee
                lo = max(0, 3 * iv - e_rem, iv - 1 if (flavor == ICG and iv > 0) else 0)
                hi = min(math.comb(iv, 2), e_rem) if iv else 0
                if iv == 0 and e_rem != 0:
                    continue
                for e_int in range(lo, hi + 1) if iv else [0]:
                    legs = e_rem - e_int
                    if legs < 0 or legs > n * iv:
                        continue
                    if flavor == ICG and iv > 0 and legs == 0:
                        continue
                    connected_req = flavor == ICG
                    for sub in _internal_subgraphs(iv, e_int, connected_req, candidate_budget):
                        shifted = tuple((a + n, b + n) for a, b in sub)
                        degs = {v: 0 for v in range(1, iv + 1)}
                        for a, b in sub:
                            degs[a] += 1
                            degs[b] += 1
                        for assign in _leg_assignments(iv, n, degs, legs):
                            edges = list(ee_set) + list(shifted)
                            for v, exts in enumerate(assign, start=1):
                                for x in exts:
                                    edges.append((x, v + n))
                            g = AdmissibleGraph(n, iv, tuple(edges))
                            if not is_admissible(g, flavor):
                                continue
                            c = canonicalize(g)
                            if c is not None:
                                found.add(c[0])
    ordered = tuple(sorted(found, key=lambda cg: serialize_graph(cg, flavor)))
    return BasisSlice(flavor, n, iv, e, ordered)


def basis_for_grading(flavor, n, degree, aux, **kw):
    """Basis slice addressed by (degree, aux grade) instead of (iv, e)."""
    p = slice_for(flavor, n, degree, aux)
    if p is None:
        return BasisSlice(flavor, n, 0, 0, ())
    iv, e = p
    return enumerate_basis(flavor, n, iv, e, **kw)
