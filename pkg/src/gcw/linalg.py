"""Exact sparse linear algebra over rationals, matrix assembly, cohomology.

Everything is arbitrary-precision rational; there is no floating-point path.
Elimination uses Markowitz-style pivot selection (least fill-in estimate,
deterministic tie-break) so results are bit-identical across runs.
"""

from __future__ import annotations

from fractions import Fraction

from .graphs import BasisSlice, GraphSum, ParseError


class AssemblyError(ValueError):
    """An operation produced a term that the destination slice cannot index."""


class InvariantError(RuntimeError):
    """A validated chain-complex invariant (e.g. d*d = 0) failed to hold."""


class SparseRationalMatrix:
    """Immutable-by-convention sparse matrix with no stored zeros."""

    __slots__ = ("nrows", "ncols", "entries", "row_labels", "col_labels")

    def __init__(self, nrows, ncols, entries=None, row_labels=None, col_labels=None):
        if row_labels is not None and len(row_labels) != nrows:
            raise ValueError("row label count does not match rows")
        if col_labels is not None and len(col_labels) != ncols:
            raise ValueError("column label count does not match columns")
        self.nrows = nrows
        self.ncols = ncols
        self.row_labels = tuple(row_labels) if row_labels is not None else None
        self.col_labels = tuple(col_labels) if col_labels is not None else None
        self.entries = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise ValueError(f"entry ({i},{j}) out of shape {nrows}x{ncols}")
                v = Fraction(v)
                if v != 0:
                    self.entries[(i, j)] = v

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): Fraction(1) for i in range(n)})

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols)

    @classmethod
    def from_columns(cls, nrows, columns):
        entries = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v != 0:
                    entries[(i, j)] = Fraction(v)
        return cls(nrows, len(columns), entries)

    def __getitem__(self, ij):
        return self.entries.get(ij, Fraction(0))

    def is_zero(self):
        return not self.entries

    def nnz(self):
        return len(self.entries)

    def transpose(self):
        return SparseRationalMatrix(
            self.ncols,
            self.nrows,
            {(j, i): v for (i, j), v in self.entries.items()},
            row_labels=self.col_labels,
            col_labels=self.row_labels,
        )

    def __add__(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        entries = dict(self.entries)
        for ij, v in other.entries.items():
            w = entries.get(ij, Fraction(0)) + v
            if w == 0:
                entries.pop(ij, None)
            else:
                entries[ij] = w
        return SparseRationalMatrix(self.nrows, self.ncols, entries)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        return SparseRationalMatrix(
            self.nrows, self.ncols, {ij: s * v for ij, v in self.entries.items()}
        )

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        by_row = {}
        for (i, k), v in other.entries.items():
            by_row.setdefault(i, []).append((k, v))
        entries = {}
        for (i, j), v in self.entries.items():
            for k, w in by_row.get(j, ()):
                ij = (i, k)
                acc = entries.get(ij, Fraction(0)) + v * w
                if acc == 0:
                    entries.pop(ij, None)
                else:
                    entries[ij] = acc
        return SparseRationalMatrix(self.nrows, other.ncols, entries)

    def apply(self, vec):
        """Matrix-vector product; vectors are sparse dicts index -> Fraction."""
        out = {}
        for (i, j), v in self.entries.items():
            c = vec.get(j)
            if c:
                acc = out.get(i, Fraction(0)) + v * c
                if acc == 0:
                    out.pop(i, None)
                else:
                    out[i] = acc
        return out

    def __eq__(self, other):
        return (
            isinstance(other, SparseRationalMatrix)
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"SparseRationalMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"

    def restrict(self, rows=None, cols=None):
        """Submatrix on the given row/column index sequences (None keeps all)."""
        rows = list(range(self.nrows)) if rows is None else list(rows)
        cols = list(range(self.ncols)) if cols is None else list(cols)
        rmap = {r: i for i, r in enumerate(rows)}
        cmap = {c: j for j, c in enumerate(cols)}
        entries = {}
        for (i, j), v in self.entries.items():
            if i in rmap and j in cmap:
                entries[(rmap[i], cmap[j])] = v
        return SparseRationalMatrix(len(rows), len(cols), entries)

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise ValueError("shape mismatch")
        entries = dict(self.entries)
        for (i, j), v in other.entries.items():
            entries[(i, j + self.ncols)] = v
        return SparseRationalMatrix(self.nrows, self.ncols + other.ncols, entries)

    # -- elimination -------------------------------------------------------

    def _echelon(self, forbidden_cols=frozenset()):
        """Gaussian elimination with Markowitz pivoting.

        Pivots are never chosen in ``forbidden_cols`` (used for augmented
        right-hand sides).  Returns (pivots, rows, leftover) where pivots is
        the list of (row_key, col) in elimination order, rows maps row_key to
        its reduced sparse row and leftover lists the nonzero rows that could
        not be pivoted (they are supported on forbidden columns only).
        Deterministic.
        """
        rows = {}
        for (i, j), v in self.entries.items():
            rows.setdefault(i, {})[j] = v
        col_count = {}
        for r in rows.values():
            for j in r:
                col_count[j] = col_count.get(j, 0) + 1
        active_rows = set(rows)
        pivots = []
        while True:
            best = None
            pick = None
            for i in active_rows:
                r = rows[i]
                for j in r:
                    if j in forbidden_cols:
                        continue
                    score = ((len(r) - 1) * (col_count[j] - 1), i, j)
                    if best is None or score < best:
                        best = score
                        pick = (i, j)
            if pick is None:
                break
            pi, pj = pick
            pivots.append((pi, pj))
            active_rows.discard(pi)
            prow = rows[pi]
            pval = prow[pj]
            for i in list(active_rows):
                r = rows[i]
                f = r.get(pj)
                if not f:
                    continue
                factor = f / pval
                for j, v in prow.items():
                    w = r.get(j, Fraction(0)) - factor * v
                    if w == 0:
                        if j in r:
                            del r[j]
                            col_count[j] -= 1
                    else:
                        if j not in r:
                            col_count[j] = col_count.get(j, 0) + 1
                        r[j] = w
            # pivot row leaves the active set; keep counts consistent
            for j in prow:
                col_count[j] -= 1
        leftover = [rows[i] for i in sorted(active_rows) if rows[i]]
        return pivots, rows, leftover

    def rank(self):
        pivots, _, _ = self._echelon()
        return len(pivots)

    def _rref(self, forbidden_cols=frozenset()):
        """Reduced rows: list of (pivot_col, row) with unit pivots, sorted by
        pivot column, every pivot column cleared from every other row."""
        pivots, rows, leftover = self._echelon(forbidden_cols)
        work = sorted((pj, dict(rows[pi])) for pi, pj in pivots)
        for idx in range(len(work)):
            pj, row = work[idx]
            pval = row[pj]
            if pval != 1:
                for j in list(row):
                    row[j] /= pval
            for k in range(len(work)):
                if k == idx:
                    continue
                other = work[k][1]
                f = other.get(pj)
                if not f:
                    continue
                for j, v in row.items():
                    w = other.get(j, Fraction(0)) - f * v
                    if w == 0:
                        other.pop(j, None)
                    else:
                        other[j] = w
        return work, leftover

    def rref(self):
        work, _ = self._rref()
        return work

    def kernel_basis(self):
        """Deterministic null-space basis, one vector per free column."""
        work = self.rref()
        pivot_set = {pj for pj, _ in work}
        basis = []
        for j in range(self.ncols):
            if j in pivot_set:
                continue
            vec = {j: Fraction(1)}
            for pj, row in work:
                v = row.get(j)
                if v:
                    vec[pj] = -v
            basis.append(vec)
        return basis

    def solve(self, b):
        """A particular solution of M x = b (free variables zero), or None.

        ``b`` is a sparse dict.  None signals inconsistency, which callers
        treat as a meaningful negative, not a failure.
        """
        aug_col = self.ncols
        aug = SparseRationalMatrix(
            self.nrows,
            self.ncols + 1,
            dict(self.entries)
            | {(i, aug_col): Fraction(v) for i, v in b.items() if v != 0},
        )
        work, leftover = aug._rref(forbidden_cols=frozenset({aug_col}))
        if any(row.get(aug_col) for row in leftover):
            return None
        sol = {}
        for pj, row in work:
            rhs = row.get(aug_col)
            if rhs:
                sol[pj] = rhs
        return sol

    # -- text dump ---------------------------------------------------------

    def to_dump_text(self):
        lines = [f"{self.nrows} {self.ncols}"]
        for (i, j) in sorted(self.entries):
            v = self.entries[(i, j)]
            lines.append(f"{i} {j} {v.numerator}/{v.denominator}")
        return "\n".join(lines)

    @classmethod
    def from_dump_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ParseError("empty matrix dump")
        try:
            nrows, ncols = map(int, lines[0].split())
        except ValueError as exc:
            raise ParseError("malformed matrix header", line=1) from exc
        entries = {}
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split()
            try:
                i, j = int(parts[0]), int(parts[1])
                num, den = parts[2].split("/")
                entries[(i, j)] = Fraction(int(num), int(den))
            except (IndexError, ValueError, ZeroDivisionError) as exc:
                raise ParseError("malformed matrix entry", line=lineno) from exc
        return cls(nrows, ncols, entries)


def vec_is_zero(vec):
    return all(v == 0 for v in vec.values())


def vec_sub(a, b):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, Fraction(0)) - v
        if w == 0:
            out.pop(k, None)
        else:
            out[k] = w
    return out


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def sum_to_vector(s: GraphSum, dst: BasisSlice, index=None):
    """Coordinates of a graph sum in a basis slice; unindexable terms error."""
    idx = index if index is not None else dst.index()
    vec = {}
    for cg, c in s.terms.items():
        if cg not in idx:
            raise AssemblyError(f"term outside destination slice: {cg}")
        vec[idx[cg]] = c
    return vec


def vector_to_sum(vec, src: BasisSlice):
    out = GraphSum.zero(src.flavor, src.n_external)
    for i, c in vec.items():
        out.accumulate(src.graphs[i], c)
    return out


def assemble(op, src: BasisSlice, dst: BasisSlice):
    """Matrix of a linear operation between two basis slices.

    Column j holds the coordinates of op(basis[j]); any output term missing
    from dst raises :class:`AssemblyError` rather than being dropped.
    """
    idx = dst.index()
    cols = []
    for cg in src.graphs:
        s = GraphSum(src.flavor, src.n_external, {cg: Fraction(1)})
        cols.append(sum_to_vector(op(s), dst, idx))
    return SparseRationalMatrix.from_columns(len(dst), cols)


# ---------------------------------------------------------------------------
# chain complexes per grading slice
# ---------------------------------------------------------------------------


class ComplexSlice:
    """A finite chain of basis slices with differential matrices between them.

    Degrees run over a contiguous integer range; matrix[i] maps degree
    degrees[i] to degrees[i]+1.  Consecutive matrices must compose to zero.
    """

    def __init__(self, degrees, slices, matrices, validate=True):
        if len(slices) != len(degrees) or len(matrices) != len(degrees) - 1:
            raise ValueError("inconsistent chain lengths")
        self.degrees = list(degrees)
        self.slices = list(slices)
        self.matrices = list(matrices)
        if validate:
            for a, b in zip(self.matrices, self.matrices[1:]):
                if not (b @ a).is_zero():
                    raise InvariantError("differential does not square to zero")

    def dim(self, degree):
        if degree not in self.degrees:
            return 0
        return len(self.slices[self.degrees.index(degree)])

    def matrix_from(self, degree):
        i = self.degrees.index(degree)
        if i + 1 >= len(self.slices):
            return None
        return self.matrices[i]

    def cohomology_dim(self, degree):
        """dim ker(d at degree) - dim im(d into degree), exactly."""
        if degree not in self.degrees:
            return 0
        i = self.degrees.index(degree)
        n = len(self.slices[i])
        out_rank = self.matrices[i].rank() if i < len(self.matrices) else 0
        in_rank = self.matrices[i - 1].rank() if i > 0 else 0
        return n - out_rank - in_rank

    def euler_characteristic(self):
        sign = lambda d: 1 if d % 2 == 0 else -1
        return sum(sign(d) * self.dim(d) for d in self.degrees)


def cohomology_dim(chain: ComplexSlice, degree):
    return chain.cohomology_dim(degree)


# ---------------------------------------------------------------------------
# graded slices of the graph complexes
# ---------------------------------------------------------------------------


def degree_range(flavor, n, aux):
    """Degrees whose (iv, e) slice can be nonempty at this aux grade."""
    from .graphs import slice_for

    degs = []
    for degree in range(-3 * (aux + 2), 3 * (aux + 2) + 1):
        p = slice_for(flavor, n, degree, aux)
        if p is None:
            continue
        iv, e = p
        if 3 * iv <= 2 * e:
            degs.append(degree)
    return degs


def build_complex_slice(flavor, n, aux, validate=True, **kw):
    """The (flavor, n, aux)-homogeneous finite complex under the splitting differential."""
    from .graphs import basis_for_grading
    from .ops import differential_d

    degs = degree_range(flavor, n, aux)
    if not degs:
        return ComplexSlice([0], [basis_for_grading(flavor, n, 10**6, -1)], [], validate=False)
    degs = list(range(min(degs), max(degs) + 2))  # pad one degree for the top map
    slices = [basis_for_grading(flavor, n, d, aux, **kw) for d in degs]
    mats = [assemble(differential_d, slices[i], slices[i + 1]) for i in range(len(degs) - 1)]
    return ComplexSlice(degs, slices, mats, validate=validate)


def _loop_mask(slice_, predicate):
    return [i for i, l in enumerate(slice_.loop_orders()) if predicate(l)]


def spectral_e1(n, p, q, aux, **kw):
    """dim of the first-page entry at (p, q): cohomology in degree p+q of the
    exactly-p-loop subquotient under the loop-preserving part of d."""
    from .graphs import basis_for_grading
    from .ops import differential_d

    degree = p + q
    mid = basis_for_grading("ICG", n, degree, aux, **kw)
    if len(mid) == 0:
        return 0
    below = basis_for_grading("ICG", n, degree - 1, aux, **kw)
    above = basis_for_grading("ICG", n, degree + 1, aux, **kw)
    rows_mid = _loop_mask(mid, lambda l: l == p)
    if not rows_mid:
        return 0
    d_out = assemble(differential_d, mid, above).restrict(
        rows=_loop_mask(above, lambda l: l == p), cols=rows_mid
    )
    rank_in = 0
    if len(below):
        d_in = assemble(differential_d, below, mid).restrict(
            rows=rows_mid, cols=_loop_mask(below, lambda l: l == p)
        )
        rank_in = d_in.rank()
    return len(rows_mid) - d_out.rank() - rank_in


def _span_dim(vectors):
    if not vectors:
        return 0
    cols = {}
    for j, v in enumerate(vectors):
        for i, c in v.items():
            cols[(i, j)] = c
    m = max(i for i, _ in cols) + 1
    return SparseRationalMatrix(m, len(vectors), cols).rank()


def spectral_er00(n, r, aux, **kw):
    """dim of the page-r corner entry: degree-0 elements X with dX = 0 below
    loop order r, modulo exact elements and such X supported in loops >= 1."""
    from .graphs import basis_for_grading
    from .ops import differential_d

    if r < 1:
        raise ValueError("page index must be >= 1")
    deg0 = basis_for_grading("ICG", n, 0, aux, **kw)
    if len(deg0) == 0:
        return 0
    deg1 = basis_for_grading("ICG", n, 1, aux, **kw)
    degm1 = basis_for_grading("ICG", n, -1, aux, **kw)
    d0to1 = assemble(differential_d, deg0, deg1)
    low_rows = _loop_mask(deg1, lambda l: l < r)
    trunc = d0to1.restrict(rows=low_rows)
    sol = trunc.kernel_basis()  # basis of S_r
    # the denominator: d(deg -1) plus the part of S_r supported in loops >= 1
    denom = []
    if len(degm1):
        dm1 = assemble(differential_d, degm1, deg0)
        for j in range(len(degm1)):
            col = {i: dm1[(i, j)] for i in range(len(deg0)) if dm1[(i, j)] != 0}
            if col:
                denom.append(col)
    tree_cols = set(_loop_mask(deg0, lambda l: l == 0))
    positive = trunc.restrict(cols=sorted(set(range(len(deg0))) - tree_cols))
    pos_cols = sorted(set(range(len(deg0))) - tree_cols)
    for vec in positive.kernel_basis():
        denom.append({pos_cols[i]: c for i, c in vec.items()})
    dim_sr = _span_dim(sol)
    dim_q = _span_dim(denom)
    dim_union = _span_dim(sol + denom)
    if dim_union != dim_sr:
        raise InvariantError("quotient space is not contained in the solution space")
    return dim_sr - dim_q


def gc2_complex_slice(loops, validate=True, **kw):
    """The fixed-loop-order GC2 complex over all degrees, as a ComplexSlice."""
    from .graphs import basis_for_grading
    from .ops import differential_d

    aux = loops - 1
    degs = []
    for degree in range(-2 * (loops + 2), 2 * (loops + 2) + 1):
        from .graphs import slice_for

        p = slice_for("GC2", 0, degree, aux)
        if p is not None and 3 * p[0] <= 2 * p[1] and p[0] >= 1:
            degs.append(degree)
    if not degs:
        raise ValueError(f"no GC2 content at loop order {loops}")
    degs = list(range(min(degs), max(degs) + 2))
    slices = [basis_for_grading("GC2", 0, d, aux, **kw) for d in degs]
    mats = [assemble(differential_d, slices[i], slices[i + 1]) for i in range(len(degs) - 1)]
    return ComplexSlice(degs, slices, mats, validate=validate)
