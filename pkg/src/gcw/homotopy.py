"""Homological perturbation toolkit on finite cochain complexes of rational
vector spaces.

All objects are matrices per degree.  A complex stores its differential as a
degree +1 graded map; splittings consist of a projection pi0 and a degree -1
homotopy h0 with

    pi0^2 = pi0,  Id - pi0 = d0 h0 + h0 d0,  d0 pi0 = pi0 d0 = 0,
    h0^2 = pi0 h0 = h0 pi0 = 0.

Perturbing by a filtration-raising d' yields h and pi satisfying the same
identities for d = d0 + d' via the terminating Neumann series
h = h0 - h0 d' h0 + h0 d' h0 d' h0 - ...
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import SparseRationalMatrix


class NilpotencyError(RuntimeError):
    """The perturbation series failed to terminate within the configured bound."""


class SplitError(ValueError):
    """Raised when inputs violate a splitting precondition (e.g. d0^2 != 0)."""


class GradedMap:
    """A degree-homogeneous family of matrices between the graded pieces.

    ``mats[j]`` maps degree j to degree j + shift.  Missing degrees are zero.
    """

    __slots__ = ("dims", "shift", "mats")

    def __init__(self, dims, shift, mats=None):
        self.dims = dict(dims)
        self.shift = shift
        self.mats = {}
        if mats:
            for j, m in mats.items():
                if m.nrows != self.dims.get(j + shift, 0) or m.ncols != self.dims.get(j, 0):
                    raise ValueError(f"matrix shape mismatch at degree {j}")
                if not m.is_zero():
                    self.mats[j] = m

    @classmethod
    def zero(cls, dims, shift):
        return cls(dims, shift)

    @classmethod
    def identity(cls, dims):
        return cls(
            dims, 0, {j: SparseRationalMatrix.identity(n) for j, n in dims.items() if n}
        )

    def mat(self, j):
        m = self.mats.get(j)
        if m is None:
            return SparseRationalMatrix.zero(self.dims.get(j + self.shift, 0), self.dims.get(j, 0))
        return m

    def __add__(self, other):
        if self.shift != other.shift:
            raise ValueError("cannot add maps of different degree shifts")
        out = {}
        for j in set(self.mats) | set(other.mats):
            out[j] = self.mat(j) + other.mat(j)
        return GradedMap(self.dims, self.shift, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        return GradedMap(self.dims, self.shift, {j: scalar * m for j, m in self.mats.items()})

    def __matmul__(self, other):
        # self after other
        out = {}
        for j in other.mats:
            m = self.mat(j + other.shift) @ other.mat(j)
            if not m.is_zero():
                out[j] = m
        return GradedMap(self.dims, self.shift + other.shift, out)

    def is_zero(self):
        return all(m.is_zero() for m in self.mats.values())

    def __eq__(self, other):
        return (
            isinstance(other, GradedMap)
            and self.shift == other.shift
            and (self - other).is_zero()
        )

    def rank(self, j=None):
        if j is not None:
            return self.mat(j).rank()
        return sum(m.rank() for m in self.mats.values())


class FiniteComplex:
    """Finite-dimensional cochain complex with an optional differential split.

    ``d = d0 + dprime`` where dprime strictly raises an auxiliary filtration;
    ``filtration_length`` bounds the nilpotency order used by perturbation.
    """

    def __init__(self, dims, d: GradedMap, d0: GradedMap = None, filtration_length=1):
        self.dims = {j: n for j, n in dims.items() if n}
        self.d = d
        if not (d @ d).is_zero():
            raise SplitError("differential does not square to zero")
        if d0 is not None:
            if not (d0 @ d0).is_zero():
                raise SplitError("d0 does not square to zero")
            self.d0 = d0
            self.dprime = d - d0
        else:
            self.d0 = d
            self.dprime = GradedMap.zero(dims, 1)
        self.filtration_length = filtration_length

    def degrees(self):
        return sorted(self.dims)

    def dim(self, j):
        return self.dims.get(j, 0)

    def homology_dims(self, d=None):
        d = d if d is not None else self.d
        out = {}
        for j in self.degrees():
            out[j] = self.dim(j) - d.mat(j).rank() - d.mat(j - 1).rank()
        return out


class Splitting:
    """Projection/homotopy pair for a differential; see module docstring."""

    def __init__(self, complex_: FiniteComplex, pi0: GradedMap, h0: GradedMap):
        self.complex = complex_
        self.pi0 = pi0
        self.h0 = h0


def _independent_extension(base_cols, candidates, dim):
    """Greedy: indices of candidate columns extending span(base_cols) to rank dim?

    Returns the list of chosen candidate indices (in order) such that
    base + chosen spans base + candidates.
    """
    rows = []  # reduced rows: (pivot_index, dict)
    chosen = []

    def reduce(vec):
        v = dict(vec)
        for p, r in rows:
            c = v.get(p)
            if c:
                for k, w in r.items():
                    nv = v.get(k, Fraction(0)) - c * w
                    if nv == 0:
                        v.pop(k, None)
                    else:
                        v[k] = nv
        return v

    def insert(vec):
        v = reduce(vec)
        if not v:
            return False
        p = min(v)
        pv = v[p]
        row = {k: w / pv for k, w in v.items()}
        rows.append((p, row))
        return True

    for col in base_cols:
        insert(col)
    for idx, col in enumerate(candidates):
        if insert(col):
            chosen.append(idx)
    return chosen


def _invert(m: SparseRationalMatrix):
    if m.nrows != m.ncols:
        raise SplitError("cannot invert a non-square matrix")
    n = m.nrows
    aug = m
    for j in range(n):
        aug = aug.hstack(
            SparseRationalMatrix(n, 1, {(j, 0): Fraction(1)})
        )
    work = aug._rref(forbidden_cols=frozenset(range(n, 2 * n)))[0]
    if len(work) != n:
        raise SplitError("singular matrix")
    entries = {}
    for pj, row in work:
        for k, v in row.items():
            if k >= n:
                entries[(pj, k - n)] = v
    return SparseRationalMatrix(n, n, entries)


def split(complex_: FiniteComplex, d0: GradedMap = None) -> Splitting:
    """Construct (pi0, h0) for the degree-wise decomposition V = H + U + U'.

    U is a complement of the closed elements, U' = d0(U), and H a complement
    of U' inside the closed part; h0 inverts d0 on U and vanishes on H and U,
    pi0 projects onto H.  All identities hold exactly.
    """
    d0 = d0 if d0 is not None else complex_.d0
    if not (d0 @ d0).is_zero():
        raise SplitError("d0 does not square to zero")
    dims = complex_.dims
    degrees = sorted(dims)
    kernel = {}
    u_cols = {}
    for j in degrees:
        m = d0.mat(j)
        kernel[j] = m.kernel_basis()
        n = dims.get(j, 0)
        std = [{i: Fraction(1)} for i in range(n)]
        chosen = _independent_extension(kernel[j], std, n)
        u_cols[j] = [std[i] for i in chosen]

    pi0_mats = {}
    h0_mats = {}
    for j in degrees:
        n = dims[j]
        uprime = []  # d0(U_{j-1}) expressed in degree j
        u_src = []
        if j - 1 in dims:
            m_prev = d0.mat(j - 1)
            for col in u_cols[j - 1]:
                uprime.append(m_prev.apply(col))
                u_src.append(col)
        # H_j: kernel vectors extending span(U') inside Z_j
        h_idx = _independent_extension(uprime, kernel[j], n)
        h_basis = [kernel[j][i] for i in h_idx]
        basis_cols = h_basis + u_cols[j] + uprime
        if len(basis_cols) != n:
            raise SplitError("splitting construction failed to produce a basis")
        B = SparseRationalMatrix.from_columns(n, basis_cols)
        Binv = _invert(B) if n else SparseRationalMatrix.zero(0, 0)
        nh, nu = len(h_basis), len(u_cols[j])
        # pi0: resolve in the (H, U, U') basis, keep only the H coordinates
        pi_entries = {}
        for k, col in enumerate(h_basis):
            for i, v in col.items():
                pi_entries[(i, k)] = v
        Hmat = SparseRationalMatrix(n, nh, pi_entries)
        sel_h = SparseRationalMatrix(nh, n, {(k, k): Fraction(1) for k in range(nh)})
        pi0_mats[j] = Hmat @ sel_h @ Binv if n else SparseRationalMatrix.zero(0, 0)
        # h0 at degree j sends the U' coordinates to their U sources in degree j-1
        nprev = dims.get(j - 1, 0)
        if uprime and nprev:
            usrc_entries = {}
            for k, col in enumerate(u_src):
                for i, v in col.items():
                    usrc_entries[(i, k)] = v
            Umat = SparseRationalMatrix(nprev, len(u_src), usrc_entries)
            sel_up = SparseRationalMatrix(
                len(uprime), n, {(k, nh + nu + k): Fraction(1) for k in range(len(uprime))}
            )
            h0_mats[j] = Umat @ sel_up @ Binv
    pi0 = GradedMap(dims, 0, pi0_mats)
    h0 = GradedMap(dims, -1, h0_mats)
    return Splitting(complex_, pi0, h0)


def perturb(splitting: Splitting, dprime: GradedMap = None, max_terms=None):
    """Perturbed homotopy and projection (h, pi) for d = d0 + dprime.

    The Neumann series terminates because dprime raises the filtration; the
    iteration bound defaults to the complex's filtration length + 1.
    """
    cx = splitting.complex
    dprime = dprime if dprime is not None else cx.dprime
    bound = (max_terms if max_terms is not None else cx.filtration_length + 1)
    h0 = splitting.h0
    term = h0
    h = h0
    for _ in range(bound):
        term = -1 * (term @ dprime @ h0)
        if term.is_zero():
            break
        h = h + term
    else:
        raise NilpotencyError(f"d'h0 not nilpotent within {bound} iterations")
    d = cx.d0 + dprime
    ident = GradedMap.identity(cx.dims)
    pi = ident - (d @ h + h @ d)
    return h, pi


def equivariant_average(h_raw: GradedMap, action, d: GradedMap = None):
    """Average a homotopy/right-inverse over a finite group action.

    ``action`` is a list of degree-0 graded maps (the group elements as
    matrices, including the identity).  When ``d`` is given, every element is
    checked to commute with it first.
    """
    if not action:
        raise ValueError("empty group")
    if d is not None:
        for g in action:
            if not (g @ d - d @ g).is_zero():
                raise SplitError("group action does not commute with the differential")
    inv = []
    for g in action:
        inv.append(GradedMap(g.dims, 0, {j: _invert(m) for j, m in g.mats.items()}))
    total = None
    for g, gi in zip(action, inv):
        term = g @ h_raw @ gi
        total = term if total is None else total + term
    return Fraction(1, len(action)) * total


# ---------------------------------------------------------------------------
# bridges and generators used by the self-test suites
# ---------------------------------------------------------------------------


def from_complex_slice(cs):
    """Export an assembled graph-complex slice as a filtered FiniteComplex.

    The loop-order filtration supplies the split d = d0 + d'; d0 is the
    loop-preserving block of each differential matrix.
    """
    dims = {deg: len(sl) for deg, sl in zip(cs.degrees, cs.slices)}
    d_mats = {}
    d0_mats = {}
    max_loops = 0
    for i, m in enumerate(cs.matrices):
        deg = cs.degrees[i]
        src = cs.slices[i]
        dst = cs.slices[i + 1]
        if len(src) == 0 or len(dst) == 0:
            continue
        d_mats[deg] = m
        src_loops = src.loop_orders()
        dst_loops = dst.loop_orders()
        max_loops = max((max_loops, *src_loops, *dst_loops))
        entries = {
            (r, c): v for (r, c), v in m.entries.items() if dst_loops[r] == src_loops[c]
        }
        d0_mats[deg] = SparseRationalMatrix(len(dst), len(src), entries)
    d = GradedMap(dims, 1, d_mats)
    d0 = GradedMap(dims, 1, d0_mats)
    return FiniteComplex(dims, d, d0, filtration_length=max_loops + 1)


def random_filtered_complex(rng, degrees=(0, 1, 2, 3), levels=3, max_dim=12):
    """A random filtered complex with known d0-homology, for property suites.

    Per filtration level an elementary complex (identity blocks pairing U with
    U') is built, then conjugated by a random filtration-unipotent change of
    basis; the conjugation adds only filtration-raising terms, so d0 stays the
    elementary differential and the homology dimensions stay readable.

    Returns (FiniteComplex, expected_homology_dims).
    """
    degrees = list(degrees)
    h = {}
    u = {}
    budget = max_dim
    for lev in range(levels):
        for j in degrees:
            h[(lev, j)] = 0
            u[(lev, j)] = 0
    top = max(degrees)
    while budget > 0:
        lev = rng.randrange(levels)
        j = degrees[rng.randrange(len(degrees))]
        if rng.random() < 0.4 or j == top or budget < 2:
            h[(lev, j)] += 1
            budget -= 1
        else:
            u[(lev, j)] += 1
            budget -= 2
    dims = {}
    offsets = {}
    for j in degrees:
        off = {}
        total = 0
        for lev in range(levels):
            nh = h[(lev, j)]
            nu = u[(lev, j)]
            nup = u[(lev, j - 1)] if (lev, j - 1) in u else 0
            off[lev] = (total, nh, nu, nup)
            total += nh + nu + nup
        offsets[j] = off
        dims[j] = total
    d0_mats = {}
    for j in degrees:
        if j + 1 not in dims:
            continue
        entries = {}
        for lev in range(levels):
            base_src, nh, nu, _ = offsets[j][lev]
            base_dst, nh2, nu2, nup2 = offsets[j + 1][lev]
            for k in range(nu):
                entries[(base_dst + nh2 + nu2 + k, base_src + nh + k)] = Fraction(1)
        m = SparseRationalMatrix(dims[j + 1], dims[j], entries)
        if not m.is_zero():
            d0_mats[j] = m
    d0 = GradedMap(dims, 1, d0_mats)

    def level_of(j, index):
        for lev in range(levels):
            base, nh, nu, nup = offsets[j][lev]
            if base <= index < base + nh + nu + nup:
                return lev
        raise AssertionError

    # random unipotent, strictly filtration-raising change of basis
    p_mats = {}
    for j in degrees:
        n = dims[j]
        entries = {(i, i): Fraction(1) for i in range(n)}
        for a in range(n):
            for b in range(n):
                if level_of(j, a) > level_of(j, b) and rng.random() < 0.3:
                    entries[(a, b)] = Fraction(rng.randint(-2, 2))
        p_mats[j] = SparseRationalMatrix(n, n, entries)
    d_mats = {}
    for j, m in d0_mats.items():
        d_mats[j] = p_mats[j + 1] @ m @ _invert(p_mats[j])
    d = GradedMap(dims, 1, d_mats)
    cx = FiniteComplex(dims, d, d0, filtration_length=levels)
    expected = {j: sum(h[(lev, j)] for lev in range(levels)) for j in degrees}
    return cx, expected
