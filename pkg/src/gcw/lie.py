"""Free Lie algebra on x_1..x_n in the Lyndon basis, tangential derivations,
cyclic words and the divergence cocycle.

Words are tuples of generator indices (1-based).  Lie elements are stored as
rational coefficients on Lyndon words; products are computed by expanding into
the free associative algebra and projecting back, which doubles as a safety
check that intermediate results really are Lie elements.

Completed algebras are represented by truncation at a global weight cutoff
(default 7); any operation producing terms beyond the cutoff raises
:class:`CutoffError`.
"""

from __future__ import annotations

import functools
import itertools
from fractions import Fraction

DEFAULT_CUTOFF = 7

TR = "TR"
TR1 = "TR1"


class CutoffError(RuntimeError):
    """A result exceeded the configured maximal weight."""


class LieError(ValueError):
    """Raised for malformed inputs (non-Lie data, arity mismatches)."""


def _cut(cutoff):
    return DEFAULT_CUTOFF if cutoff is None else cutoff


# ---------------------------------------------------------------------------
# Lyndon words
# ---------------------------------------------------------------------------


def is_lyndon(w):
    if not w:
        return False
    for i in range(1, len(w)):
        if w[i:] <= w:
            return False
    return True


@functools.lru_cache(maxsize=None)
def lyndon_words(n, weight):
    """All Lyndon words of the given weight over 1..n, in lexicographic order."""
    if weight <= 0:
        return ()
    return tuple(
        w for w in itertools.product(range(1, n + 1), repeat=weight) if is_lyndon(w)
    )


def standard_factorization(w):
    """Chen-Fox-Lyndon right factor: the lexicographically least proper suffix."""
    assert len(w) >= 2
    best = None
    for i in range(1, len(w)):
        if best is None or w[i:] < best[1]:
            best = (w[:i], w[i:])
    return best


# ---------------------------------------------------------------------------
# associative envelope
# ---------------------------------------------------------------------------


class AssElement:
    """Element of the free associative algebra; keys are words, () the unit."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for w, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    self.terms[tuple(w)] = c

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def unit(cls, n, coeff=1):
        return cls(n, {(): Fraction(coeff)})

    @classmethod
    def word(cls, n, w, coeff=1):
        return cls(n, {tuple(w): Fraction(coeff)})

    def is_zero(self):
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def max_weight(self):
        return max((len(w) for w in self.terms), default=0)

    def weight_part(self, k):
        return AssElement(self.n, {w: c for w, c in self.terms.items() if len(w) == k})

    def _acc(self, w, c):
        cur = self.terms.get(w, Fraction(0)) + c
        if cur == 0:
            self.terms.pop(w, None)
        else:
            self.terms[w] = cur

    def __add__(self, other):
        self._chk(other)
        out = AssElement(self.n, self.terms)
        for w, c in other.terms.items():
            out._acc(w, c)
        return out

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        return AssElement(self.n, {w: s * c for w, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, AssElement):
            return self.__rmul__(other)
        self._chk(other)
        out = AssElement.zero(self.n)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out._acc(w1 + w2, c1 * c2)
        return out

    def _chk(self, other):
        if self.n != other.n:
            raise LieError("mixed generator counts")

    def __eq__(self, other):
        return isinstance(other, AssElement) and self.n == other.n and self.terms == other.terms

    def __repr__(self):
        if self.is_zero():
            return "Ass(0)"
        parts = [f"{c} *{''.join('x%d' % i for i in w) or '1'}" for w, c in self.items()]
        return "Ass(" + " + ".join(parts) + ")"


def partial_k(a: AssElement, k):
    """Right decomposition a = a_0 + sum_k (partial_k a) x_k: strip a final x_k."""
    out = AssElement.zero(a.n)
    for w, c in a.terms.items():
        if w and w[-1] == k:
            out._acc(w[:-1], c)
    return out


def constant_term(a: AssElement):
    return a.terms.get((), Fraction(0))


# ---------------------------------------------------------------------------
# Lie elements
# ---------------------------------------------------------------------------


def _expand_lyndon(n, w, cache={}):
    """Word expansion of the Lyndon bracketing b(w) in the associative algebra."""
    key = (n, w)
    if key in cache:
        return cache[key]
    if len(w) == 1:
        res = AssElement.word(n, w)
    else:
        u, v = standard_factorization(w)
        bu = _expand_lyndon(n, u)
        bv = _expand_lyndon(n, v)
        res = bu * bv - bv * bu
    cache[key] = res
    return res


class LieElement:
    """Free Lie algebra element as rational coefficients on Lyndon words."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for w, c in terms.items():
                w = tuple(w)
                if not is_lyndon(w):
                    raise LieError(f"{w} is not a Lyndon word")
                c = Fraction(c)
                if c != 0:
                    self.terms[w] = c

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def generator(cls, n, i):
        if not 1 <= i <= n:
            raise LieError(f"generator x_{i} out of range")
        return cls(n, {(i,): Fraction(1)})

    @classmethod
    def basis_element(cls, n, w):
        return cls(n, {tuple(w): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def max_weight(self):
        return max((len(w) for w in self.terms), default=0)

    def weight_part(self, k):
        return LieElement(self.n, {w: c for w, c in self.terms.items() if len(w) == k})

    def weights(self):
        return sorted({len(w) for w in self.terms})

    def __add__(self, other):
        if self.n != other.n:
            raise LieError("mixed generator counts")
        out = dict(self.terms)
        for w, c in other.terms.items():
            cur = out.get(w, Fraction(0)) + c
            if cur == 0:
                out.pop(w, None)
            else:
                out[w] = cur
        return LieElement(self.n, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        return LieElement(self.n, {w: s * c for w, c in self.terms.items()})

    def __mul__(self, scalar):
        return self.__rmul__(scalar)

    def __eq__(self, other):
        return isinstance(other, LieElement) and self.n == other.n and self.terms == other.terms

    def __repr__(self):
        if self.is_zero():
            return "Lie(0)"
        parts = [f"{c}*[{''.join('x%d' % i for i in w)}]" for w, c in self.items()]
        return "Lie(" + " + ".join(parts) + ")"

    def to_ass(self):
        out = AssElement.zero(self.n)
        for w, c in self.terms.items():
            out = out + c * _expand_lyndon(self.n, w)
        return out

    @classmethod
    def from_ass(cls, a: AssElement):
        """Project a word expansion known to be a Lie element back to the basis.

        Uses the triangularity of Lyndon expansions: b(w) = w + lexicographically
        larger words of the same weight.  Raises if the input is not Lie.
        """
        residue = AssElement(a.n, a.terms)
        coeffs = {}
        if constant_term(residue) != 0:
            raise LieError("nonzero constant term in alleged Lie element")
        for k in sorted({len(w) for w in residue.terms if w}):
            part = residue.weight_part(k)
            while not part.is_zero():
                w = min(part.terms, key=lambda t: t)
                if not is_lyndon(w):
                    raise LieError(f"not a Lie element: leading word {w}")
                c = part.terms[w]
                coeffs[w] = c
                part = part - c * _expand_lyndon(a.n, w)
        return cls(a.n, coeffs)


def lie_bracket(a: LieElement, b: LieElement, cutoff=None):
    """Lie bracket, computed in the associative envelope and projected back."""
    if a.n != b.n:
        raise LieError("mixed generator counts")
    wmax = a.max_weight() + b.max_weight()
    if a.is_zero() or b.is_zero():
        return LieElement.zero(a.n)
    if wmax > _cut(cutoff):
        raise CutoffError(f"bracket weight {wmax} exceeds cutoff {_cut(cutoff)}")
    aa, bb = a.to_ass(), b.to_ass()
    return LieElement.from_ass(aa * bb - bb * aa)


def ad(a):
    return lambda b: lie_bracket(a, b)


# ---------------------------------------------------------------------------
# tangential derivations
# ---------------------------------------------------------------------------


class TangentialDerivation:
    """u = (a_1, ..., a_n): the derivation with u(x_i) = [x_i, a_i]."""

    __slots__ = ("n", "components")

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise LieError("empty derivation tuple")
        n = components[0].n
        if any(c.n != n for c in components) or len(components) != n:
            raise LieError("component count must equal the generator count")
        self.n = n
        self.components = components

    @classmethod
    def zero(cls, n):
        return cls(tuple(LieElement.zero(n) for _ in range(n)))

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def __add__(self, other):
        if self.n != other.n:
            raise LieError("mixed generator counts")
        return TangentialDerivation(
            tuple(a + b for a, b in zip(self.components, other.components))
        )

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        return TangentialDerivation(tuple(scalar * c for c in self.components))

    def __mul__(self, scalar):
        return self.__rmul__(scalar)

    def __eq__(self, other):
        return (
            isinstance(other, TangentialDerivation)
            and self.n == other.n
            and self.components == other.components
        )

    def __repr__(self):
        return "Tder(" + ", ".join(repr(c) for c in self.components) + ")"

    def max_weight(self):
        return max(c.max_weight() for c in self.components)

    def weight_part(self, k):
        return TangentialDerivation(tuple(c.weight_part(k) for c in self.components))

    def weights(self):
        return sorted({w for c in self.components for w in c.weights()})

    def is_special(self):
        """u(x_1 + ... + x_n) = 0."""
        total = AssElement.zero(self.n)
        for i, a in enumerate(self.components, start=1):
            xi = AssElement.word(self.n, (i,))
            aa = a.to_ass()
            total = total + (xi * aa - aa * xi)
        return total.is_zero()


def derive_ass(u: TangentialDerivation, a: AssElement, cutoff=None):
    """Extend x_i -> [x_i, a_i] to the associative algebra by the Leibniz rule."""
    if u.n != a.n:
        raise LieError("mixed generator counts")
    images = {}
    for i, ai in enumerate(u.components, start=1):
        xi = AssElement.word(u.n, (i,))
        aa = ai.to_ass()
        images[i] = xi * aa - aa * xi
    out = AssElement.zero(a.n)
    limit = _cut(cutoff)
    for w, c in a.terms.items():
        for p, letter in enumerate(w):
            img = images[letter]
            if img.is_zero():
                continue
            if len(w) - 1 + img.max_weight() > limit:
                raise CutoffError("derivation result exceeds cutoff")
            pre = AssElement.word(a.n, w[:p], c)
            post = AssElement.word(a.n, w[p + 1 :])
            out = out + pre * img * post
    return out


def derive(u: TangentialDerivation, a, cutoff=None):
    """Apply the derivation to a Lie or associative element."""
    if isinstance(a, LieElement):
        return LieElement.from_ass(derive_ass(u, a.to_ass(), cutoff))
    return derive_ass(u, a, cutoff)


def tder_bracket(u: TangentialDerivation, v: TangentialDerivation, cutoff=None):
    """[u, v] has components u(b_k) - v(a_k) + [a_k, b_k]."""
    if u.n != v.n:
        raise LieError("mixed generator counts")
    comps = []
    for ak, bk in zip(u.components, v.components):
        term = LieElement.zero(u.n)
        if not bk.is_zero():
            term = term + derive(u, bk, cutoff)
        if not ak.is_zero():
            term = term - derive(v, ak, cutoff)
        if not (ak.is_zero() or bk.is_zero()):
            term = term + lie_bracket(ak, bk, cutoff)
        comps.append(term)
    return TangentialDerivation(tuple(comps))


def dk_embed(i, j, n):
    """Drinfeld-Kohno generator t^{i,j} as the derivation with a_i = x_j, a_j = x_i."""
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise LieError(f"bad generator pair ({i},{j})")
    comps = [LieElement.zero(n) for _ in range(n)]
    comps[i - 1] = LieElement.generator(n, j)
    comps[j - 1] = LieElement.generator(n, i)
    return TangentialDerivation(tuple(comps))


# ---------------------------------------------------------------------------
# cyclic words
# ---------------------------------------------------------------------------


def _rotations(w):
    return [w[i:] + w[:i] for i in range(len(w))]


def _tr1_key(w):
    """Canonical necklace under rotation and signed reversal.

    Returns (key, sign) with sign in {0, +1, -1}; sign 0 marks classes killed
    by the relation tr(w) = -(-1)^{len} tr(reversed w).
    """
    rots = _rotations(w)
    rev_rots = _rotations(tuple(reversed(w)))
    s = -1 if len(w) % 2 == 0 else 1  # the sign relating tr(w~) to tr(w)
    key = min(min(rots), min(rev_rots))
    from_fwd = key in rots
    from_rev = key in rev_rots
    if from_fwd and from_rev:
        return key, (0 if s == -1 else 1)
    return (key, 1) if from_fwd else (key, s)


class TraceElement:
    """Cyclic words: quotient flag TR (rotation) or TR1 (rotation + signed reversal)."""

    __slots__ = ("n", "flag", "terms")

    def __init__(self, n, flag=TR, terms=None):
        if flag not in (TR, TR1):
            raise LieError(f"unknown trace flag {flag!r}")
        self.n = n
        self.flag = flag
        self.terms = {}
        if terms:
            for w, c in terms.items():
                self._acc_word(tuple(w), Fraction(c))

    def _acc_word(self, w, c):
        if c == 0 or not w:
            return
        if self.flag == TR:
            key, sign = min(_rotations(w)), 1
        else:
            key, sign = _tr1_key(w)
            if sign == 0:
                return
        cur = self.terms.get(key, Fraction(0)) + sign * c
        if cur == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = cur

    @classmethod
    def zero(cls, n, flag=TR):
        return cls(n, flag)

    @classmethod
    def of_word(cls, n, w, coeff=1, flag=TR):
        return cls(n, flag, {tuple(w): Fraction(coeff)})

    @classmethod
    def of_ass(cls, a: AssElement, flag=TR):
        out = cls(a.n, flag)
        for w, c in a.terms.items():
            if w:
                out._acc_word(w, c)
        return out

    def is_zero(self):
        return not self.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __add__(self, other):
        if self.n != other.n or self.flag != other.flag:
            raise LieError("incompatible trace elements")
        out = TraceElement(self.n, self.flag, self.terms)
        for w, c in other.terms.items():
            out._acc_word(w, c)
        return out

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __rmul__(self, scalar):
        s = Fraction(scalar)
        return TraceElement(self.n, self.flag, {w: s * c for w, c in self.terms.items()})

    def __mul__(self, scalar):
        return self.__rmul__(scalar)

    def __eq__(self, other):
        return (
            isinstance(other, TraceElement)
            and (self.n, self.flag) == (other.n, other.flag)
            and self.terms == other.terms
        )

    def __repr__(self):
        if self.is_zero():
            return f"Trace({self.flag}, 0)"
        parts = [f"{c}*tr({''.join('x%d' % i for i in w)})" for w, c in self.items()]
        return f"Trace({self.flag}, " + " + ".join(parts) + ")"

    def max_weight(self):
        return max((len(w) for w in self.terms), default=0)

    def weight_part(self, k):
        return TraceElement(self.n, self.flag, {w: c for w, c in self.terms.items() if len(w) == k})

    def to_tr(self):
        """Embed a TR1 class into TR via w + (-(-1)^len) * reversed(w)."""
        if self.flag == TR:
            return self
        out = TraceElement(self.n, TR)
        for w, c in self.terms.items():
            s = -1 if len(w) % 2 == 0 else 1
            out._acc_word(w, c)
            out._acc_word(tuple(reversed(w)), s * c)
        return out


def divergence(u: TangentialDerivation):
    """div(u) = sum_k tr(x_k * partial_k(a_k)), a cocycle landing in TR."""
    out = TraceElement.zero(u.n, TR)
    for k, ak in enumerate(u.components, start=1):
        da = partial_k(ak.to_ass(), k)
        xk = AssElement.word(u.n, (k,))
        out = out + TraceElement.of_ass(xk * da, TR)
    return out


def trace_action(u: TangentialDerivation, t: TraceElement, cutoff=None):
    """Derivation action on cyclic words (well-defined on the rotation quotient)."""
    if t.flag != TR:
        raise LieError("the derivation action is implemented on the TR quotient")
    out = TraceElement.zero(t.n, TR)
    for w, c in t.terms.items():
        img = derive_ass(u, AssElement.word(t.n, w, c), cutoff)
        out = out + TraceElement.of_ass(img, TR)
    return out


def delta_at(f_coeffs, cutoff=None):
    """tr(f(u) - f(u+v) + f(v)) in two variables for f = sum_{k>=2} f_k u^k."""
    limit = _cut(cutoff)
    out = TraceElement.zero(2, TR)
    for k, fk in sorted(f_coeffs.items()):
        fk = Fraction(fk)
        if fk == 0:
            continue
        if k < 2:
            raise LieError("power series must start at degree 2")
        if k > limit:
            raise CutoffError(f"power {k} exceeds cutoff {limit}")
        out = out + TraceElement.of_word(2, (1,) * k, fk)
        out = out + TraceElement.of_word(2, (2,) * k, fk)
        for w in itertools.product((1, 2), repeat=k):
            out = out - TraceElement.of_word(2, w, fk)
    return out


# ---------------------------------------------------------------------------
# evaluation of Lie polynomials and the grt relation report
# ---------------------------------------------------------------------------


def _bracket_tree(w):
    """Binary bracketing of a Lyndon word via standard factorization."""
    if len(w) == 1:
        return w[0]
    u, v = standard_factorization(w)
    return (_bracket_tree(u), _bracket_tree(v))


def evaluate_lie(element: LieElement, args, bracket, add, scale):
    """Evaluate a Lie polynomial at arbitrary arguments in any Lie algebra.

    ``args[i]`` substitutes generator x_{i+1}; ``bracket``, ``add`` and
    ``scale`` provide the target algebra operations.
    """

    def ev(tree):
        if isinstance(tree, int):
            return args[tree - 1]
        return bracket(ev(tree[0]), ev(tree[1]))

    total = None
    for w, c in element.terms.items():
        val = scale(c, ev(_bracket_tree(w)))
        total = val if total is None else add(total, val)
    return total


def evaluate_lie_in_lie(element: LieElement, args, cutoff=None):
    n = args[0].n
    zero = LieElement.zero(n)
    out = evaluate_lie(
        element,
        args,
        lambda a, b: lie_bracket(a, b, cutoff),
        lambda a, b: a + b,
        lambda c, a: c * a,
    )
    return zero if out is None else out


def evaluate_lie_in_tder(element: LieElement, args, cutoff=None):
    n = args[0].n
    zero = TangentialDerivation.zero(n)
    out = evaluate_lie(
        element,
        args,
        lambda a, b: tder_bracket(a, b, cutoff),
        lambda a, b: a + b,
        lambda c, a: c * a,
    )
    return zero if out is None else out


def grt_relations_check(psi: LieElement, cutoff=None):
    """Check the defining relations of the Grothendieck-Teichmueller algebra.

    Antisymmetry and the 3-term relation are checked by substitution in the
    free Lie algebra (with z = -x-y eliminated); the 5-term relation is
    checked inside the special derivations on four generators through the
    Drinfeld-Kohno embedding.  Since injectivity of that embedding on the
    degree-4 Drinfeld-Kohno algebra is not certified here, a 5-term failure
    in the image would be inconclusive about the relation itself; a pass is
    conclusive for the image.

    Returns a report dict: relation name -> (passed, first failing weight).
    """
    if psi.n != 2:
        raise LieError("grt elements live in two generators")
    report = {}
    weights = psi.weights() or []

    def verdict(name, failures):
        report[name] = (not failures, min(failures) if failures else None)

    fails = []
    for k in weights:
        p = psi.weight_part(k)
        x = LieElement.generator(2, 1)
        y = LieElement.generator(2, 2)
        swapped = evaluate_lie_in_lie(p, [y, x], cutoff)
        if not (evaluate_lie_in_lie(p, [x, y], cutoff) + swapped).is_zero():
            fails.append(k)
    verdict("antisymmetry", fails)

    fails = []
    for k in weights:
        p = psi.weight_part(k)
        x = LieElement.generator(2, 1)
        y = LieElement.generator(2, 2)
        z = -1 * x - 1 * y
        total = (
            evaluate_lie_in_lie(p, [x, y], cutoff)
            + evaluate_lie_in_lie(p, [y, z], cutoff)
            + evaluate_lie_in_lie(p, [z, x], cutoff)
        )
        if not total.is_zero():
            fails.append(k)
    verdict("hexagon3", fails)

    t = {(i, j): dk_embed(i, j, 4) for i in range(1, 5) for j in range(i + 1, 5)}
    fails = []
    for k in weights:
        p = psi.weight_part(k)
        lhs = evaluate_lie_in_tder(p, [t[(1, 2)], t[(2, 3)] + t[(2, 4)]], cutoff) + \
            evaluate_lie_in_tder(p, [t[(1, 3)] + t[(2, 3)], t[(3, 4)]], cutoff)
        rhs = (
            evaluate_lie_in_tder(p, [t[(2, 3)], t[(3, 4)]], cutoff)
            + evaluate_lie_in_tder(p, [t[(1, 2)] + t[(1, 3)], t[(2, 4)] + t[(3, 4)]], cutoff)
            + evaluate_lie_in_tder(p, [t[(1, 2)], t[(2, 3)]], cutoff)
        )
        if not (lhs - rhs).is_zero():
            fails.append(k)
    verdict("pentagon5", fails)
    return report


# ---------------------------------------------------------------------------
# dimension oracles
# ---------------------------------------------------------------------------


def lie_dimension(n, weight):
    return len(lyndon_words(n, weight))


def sder_dimension(n, weight):
    """dim of the weight-homogeneous special derivations, by exact elimination.

    Counts derivations, not component tuples: at weight 1 the tuples
    (0,..,c*x_i,..,0) define the zero derivation and are quotiented out.
    """
    from .linalg import SparseRationalMatrix

    basis = lyndon_words(n, weight)
    target = lyndon_words(n, weight + 1)
    tindex = {w: i for i, w in enumerate(target)}
    cols = []
    for i in range(1, n + 1):
        xi = LieElement.generator(n, i)
        for w in basis:
            img = lie_bracket(xi, LieElement.basis_element(n, w), cutoff=weight + 1)
            cols.append({tindex[v]: c for v, c in img.terms.items()})
    m = SparseRationalMatrix.from_columns(len(target), cols)
    tuples = n * len(basis) - m.rank()
    return tuples - (n if weight == 1 else 0)


def tr1_dimension(n, length):
    """Number of independent cyclic words after the signed reversal relation."""
    keys = set()
    for w in itertools.product(range(1, n + 1), repeat=length):
        key, sign = _tr1_key(w)
        if sign != 0:
            keys.add(key)
    return len(keys)


def tr_dimension(n, length):
    return len({min(_rotations(w)) for w in itertools.product(range(1, n + 1), repeat=length)})
