"""Super vector spaces and their signed symmetric/exterior powers.

A space with m even and n odd basis letters (letters 0..m-1 even, m..m+n-1
odd).  Degree-N powers come in two kinds: "sym" (odd letters square to zero)
and "alt" (even letters square to zero).  Each admissible multiset of letters
indexes one basis vector, realized inside the N-fold tensor power as the
signed sum over all distinct orderings of the multiset, normalized so the
ascending word carries coefficient 1.

Because distinct multisets hit disjoint sets of tensor words, these realized
vectors are simultaneously a reduced column echelon basis of the projected
subspace; projecting a tensor onto power coordinates is a per-word lookup and
never needs a symmetrizer matrix.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from math import factorial

from .linalg import DimensionError, SparseMap, Subspace

ZERO = Fraction(0)
ONE = Fraction(1)

KINDS = ("sym", "alt")


class SuperSpace:
    """m|n super vector space; letters 0..m-1 even, m..m+n-1 odd."""

    __slots__ = ("m", "n")

    def __init__(self, m, n):
        if m < 0 or n < 0:
            raise ValueError("negative dimensions")
        self.m = m
        self.n = n

    @property
    def dim(self):
        return self.m + self.n

    def parity(self, letter):
        if not 0 <= letter < self.dim:
            raise ValueError(f"letter {letter} outside 0..{self.dim - 1}")
        return 0 if letter < self.m else 1

    def weight_of_letter(self, letter, dual=False):
        w = [0] * self.dim
        w[letter] = -1 if dual else 1
        return tuple(w)

    def __eq__(self, other):
        return isinstance(other, SuperSpace) and (self.m, self.n) == (other.m, other.n)

    def __hash__(self):
        return hash((self.m, self.n))

    def __repr__(self):
        return f"SuperSpace({self.m}|{self.n})"


def weight_label(weight, m, n):
    """Exponent vector -> highest-weight label (odd coordinates negated)."""
    return tuple(weight[:m]) + tuple(-c for c in weight[m:])


def add_weights(a, b):
    return tuple(x + y for x, y in zip(a, b))


def admissible(space, kind, multiset):
    """sym: odd letters at most once; alt: even letters at most once."""
    for letter, mult in Counter(multiset).items():
        if mult > 1:
            odd = space.parity(letter)
            if kind == "sym" and odd:
                return False
            if kind == "alt" and not odd:
                return False
    return True


def sort_sign(space, kind, word):
    """Sign acquired when sorting the word ascending by adjacent swaps.

    Each swapped pair contributes the Koszul sign (-1 iff both letters odd),
    and for "alt" an extra -1 per swap.  Equal letters never swap.
    """
    inv = 0
    oo = 0
    for s in range(len(word)):
        for t in range(s + 1, len(word)):
            if word[s] > word[t]:
                inv += 1
                if space.parity(word[s]) and space.parity(word[t]):
                    oo += 1
    sign = -1 if oo % 2 else 1
    if kind == "alt" and inv % 2:
        sign = -sign
    return sign


class PowerBasis:
    """Basis of the degree-N sym/alt power, indexed by admissible multisets.

    dual=True flips the sign of every weight (dual letters lower), nothing
    else: parities and all sign rules depend only on the letters.
    """

    def __init__(self, space, kind, degree, dual=False):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if degree < 0:
            raise ValueError("negative degree")
        self.space = space
        self.kind = kind
        self.degree = degree
        self.dual = dual
        self.multisets = [
            mu
            for mu in combinations_with_replacement(range(space.dim), degree)
            if admissible(space, kind, mu)
        ]
        self.index = {mu: i for i, mu in enumerate(self.multisets)}
        self.dim = len(self.multisets)
        sgn = -1 if dual else 1
        self.weights = []
        self.parities = []
        for mu in self.multisets:
            w = [0] * space.dim
            p = 0
            for letter in mu:
                w[letter] += sgn
                p ^= space.parity(letter)
            self.weights.append(tuple(w))
            self.parities.append(p)
        self._expansions = {}
        self._factor_maps = {}

    @property
    def tensor_dim(self):
        return self.space.dim ** self.degree

    def key(self):
        return (self.space.m, self.space.n, self.kind, self.degree, self.dual)

    def __repr__(self):
        star = "*" if self.dual else ""
        return f"PowerBasis({self.kind}{star} deg={self.degree} of {self.space}, dim={self.dim})"

    # -- tensor realization ---------------------------------------------------

    def norm_constant(self, mu):
        """Coefficient of the ascending word under the bare group average."""
        num = 1
        for mult in Counter(mu).values():
            num *= factorial(mult)
        return Fraction(num, factorial(self.degree))

    def expansion(self, idx):
        """[(word, coeff)] over distinct orderings; ascending word has coeff 1."""
        if idx not in self._expansions:
            mu = self.multisets[idx]
            terms = []
            for word in sorted(set(permutations(mu))):
                terms.append(
                    (word, Fraction(sort_sign(self.space, self.kind, word)))
                )
            self._expansions[idx] = terms
        return self._expansions[idx]

    def word_index(self, word):
        flat = 0
        for letter in word:
            flat = flat * self.space.dim + letter
        return flat

    def unindex_word(self, flat):
        word = []
        for _ in range(self.degree):
            word.append(flat % self.space.dim)
            flat //= self.space.dim
        return tuple(reversed(word))

    def to_tensor(self, coords):
        """Power coordinates -> vector in the full tensor power."""
        out = {}
        for idx, c in coords.items():
            for word, k in self.expansion(idx):
                flat = self.word_index(word)
                s = out.get(flat, ZERO) + c * k
                if s:
                    out[flat] = s
                else:
                    del out[flat]
        return out

    def project_tensor(self, tvec):
        """Apply the group-average projector, answer in power coordinates.

        For a word w with admissible multiset mu the projector sends e_w to
        sign(w) * norm(mu) * b_mu; inadmissible multisets die.
        """
        out = {}
        for flat, a in tvec.items():
            word = self.unindex_word(flat)
            mu = tuple(sorted(word))
            idx = self.index.get(mu)
            if idx is None:
                continue
            k = sort_sign(self.space, self.kind, word)
            s = out.get(idx, ZERO) + a * k * self.norm_constant(mu)
            if s:
                out[idx] = s
            else:
                del out[idx]
        return out

    def coords_from_tensor(self, tvec, check=True):
        """Read coordinates off the ascending-word rows; verify membership."""
        out = {}
        for idx, mu in enumerate(self.multisets):
            a = tvec.get(self.word_index(mu), ZERO)
            if a:
                out[idx] = a
        if check and self.to_tensor(out) != tvec:
            raise ValueError("tensor vector is not in the projected subspace")
        return out

    def subspace(self):
        """Realized basis as a Subspace of the tensor power (small N only)."""
        return Subspace.from_vectors(
            self.tensor_dim, [self.to_tensor({i: ONE}) for i in range(self.dim)]
        )

    def basis_matrix(self):
        cols = {
            i: self.to_tensor({i: ONE}) for i in range(self.dim)
        }
        return SparseMap.from_columns(self.dim, self.tensor_dim, cols)

    # -- single-letter factor maps ---------------------------------------------
    #
    # Multiplying a power vector by one letter on the right (or left) and
    # reprojecting, or splitting off the rightmost (leftmost) letter, are maps
    # with one entry per column.  The signs are the cost of walking the letter
    # past the part of the multiset it has to cross, the magnitude is the
    # multiplicity ratio from the projector normalization.

    def _sign_from_right(self, mu, i):
        """Walk letter i from the right end into ascending position."""
        crossed = sum(1 for a in mu if a > i)
        odd_crossed = sum(1 for a in mu if a > i and self.space.parity(a))
        sign = 1
        if self.kind == "alt" and crossed % 2:
            sign = -sign
        if self.space.parity(i) and odd_crossed % 2:
            sign = -sign
        return sign

    def _sign_from_left(self, mu, i):
        """Walk letter i from the left end into ascending position."""
        crossed = sum(1 for a in mu if a < i)
        odd_crossed = sum(1 for a in mu if a < i and self.space.parity(a))
        sign = 1
        if self.kind == "alt" and crossed % 2:
            sign = -sign
        if self.space.parity(i) and odd_crossed % 2:
            sign = -sign
        return sign

    def factor_map(self, op, i):
        """op in {"append","prepend","drop_last","drop_first"}, letter i."""
        key = (op, i)
        if key in self._factor_maps:
            return self._factor_maps[key]
        sp, kind, dual = self.space, self.kind, self.dual
        if op in ("append", "prepend"):
            target = power_basis(sp, kind, self.degree + 1, dual)
            ent = {}
            for col, mu in enumerate(self.multisets):
                nu = tuple(sorted(mu + (i,)))
                row = target.index.get(nu)
                if row is None:
                    continue
                sign = (
                    self._sign_from_right(mu, i)
                    if op == "append"
                    else self._sign_from_left(mu, i)
                )
                coeff = Fraction(mu.count(i) + 1, self.degree + 1) * sign
                ent[(row, col)] = coeff
            m = SparseMap(self.dim, target.dim, ent)
        elif op in ("drop_last", "drop_first"):
            if self.degree == 0:
                m = SparseMap.zero(self.dim, 0)
            else:
                target = power_basis(sp, kind, self.degree - 1, dual)
                ent = {}
                for col, mu in enumerate(self.multisets):
                    if i not in mu:
                        continue
                    nu = list(mu)
                    nu.remove(i)
                    nu = tuple(nu)
                    row = target.index[nu]
                    sign = (
                        self._sign_from_right(nu, i)
                        if op == "drop_last"
                        else self._sign_from_left(nu, i)
                    )
                    ent[(row, col)] = Fraction(sign)
                m = SparseMap(self.dim, target.dim, ent)
        else:
            raise ValueError(f"unknown factor op {op!r}")
        self._factor_maps[key] = m
        return m


_PB_CACHE = {}


def power_basis(space, kind, degree, dual=False):
    """Shared PowerBasis instances (factor maps and expansions memoize)."""
    key = (space.m, space.n, kind, degree, dual)
    if key not in _PB_CACHE:
        _PB_CACHE[key] = PowerBasis(space, kind, degree, dual)
    return _PB_CACHE[key]


def sym_dim(m, n, degree):
    """Count of admissible sym multisets, by choice of the odd subset."""
    total = 0
    for j in range(min(n, degree) + 1):
        total += _binom(n, j) * _binom(m - 1 + degree - j, m - 1)
    return total


def alt_dim(m, n, degree):
    total = 0
    for j in range(min(m, degree) + 1):
        total += _binom(m, j) * _binom(n - 1 + degree - j, n - 1)
    return total


def _binom(n, k):
    if k < 0 or k > n:
        return 0
    return factorial(n) // (factorial(k) * factorial(n - k))


# ---------------------------------------------------------------------------
# full tensor-power symmetrizers (test-scale; production code never builds
# these matrices)


def tensor_permutation_map(space, perm, degree):
    """Signed permutation of tensor factors; slot s moves to slot perm[s]."""
    d = space.dim
    dim = d ** degree
    ent = {}
    for flat in range(dim):
        word = []
        f = flat
        for _ in range(degree):
            word.append(f % d)
            f //= d
        word.reverse()
        sign = 1
        for s in range(degree):
            for t in range(s + 1, degree):
                if perm[s] > perm[t] and space.parity(word[s]) and space.parity(word[t]):
                    sign = -sign
        out = [0] * degree
        for s, letter in enumerate(word):
            out[perm[s]] = letter
        oflat = 0
        for letter in out:
            oflat = oflat * d + letter
        ent[(oflat, flat)] = Fraction(sign)
    return SparseMap(dim, dim, ent)


def symmetrizer_map(space, kind, degree):
    """Group average X_N (sym) or signed average Y_N (alt) on the tensor power."""
    dim = space.dim ** degree
    acc = SparseMap.zero(dim, dim)
    for perm in permutations(range(degree)):
        t = tensor_permutation_map(space, perm, degree)
        if kind == "alt":
            inv = sum(
                1
                for s in range(degree)
                for u in range(s + 1, degree)
                if perm[s] > perm[u]
            )
            if inv % 2:
                t = (-ONE) * t
        acc = acc + t
    return Fraction(1, factorial(degree)) * acc


# ---------------------------------------------------------------------------
# tensor products of power bases


class ProductSpace:
    """Ordered tensor product of PowerBasis factors, row-major indexing."""

    def __init__(self, *factors):
        if not factors:
            raise ValueError("need at least one factor")
        self.factors = tuple(factors)
        self.dim = 1
        for f in factors:
            self.dim *= f.dim
        self._weights = None
        self._parities = None
        self._blocks = None

    def index(self, idxs):
        if len(idxs) != len(self.factors):
            raise DimensionError("index tuple length mismatch")
        flat = 0
        for i, f in zip(idxs, self.factors):
            flat = flat * f.dim + i
        return flat

    def unindex(self, flat):
        out = []
        for f in reversed(self.factors):
            out.append(flat % f.dim)
            flat //= f.dim
        return tuple(reversed(out))

    def weights(self):
        if self._weights is None:
            acc = [None] * self.dim
            for flat in range(self.dim):
                w = None
                for i, f in zip(self.unindex(flat), self.factors):
                    fw = f.weights[i]
                    w = fw if w is None else add_weights(w, fw)
                acc[flat] = w
            self._weights = acc
        return self._weights

    def parities(self):
        if self._parities is None:
            acc = [0] * self.dim
            for flat in range(self.dim):
                p = 0
                for i, f in zip(self.unindex(flat), self.factors):
                    p ^= f.parities[i]
                acc[flat] = p
            self._parities = acc
        return self._parities

    def weight_blocks(self):
        if self._blocks is None:
            blocks = {}
            for i, w in enumerate(self.weights()):
                blocks.setdefault(w, []).append(i)
            self._blocks = blocks
        return self._blocks

    def __repr__(self):
        return " (x) ".join(repr(f) for f in self.factors)


# ---------------------------------------------------------------------------
# weight-graded fast paths: every structural map in the package preserves
# weights, so rank/kernel/char-poly decompose over weight blocks


def split_graded(mat, dom_weights, cod_weights):
    """Per-weight blocks of a graded map; raises if any entry crosses weights.

    Returns {weight: (block SparseMap, dom indices, cod indices)} covering
    every weight present on either side.
    """
    dom_blocks = {}
    for i, w in enumerate(dom_weights):
        dom_blocks.setdefault(w, []).append(i)
    cod_blocks = {}
    for i, w in enumerate(cod_weights):
        cod_blocks.setdefault(w, []).append(i)
    dom_pos = {}
    for w, idxs in dom_blocks.items():
        for k, i in enumerate(idxs):
            dom_pos[i] = (w, k)
    cod_pos = {}
    for w, idxs in cod_blocks.items():
        for k, i in enumerate(idxs):
            cod_pos[i] = (w, k)
    ents = {}
    for (r, c), v in mat.entries.items():
        wr, kr = cod_pos[r]
        wc, kc = dom_pos[c]
        if wr != wc:
            raise ValueError(
                f"map is not weight-graded: entry ({r},{c}) sends {wc} to {wr}"
            )
        ents.setdefault(wc, {})[(kr, kc)] = v
    out = {}
    for w in set(dom_blocks) | set(cod_blocks):
        dom_idx = dom_blocks.get(w, [])
        cod_idx = cod_blocks.get(w, [])
        block = SparseMap(len(dom_idx), len(cod_idx), ents.get(w, {}))
        out[w] = (block, dom_idx, cod_idx)
    return out


def blocked_rank(mat, dom_weights, cod_weights):
    return sum(
        block.rank() for block, _, _ in split_graded(mat, dom_weights, cod_weights).values()
    )


def blocked_kernel(mat, dom_weights, cod_weights):
    vecs = []
    for block, dom_idx, _ in split_graded(mat, dom_weights, cod_weights).values():
        for v in block.kernel().vectors:
            vecs.append({dom_idx[i]: x for i, x in v.items()})
    return Subspace.from_vectors(mat.dom_dim, vecs)


def blocked_image(mat, dom_weights, cod_weights):
    vecs = []
    for block, _, cod_idx in split_graded(mat, dom_weights, cod_weights).values():
        for v in block.image().vectors:
            vecs.append({cod_idx[i]: x for i, x in v.items()})
    return Subspace.from_vectors(mat.cod_dim, vecs)


def blocked_char_poly(mat, weights):
    if mat.dom_dim != mat.cod_dim:
        raise DimensionError("char_poly of non-square map")
    poly = [ONE]
    for block, _, _ in split_graded(mat, weights, weights).values():
        poly = poly_mul(poly, block.char_poly())
    return poly


def poly_mul(a, b):
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] += x * y
    return out
