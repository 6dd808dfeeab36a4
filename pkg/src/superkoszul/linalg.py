"""Exact linear algebra over the rationals.

Everything in the package runs on top of this module: sparse matrices with
Fraction entries, echelonized subspaces, characteristic polynomials and
rational spectra.  No floats anywhere; a residual either is zero or it is not.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "DimensionError",
    "RestrictionError",
    "SpectrumError",
    "SubspaceError",
    "SparseMap",
    "Subspace",
    "Spectrum",
    "poly_eval",
    "poly_clear",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    """Shapes do not line up."""


class RestrictionError(ValueError):
    """A map failed to carry a subspace where it was claimed to."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SpectrumError(ArithmeticError):
    """The spectrum is not (provably) rational; never guessed."""


class SubspaceError(ValueError):
    """Subspace algebra precondition violated."""


# ---------------------------------------------------------------------------
# sparse column vectors: dict index -> Fraction, zeros never stored


def vec_add(u, v, c=ONE):
    """u + c*v for sparse vectors."""
    out = dict(u)
    for i, x in v.items():
        s = out.get(i, ZERO) + c * x
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def vec_scale(u, c):
    if not c:
        return {}
    return {i: c * x for i, x in u.items()}


def vec_pivot(u):
    """Smallest index with a nonzero entry, or None."""
    return min(u) if u else None


class SparseMap:
    """A linear map given by a sparse matrix of exact rationals.

    Entries live in a dict keyed by (row, col); the map sends the unit vector
    e_col to sum entry[row, col] * e_row.  compose(A, B) is A after B.
    """

    __slots__ = ("dom_dim", "cod_dim", "entries", "_cols")

    def __init__(self, dom_dim, cod_dim, entries=None):
        if dom_dim < 0 or cod_dim < 0:
            raise DimensionError("negative dimension")
        self.dom_dim = dom_dim
        self.cod_dim = cod_dim
        clean = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < cod_dim and 0 <= c < dom_dim):
                    raise DimensionError(f"entry ({r},{c}) outside {cod_dim}x{dom_dim}")
                v = Fraction(v)
                if v:
                    clean[(r, c)] = v
        self.entries = clean
        self._cols = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zero(cls, dom_dim, cod_dim):
        return cls(dom_dim, cod_dim)

    @classmethod
    def from_columns(cls, dom_dim, cod_dim, columns):
        ent = {}
        for c, col in columns.items():
            for r, v in col.items():
                if v:
                    ent[(r, c)] = Fraction(v)
        return cls(dom_dim, cod_dim, ent)

    # -- plumbing ------------------------------------------------------------

    def entry(self, r, c):
        return self.entries.get((r, c), ZERO)

    def columns(self):
        """col -> sparse vector view, built once."""
        if self._cols is None:
            cols = {}
            for (r, c), v in self.entries.items():
                cols.setdefault(c, {})[r] = v
            self._cols = cols
        return self._cols

    def column(self, c):
        return dict(self.columns().get(c, {}))

    def nnz(self):
        return len(self.entries)

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseMap):
            return NotImplemented
        return (
            self.dom_dim == other.dom_dim
            and self.cod_dim == other.cod_dim
            and self.entries == other.entries
        )

    __hash__ = None

    def __repr__(self):
        return f"SparseMap({self.dom_dim}->{self.cod_dim}, nnz={self.nnz()})"

    # -- arithmetic ----------------------------------------------------------

    def apply(self, vec):
        cols = self.columns()
        out = {}
        for c, x in vec.items():
            col = cols.get(c)
            if not col:
                continue
            for r, v in col.items():
                s = out.get(r, ZERO) + x * v
                if s:
                    out[r] = s
                else:
                    del out[r]
        return out

    def compose(self, other):
        """self after other."""
        if other.cod_dim != self.dom_dim:
            raise DimensionError(
                f"compose: {self.dom_dim} != {other.cod_dim}"
            )
        cols = self.columns()
        ent = {}
        for c, bcol in other.columns().items():
            acc = {}
            for k, x in bcol.items():
                col = cols.get(k)
                if not col:
                    continue
                for r, v in col.items():
                    s = acc.get(r, ZERO) + x * v
                    if s:
                        acc[r] = s
                    else:
                        del acc[r]
            for r, v in acc.items():
                ent[(r, c)] = v
        return SparseMap(other.dom_dim, self.cod_dim, ent)

    __matmul__ = compose

    def add(self, other, scale=ONE):
        if (self.dom_dim, self.cod_dim) != (other.dom_dim, other.cod_dim):
            raise DimensionError("add: shape mismatch")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ent.get(k, ZERO) + scale * v
            if s:
                ent[k] = s
            else:
                ent.pop(k, None)
        return SparseMap(self.dom_dim, self.cod_dim, ent)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other, scale=-ONE)

    def scaled(self, c):
        c = Fraction(c)
        if not c:
            return SparseMap.zero(self.dom_dim, self.cod_dim)
        return SparseMap(
            self.dom_dim, self.cod_dim, {k: c * v for k, v in self.entries.items()}
        )

    def __rmul__(self, c):
        return self.scaled(c)

    def transpose(self):
        return SparseMap(
            self.cod_dim, self.dom_dim, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def kron(self, other):
        """Kronecker product, row-major index pairing."""
        ent = {}
        for (r1, c1), v1 in self.entries.items():
            for (r2, c2), v2 in other.entries.items():
                ent[(r1 * other.cod_dim + r2, c1 * other.dom_dim + c2)] = v1 * v2
        return SparseMap(self.dom_dim * other.dom_dim, self.cod_dim * other.cod_dim, ent)

    # -- elimination ---------------------------------------------------------

    def _integer_rows(self):
        """Rows cleared to integers (row scaling preserves rank)."""
        rows = {}
        for (r, c), v in self.entries.items():
            rows.setdefault(r, {})[c] = v
        out = []
        for r, row in rows.items():
            den = 1
            for v in row.values():
                den = den * v.denominator // _gcd(den, v.denominator)
            out.append({c: int(v * den) for c, v in row.items()})
        return out

    def rank(self):
        """Rank by fraction-free Bareiss elimination.

        Rows are cleared to integers first; at each step the pivot column is
        the smallest column index still present and the pivot row is chosen by
        minimal bit size of its pivot entry.  All divisions are exact.
        """
        rows = self._integer_rows()
        rank = 0
        prev = 1
        while rows:
            col = min(min(row) for row in rows)
            cand = [i for i, row in enumerate(rows) if col in row]
            piv_i = min(cand, key=lambda i: abs(rows[i][col]).bit_length())
            piv_row = rows.pop(piv_i)
            p = piv_row[col]
            rank += 1
            nxt = []
            for row in rows:
                f = row.pop(col, 0)
                new = {}
                if f:
                    for j in set(row) | set(piv_row):
                        if j == col:
                            continue
                        num = row.get(j, 0) * p - f * piv_row.get(j, 0)
                        if num:
                            q, rem = divmod(num, prev)
                            assert rem == 0, "Bareiss division not exact"
                            new[j] = q
                else:
                    for j, v in row.items():
                        num = v * p
                        q, rem = divmod(num, prev)
                        assert rem == 0, "Bareiss division not exact"
                        new[j] = q
                if new:
                    nxt.append(new)
            rows = nxt
            prev = p
        return rank

    def _rref(self):
        """Reduced row echelon form over Fraction.

        Returns (rows, pivot_cols) where rows is a list of sparse dicts and
        pivot_cols[i] is the pivot column of rows[i].
        """
        rows = {}
        for (r, c), v in self.entries.items():
            rows.setdefault(r, {})[c] = v
        work = [row for row in rows.values() if row]
        done = []
        pivots = []
        while work:
            col = min(min(row) for row in work)
            piv_i = next(i for i, row in enumerate(work) if col in row)
            piv = work.pop(piv_i)
            inv = ONE / piv[col]
            piv = {c: v * inv for c, v in piv.items()}
            nxt = []
            for row in work:
                f = row.get(col)
                row = vec_add(row, piv, -f) if f else row
                if row:
                    nxt.append(row)
            work = nxt
            done = [vec_add(r, piv, -r[col]) if col in r else r for r in done]
            done.append(piv)
            pivots.append(col)
        order = sorted(range(len(pivots)), key=lambda i: pivots[i])
        return [done[i] for i in order], [pivots[i] for i in order]

    def kernel(self):
        """Kernel as a Subspace of the domain.  Rank-nullity is asserted."""
        rows, pivots = self._rref()
        pivset = set(pivots)
        free = [c for c in range(self.dom_dim) if c not in pivset]
        basis = []
        for f in free:
            v = {f: ONE}
            for row, p in zip(rows, pivots):
                x = row.get(f)
                if x:
                    v[p] = -x
            basis.append(v)
        ker = Subspace.from_vectors(self.dom_dim, basis)
        assert ker.dim + len(pivots) == self.dom_dim, "rank-nullity violated"
        return ker

    def image(self):
        return Subspace.from_vectors(
            self.cod_dim, [self.column(c) for c in range(self.dom_dim)]
        )

    def restrict(self, dom, cod):
        """Matrix of self as a map dom -> cod in the subspace bases.

        Raises RestrictionError (with a witness vector) if some image of a
        domain basis vector falls outside cod.
        """
        if dom.ambient_dim != self.dom_dim or cod.ambient_dim != self.cod_dim:
            raise DimensionError("restrict: ambient mismatch")
        ent = {}
        for j, b in enumerate(dom.vectors):
            w = self.apply(b)
            coords = cod.coordinates_of(w)
            if coords is None:
                raise RestrictionError(
                    "image of subspace vector leaves the stated codomain",
                    witness={"index": j, "vector": b, "image": w},
                )
            for i, x in enumerate(coords):
                if x:
                    ent[(i, j)] = x
        return SparseMap(dom.dim, cod.dim, ent)

    # -- serialization --------------------------------------------------------

    def to_triples(self):
        """JSON-safe canonical form; big integers ride as decimal strings."""
        ents = [
            [str(r), str(c), str(v.numerator), str(v.denominator)]
            for (r, c), v in sorted(self.entries.items())
        ]
        return {"dom_dim": self.dom_dim, "cod_dim": self.cod_dim, "entries": ents}

    @classmethod
    def from_triples(cls, data):
        ent = {
            (int(r), int(c)): Fraction(int(num), int(den))
            for r, c, num, den in data["entries"]
        }
        return cls(data["dom_dim"], data["cod_dim"], ent)

    # -- spectra ---------------------------------------------------------------

    def trace(self):
        if self.dom_dim != self.cod_dim:
            raise DimensionError("trace of non-square map")
        return sum((v for (r, c), v in self.entries.items() if r == c), ZERO)

    def char_poly(self):
        """Characteristic polynomial, ascending coefficients, monic.

        Faddeev-LeVerrier recursion: exact over Fraction, division only by
        the step index.
        """
        if self.dom_dim != self.cod_dim:
            raise DimensionError("char_poly of non-square map")
        n = self.dom_dim
        coeffs = [ONE]  # descending during build
        A = self
        for k in range(1, n + 1):
            if k > 1:
                A = self @ (A + coeffs[-1] * SparseMap.identity(n))
            c = -A.trace() / k
            coeffs.append(c)
        coeffs.reverse()
        return coeffs

    def rational_spectrum(self):
        """Exact eigenvalue data; raises SpectrumError if roots are not rational.

        Candidate roots are bounded by divisors of the trailing and leading
        coefficients after clearing denominators, per the usual rational root
        theorem.  Geometric multiplicities come from kernels of M - t*I and
        the diagonalizable flag is the minimal-polynomial product test.
        """
        p = self.char_poly()
        n = self.dom_dim
        pairs = []
        # strip zero roots first
        mult0 = 0
        while not p[0]:
            p = p[1:]
            mult0 += 1
        if mult0:
            pairs.append([ZERO, mult0])
        ints = poly_clear(p)
        for root in _rational_roots(ints):
            m = 0
            q = p
            while True:
                q2, rem = _deflate(q, root)
                if rem:
                    break
                q = q2
                m += 1
            if m:
                pairs.append([root, m])
        total = sum(m for _, m in pairs)
        if total < n:
            raise SpectrumError(
                f"only {total} of {n} eigenvalues are rational; refusing to guess"
            )
        pairs.sort(key=lambda t: t[0])
        out = []
        prod = SparseMap.identity(n)
        for lam, alg in pairs:
            shifted = self + (-lam) * SparseMap.identity(n)
            geo = shifted.kernel().dim
            assert 1 <= geo <= alg
            out.append((lam, alg, geo))
            prod = prod @ shifted
        diag = prod.is_zero()
        assert diag == (sum(g for _, _, g in out) == n)
        return Spectrum(tuple(out), diag)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with algebraic and geometric multiplicities."""

    pairs: tuple  # ((eigenvalue, alg, geo), ...)
    diagonalizable: bool

    def eigenvalues(self):
        return [lam for lam, _, _ in self.pairs]

    def as_set(self):
        return {lam for lam, _, _ in self.pairs}


# ---------------------------------------------------------------------------
# subspaces in reduced column echelon form


class Subspace:
    """Subspace of Q^ambient_dim with a reduced echelon basis.

    Basis vectors are sparse dicts, sorted by pivot (first nonzero index),
    pivot entries are 1 and every basis vector vanishes at the others' pivots.
    """

    __slots__ = ("ambient_dim", "vectors", "pivots")

    def __init__(self, ambient_dim, vectors, pivots):
        self.ambient_dim = ambient_dim
        self.vectors = vectors
        self.pivots = pivots

    @classmethod
    def zero(cls, ambient_dim):
        return cls(ambient_dim, [], [])

    @classmethod
    def full(cls, ambient_dim):
        return cls(
            ambient_dim,
            [{i: ONE} for i in range(ambient_dim)],
            list(range(ambient_dim)),
        )

    @classmethod
    def from_vectors(cls, ambient_dim, vecs):
        sub = cls.zero(ambient_dim)
        for v in vecs:
            sub._insert(v)
        return sub

    @property
    def dim(self):
        return len(self.vectors)

    def _reduce(self, vec):
        v = dict(vec)
        for b, p in zip(self.vectors, self.pivots):
            x = v.get(p)
            if x:
                v = vec_add(v, b, -x)
        return v

    def _insert(self, vec):
        for i in vec:
            if not 0 <= i < self.ambient_dim:
                raise DimensionError("vector outside ambient space")
        v = self._reduce(vec)
        if not v:
            return False
        p = vec_pivot(v)
        inv = ONE / v[p]
        v = {i: x * inv for i, x in v.items()}
        # keep existing vectors reduced against the new pivot
        for i, b in enumerate(self.vectors):
            x = b.get(p)
            if x:
                self.vectors[i] = vec_add(b, v, -x)
        at = 0
        while at < len(self.pivots) and self.pivots[at] < p:
            at += 1
        self.vectors.insert(at, v)
        self.pivots.insert(at, p)
        return True

    def contains(self, vec):
        return not self._reduce(vec)

    def coordinates_of(self, vec):
        """Coordinates in the echelon basis, or None if vec is outside."""
        coords = [vec.get(p, ZERO) for p in self.pivots]
        # verify: reduced form means reading pivots suffices iff vec is inside
        if self._reduce(vec):
            return None
        return coords

    def basis_matrix(self):
        ent = {}
        for j, b in enumerate(self.vectors):
            for i, v in b.items():
                ent[(i, j)] = v
        return SparseMap(self.dim, self.ambient_dim, ent)

    def sum_with(self, other):
        self._check_ambient(other)
        out = Subspace.from_vectors(self.ambient_dim, list(self.vectors))
        for v in other.vectors:
            out._insert(v)
        return out

    def intersect(self, other):
        self._check_ambient(other)
        if not self.vectors or not other.vectors:
            return Subspace.zero(self.ambient_dim)
        cols = {}
        for j, b in enumerate(self.vectors):
            cols[j] = b
        for j, b in enumerate(other.vectors):
            cols[self.dim + j] = vec_scale(b, -ONE)
        stacked = SparseMap.from_columns(
            self.dim + other.dim, self.ambient_dim, cols
        )
        mine = self.basis_matrix()
        vecs = []
        for kv in stacked.kernel().vectors:
            x = {j: v for j, v in kv.items() if j < self.dim}
            vecs.append(mine.apply(x))
        return Subspace.from_vectors(self.ambient_dim, vecs)

    def complement_of(self, inner):
        """An echelon complement of inner inside self (inner must sit inside)."""
        self._check_ambient(inner)
        coords = []
        for v in inner.vectors:
            c = self.coordinates_of(v)
            if c is None:
                raise SubspaceError("complement_of: inner subspace not contained")
            coords.append({i: x for i, x in enumerate(c) if x})
        used = set(Subspace.from_vectors(self.dim, coords).pivots)
        vecs = [self.vectors[i] for i in range(self.dim) if i not in used]
        return Subspace.from_vectors(self.ambient_dim, vecs)

    def le(self, other):
        return all(other.contains(v) for v in self.vectors)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and self.vectors == other.vectors
        )

    __hash__ = None

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.ambient_dim})"

    def _check_ambient(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise SubspaceError("ambient dimensions differ")


# ---------------------------------------------------------------------------
# polynomial helpers (ascending coefficient lists)


def poly_eval(coeffs, x):
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_clear(coeffs):
    """Scale a rational polynomial to primitive integer coefficients."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for c in ints:
        g = _gcd(g, abs(c))
    if g > 1:
        ints = [c // g for c in ints]
    return ints


def _deflate(coeffs, root):
    """Divide by (t - root); returns (quotient, remainder)."""
    acc = ZERO
    out = []
    for c in reversed(coeffs):
        acc = acc * root + c
        out.append(acc)
    rem = out.pop()
    out.reverse()
    return out, rem


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _is_probable_prime(n):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic for n < 3.3e24 with these bases
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factor(n, trial_bound=1_000_000):
    """Trial-division factorization; SpectrumError if a composite survives."""
    f = {}
    for p in (2, 3):
        while n % p == 0:
            f[p] = f.get(p, 0) + 1
            n //= p
    d = 5
    while d * d <= n and d <= trial_bound:
        for p in (d, d + 2):
            while n % p == 0:
                f[p] = f.get(p, 0) + 1
                n //= p
        d += 6
    if n > 1:
        if d * d > n or _is_probable_prime(n):
            f[n] = f.get(n, 0) + 1
        else:
            raise SpectrumError(
                f"cannot factor coefficient remainder {n}; root candidates unknown"
            )
    return f


def _divisors(n, cap=200_000):
    if n == 0:
        raise ValueError("divisors of zero")
    ds = [1]
    for p, e in _factor(abs(n)).items():
        step = []
        pe = 1
        for _ in range(e):
            pe *= p
            step.append(pe)
        ds = [d * q for d in ds for q in [1] + step]
        if len(ds) > cap:
            raise SpectrumError("too many divisor candidates for rational roots")
    return sorted(set(ds))


def _rational_roots(int_coeffs):
    """All rational roots of a primitive integer polynomial (no multiplicity)."""
    if all(c == 0 for c in int_coeffs):
        raise ValueError("zero polynomial")
    a0 = int_coeffs[0]
    an = int_coeffs[-1]
    if a0 == 0:
        raise AssertionError("zero root should be stripped before root search")
    roots = []
    for p in _divisors(a0):
        for q in _divisors(an):
            if _gcd(p, q) != 1:
                continue
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if not poly_eval([Fraction(c) for c in int_coeffs], cand):
                    roots.append(cand)
    return sorted(set(roots))
