"""Exact linear algebra: oracles are naive dense routines written here.

The dense RREF below is the reference implementation for rank, kernel and
echelon bases; SparseMap must agree with it on every input.  Characteristic
polynomials are cross-checked by evaluating det(t*I - M) at interpolation
points with the naive fraction Gauss determinant.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superkoszul.linalg import (
    DimensionError,
    RestrictionError,
    SparseMap,
    SpectrumError,
    Subspace,
    SubspaceError,
    poly_eval,
)

F = Fraction


# ---------------------------------------------------------------------------
# oracles


def dense(m):
    """SparseMap -> list of rows of Fractions."""
    out = [[F(0)] * m.dom_dim for _ in range(m.cod_dim)]
    for (r, c), v in m.entries.items():
        out[r][c] = v
    return out


def from_dense(rows):
    ent = {}
    for r, row in enumerate(rows):
        for c, v in enumerate(row):
            if v:
                ent[(r, c)] = F(v)
    return SparseMap(len(rows[0]) if rows else 0, len(rows), ent)


def naive_rref(rows):
    """Dense RREF; returns (rows, pivot_cols)."""
    rows = [list(map(F, r)) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def naive_rank(m):
    return len(naive_rref(dense(m))[0])


def naive_det(rows):
    """Fraction Gauss elimination determinant."""
    rows = [list(map(F, r)) for r in rows]
    n = len(rows)
    det = F(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c]), None)
        if piv is None:
            return F(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        det *= rows[c][c]
        inv = F(1) / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c]:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return det


def naive_char_poly(m):
    """Interpolate det(tI - M) at n+1 points, solve the Vandermonde system."""
    n = m.dom_dim
    d = dense(m)
    pts = [F(k) for k in range(n + 1)]
    vals = []
    for t in pts:
        shifted = [
            [(t if i == j else F(0)) - d[i][j] for j in range(n)] for i in range(n)
        ]
        vals.append(naive_det(shifted))
    # Lagrange interpolation to coefficient list
    coeffs = [F(0)] * (n + 1)
    for i, (xi, yi) in enumerate(zip(pts, vals)):
        basis = [F(1)]
        denom = F(1)
        for j, xj in enumerate(pts):
            if j == i:
                continue
            basis = [F(0)] + basis[:]
            low = [c * (-xj) for c in basis[1:]] + [F(0)]
            basis = [a + b for a, b in zip(basis, low + [F(0)] * (len(basis) - len(low)))]
            denom *= xi - xj
        for k, c in enumerate(basis):
            coeffs[k] += yi * c / denom
    return coeffs


# simpler, independent interpolation check used below
def poly_from_points(pts, vals):
    """Newton form -> monomial coefficients."""
    n = len(pts)
    table = list(vals)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (pts[i] - pts[i - j])
    coeffs = [F(0)] * n
    acc = [F(1)]
    for j in range(n):
        for k, c in enumerate(acc):
            coeffs[k] += table[j] * c
        acc = [F(0)] + acc
        for k in range(len(acc) - 1):
            acc[k] += acc[k + 1] * (-pts[j])
        acc.pop()
        acc.append(F(0))
    return coeffs


MATS = [
    [[1]],
    [[0]],
    [[2, 1], [0, 2]],
    [[1, 2], [3, 4]],
    [[0, 1], [0, 0]],
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    [[F(1, 2), F(1, 3)], [F(1, 5), F(1, 7)]],
    [[1, 2, 3], [4, 5, 6], [7, 8, 9]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[3, 1, 0, 0], [0, 3, 0, 0], [0, 0, 5, 0], [0, 0, 0, 5]],
]

RECT = [
    [[1, 2, 3], [2, 4, 6]],
    [[1, 0], [0, 1], [1, 1]],
    [[0, 0], [0, 0], [0, 0]],
    [[F(2, 3), 1, 0, 5], [0, 0, 1, 1]],
]


# ---------------------------------------------------------------------------
# SparseMap arithmetic


def test_identity_apply():
    m = SparseMap.identity(4)
    v = {0: F(3), 2: F(-1, 2)}
    assert m.apply(v) == v


def test_compose_matches_dense():
    a = from_dense([[1, 2], [3, 4], [5, 6]])  # 2 -> 3
    b = from_dense([[1, 0, 2], [0, 1, 1]])  # 3 -> 2
    ab = a @ b
    assert ab.dom_dim == 3 and ab.cod_dim == 3
    da, db = dense(a), dense(b)
    expect = [
        [sum(da[i][k] * db[k][j] for k in range(2)) for j in range(3)]
        for i in range(3)
    ]
    assert dense(ab) == expect


def test_compose_shape_error():
    a = from_dense([[1, 2]])
    with pytest.raises(DimensionError):
        a @ a


def test_add_sub_scale():
    a = from_dense([[1, 2], [3, 4]])
    b = from_dense([[0, 1], [1, 0]])
    assert dense(a + b) == [[F(1), F(3)], [F(4), F(4)]]
    assert dense(a - a) == [[F(0), F(0)], [F(0), F(0)]]
    assert (a - a).is_zero()
    assert dense(F(2) * a) == [[F(2), F(4)], [F(6), F(8)]]


def test_transpose():
    a = from_dense([[1, 2, 3], [4, 5, 6]])
    assert dense(a.transpose()) == [[F(1), F(4)], [F(2), F(5)], [F(3), F(6)]]


def test_kron_row_major():
    a = from_dense([[1, 2], [3, 4]])
    b = from_dense([[0, 5], [6, 7]])
    k = a.kron(b)
    da, db = dense(a), dense(b)
    for i1 in range(2):
        for i2 in range(2):
            for j1 in range(2):
                for j2 in range(2):
                    assert k.entry(i1 * 2 + i2, j1 * 2 + j2) == da[i1][j1] * db[i2][j2]


def test_kron_mixed_shapes():
    a = from_dense([[1, 2, 3]])  # 3 -> 1
    b = from_dense([[1], [2]])  # 1 -> 2
    k = a.kron(b)
    assert (k.dom_dim, k.cod_dim) == (3, 2)


def test_entry_bounds_checked():
    with pytest.raises(DimensionError):
        SparseMap(2, 2, {(2, 0): F(1)})


# ---------------------------------------------------------------------------
# rank / kernel / image vs the dense oracle


@pytest.mark.parametrize("rows", MATS + RECT)
def test_rank_matches_naive(rows):
    m = from_dense(rows)
    assert m.rank() == naive_rank(m)


@pytest.mark.parametrize("rows", MATS + RECT)
def test_rank_nullity(rows):
    m = from_dense(rows)
    assert m.rank() + m.kernel().dim == m.dom_dim


@pytest.mark.parametrize("rows", MATS + RECT)
def test_kernel_vectors_are_killed(rows):
    m = from_dense(rows)
    ker = m.kernel()
    for v in ker.vectors:
        assert m.apply(v) == {}


@pytest.mark.parametrize("rows", MATS + RECT)
def test_image_dim_is_rank(rows):
    m = from_dense(rows)
    img = m.image()
    assert img.dim == m.rank()
    for c in range(m.dom_dim):
        assert img.contains(m.column(c))


def test_image_echelon_canonical():
    # two different spanning sets of the same plane give equal Subspace
    a = from_dense([[1, 1], [0, 2], [1, 3]])
    b = from_dense([[2, 1], [2, -1], [4, 0]])
    assert a.image() == b.image()


# ---------------------------------------------------------------------------
# Subspace algebra


def test_subspace_rcef_shape():
    s = Subspace.from_vectors(3, [{0: F(2), 1: F(4)}, {1: F(1), 2: F(1)}])
    assert s.pivots == sorted(s.pivots)
    for v, p in zip(s.vectors, s.pivots):
        assert v[p] == 1
        for q in s.pivots:
            if q != p:
                assert q not in v


def test_contains_and_coordinates():
    s = Subspace.from_vectors(4, [{0: F(1), 3: F(1)}, {1: F(1), 3: F(-1)}])
    v = {0: F(2), 1: F(3), 3: F(-1)}
    assert s.contains(v)
    coords = s.coordinates_of(v)
    rebuilt = {}
    for c, b in zip(coords, s.vectors):
        for i, x in b.items():
            rebuilt[i] = rebuilt.get(i, F(0)) + c * x
    assert {i: x for i, x in rebuilt.items() if x} == v
    assert s.coordinates_of({2: F(1)}) is None


def test_sum_and_intersect():
    a = Subspace.from_vectors(3, [{0: F(1)}, {1: F(1)}])
    b = Subspace.from_vectors(3, [{1: F(1)}, {2: F(1)}])
    assert a.sum_with(b).dim == 3
    cap = a.intersect(b)
    assert cap.dim == 1
    assert cap.contains({1: F(1)})


def test_intersect_dim_formula():
    # dim(A+B) + dim(A cap B) == dim A + dim B on a random-ish pair
    a = Subspace.from_vectors(5, [{0: F(1), 2: F(2)}, {1: F(1), 4: F(1)}, {3: F(1)}])
    b = Subspace.from_vectors(5, [{0: F(1), 2: F(2)}, {2: F(1), 3: F(5)}])
    s = a.sum_with(b)
    c = a.intersect(b)
    assert s.dim + c.dim == a.dim + b.dim
    for v in c.vectors:
        assert a.contains(v) and b.contains(v)


def test_complement_of():
    w = Subspace.from_vectors(4, [{0: F(1)}, {1: F(1)}, {2: F(1), 3: F(2)}])
    u = Subspace.from_vectors(4, [{0: F(1), 1: F(1)}])
    comp = w.complement_of(u)
    assert comp.dim == w.dim - u.dim
    assert u.sum_with(comp) == w
    assert u.intersect(comp).dim == 0


def test_complement_requires_containment():
    w = Subspace.from_vectors(3, [{0: F(1)}])
    u = Subspace.from_vectors(3, [{1: F(1)}])
    with pytest.raises(SubspaceError):
        w.complement_of(u)


def test_ambient_mismatch():
    a = Subspace.from_vectors(3, [{0: F(1)}])
    b = Subspace.from_vectors(4, [{0: F(1)}])
    with pytest.raises(SubspaceError):
        a.sum_with(b)


# ---------------------------------------------------------------------------
# restrict


def test_restrict_diagonal_block():
    m = from_dense([[2, 0, 0], [0, 3, 0], [0, 0, 5]])
    s = Subspace.from_vectors(3, [{0: F(1)}, {2: F(1)}])
    r = m.restrict(s, s)
    assert dense(r) == [[F(2), F(0)], [F(0), F(5)]]


def test_restrict_failure_has_witness():
    m = from_dense([[0, 1], [1, 0]])  # swap
    s = Subspace.from_vectors(2, [{0: F(1)}])
    with pytest.raises(RestrictionError) as ei:
        m.restrict(s, s)
    w = ei.value.witness
    assert w is not None
    assert m.apply(w["vector"]) == w["image"]
    assert not s.contains(w["image"])


def test_restrict_then_apply_commutes():
    m = from_dense([[1, 1, 0], [0, 1, 0], [0, 0, 4]])
    dom = Subspace.from_vectors(3, [{0: F(1)}, {1: F(1)}])
    r = m.restrict(dom, dom)
    v = {0: F(2), 1: F(-3)}
    coords = dom.coordinates_of(v)
    rc = r.apply({i: c for i, c in enumerate(coords) if c})
    lifted = {}
    for i, c in rc.items():
        for j, x in dom.vectors[i].items():
            lifted[j] = lifted.get(j, F(0)) + c * x
    lifted = {k: v2 for k, v2 in lifted.items() if v2}
    assert lifted == m.apply(v)


# ---------------------------------------------------------------------------
# char poly and spectra


@pytest.mark.parametrize("rows", MATS)
def test_char_poly_matches_interpolated_det(rows):
    m = from_dense(rows)
    assert m.char_poly() == naive_char_poly(m)


@pytest.mark.parametrize("rows", MATS)
def test_cayley_hamilton(rows):
    m = from_dense(rows)
    p = m.char_poly()
    n = m.dom_dim
    acc = SparseMap.zero(n, n)
    power = SparseMap.identity(n)
    for c in p:
        acc = acc + c * power
        power = power @ m
    assert acc.is_zero()


def test_char_poly_ascending_monic():
    m = from_dense([[1, 2], [3, 4]])
    p = m.char_poly()
    # t^2 - 5t - 2
    assert p == [F(-2), F(-5), F(1)]


def test_spectrum_diagonal():
    m = from_dense([[2, 0, 0], [0, 2, 0], [0, 0, 3]])
    s = m.rational_spectrum()
    assert s.pairs == ((F(2), 2, 2), (F(3), 1, 1))
    assert s.diagonalizable


def test_spectrum_jordan_block():
    m = from_dense([[2, 1], [0, 2]])
    s = m.rational_spectrum()
    assert s.pairs == ((F(2), 2, 1),)
    assert not s.diagonalizable


def test_spectrum_with_zero_and_fractions():
    m = from_dense([[0, 0], [0, F(3, 4)]])
    s = m.rational_spectrum()
    assert s.pairs == ((F(0), 1, 1), (F(3, 4), 1, 1))
    assert s.diagonalizable


def test_spectrum_irrational_raises():
    m = from_dense([[0, 2], [1, 0]])  # eigenvalues +-sqrt(2)
    with pytest.raises(SpectrumError):
        m.rational_spectrum()


def test_spectrum_rotation_raises():
    m = from_dense([[0, -1], [1, 0]])  # complex spectrum
    with pytest.raises(SpectrumError):
        m.rational_spectrum()


def test_poly_eval():
    assert poly_eval([F(1), F(2), F(3)], F(2)) == F(1) + F(4) + F(12)


# ---------------------------------------------------------------------------
# serialization


def test_triples_roundtrip():
    m = from_dense([[F(1, 3), 0], [0, F(-7, 2)]])
    t = m.to_triples()
    back = SparseMap.from_triples(t)
    assert back == m
    # canonical order and string encoding
    assert t["entries"] == sorted(t["entries"], key=lambda e: (int(e[0]), int(e[1])))
    for r, c, num, den in t["entries"]:
        assert isinstance(num, str) and isinstance(den, str)


# ---------------------------------------------------------------------------
# hypothesis properties


@st.composite
def sparse_maps(draw, max_dim=5):
    rows = draw(st.integers(0, max_dim))
    cols = draw(st.integers(0, max_dim))
    n = draw(st.integers(0, min(10, rows * cols)))
    ent = {}
    for _ in range(n):
        r = draw(st.integers(0, max(rows - 1, 0)))
        c = draw(st.integers(0, max(cols - 1, 0)))
        num = draw(st.integers(-9, 9))
        den = draw(st.integers(1, 4))
        if rows and cols:
            ent[(r, c)] = F(num, den)
    return SparseMap(cols, rows, ent)


@given(sparse_maps())
@settings(max_examples=60, deadline=None)
def test_prop_rank_nullity(m):
    assert m.rank() + m.kernel().dim == m.dom_dim


@given(sparse_maps())
@settings(max_examples=60, deadline=None)
def test_prop_rank_transpose(m):
    assert m.rank() == m.transpose().rank()


@given(sparse_maps(max_dim=4))
@settings(max_examples=40, deadline=None)
def test_prop_cayley_hamilton(m):
    if m.dom_dim != m.cod_dim:
        return
    p = m.char_poly()
    acc = SparseMap.zero(m.dom_dim, m.dom_dim)
    power = SparseMap.identity(m.dom_dim)
    for c in p:
        acc = acc + c * power
        power = power @ m
    assert acc.is_zero()


@given(sparse_maps(), sparse_maps())
@settings(max_examples=40, deadline=None)
def test_prop_kron_rank_multiplicative(a, b):
    assert a.kron(b).rank() == a.rank() * b.rank()
