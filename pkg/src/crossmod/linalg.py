r"""Exact rational dense linear algebra.

Scalars are gmpy2.mpq (always in lowest terms, positive denominator).
Matrices are plain lists of row lists; vectors are plain lists.  All
elimination goes through a sparse dict-row echelon routine, which keeps
the desk-scale systems (a few thousand rows, a few hundred columns, very
sparse) fast while staying exact.

Subspaces are stored in a canonical reduced form: the basis vectors are
the nonzero rows of the reduced row echelon form of the matrix whose rows
span the space.  Equal subspaces therefore have bit-identical bases.
"""

from dataclasses import dataclass, field

from gmpy2 import mpq

QQ = mpq
ZERO = mpq(0)
ONE = mpq(1)


def qstr(x):
    """Serialize a rational as "num/den" (den omitted when 1)."""
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


def parse_q(s):
    return mpq(s)


# ---------------------------------------------------------------------------
# vectors and dense matrices

def zeros_vec(n):
    return [ZERO] * n


def zeros_mat(r, c):
    return [[ZERO] * c for _ in range(r)]


def identity(n):
    m = zeros_mat(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def vadd(x, y):
    return [a + b for a, b in zip(x, y)]


def vsub(x, y):
    return [a - b for a, b in zip(x, y)]


def vscale(c, x):
    c = mpq(c)
    return [c * a for a in x]


def is_zero_vec(x):
    return all(a == 0 for a in x)


def mat_vec(m, v):
    assert not m or len(m[0]) == len(v), "dimension mismatch"
    return [sum((row[j] * v[j] for j in range(len(v)) if v[j]), ZERO)
            for row in m]


def mat_mul(a, b):
    if not a or not b:
        return zeros_mat(len(a), len(b[0]) if b else 0)
    assert len(a[0]) == len(b), "dimension mismatch"
    bt = list(zip(*b))
    return [[sum((ra[k] * cb[k] for k in range(len(ra)) if ra[k]), ZERO)
             for cb in bt] for ra in a]


def mat_mul_shaped(a, b, cols_b):
    """Product a @ b where b may have zero rows (losing its column
    count); cols_b supplies the column count of b."""
    if not b or (a and len(a[0]) == 0):
        return zeros_mat(len(a), cols_b)
    return mat_mul(a, b)


def mat_add(a, b):
    return [vadd(x, y) for x, y in zip(a, b)]


def mat_sub(a, b):
    return [vsub(x, y) for x, y in zip(a, b)]


def mat_scale(c, a):
    return [vscale(c, x) for x in a]


def transpose(m):
    return [list(col) for col in zip(*m)] if m else []


def mat_eq(a, b):
    return len(a) == len(b) and all(x == y for x, y in zip(a, b))


def column(m, j):
    return [row[j] for row in m]


def columns(m):
    return transpose(m)


def mat_from_columns(cols, nrows=None):
    if not cols:
        return [[] for _ in range(nrows or 0)]
    return transpose(cols)


# ---------------------------------------------------------------------------
# sparse echelon core

def _row_to_dict(row):
    return {j: x for j, x in enumerate(row) if x}


def rref_sparse(rows, ncols):
    """Reduced row echelon form of sparse dict rows.

    Returns (pivot_rows, pivots): pivot_rows[i] is a dict col->mpq with
    leading 1 at column pivots[i]; rows are fully reduced and sorted by
    pivot column.
    """
    echelon = {}  # pivot col -> row dict
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row)
            if lead in echelon:
                c = row[lead]
                for j, x in echelon[lead].items():
                    v = row.get(j, ZERO) - c * x
                    if v:
                        row[j] = v
                    else:
                        row.pop(j, None)
            else:
                c = row[lead]
                echelon[lead] = {j: x / c for j, x in row.items()}
                break
    # back substitution
    pivots = sorted(echelon)
    for i in range(len(pivots) - 1, -1, -1):
        p = pivots[i]
        rp = echelon[p]
        for p2 in pivots[:i]:
            r2 = echelon[p2]
            c = r2.get(p)
            if c:
                for j, x in rp.items():
                    v = r2.get(j, ZERO) - c * x
                    if v:
                        r2[j] = v
                    else:
                        r2.pop(j, None)
    return [echelon[p] for p in pivots], pivots


def rank(m):
    ncols = len(m[0]) if m else 0
    rows, _ = rref_sparse([_row_to_dict(r) for r in m], ncols)
    return len(rows)


# ---------------------------------------------------------------------------
# subspaces

@dataclass
class Subspace:
    """A subspace of QQ^ambient_dim in canonical reduced echelon form."""
    ambient_dim: int
    basis: list = field(default_factory=list)  # list of vectors
    pivots: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, v):
        v = list(v)
        for p, b in zip(self.pivots, self.basis):
            c = v[p]
            if c:
                v = [a - c * x for a, x in zip(v, b)]
        return is_zero_vec(v)

    def coordinates(self, v):
        """Coordinates of v in the canonical basis; None if v not in span."""
        coords = []
        v = list(v)
        for p, b in zip(self.pivots, self.basis):
            c = v[p]
            coords.append(c)
            if c:
                v = [a - c * x for a, x in zip(v, b)]
        if not is_zero_vec(v):
            return None
        return coords

    def basis_matrix(self):
        """ambient_dim x dim matrix with the basis as columns."""
        return mat_from_columns(self.basis, self.ambient_dim)

    def __eq__(self, other):
        return (isinstance(other, Subspace)
                and self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots
                and all(x == y for b1, b2 in zip(self.basis, other.basis)
                        for x, y in zip(b1, b2)))


def subspace_from_vectors(ambient_dim, vecs):
    rows, pivots = rref_sparse([_row_to_dict(v) for v in vecs], ambient_dim)
    basis = []
    for r in rows:
        v = zeros_vec(ambient_dim)
        for j, x in r.items():
            v[j] = x
        basis.append(v)
    return Subspace(ambient_dim, basis, pivots)


def zero_subspace(ambient_dim):
    return Subspace(ambient_dim, [], [])


def full_subspace(ambient_dim):
    return subspace_from_vectors(ambient_dim, identity(ambient_dim))


def kernel(m, ncols=None):
    """Null space of matrix m as a canonical Subspace of QQ^cols."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    rows, pivots = rref_sparse([_row_to_dict(r) for r in m], ncols)
    pivset = set(pivots)
    free = [j for j in range(ncols) if j not in pivset]
    vecs = []
    for f in free:
        v = zeros_vec(ncols)
        v[f] = ONE
        for p, r in zip(pivots, rows):
            if r.get(f):
                v[p] = -r[f]
        vecs.append(v)
    return subspace_from_vectors(ncols, vecs)


def image(m):
    """Column space of m as a canonical Subspace of QQ^rows."""
    nrows = len(m)
    return subspace_from_vectors(nrows, transpose(m) if m else [])


def complement(s):
    """Deterministic complement: standard basis vectors at non-pivot slots."""
    pivset = set(s.pivots)
    vecs = []
    for j in range(s.ambient_dim):
        if j not in pivset:
            v = zeros_vec(s.ambient_dim)
            v[j] = ONE
            vecs.append(v)
    return subspace_from_vectors(s.ambient_dim, vecs)


def solve_affine(a, b):
    """Solve a x = b.  Returns (particular | None, kernel Subspace)."""
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    assert len(b) == nrows, "dimension mismatch"
    aug = []
    for i in range(nrows):
        row = _row_to_dict(a[i])
        if b[i]:
            row[ncols] = b[i]
        aug.append(row)
    rows, pivots = rref_sparse(aug, ncols + 1)
    hom = kernel(a, ncols)
    if ncols in pivots:
        return None, hom  # inconsistent
    part = zeros_vec(ncols)
    for p, r in zip(pivots, rows):
        part[p] = r.get(ncols, ZERO)
    return part, hom


def solve_matrix(a, rhs_mat):
    """Solve a X = rhs columnwise; None if any column is inconsistent."""
    cols = []
    for j in range(len(rhs_mat[0]) if rhs_mat else 0):
        x, _ = solve_affine(a, column(rhs_mat, j))
        if x is None:
            return None
        cols.append(x)
    return mat_from_columns(cols, len(a[0]) if a else 0)


def mat_inverse(m):
    n = len(m)
    inv = solve_matrix(m, identity(n))
    if inv is None or rank(m) < n:
        raise ValueError("matrix not invertible")
    return inv


def quotient_data(ambient_dim, s):
    """Projection and lift for QQ^n / s.

    Returns (proj, lift) with proj: n -> q, lift: q -> n, proj @ lift = id,
    kernel(proj) = s, and lift landing in the pivot-rule complement.
    """
    comp = complement(s)
    q = comp.dim
    lift = comp.basis_matrix()
    if s.dim == 0:
        return identity(ambient_dim), lift
    full = mat_from_columns(s.basis + comp.basis, ambient_dim)
    inv = mat_inverse(full)
    proj = inv[s.dim:]  # last q rows: coefficients along the complement
    return proj, lift


def intersect(s1, s2):
    """Intersection of two subspaces of the same ambient space."""
    n = s1.ambient_dim
    # vectors v = B1 x = B2 y  <->  [B1 | -B2] (x,y) = 0
    b1 = s1.basis_matrix()
    b2 = s2.basis_matrix()
    m = [b1[i] + [-x for x in b2[i]] for i in range(n)]
    ker = kernel(m, s1.dim + s2.dim)
    vecs = [mat_vec(b1, v[:s1.dim]) for v in ker.basis]
    return subspace_from_vectors(n, vecs)


def sum_spaces(s1, s2):
    return subspace_from_vectors(s1.ambient_dim, s1.basis + s2.basis)
