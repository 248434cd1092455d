"""Chevalley-Eilenberg complex with trivial coefficients.

An alternating k-cochain on an n-dimensional algebra with values in
QQ^vdim is stored by its values on strictly increasing index tuples; the
value on an arbitrary tuple follows by sign (zero on repeats).  The
differential is the trivial-coefficient one

    (d w)(X_1, ..., X_{k+1}) =
        sum_{i<j} (-1)^{i+j} w([X_i, X_j], X_1, ..., ^X_i, ..., ^X_j, ...)

with 1-based signs.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .linalg import (ZERO, zeros_vec, identity, mat_vec, vadd, vsub, vscale,
                     is_zero_vec, subspace_from_vectors, kernel, image,
                     solve_affine, Subspace)
from .lie import bracket_vectors


def _sort_sign(idx):
    """Sort an index tuple; return (sorted tuple, sign) or (None, 0) on
    repeats."""
    idx = list(idx)
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
            elif idx[j] == idx[j + 1]:
                return None, 0
    return tuple(idx), sign


@dataclass
class AltCochain:
    degree: int
    source_dim: int
    values_dim: int
    # value vectors on strictly increasing tuples; missing keys are zero
    data: dict = field(default_factory=dict)

    def value(self, idx):
        """Value on a tuple of basis indices, with alternating sign."""
        if self.degree == 0:
            return self.data.get((), zeros_vec(self.values_dim))
        key, sign = _sort_sign(idx)
        if sign == 0:
            return zeros_vec(self.values_dim)
        v = self.data.get(key)
        if v is None:
            return zeros_vec(self.values_dim)
        return v if sign == 1 else [-x for x in v]

    def __call__(self, *vectors):
        """Multilinear evaluation on arbitrary vectors."""
        assert len(vectors) == self.degree
        out = zeros_vec(self.values_dim)
        for key, val in self.data.items():
            # sum over all orderings of the key against the vectors
            total = _alt_coeff(key, vectors)
            if total:
                out = vadd(out, vscale(total, val))
        return out

    def is_zero(self):
        return all(is_zero_vec(v) for v in self.data.values())

    def purge(self):
        self.data = {k: v for k, v in self.data.items()
                     if not is_zero_vec(v)}
        return self


def _alt_coeff(key, vectors):
    """det of the submatrix vectors[r][key[c]] — the coefficient with
    which the basis component at `key` contributes to w(v_1,...,v_k)."""
    k = len(key)
    m = [[vectors[r][key[c]] for c in range(k)] for r in range(k)]
    return _det(m)


def _det(m):
    k = len(m)
    if k == 0:
        return ZERO + 1
    if k == 1:
        return m[0][0]
    if k == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = ZERO
    for c in range(k):
        if m[0][c]:
            minor = [row[:c] + row[c + 1:] for row in m[1:]]
            term = m[0][c] * _det(minor)
            total = total + term if c % 2 == 0 else total - term
    return total


def cochain_from_function(k, n, vdim, fn):
    """Build a cochain from a function of increasing basis index tuples."""
    data = {}
    for key in combinations(range(n), k):
        v = fn(*key)
        if not is_zero_vec(v):
            data[key] = list(v)
    return AltCochain(k, n, vdim, data)


def zero_cochain(k, n, vdim):
    return AltCochain(k, n, vdim, {})


def cochain_add(a, b):
    assert (a.degree, a.source_dim, a.values_dim) == \
        (b.degree, b.source_dim, b.values_dim)
    data = dict(a.data)
    for key, v in b.data.items():
        data[key] = vadd(data[key], v) if key in data else list(v)
    return AltCochain(a.degree, a.source_dim, a.values_dim, data).purge()


def cochain_sub(a, b):
    return cochain_add(a, cochain_scale(-1, b))


def cochain_scale(c, a):
    return AltCochain(a.degree, a.source_dim, a.values_dim,
                      {k: vscale(c, v) for k, v in a.data.items()}).purge()


def cochain_eq(a, b):
    return cochain_sub(a, b).is_zero()


def ce_differential(L, w):
    """Trivial-coefficient Chevalley-Eilenberg differential."""
    assert w.source_dim == L.dim
    k = w.degree
    n = L.dim

    def val(*key):
        out = zeros_vec(w.values_dim)
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = L.c[key[i]][key[j]]
                rest = [key[r] for r in range(k + 1) if r not in (i, j)]
                # w(br, rest...): expand br over the basis
                term = zeros_vec(w.values_dim)
                for m in range(n):
                    if br[m]:
                        term = vadd(term,
                                    vscale(br[m], w.value((m, *rest))))
                # 1-based sign (-1)^{(i+1)+(j+1)} = (-1)^{i+j}
                out = vadd(out, term) if (i + j) % 2 == 0 else \
                    vadd(out, [-x for x in term])
        return out

    return cochain_from_function(k + 1, n, w.values_dim, val)


# ---------------------------------------------------------------------------
# flattening

def cochain_keys(k, n):
    return list(combinations(range(n), k))


def flatten(w):
    keys = cochain_keys(w.degree, w.source_dim)
    out = []
    for key in keys:
        v = w.data.get(key)
        out.extend(v if v is not None else zeros_vec(w.values_dim))
    return out


def unflatten(k, n, vdim, flat):
    keys = cochain_keys(k, n)
    data = {}
    for i, key in enumerate(keys):
        v = flat[i * vdim:(i + 1) * vdim]
        if not is_zero_vec(v):
            data[key] = list(v)
    return AltCochain(k, n, vdim, data)


def ce_matrix(L, vdim, k):
    """Matrix of the differential Alt^k -> Alt^{k+1} in flat coordinates."""
    n = L.dim
    src_keys = cochain_keys(k, n)
    cols = []
    for key in src_keys:
        for c in range(vdim):
            v = zeros_vec(vdim)
            v[c] = ZERO + 1
            basis_cochain = AltCochain(k, n, vdim, {key: v})
            cols.append(flatten(ce_differential(L, basis_cochain)))
    ncols = len(cols)
    nrows = len(cochain_keys(k + 1, n)) * vdim
    return [[cols[j][i] for j in range(ncols)] for i in range(nrows)]


@dataclass
class CohomologySpace:
    degree: int
    source_dim: int
    values_dim: int
    cocycles: Subspace
    coboundaries: Subspace
    representatives: list  # AltCochains spanning H^k

    @property
    def dim(self):
        return self.cocycles.dim - self.coboundaries.dim

    def class_coordinates(self, w):
        """Coordinates of [w] in the representative basis; asserts w is a
        cocycle."""
        flat = flatten(w)
        assert self.cocycles.contains(flat), "not a cocycle"
        # solve flat = sum over coboundary basis + sum over reps
        cols = (self.coboundaries.basis
                + [flatten(r) for r in self.representatives])
        m = [[cols[j][i] for j in range(len(cols))]
             for i in range(len(flat))]
        sol, _ = solve_affine(m, flat)
        assert sol is not None
        return sol[self.coboundaries.dim:]


def cohomology(L, vdim, k):
    n = L.dim
    nflat = len(cochain_keys(k, n)) * vdim
    dk = ce_matrix(L, vdim, k)
    cocycles = kernel(dk, nflat)
    if k == 0:
        cobnd = Subspace(nflat, [], [])
    else:
        cobnd = image(ce_matrix(L, vdim, k - 1))
    # representatives: reduce cocycle basis against coboundaries
    reps = []
    span = cobnd
    for v in cocycles.basis:
        if not span.contains(v):
            reps.append(unflatten(k, n, vdim, v))
            span = subspace_from_vectors(nflat, span.basis + [v])
    return CohomologySpace(k, n, vdim, cocycles, cobnd, reps)


def is_cocycle(L, w):
    return ce_differential(L, w).is_zero()


def is_exact(L, w):
    """(yes/no, primitive | None); rejects non-cocycles."""
    assert is_cocycle(L, w), "input is not a cocycle"
    k = w.degree
    if k == 0:
        return (w.is_zero(), zero_cochain(0, w.source_dim, w.values_dim)
                if w.is_zero() else None)
    m = ce_matrix(L, w.values_dim, k - 1)
    sol, _ = solve_affine(m, flatten(w))
    if sol is None:
        return False, None
    return True, unflatten(k - 1, w.source_dim, w.values_dim, sol)


def pullback(w, mat, new_source_dim=None):
    """(m*w)(X,...) = w(mX, ...).  mat maps the new source into the old."""
    src = new_source_dim if new_source_dim is not None else len(mat[0])
    assert len(mat) == w.source_dim

    def val(*key):
        vs = [mat_vec(mat, _basis_vec(src, i)) for i in key]
        return w(*vs)

    return cochain_from_function(w.degree, src, w.values_dim, val)


def pushforward(w, mat):
    """Post-compose values with mat."""
    assert len(mat[0]) == w.values_dim
    data = {k: mat_vec(mat, v) for k, v in w.data.items()}
    return AltCochain(w.degree, w.source_dim, len(mat), data).purge()


def _basis_vec(n, i):
    v = zeros_vec(n)
    v[i] = ZERO + 1
    return v


# ---------------------------------------------------------------------------
# bilinear (not necessarily alternating) cochains

@dataclass
class Bilinear:
    source_dim: int
    values_dim: int
    b: list  # b[i][j] vector value on (e_i, e_j)

    def __call__(self, x, y):
        out = zeros_vec(self.values_dim)
        for i in range(self.source_dim):
            if not x[i]:
                continue
            for j in range(self.source_dim):
                if y[j]:
                    out = vadd(out, vscale(x[i] * y[j], self.b[i][j]))
        return out


def bilinear_zero(n, vdim):
    return Bilinear(n, vdim, [[zeros_vec(vdim) for _ in range(n)]
                              for _ in range(n)])


def bilinear_from_function(n, vdim, fn):
    return Bilinear(n, vdim, [[list(fn(i, j)) for j in range(n)]
                              for i in range(n)])


def bilinear_add(a, b):
    return Bilinear(a.source_dim, a.values_dim,
                    [[vadd(x, y) for x, y in zip(r1, r2)]
                     for r1, r2 in zip(a.b, b.b)])


def bilinear_sub(a, b):
    return Bilinear(a.source_dim, a.values_dim,
                    [[vsub(x, y) for x, y in zip(r1, r2)]
                     for r1, r2 in zip(a.b, b.b)])


def bilinear_scale(c, a):
    return Bilinear(a.source_dim, a.values_dim,
                    [[vscale(c, x) for x in r] for r in a.b])


def bilinear_eq(a, b):
    return all(x == y for r1, r2 in zip(a.b, b.b)
               for x, y in zip(r1, r2))


def bilinear_is_zero(a):
    return all(is_zero_vec(x) for r in a.b for x in r)


from gmpy2 import mpq as _mpq

HALF = _mpq(1, 2)


def sym_part(a):
    n = a.source_dim
    return Bilinear(n, a.values_dim,
                    [[vscale(HALF, vadd(a.b[i][j], a.b[j][i]))
                      for j in range(n)] for i in range(n)])


def alt_part(a):
    n = a.source_dim
    return Bilinear(n, a.values_dim,
                    [[vscale(HALF, vsub(a.b[i][j], a.b[j][i]))
                      for j in range(n)] for i in range(n)])


def bilinear_to_alt(a):
    """Antisymmetric bilinear form as a degree-2 AltCochain (asserts
    antisymmetry)."""
    n = a.source_dim

    def val(i, j):
        assert a.b[i][j] == [-x for x in a.b[j][i]]
        return a.b[i][j]

    return cochain_from_function(2, n, a.values_dim, val)


def alt_to_bilinear(w):
    assert w.degree == 2
    n = w.source_dim
    return bilinear_from_function(n, w.values_dim,
                                  lambda i, j: w.value((i, j)))


def bilinear_pullback(a, mat, new_source_dim=None):
    src = new_source_dim if new_source_dim is not None else len(mat[0])
    cols = [mat_vec(mat, _basis_vec(src, i)) for i in range(src)]
    return bilinear_from_function(src, a.values_dim,
                                  lambda i, j: a(cols[i], cols[j]))


def bilinear_pushforward(a, mat):
    return Bilinear(a.source_dim, len(mat),
                    [[mat_vec(mat, x) for x in r] for r in a.b])


def bilinear_flatten(a):
    out = []
    for r in a.b:
        for x in r:
            out.extend(x)
    return out


def bilinear_unflatten(n, vdim, flat):
    b = []
    pos = 0
    for i in range(n):
        row = []
        for j in range(n):
            row.append(flat[pos:pos + vdim])
            pos += vdim
        b.append(row)
    return Bilinear(n, vdim, b)
