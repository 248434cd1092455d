"""Lie algebras by structure constants, maps between them, standard examples.

Conventions frozen here:
  * so3 basis is cyclic: [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2.
  * sl2 basis is (h,e,f): [h,e]=2e, [h,f]=-2f, [e,f]=h.
  * gl(n) basis is the elementary matrices E_11, E_12, ..., row-major.
"""

from dataclasses import dataclass, field
from itertools import combinations

from gmpy2 import mpq

from .linalg import (ZERO, ONE, zeros_vec, zeros_mat, identity, mat_vec,
                     mat_mul, mat_sub, is_zero_vec, kernel, vadd, vsub,
                     vscale)


@dataclass
class LieAlgebra:
    dim: int
    # c[i][j] is the vector [e_i, e_j]
    c: list
    labels: list = field(default_factory=list)

    def bracket(self, x, y):
        return bracket_vectors(self, x, y)

    def ad(self, x):
        """Matrix of ad_x = [x, -]."""
        n = self.dim
        cols = []
        for j in range(n):
            v = zeros_vec(n)
            for i in range(n):
                if x[i]:
                    v = vadd(v, vscale(x[i], self.c[i][j]))
            cols.append(v)
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def bracket_vectors(L, x, y):
    assert len(x) == L.dim and len(y) == L.dim, "dimension mismatch"
    out = zeros_vec(L.dim)
    for i in range(L.dim):
        if not x[i]:
            continue
        for j in range(L.dim):
            if y[j]:
                out = vadd(out, vscale(x[i] * y[j], L.c[i][j]))
    return out


@dataclass
class LinearMap:
    source_dim: int
    target_dim: int
    matrix: list  # target_dim x source_dim

    def __call__(self, v):
        return mat_vec(self.matrix, v)


def map_compose(f, g):
    """f after g."""
    return LinearMap(g.source_dim, f.target_dim, mat_mul(f.matrix, g.matrix))


def is_homomorphism(L, M, mat):
    """Does the matrix (dim M x dim L) respect brackets on basis pairs?"""
    n = L.dim
    img = [mat_vec(mat, e) for e in identity(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lhs = mat_vec(mat, L.c[i][j])
            rhs = bracket_vectors(M, img[i], img[j])
            if lhs != rhs:
                return False
    return True


def validate_lie(L):
    """Antisymmetry + Jacobi report; never raises."""
    n = L.dim
    for i in range(n):
        if not is_zero_vec(L.c[i][i]):
            return {"ok": False, "reason": "antisymmetry",
                    "witness": (i, i)}
        for j in range(i + 1, n):
            if L.c[i][j] != [-x for x in L.c[j][i]]:
                return {"ok": False, "reason": "antisymmetry",
                        "witness": (i, j)}
    for i, j, k in combinations(range(n), 3):
        jac = vadd(vadd(bracket_vectors(L, identity(n)[i], L.c[j][k]),
                        bracket_vectors(L, identity(n)[j],
                                        [-x for x in L.c[i][k]])),
                   bracket_vectors(L, identity(n)[k], L.c[i][j]))
        if not is_zero_vec(jac):
            return {"ok": False, "reason": "jacobi", "witness": (i, j, k)}
    return {"ok": True}


def algebra_from_sparse(dim, triples, labels=None):
    """Build from brackets given only for i < j as (i, j, {k: coeff})."""
    c = [[zeros_vec(dim) for _ in range(dim)] for _ in range(dim)]
    for i, j, comps in triples:
        v = zeros_vec(dim)
        for k, x in comps.items():
            v[k] = mpq(x)
        c[i][j] = v
        c[j][i] = [-x for x in v]
    return LieAlgebra(dim, c, labels or [])


def abelian(n):
    return algebra_from_sparse(n, [], ["a%d" % i for i in range(n)])


def heisenberg3():
    return algebra_from_sparse(3, [(0, 1, {2: 1})], ["x", "y", "z"])


def so3():
    return algebra_from_sparse(
        3, [(0, 1, {2: 1}), (1, 2, {0: 1}), (2, 0, {1: 1})],
        ["e1", "e2", "e3"])


def sl2():
    return algebra_from_sparse(
        3, [(0, 1, {1: 2}), (0, 2, {2: -2}), (1, 2, {0: 1})],
        ["h", "e", "f"])


def matrix_mult_tensor(n):
    """Associative multiplication tensor of n x n matrices in the
    elementary-matrix basis E_11, E_12, ..., row-major:
    E_ij E_kl = delta_jk E_il."""
    d = n * n
    m = [[zeros_vec(d) for _ in range(d)] for _ in range(d)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    if j == k:
                        m[i * n + j][k * n + l][i * n + l] = ONE
    return m


def lie_from_associative(mult):
    """Commutator Lie algebra of an associative multiplication tensor."""
    d = len(mult)
    c = [[vsub(mult[i][j], mult[j][i]) for j in range(d)] for i in range(d)]
    return LieAlgebra(d, c)


def gl(n):
    L = lie_from_associative(matrix_mult_tensor(n))
    L.labels = ["E%d%d" % (i + 1, j + 1) for i in range(n) for j in range(n)]
    return L


def standard_algebras(name, *params):
    if name == "abelian":
        return abelian(params[0])
    if name == "heisenberg3":
        return heisenberg3()
    if name == "so3":
        return so3()
    if name == "sl2":
        return sl2()
    if name == "gl":
        return gl(params[0])
    if name == "matrix_algebra_commutator":
        return gl(params[0])
    raise ValueError("unknown algebra name: %r" % (name,))


@dataclass
class ActionTensor:
    """Action of an actor algebra on a module algebra by derivations.

    a[i] is the matrix of the action of the i-th actor basis vector."""
    actor_dim: int
    module_dim: int
    a: list

    def act(self, x, v):
        """Action of actor vector x on module vector v."""
        out = zeros_vec(self.module_dim)
        for i in range(self.actor_dim):
            if x[i]:
                out = vadd(out, vscale(x[i], mat_vec(self.a[i], v)))
        return out

    def matrix_of(self, x):
        m = zeros_mat(self.module_dim, self.module_dim)
        for i in range(self.actor_dim):
            if x[i]:
                m = [vadd(r, vscale(x[i], s)) for r, s in zip(m, self.a[i])]
        return m


def validate_action(G, H, act):
    """Check each a[i] is a derivation of H and a respects G's bracket."""
    n, m = G.dim, H.dim
    em = identity(m)
    for i in range(n):
        ai = act.a[i]
        for j in range(m):
            for k in range(j + 1, m):
                lhs = mat_vec(ai, H.c[j][k])
                rhs = vadd(bracket_vectors(H, mat_vec(ai, em[j]), em[k]),
                           bracket_vectors(H, em[j], mat_vec(ai, em[k])))
                if lhs != rhs:
                    return {"ok": False, "reason": "derivation",
                            "witness": (i, j, k)}
    for i in range(n):
        for j in range(i + 1, n):
            lhs = act.matrix_of(G.c[i][j])
            rhs = mat_sub(mat_mul(act.a[i], act.a[j]),
                          mat_mul(act.a[j], act.a[i]))
            if lhs != rhs:
                return {"ok": False, "reason": "representation",
                        "witness": (i, j)}
    return {"ok": True}


def adjoint_action(L):
    return ActionTensor(L.dim, L.dim, [L.ad(e) for e in identity(L.dim)])


def _derivation_space(product):
    """Kernel of the Leibniz constraint for a bilinear product tensor.

    Unknown D is a d x d matrix, flattened row-major."""
    d = len(product)
    rows = []
    # D(e_i * e_j) = (D e_i) * e_j + e_i * (D e_j), componentwise in k
    for i in range(d):
        for j in range(d):
            pij = product[i][j]
            for k in range(d):
                row = zeros_vec(d * d)
                # D(e_i*e_j)_k = sum_m D[k][m] p_ij[m]
                for m in range(d):
                    if pij[m]:
                        row[k * d + m] += pij[m]
                # -(De_i * e_j)_k = -sum_m D[m][i] (e_m*e_j)_k
                for m in range(d):
                    if product[m][j][k]:
                        row[m * d + i] -= product[m][j][k]
                # -(e_i * De_j)_k
                for m in range(d):
                    if product[i][m][k]:
                        row[m * d + j] -= product[i][m][k]
                rows.append(row)
    return kernel(rows, d * d)


def derivation_algebra(product, dim=None):
    """Derivations of a bilinear product tensor, with commutator bracket.

    Returns (Der, embed) where embed's columns express each Der basis
    element as a dim x dim matrix flattened row-major (an embedding of
    Der into gl(dim))."""
    d = dim if dim is not None else len(product)
    ker = _derivation_space(product)
    mats = [[v[r * d:(r + 1) * d] for r in range(d)] for v in ker.basis]
    nder = len(mats)
    # structure constants of the commutator in the solved basis
    c = [[None] * nder for _ in range(nder)]
    for i in range(nder):
        for j in range(nder):
            comm = mat_sub(mat_mul(mats[i], mats[j]),
                           mat_mul(mats[j], mats[i]))
            flat = [x for row in comm for x in row]
            coords = ker.coordinates(flat)
            assert coords is not None, "derivations not closed under bracket"
            c[i][j] = coords
    Der = LieAlgebra(nder, c)
    embed = LinearMap(nder, d * d,
                      [[ker.basis[j][r] for j in range(nder)]
                       for r in range(d * d)])
    return Der, embed
