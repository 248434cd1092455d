"""Constructors for the worked-example families, plus the polynomial
path model.

Polynomial paths over the rationals stand in for smooth paths: the
pointwise bracket, differentiation, endpoint evaluation, and the defining
integral of the central 2-cocycle are all exact on polynomials.  The path
spaces are infinite-dimensional, so their identities are property-tested
on random samples rather than on a finite basis.

The finite-dimensional "truncation" surrogate built by
path_truncation_module is a semidirect-product stand-in: g = f |x n with
n a sum of adjoint copies of f, h = n (+) a with a central twist nu
solved from the axioms plus anchor equations tying nu to the path
2-cocycle where consistent.
"""

from dataclasses import dataclass, field

from gmpy2 import mpq

from .linalg import (ZERO, ONE, zeros_vec, zeros_mat, identity, mat_vec,
                     mat_mul, is_zero_vec, solve_affine, vadd, vsub, vscale)
from .lie import (LieAlgebra, ActionTensor, bracket_vectors, abelian, gl,
                  matrix_mult_tensor, derivation_algebra, adjoint_action)
from .cochains import Bilinear, bilinear_from_function
from .crossed import build_crossed_module, CrossedModule


# ---------------------------------------------------------------------------
# product and torus families

def zero_action(actor_dim, module_dim):
    return ActionTensor(actor_dim, module_dim,
                        [zeros_mat(module_dim, module_dim)
                         for _ in range(actor_dim)])


def product_module(a_dim, F):
    """t = 0 and trivial action: kernel a = h, quotient f = g."""
    h = abelian(a_dim)
    t = zeros_mat(F.dim, a_dim)
    M, report = build_crossed_module(h, F, t, zero_action(F.dim, a_dim))
    assert report["equivariance"]["ok"] and M is not None
    return M


def categorical_torus(n, J=None):
    """h = Q, g = Q^n, both abelian, t = 0, trivial action.  When J is
    given, also returns the bilinear form J as an adjustment candidate."""
    M = product_module(1, abelian(n))
    if J is None:
        return M
    eta = Bilinear(n, 1, [[[mpq(J[i][j])] for j in range(n)]
                          for i in range(n)])
    return M, eta


def matrix_aut(n):
    """The automorphism module of the n x n matrix algebra: h = gl(n)
    under the commutator, g = the associative derivation algebra, t =
    inner derivation, action = tautological."""
    mult = matrix_mult_tensor(n)
    h = gl(n)
    Der, embed = derivation_algebra(mult)
    d = n * n
    # t: flatten ad-commutator of each elementary matrix into Der coords
    eh = identity(d)
    cols = []
    for j in range(d):
        adj = h.ad(eh[j])  # commutator action on gl(n) vectors
        flat = [x for row in adj for x in row]
        # coordinates in the derivation basis: solve embed c = flat
        sol, _ = solve_affine(embed.matrix, flat)
        assert sol is not None, "inner derivation outside Der"
        cols.append(sol)
    t = [[cols[j][r] for j in range(d)] for r in range(Der.dim)]
    # tautological action: Der basis element acts by its matrix
    a = []
    for i in range(Der.dim):
        col = [embed.matrix[r][i] for r in range(d * d)]
        a.append([col[r * d:(r + 1) * d] for r in range(d)])
    M, report = build_crossed_module(h, Der, t, ActionTensor(Der.dim, d, a))
    assert M is not None, report
    return M


# ---------------------------------------------------------------------------
# polynomial paths

@dataclass
class PolyPath:
    target: LieAlgebra
    coeffs: list  # coeffs[k] is the vector coefficient of t^k

    def eval(self, t):
        t = mpq(t)
        out = zeros_vec(self.target.dim)
        power = mpq(1)
        for c in self.coeffs:
            out = vadd(out, vscale(power, c))
            power = power * t
        return out

    def at_one(self):
        out = zeros_vec(self.target.dim)
        for c in self.coeffs:
            out = vadd(out, c)
        return out

    def deriv(self):
        return PolyPath(self.target,
                        [vscale(k, c)
                         for k, c in enumerate(self.coeffs)][1:]
                        or [zeros_vec(self.target.dim)])

    def is_based(self):
        return is_zero_vec(self.coeffs[0]) if self.coeffs else True

    def is_loop(self):
        return self.is_based() and is_zero_vec(self.at_one())

    def is_zero(self):
        return all(is_zero_vec(c) for c in self.coeffs)


def path_zero(F):
    return PolyPath(F, [zeros_vec(F.dim)])


def path_add(f, g):
    d = max(len(f.coeffs), len(g.coeffs))
    z = zeros_vec(f.target.dim)
    return PolyPath(f.target,
                    [vadd(f.coeffs[k] if k < len(f.coeffs) else z,
                          g.coeffs[k] if k < len(g.coeffs) else z)
                     for k in range(d)])


def path_sub(f, g):
    return path_add(f, path_scale(-1, g))


def path_scale(c, f):
    return PolyPath(f.target, [vscale(c, v) for v in f.coeffs])


def path_eq(f, g):
    return path_sub(f, g).is_zero()


def path_bracket(f, g):
    """Pointwise bracket: coefficient convolution."""
    F = f.target
    out = [zeros_vec(F.dim) for _ in range(len(f.coeffs) + len(g.coeffs))]
    for k, a in enumerate(f.coeffs):
        if is_zero_vec(a):
            continue
        for l, b in enumerate(g.coeffs):
            if not is_zero_vec(b):
                out[k + l] = vadd(out[k + l], bracket_vectors(F, a, b))
    return PolyPath(F, out or [zeros_vec(F.dim)])


def eta_tilde(B, f, g):
    """-2 * integral over [0,1] of B(f'(t), g(t)):
    exact monomial integration, -2 sum_{k>=1,l>=0} k/(k+l) B(c_k, d_l)."""
    out = zeros_vec(B.values_dim)
    for k in range(1, len(f.coeffs)):
        ck = f.coeffs[k]
        if is_zero_vec(ck):
            continue
        for l in range(len(g.coeffs)):
            dl = g.coeffs[l]
            if not is_zero_vec(dl):
                out = vadd(out, vscale(mpq(-2 * k, k + l), B(ck, dl)))
    return out


@dataclass
class PathCMElement:
    loop_part: PolyPath  # in the based-loop space
    central_part: list   # vector in a


def path_section(F, psi_coeffs=None):
    """Section x -> psi(t) x with psi(0) = 0, psi(1) = 1; canonical
    psi = t."""
    if psi_coeffs is None:
        psi_coeffs = [mpq(0), mpq(1)]
    psi = [mpq(c) for c in psi_coeffs]
    assert psi[0] == 0, "psi(0) must vanish"
    assert sum(psi) == 1, "psi(1) must be 1"

    def s(x):
        return PolyPath(F, [vscale(c, x) for c in psi])

    return s


@dataclass
class PathOps:
    """Symbolic crossed-module interface for the path model over (F, B):
    h = loops (+) a with the centrally extended bracket, g = based paths,
    t = loop inclusion, p = endpoint evaluation."""
    F: LieAlgebra
    B: Bilinear  # ad-invariant symmetric form on F, values in a

    def h_bracket(self, e1, e2):
        f, g = e1.loop_part, e2.loop_part
        return PathCMElement(path_bracket(f, g), eta_tilde(self.B, f, g))

    def t(self, elem):
        return elem.loop_part

    def act(self, f, elem):
        g = elem.loop_part
        return PathCMElement(path_bracket(f, g), eta_tilde(self.B, f, g))

    def p(self, f):
        return f.at_one()

    def u_s(self, s):
        """Splitting attached to a section: f -> (f - s(f(1)), 0)."""

        def u(f):
            return PathCMElement(path_sub(f, s(f.at_one())),
                                 zeros_vec(self.B.values_dim))

        return u

    def omega_u(self, s, f, g):
        """The splitting 2-cochain evaluated from its defining formula
        for u = u_s: act(f, u g) - act(g, u f) - [u f, u g]
        + u([rho-perp f, rho-perp g]) with rho-perp = s o ev1."""
        u = self.u_s(s)
        uf, ug = u(f), u(g)
        out = self.elem_sub(self.act(f, ug), self.act(g, uf))
        out = self.elem_sub(out, self.h_bracket(uf, ug))
        pf = s(f.at_one())
        pg = s(g.at_one())
        out = self.elem_add(out, u(path_bracket(pf, pg)))
        return out

    def omega_closed_form(self, s0, f, g):
        """For the canonical section: ([f,g] - s0([f(1),g(1)]),
        antisymmetric part of the path 2-cocycle)."""
        br = path_bracket(f, g)
        end = bracket_vectors(self.F, f.at_one(), g.at_one())
        central = vscale(mpq(1, 2), vsub(eta_tilde(self.B, f, g),
                                         eta_tilde(self.B, g, f)))
        return PathCMElement(path_sub(br, s0(end)), central)

    def eta(self, s, f, g):
        """The path adjustment attached to a section:
        ([f,g] - s([f(1),g(1)]), path 2-cocycle)."""
        br = path_bracket(f, g)
        end = bracket_vectors(self.F, f.at_one(), g.at_one())
        return PathCMElement(path_sub(br, s(end)), eta_tilde(self.B, f, g))

    def elem_add(self, a, b):
        return PathCMElement(path_add(a.loop_part, b.loop_part),
                             vadd(a.central_part, b.central_part))

    def elem_sub(self, a, b):
        return PathCMElement(path_sub(a.loop_part, b.loop_part),
                             vsub(a.central_part, b.central_part))

    def elem_eq(self, a, b):
        return path_eq(a.loop_part, b.loop_part) and \
            a.central_part == b.central_part


def path_crossed_module_ops(B, F):
    return PathOps(F, B)


def path_adjustment(B, F, s):
    ops = PathOps(F, B)
    return lambda f, g: ops.eta(s, f, g)


# ---------------------------------------------------------------------------
# finite-dimensional truncation surrogate

def path_truncation_module(B, F, a_dim, depth=1):
    """A validated finite-dimensional central crossed module attached to
    (F, B): g = F |x n with n a sum of `depth` adjoint copies of F, h =
    n (+) a with central twist nu.  nu is solved from the module axioms
    together with anchor equations matching the path 2-cocycle on the
    representatives t*x and (t^{k+1} - t)*m; when the anchors are
    inconsistent with the axioms they are dropped (deterministically)."""
    assert depth >= 1
    fd = F.dim
    nd = fd * depth
    gdim = fd + nd
    hdim = nd + a_dim

    def gvec(x, ncomps):
        return list(x) + list(ncomps)

    # g bracket: [(x, n), (y, m)] = ([x, y], x.m - y.n) componentwise
    def g_bracket_basis(i, j):
        out = zeros_vec(gdim)
        if i < fd and j < fd:
            br = F.c[i][j]
            for r in range(fd):
                out[r] = br[r]
        elif i < fd:
            cp, r0 = divmod(j - fd, fd)
            br = F.c[i][r0]
            for r in range(fd):
                out[fd + cp * fd + r] = br[r]
        elif j < fd:
            cp, r0 = divmod(i - fd, fd)
            br = F.c[j][r0]
            for r in range(fd):
                out[fd + cp * fd + r] = -br[r]
        return out

    gc = [[g_bracket_basis(i, j) for j in range(gdim)] for i in range(gdim)]
    g = LieAlgebra(gdim, gc)

    # solve nu: g x n -> a; unknowns nu[i][j][c], i < gdim, j < nd
    nunk = gdim * nd * a_dim

    def slot(i, j, c):
        return (i * nd + j) * a_dim + c

    rows_rhs = []  # (sparse row dict, rhs scalar)

    def add_row(row, rhs=ZERO):
        if row or rhs:
            rows_rhs.append((row, rhs))

    # (a) antisymmetry on n x n: nu(n_i, m_j) + nu(n_j, m_i) = 0
    for i in range(nd):
        for j in range(nd):
            for c in range(a_dim):
                row = {}
                row[slot(fd + i, j, c)] = row.get(slot(fd + i, j, c),
                                                  ZERO) + ONE
                row[slot(fd + j, i, c)] = row.get(slot(fd + j, i, c),
                                                  ZERO) + ONE
                add_row(row)
    # (b) invariance on n x n: nu(x.n, m) + nu(n, x.m) = 0 for x in F
    for x in range(fd):
        for i in range(nd):
            cpi, ri = divmod(i, fd)
            xn = F.c[x][ri]  # x.n_i within copy cpi
            for j in range(nd):
                cpj, rj = divmod(j, fd)
                xm = F.c[x][rj]
                for c in range(a_dim):
                    row = {}
                    for r in range(fd):
                        if xn[r]:
                            k = slot(fd + cpi * fd + r, j, c)
                            row[k] = row.get(k, ZERO) + xn[r]
                        if xm[r]:
                            k = slot(fd + i, cpj * fd + r, c)
                            row[k] = row.get(k, ZERO) + xm[r]
                    add_row(row)
    # (c) representation: nu([X, Y], p) = nu(X, y.p) - nu(Y, x.p)
    # for basis X, Y of g and p basis of n
    for i in range(gdim):
        for j in range(gdim):
            br = gc[i][j]
            for p in range(nd):
                cpp, rp = divmod(p, fd)
                yp = F.c[j][rp] if j < fd else None  # y.p
                xp = F.c[i][rp] if i < fd else None
                for c in range(a_dim):
                    row = {}
                    for m in range(gdim):
                        if br[m]:
                            k = slot(m, p, c)
                            row[k] = row.get(k, ZERO) + br[m]
                    if yp is not None:
                        for r in range(fd):
                            if yp[r]:
                                k = slot(i, cpp * fd + r, c)
                                row[k] = row.get(k, ZERO) - yp[r]
                    if xp is not None:
                        for r in range(fd):
                            if xp[r]:
                                k = slot(j, cpp * fd + r, c)
                                row[k] = row.get(k, ZERO) + xp[r]
                    add_row(row)

    hom_rows = list(rows_rhs)

    # anchors: nu((e_x, 0), m in copy k) matches the path 2-cocycle on
    # the representatives t*e_x and (t^{k+1} - t)*e_m
    anchors = []
    ef = identity(fd)
    for x in range(fd):
        fx = PolyPath(F, [zeros_vec(fd), ef[x]])
        for k in range(depth):
            for m in range(fd):
                rep = [zeros_vec(fd) for _ in range(k + 3)]
                rep[1] = [-v for v in ef[m]]
                rep[k + 2] = list(ef[m])
                gm = PolyPath(F, rep)
                val = eta_tilde(B, fx, gm)
                for c in range(a_dim):
                    anchors.append(({slot(x, k * fd + m, c): ONE}, val[c]))

    nu_flat = _solve_sparse_affine(hom_rows + anchors, nunk)
    if nu_flat is None:
        nu_flat = _solve_sparse_affine(hom_rows, nunk)
        assert nu_flat is not None

    def nu(i, j):
        return [nu_flat[slot(i, j, c)] for c in range(a_dim)]

    # assemble h, t, action
    hc = [[zeros_vec(hdim) for _ in range(hdim)] for _ in range(hdim)]
    for i in range(nd):
        for j in range(nd):
            v = nu(fd + i, j)
            for c in range(a_dim):
                hc[i][j][nd + c] = v[c]
    h = LieAlgebra(hdim, hc)

    t = zeros_mat(gdim, hdim)
    for i in range(nd):
        t[fd + i][i] = ONE

    a = []
    for i in range(gdim):
        m = zeros_mat(hdim, hdim)
        for j in range(nd):
            cpj, rj = divmod(j, fd)
            if i < fd:
                xr = F.c[i][rj]
                for r in range(fd):
                    m[cpj * fd + r][j] = xr[r]
            v = nu(i, j)
            for c in range(a_dim):
                m[nd + c][j] = v[c]
        a.append(m)

    M, report = build_crossed_module(h, g, t, ActionTensor(gdim, hdim, a))
    assert M is not None, report
    return M


def _solve_sparse_affine(rows_rhs, nunk):
    rows = []
    rhs = []
    for row, b in rows_rhs:
        dense = zeros_vec(nunk)
        for k, v in row.items():
            dense[k] = v
        rows.append(dense)
        rhs.append(b)
    sol, _ = solve_affine(rows, rhs)
    return sol
