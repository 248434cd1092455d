"""Infinitesimal adjustments: verification, existence, construction,
classification, groupoid morphisms, and nilpotent integration.

An infinitesimal adjustment for a central crossed module (h, g, t, act)
is a bilinear map eta: g x g -> h with
  (A) eta([X,Y],Z) + eta(Y,[X,Z]) = eta(X,[Y,Z])
  (B) eta(t x, Y) = -Y.x
  (C) eta(X, t y) = X.y
and is adapted to a section s when t eta(X,Y) = (id - sp)[X,Y].
"""

from itertools import combinations

from gmpy2 import mpq

from .linalg import (ZERO, ONE, zeros_vec, zeros_mat, identity, mat_vec,
                     mat_mul, mat_sub, mat_add, is_zero_vec, kernel,
                     solve_affine, vadd, vsub, vscale, Subspace,
                     subspace_from_vectors, rref_sparse)
from .lie import LieAlgebra, bracket_vectors, is_homomorphism
from .cochains import (AltCochain, Bilinear, bilinear_from_function,
                       bilinear_add, bilinear_sub, bilinear_scale,
                       bilinear_eq, bilinear_is_zero, bilinear_zero,
                       sym_part, alt_part, bilinear_to_alt, alt_to_bilinear,
                       bilinear_pullback, bilinear_pushforward,
                       cochain_from_function, zero_cochain, ce_differential,
                       ce_matrix, cochain_add, cochain_sub, cochain_scale,
                       cochain_eq, cochain_keys, flatten, unflatten,
                       cohomology, is_exact, is_cocycle, pullback,
                       pushforward, bilinear_flatten, bilinear_unflatten)
from .crossed import (omega_u, omega_u_alt, kl_cocycle, default_splitting,
                      section_from_halfsplitting, extend_section, rho_s,
                      rho_u, is_section)


# ---------------------------------------------------------------------------
# the space of bilinear maps with the adjustment symmetry (A)

def _t_condition_rows(L, vdim):
    """Linear condition (A) on a flattened bilinear unknown b[i][j][c]."""
    n = L.dim
    rows = []

    def slot(i, j, c):
        return (i * n + j) * vdim + c

    for i in range(n):
        for j in range(n):
            for k in range(n):
                for c in range(vdim):
                    row = {}
                    # eta([e_i,e_j], e_k)
                    for m in range(n):
                        x = L.c[i][j][m]
                        if x:
                            row[slot(m, k, c)] = row.get(slot(m, k, c),
                                                         ZERO) + x
                    # + eta(e_j, [e_i,e_k])
                    for m in range(n):
                        x = L.c[i][k][m]
                        if x:
                            row[slot(j, m, c)] = row.get(slot(j, m, c),
                                                         ZERO) + x
                    # - eta(e_i, [e_j,e_k])
                    for m in range(n):
                        x = L.c[j][k][m]
                        if x:
                            row[slot(i, m, c)] = row.get(slot(i, m, c),
                                                         ZERO) - x
                    if row:
                        rows.append(row)
    return rows


def t_space(L, vdim):
    """Basis of the space of bilinear maps satisfying condition (A)."""
    n = L.dim
    rows = _t_condition_rows(L, vdim)
    dense = []
    for r in rows:
        v = zeros_vec(n * n * vdim)
        for j, x in r.items():
            v[j] = x
        dense.append(v)
    ker = kernel(dense, n * n * vdim)
    return [bilinear_unflatten(n, vdim, b) for b in ker.basis]


def satisfies_t_condition(L, eta):
    n = L.dim
    e = identity(n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = vadd(eta(L.c[i][j], e[k]), eta(e[j], L.c[i][k]))
                if lhs != eta(e[i], L.c[j][k]):
                    return False
    return True


def is_invariant_symmetric(L, B):
    """Symmetric and ad-invariant: B([X,Y],Z) = B(X,[Y,Z])."""
    n = L.dim
    e = identity(n)
    for i in range(n):
        for j in range(n):
            if B.b[i][j] != B.b[j][i]:
                return False
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if B(L.c[i][j], e[k]) != B(e[i], L.c[j][k]):
                    return False
    return True


def invariant_form_space(L, vdim):
    """Basis of symmetric ad-invariant bilinear forms."""
    n = L.dim
    rows = []

    def slot(i, j, c):
        return (i * n + j) * vdim + c

    for i in range(n):
        for j in range(i + 1, n):
            for c in range(vdim):
                rows.append({slot(i, j, c): ONE, slot(j, i, c): -ONE})
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for c in range(vdim):
                    row = {}
                    for m in range(n):
                        if L.c[i][j][m]:
                            row[slot(m, k, c)] = row.get(
                                slot(m, k, c), ZERO) + L.c[i][j][m]
                    for m in range(n):
                        if L.c[j][k][m]:
                            row[slot(i, m, c)] = row.get(
                                slot(i, m, c), ZERO) - L.c[j][k][m]
                    if row:
                        rows.append(row)
    dense = []
    for r in rows:
        v = zeros_vec(n * n * vdim)
        for j, x in r.items():
            v[j] = x
        dense.append(v)
    ker = kernel(dense, n * n * vdim)
    return [bilinear_unflatten(n, vdim, b) for b in ker.basis]


def chern_weil(L, B):
    """The closed 3-cochain cw(B)(X,Y,Z) = B([X,Y],Z)."""
    n = L.dim
    e = identity(n)
    return cochain_from_function(
        3, n, B.values_dim, lambda i, j, k: B(L.c[i][j], e[k]))


def decompose_T(L, eta):
    """Split a condition-(A) element into (antisymmetric AltCochain,
    symmetric Bilinear); the symmetric part is ad-invariant and
    d(antisym) + cw(sym) = 0."""
    assert satisfies_t_condition(L, eta)
    s = sym_part(eta)
    a = alt_part(eta)
    assert is_invariant_symmetric(L, s)
    aa = bilinear_to_alt(a)
    assert cochain_eq(ce_differential(L, aa),
                      cochain_scale(-1, chern_weil(L, s)))
    return aa, s


# ---------------------------------------------------------------------------
# adjustment verification

def check_adjustment(M, eta, s=None):
    """Per-identity report for the adjustment conditions; adaptedness is
    checked when a section is supplied."""
    g, h = M.g, M.h
    eg = identity(g.dim)
    eh = identity(h.dim)
    report = {}

    res = {"ok": True}
    for i in range(g.dim):
        for j in range(g.dim):
            for k in range(g.dim):
                lhs = vadd(eta(g.c[i][j], eg[k]), eta(eg[j], g.c[i][k]))
                if lhs != eta(eg[i], g.c[j][k]):
                    res = {"ok": False, "witness": (i, j, k)}
                    break
            if not res["ok"]:
                break
        if not res["ok"]:
            break
    report["symmetry_condition"] = res

    res = {"ok": True}
    for i in range(h.dim):
        ti = M.t_of(eh[i])
        for j in range(g.dim):
            if eta(ti, eg[j]) != [-x for x in M.act(eg[j], eh[i])]:
                res = {"ok": False, "witness": (i, j)}
                break
        if not res["ok"]:
            break
    report["left_peiffer"] = res

    res = {"ok": True}
    for i in range(g.dim):
        for j in range(h.dim):
            if eta(eg[i], M.t_of(eh[j])) != M.act(eg[i], eh[j]):
                res = {"ok": False, "witness": (i, j)}
                break
        if not res["ok"]:
            break
    report["right_peiffer"] = res

    if s is not None:
        rs = rho_s(M, s)
        res = {"ok": True}
        for i in range(g.dim):
            for j in range(g.dim):
                if M.t_of(eta(eg[i], eg[j])) != mat_vec(rs, g.c[i][j]):
                    res = {"ok": False, "witness": (i, j)}
                    break
            if not res["ok"]:
                break
        report["adapted"] = res

    report["ok"] = all(v["ok"] for v in report.values())
    return report


def is_adjustment(M, eta, s=None):
    return check_adjustment(M, eta, s)["ok"]


# ---------------------------------------------------------------------------
# adjusted class

def adjusted_kl(M, eta):
    """The unique symmetric invariant form B on f with values in the
    central kernel such that sym(eta) = -p*B.  Hard error when eta's
    symmetric part does not descend (invalid input)."""
    s = sym_part(eta)
    fdim = M.dim_f
    ef = identity(fdim)

    def val(i, j):
        v = s(M.lift_of(ef[i]), M.lift_of(ef[j]))
        return M.corestrict_a([-x for x in v])

    B = bilinear_from_function(fdim, M.dim_a, val)
    # verify descent: sym(eta) == -p* iota B
    back = bilinear_pullback(bilinear_pushforward(B, M.iota), M.p, M.g.dim)
    assert bilinear_eq(s, bilinear_scale(-1, back)), \
        "symmetric part fails to descend"
    assert is_invariant_symmetric(M.f_alg, B)
    return B


# ---------------------------------------------------------------------------
# existence and construction

def adjustment_exists(M, u=None):
    """Decide existence by one joint linear solve: find (B, xi) with
    cw(B) - C_u = d(xi) over f, B symmetric invariant a-valued, xi an
    a-valued 2-cochain.  Returns (bool, (B, xi) | None)."""
    if u is None:
        u = default_splitting(M)
    F = M.f_alg
    vdim = M.dim_a
    C = kl_cocycle(M, u)
    Bbasis = invariant_form_space(F, vdim)
    d2 = ce_matrix(F, vdim, 2)
    n3 = len(cochain_keys(3, F.dim)) * vdim
    nxi = len(cochain_keys(2, F.dim)) * vdim
    # unknowns: coefficients over Bbasis, then flat xi
    cols = []
    for Bb in Bbasis:
        cols.append(flatten(chern_weil(F, Bb)))
    ncols = len(Bbasis) + nxi
    m = zeros_mat(n3, ncols)
    for j, col in enumerate(cols):
        for i in range(n3):
            m[i][j] = col[i]
    for j in range(nxi):
        for i in range(n3):
            m[i][len(Bbasis) + j] = -d2[i][j]
    sol, _ = solve_affine(m, flatten(C))
    if sol is None:
        return False, None
    B = bilinear_zero(F.dim, vdim)
    for coeff, Bb in zip(sol[:len(Bbasis)], Bbasis):
        B = bilinear_add(B, bilinear_scale(coeff, Bb))
    xi = unflatten(2, F.dim, vdim, sol[len(Bbasis):])
    return True, (B, xi)


def construct_adjustment(M, u, B, xi):
    """eta = omega_u + p*xi - p*B, valid when cw(B) - C_u = d(xi)."""
    F = M.f_alg
    C = kl_cocycle(M, u)
    residual = cochain_sub(cochain_sub(chern_weil(F, B), C),
                           ce_differential(F, xi))
    assert residual.is_zero(), "cw(B) - C_u = d(xi) fails"
    w = omega_u(M, u)
    xib = alt_to_bilinear(pushforward(pullback(xi, M.p, M.g.dim), M.iota))
    Bb = bilinear_pullback(bilinear_pushforward(B, M.iota), M.p, M.g.dim)
    eta = bilinear_sub(bilinear_add(w, xib), Bb)
    s = section_from_halfsplitting(M, u)
    assert is_adjustment(M, eta, s)
    return eta


def adapt_projection(M, u, eta):
    """eta + u t (omega_u - eta): idempotent projection onto adjustments
    adapted to the section of u."""
    w = omega_u(M, u)
    diff = bilinear_sub(w, eta)
    ut = mat_mul(u, M.t)
    corr = Bilinear(diff.source_dim, diff.values_dim,
                    [[mat_vec(ut, x) for x in row] for row in diff.b])
    return bilinear_add(eta, corr)


def classify_adjustments(M, s):
    """Affine description of adjustments adapted to s: a base point and a
    basis of the difference space (condition-(A) maps on f valued in the
    central kernel, pulled back along p).  None when none exist."""
    u = extend_section(M, s)
    ok, wit = adjustment_exists(M, u)
    if not ok:
        return None
    B, xi = wit
    base = construct_adjustment(M, u, B, xi)
    dirs = t_space(M.f_alg, M.dim_a)
    lifted = [bilinear_pullback(bilinear_pushforward(d, M.iota),
                                M.p, M.g.dim) for d in dirs]
    return base, lifted


# ---------------------------------------------------------------------------
# groupoid structure

def morphism_residual(M, s, eta, s2, eta2, phi):
    """Residuals of the morphism equations for phi: f -> h:
    s - s2 = t phi  and  eta2 - eta = coboundary of (phi compose p),
    i.e. (eta2 - eta)(X, Y) = -phi(p[X, Y])."""
    r1 = mat_sub(mat_sub(s, s2), mat_mul(M.t, phi))
    diff = bilinear_sub(eta2, eta)
    n = M.g.dim
    eg = identity(n)
    r2 = bilinear_from_function(
        n, M.h.dim,
        lambda i, j: vadd(diff.b[i][j],
                          mat_vec(phi, M.p_of(M.g.c[i][j]))))
    return r1, r2


def solve_morphism(M, pair1, pair2):
    phi, _ = solve_morphism_space(M, pair1, pair2)
    return phi


def solve_morphism_space(M, pair1, pair2):
    """Find phi: f -> h with s - s2 = t phi and
    (eta2 - eta)(X,Y) = -phi(p[X,Y]).  Returns (phi | None, homogeneous
    solution Subspace of flattened phi)."""
    s, eta = pair1
    s2, eta2 = pair2
    fdim, hdim, gdim = M.dim_f, M.h.dim, M.g.dim
    nunk = hdim * fdim  # phi[r][c] row-major
    rows = []
    rhs = []
    # t phi = s - s2
    d = mat_sub(s, s2)
    for r in range(gdim):
        for c in range(fdim):
            row = zeros_vec(nunk)
            for m in range(hdim):
                if M.t[r][m]:
                    row[m * fdim + c] = M.t[r][m]
            rows.append(row)
            rhs.append(d[r][c])
    # phi(p[e_i,e_j]) = -(eta2 - eta)(e_i,e_j)
    diff = bilinear_sub(eta2, eta)
    for i in range(gdim):
        for j in range(gdim):
            pb = M.p_of(M.g.c[i][j])
            for r in range(hdim):
                row = zeros_vec(nunk)
                for c in range(fdim):
                    if pb[c]:
                        row[r * fdim + c] = pb[c]
                rows.append(row)
                rhs.append(-diff.b[i][j][r])
    sol, hom = solve_affine(rows, rhs)
    if sol is None:
        return None, hom
    return [sol[r * fdim:(r + 1) * fdim] for r in range(hdim)], hom


def automorphism_dimension(M):
    """dim of the automorphism group of any adapted pair:
    Lin(f/[f,f], a)."""
    F = M.f_alg
    derived = subspace_from_vectors(
        F.dim, [F.c[i][j] for i in range(F.dim) for j in range(F.dim)])
    return (F.dim - derived.dim) * M.dim_a


def adjustment_pi0_fibre(M, s, B):
    """Isomorphism classes of adapted pairs with adjusted class B.

    Returns ("empty", residual-info) when cw(B) is not cohomologous to
    the KL cocycle, else ("affine", base eta, H^2(f,a) representative
    directions lifted along p)."""
    u = extend_section(M, s)
    F = M.f_alg
    C = kl_cocycle(M, u)
    target = cochain_sub(chern_weil(F, B), C)
    assert is_cocycle(F, target)
    ok, xi = is_exact(F, target)
    if not ok:
        return ("empty", None)
    base = construct_adjustment(M, u, B, xi)
    H2 = cohomology(F, M.dim_a, 2)
    dirs = [alt_to_bilinear(pushforward(pullback(r, M.p, M.g.dim), M.iota))
            for r in H2.representatives]
    return ("affine", base, dirs, H2)


# ---------------------------------------------------------------------------
# brute force (small instances)

def brute_force_adjustment_exists(M):
    """Directly solve conditions (A),(B),(C) for eta as a flat linear
    system.  Fast path: when t is surjective, solve the left-Peiffer
    block per right slot first (it pins eta uniquely), then verify."""
    g, h = M.g, M.h
    n, m = g.dim, h.dim
    eg = identity(n)
    eh = identity(m)
    if M.image_t.dim == n:
        # eta(., e_k) is determined by eta(t x, e_k) = -e_k . x:
        # solve T^T N_k = -A_k column block by block
        cols = []  # eta as m x n x n? build eta.b[i][k]
        b = [[None] * n for _ in range(n)]
        for k in range(n):
            # unknown: vectors w_i = eta(e_i, e_k), i = 0..n-1 (m*n scalars)
            # equations: sum_i t[i-coord?]  eta(t e_r^h, e_k) = -e_k . e_r^h
            rows = []
            rhs = []
            for r in range(m):
                tr = M.t_of(eh[r])
                target = [-x for x in M.act(eg[k], eh[r])]
                for c in range(m):
                    row = zeros_vec(m * n)
                    for i in range(n):
                        if tr[i]:
                            row[i * m + c] = tr[i]
                    rows.append(row)
                    rhs.append(target[c])
            sol, hom = solve_affine(rows, rhs)
            if sol is None:
                return False, None
            assert hom.dim == 0, "t surjective should pin the block"
            for i in range(n):
                b[i][k] = sol[i * m:(i + 1) * m]
        eta = Bilinear(n, m, b)
        if is_adjustment(M, eta):
            return True, eta
        return False, None
    return _brute_force_full(M)


def _brute_force_full(M):
    g, h = M.g, M.h
    n, m = g.dim, h.dim
    eg = identity(n)
    eh = identity(m)
    nunk = n * n * m

    def slot(i, j, c):
        return (i * n + j) * m + c

    rows = []
    rhs = []
    # (A)
    for r in _t_condition_rows(g, m):
        row = zeros_vec(nunk)
        for jj, x in r.items():
            row[jj] = x
        rows.append(row)
        rhs.append(ZERO)
    # (B) eta(t e_r, e_j) = -e_j . e_r
    for r in range(m):
        tr = M.t_of(eh[r])
        for j in range(n):
            tgt = [-x for x in M.act(eg[j], eh[r])]
            for c in range(m):
                row = zeros_vec(nunk)
                for i in range(n):
                    if tr[i]:
                        row[slot(i, j, c)] = tr[i]
                rows.append(row)
                rhs.append(tgt[c])
    # (C) eta(e_i, t e_r) = e_i . e_r
    for r in range(m):
        tr = M.t_of(eh[r])
        for i in range(n):
            tgt = M.act(eg[i], eh[r])
            for c in range(m):
                row = zeros_vec(nunk)
                for j in range(n):
                    if tr[j]:
                        row[slot(i, j, c)] = tr[j]
                rows.append(row)
                rhs.append(tgt[c])
    sol, hom = solve_affine(rows, rhs)
    if sol is None:
        return False, None
    eta = bilinear_unflatten(n, m, sol)
    assert is_adjustment(M, eta)
    return True, eta


# ---------------------------------------------------------------------------
# nilpotent integration

def ad_nilpotency_order(L, x, max_k):
    """Least k with ad_x^k = 0, or None if > max_k."""
    m = L.ad(x)
    cur = identity(L.dim)
    for k in range(max_k + 1):
        if all(is_zero_vec(row) for row in cur):
            return k
        cur = mat_mul(m, cur)
    return None


def bch2(L, z1, z2):
    """Exact product in logarithmic coordinates for a 2-step nilpotent
    algebra: z1 + z2 + [z1,z2]/2.  Hard error when the algebra is not
    2-step (higher BCH terms would be nonzero)."""
    br = bracket_vectors(L, z1, z2)
    # verify all double brackets with z1, z2 vanish (2-step condition)
    assert is_zero_vec(bracket_vectors(L, z1, br)), "not 2-step nilpotent"
    assert is_zero_vec(bracket_vectors(L, z2, br)), "not 2-step nilpotent"
    return vadd(vadd(z1, z2), vscale(mpq(1, 2), br))


def Ad_exp(L, z, x, order):
    """Ad_{e^z} x = sum ad_z^k(x)/k!, finite by nilpotency."""
    out = list(x)
    term = list(x)
    fact = ONE
    for k in range(1, order + 1):
        term = bracket_vectors(L, z, term)
        fact = fact * k
        out = vadd(out, vscale(ONE / fact, term))
    return out


def act_exp(M, z, x, order):
    """alpha_{e^z}(x) = exp of the action derivation applied to x."""
    out = list(x)
    term = list(x)
    fact = ONE
    for k in range(1, order + 1):
        term = M.act(z, term)
        fact = fact * k
        out = vadd(out, vscale(ONE / fact, term))
    return out


def integrate_nilpotent(M, eta, z, x, max_k=None):
    """Group-level adjustment value kappa(e^z, x) for ad-nilpotent z:

        kappa(e^z, x) = sum_{n>=1} (1/n!) eta(z, ad_z^{n-1}(x)).

    Exact and finite; non-nilpotent z is rejected."""
    if max_k is None:
        max_k = M.g.dim
    order = ad_nilpotency_order(M.g, z, max_k)
    assert order is not None, "ad_z is not nilpotent within the bound"
    out = zeros_vec(M.h.dim)
    term = list(x)
    fact = ONE
    for n in range(1, order + 2):
        fact = fact * n
        out = vadd(out, vscale(ONE / fact, eta(z, term)))
        term = bracket_vectors(M.g, z, term)
        if is_zero_vec(term):
            break
    return out
