"""Central crossed modules of Lie algebras and their Kassel-Loday data.

A central crossed module here is a pair of Lie algebras h, g, a linear
map t: h -> g, and an action of g on h by derivations, subject to
  * equivariance: t(X . y) = [X, t y],
  * Peiffer:      (t x) . y = [x, y],
  * centrality:   X . a = 0 for every a in ker t.

Derived data cached at construction: the central kernel a = ker t, the
image t h (an ideal of g), the cokernel algebra f = g / t h with its
induced bracket, the projection p: g -> f, and a pivot-rule linear lift
f -> g.
"""

from dataclasses import dataclass, field

from .linalg import (ZERO, ONE, zeros_vec, zeros_mat, identity, mat_vec,
                     mat_mul, mat_mul_shaped, mat_sub, mat_from_columns,
                     is_zero_vec,
                     kernel, image, complement, quotient_data, solve_affine,
                     solve_matrix, vadd, vsub, vscale, subspace_from_vectors)
from .lie import (LieAlgebra, LinearMap, ActionTensor, bracket_vectors,
                  validate_lie, validate_action)
from .cochains import (AltCochain, Bilinear, bilinear_from_function,
                       cochain_from_function, ce_differential, cochain_sub,
                       cochain_add, cochain_eq, zero_cochain, cohomology,
                       pullback, pushforward, bilinear_to_alt,
                       alt_to_bilinear, is_exact)


@dataclass
class CrossedModule:
    h: LieAlgebra
    g: LieAlgebra
    t: list              # dim g x dim h matrix
    alpha: ActionTensor  # g acting on h
    # cached homotopy data
    a_space: object = None   # Subspace of h
    iota: list = None        # dim h x dim a, columns = kernel basis
    a_retract: list = None   # dim a x dim h, left inverse of iota
    image_t: object = None   # Subspace of g
    f_alg: LieAlgebra = None
    p: list = None           # dim f x dim g
    lift: list = None        # dim g x dim f, p @ lift = id

    def t_of(self, x):
        return mat_vec(self.t, x)

    def act(self, X, y):
        return self.alpha.act(X, y)

    def p_of(self, X):
        return mat_vec(self.p, X)

    def lift_of(self, z):
        return mat_vec(self.lift, z)

    def iota_of(self, a):
        return mat_vec(self.iota, a)

    def corestrict_a(self, v):
        """Coordinates of v in the kernel basis; hard error if v not in
        ker t."""
        out = mat_vec(self.a_retract, v)
        assert mat_vec(self.iota, out) == list(v), \
            "value does not lie in the central kernel"
        return out

    @property
    def dim_a(self):
        return self.a_space.dim

    @property
    def dim_f(self):
        return self.f_alg.dim


def build_crossed_module(h, g, t, alpha):
    """Validate all axioms and cache homotopy data.

    Returns (module | None, report); report lists each axiom with ok flag
    and first violating basis tuple."""
    report = {}
    report["h_lie"] = validate_lie(h)
    report["g_lie"] = validate_lie(g)
    report["action"] = validate_action(g, h, alpha)
    eh = identity(h.dim)
    eg = identity(g.dim)

    ok = True
    # equivariance: t(X . y) = [X, t y]
    res = {"ok": True}
    for i in range(g.dim):
        for j in range(h.dim):
            lhs = mat_vec(t, mat_vec(alpha.a[i], eh[j]))
            rhs = bracket_vectors(g, eg[i], mat_vec(t, eh[j]))
            if lhs != rhs:
                res = {"ok": False, "witness": (i, j)}
                break
        if not res["ok"]:
            break
    report["equivariance"] = res

    # Peiffer: (t x) . y = [x, y]
    res = {"ok": True}
    for i in range(h.dim):
        ti = mat_vec(t, eh[i])
        for j in range(h.dim):
            lhs = alpha.act(ti, eh[j])
            rhs = h.c[i][j]
            if lhs != rhs:
                res = {"ok": False, "witness": (i, j)}
                break
        if not res["ok"]:
            break
    report["peiffer"] = res

    a_space = kernel(t, h.dim)
    # centrality: action kills ker t
    res = {"ok": True}
    for i in range(g.dim):
        for v in a_space.basis:
            if not is_zero_vec(mat_vec(alpha.a[i], v)):
                res = {"ok": False, "witness": i}
                break
        if not res["ok"]:
            break
    report["centrality"] = res

    ok = all(report[k].get("ok") for k in report)
    if not ok:
        return None, report

    iota = a_space.basis_matrix()
    # left inverse of iota: reduced-echelon basis is identity on pivot rows
    a_retract = zeros_mat(a_space.dim, h.dim)
    for r, pv in enumerate(a_space.pivots):
        a_retract[r][pv] = ONE
    image_t = image(t)
    p, lift = quotient_data(g.dim, image_t)
    fdim = len(p)
    # induced bracket on f via lifts; verify well-definedness: t h an ideal
    res = {"ok": True}
    for i in range(g.dim):
        for v in image_t.basis:
            br = bracket_vectors(g, eg[i], v)
            if not image_t.contains(br):
                res = {"ok": False, "witness": i}
                break
        if not res["ok"]:
            break
    report["ideal"] = res
    if not res["ok"]:
        return None, report

    ef = identity(fdim)
    c = [[mat_vec(p, bracket_vectors(g, mat_vec(lift, ef[i]),
                                     mat_vec(lift, ef[j])))
          for j in range(fdim)] for i in range(fdim)]
    f_alg = LieAlgebra(fdim, c)
    report["f_lie"] = validate_lie(f_alg)
    if not report["f_lie"]["ok"]:
        return None, report

    M = CrossedModule(h, g, t, alpha, a_space, iota, a_retract, image_t,
                      f_alg, p, lift)
    return M, report


# ---------------------------------------------------------------------------
# sections and splittings

def is_section(M, s):
    """s: dim g x dim f with p s = id."""
    return mat_mul(M.p, s) == identity(M.dim_f)


def is_half_splitting(M, u):
    """u: dim h x dim g with t u t = t."""
    return mat_mul(M.t, mat_mul(u, M.t)) == M.t


def is_full_splitting(M, u):
    return is_half_splitting(M, u) and mat_mul(u, mat_mul(M.t, u)) == u


def rho_u(M, u):
    """Idempotent t u on g."""
    return mat_mul(M.t, u)


def rho_s(M, s):
    """id - s p on g."""
    return mat_sub(identity(M.g.dim), mat_mul_shaped(s, M.p, M.g.dim))


def section_from_halfsplitting(M, u):
    """s_u = (id - t u) composed with the canonical lift."""
    assert is_half_splitting(M, u), "not a half splitting"
    return mat_mul(mat_sub(identity(M.g.dim), rho_u(M, u)), M.lift)


def extend_section(M, s):
    """A full splitting u with s_u = s: u vanishes on im s, and on a
    complement realizes t-preimages through the pivot-rule complement of
    the central kernel."""
    assert is_section(M, s), "not a section"
    n = M.g.dim
    comp = complement(M.a_space)  # complement of ker t in h
    if comp.dim == 0:
        # t = 0: the zero splitting works and its section is the lift
        u = zeros_mat(M.h.dim, n)
        assert is_full_splitting(M, u)
        return u
    cmat = comp.basis_matrix()    # h.dim x comp.dim
    tc = mat_mul(M.t, cmat)       # g.dim x comp.dim, injective, image = t h
    rs = rho_s(M, s)              # projector onto a complement of im s
    # solve t(c w_j) = rho_s(e_j) for each basis vector of g
    w = solve_matrix(tc, rs)
    assert w is not None, "section has no extension (invalid data)"
    u = mat_mul(cmat, w)
    assert is_full_splitting(M, u)
    assert section_from_halfsplitting(M, u) == s
    return u


def default_splitting(M):
    """Deterministic full splitting: extend the pivot-rule section."""
    return extend_section(M, M.lift)


# ---------------------------------------------------------------------------
# the fundamental 2-cochain and the Kassel-Loday cocycle

def omega_u(M, u):
    """The antisymmetric bilinear map on g with values in h attached to a
    half splitting u:

        w(X, Y) = X.u(Y) - Y.u(X) - [u X, u Y] + u([(id - tu)X, (id - tu)Y])
    """
    n = M.g.dim
    eg = identity(n)
    perp = mat_sub(identity(n), rho_u(M, u))
    ux = [mat_vec(u, e) for e in eg]
    px = [mat_vec(perp, e) for e in eg]

    def val(i, j):
        v = vsub(M.act(eg[i], ux[j]), M.act(eg[j], ux[i]))
        v = vsub(v, bracket_vectors(M.h, ux[i], ux[j]))
        v = vadd(v, mat_vec(u, bracket_vectors(M.g, px[i], px[j])))
        return v

    return bilinear_from_function(n, M.h.dim, val)


def omega_u_alt(M, u):
    """omega_u as a degree-2 alternating cochain on g."""
    return bilinear_to_alt(omega_u(M, u))


def kl_cocycle(M, u=None):
    """The closed 3-cochain C on f = g/th with values in ker t determined
    by  p*C = d(omega_u).  Hard error if the descent fails."""
    if u is None:
        u = default_splitting(M)
    w = omega_u_alt(M, u)
    dw = ce_differential(M.g, w)
    # must vanish whenever one argument lies in t h, and be ker-t valued
    for key, v in dw.data.items():
        assert is_zero_vec(mat_vec(M.t, v)), "descent failure: not kernel-valued"
    # descend through p: define on f by lifting
    fdim = M.dim_f

    def val(*key):
        lifted = [M.lift_of(e) for e in
                  (identity(fdim)[k] for k in key)]
        return M.corestrict_a(dw(*lifted))

    C = cochain_from_function(3, fdim, M.dim_a, val)
    # verify p*C = d(omega_u) exactly
    pc = pullback(pushforward(C, M.iota), M.p, M.g.dim)
    assert cochain_eq(pc, dw), "descent failure: pullback mismatch"
    from .cochains import is_cocycle
    assert is_cocycle(M.f_alg, C)
    return C


def kl_class(M, u=None):
    """(representative cocycle, CohomologySpace of H^3(f, a),
    class coordinates)."""
    C = kl_cocycle(M, u)
    H3 = cohomology(M.f_alg, M.dim_a, 3)
    return C, H3, H3.class_coordinates(C)


def splitting_change_cochain(M, u, u2):
    """The 2-cochain theta on f with p*theta = w_{u2} - w_u + d(u t v),
    v = u2 - u; satisfies d theta = C_{u2} - C_u."""
    v = mat_sub(u2, u)
    utv = mat_mul(u, mat_mul(M.t, v))  # map g -> h, a 1-cochain on g
    one = AltCochain(1, M.g.dim, M.h.dim,
                     {(i,): [utv[r][i] for r in range(M.h.dim)]
                      for i in range(M.g.dim)})
    rhs = cochain_add(cochain_sub(omega_u_alt(M, u2), omega_u_alt(M, u)),
                      ce_differential(M.g, one.purge()))
    fdim = M.dim_f

    def val(i, j):
        ef = identity(fdim)
        return M.corestrict_a(rhs(M.lift_of(ef[i]), M.lift_of(ef[j])))

    theta = cochain_from_function(2, fdim, M.dim_a, val)
    pt = pullback(pushforward(theta, M.iota), M.p, M.g.dim)
    assert cochain_eq(pt, rhs), "splitting-change cochain fails to descend"
    return theta
