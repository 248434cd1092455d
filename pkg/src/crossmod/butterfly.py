"""Butterfly calculus between central crossed modules.

A butterfly from module 1 to module 2 is carried as cocycle data
(phi, f, lam) with phi: g1 -> g2, f: h1 -> h2 and lam an alternating
2-cochain on g1 valued in h2, subject to
  (C1)  t2 f = phi t1
  (C2)  a2(phi X, f y) = f(a1(X, y)) + lam(X, t1 y)
  (C3)  [phi X, phi Y] - phi[X, Y] = t2 lam(X, Y)
  (C4)  sum_cyc a2(phi X, lam(Y, Z)) = -(d lam)(X, Y, Z)
The realized middle algebra lives on h2 (+) g1.
"""

from dataclasses import dataclass

from .linalg import (ZERO, ONE, zeros_vec, zeros_mat, identity, mat_vec,
                     mat_mul, mat_mul_shaped, mat_sub, mat_add,
                     mat_from_columns, rank,
                     mat_inverse, is_zero_vec, kernel, image, complement,
                     solve_affine, solve_matrix, subspace_from_vectors,
                     vadd, vsub, vscale)
from .lie import (LieAlgebra, ActionTensor, bracket_vectors,
                  is_homomorphism, validate_lie)
from .cochains import (AltCochain, cochain_from_function, zero_cochain,
                       cochain_add, cochain_sub, cochain_scale, cochain_eq,
                       ce_differential, is_cocycle, is_exact, pullback,
                       pushforward, cohomology, Bilinear,
                       bilinear_from_function, bilinear_add, bilinear_sub,
                       bilinear_eq, bilinear_pullback, bilinear_pushforward,
                       alt_to_bilinear, bilinear_to_alt)
from .crossed import (omega_u, omega_u_alt, kl_cocycle, default_splitting,
                      section_from_halfsplitting, extend_section, rho_s,
                      is_section)
from .adjust import is_adjustment


@dataclass
class CocycleData:
    M1: object
    M2: object
    phi: list  # g2.dim x g1.dim
    f: list    # h2.dim x h1.dim
    lam: AltCochain  # degree 2 on g1, values in h2


def identity_data(M):
    return CocycleData(M, M, identity(M.g.dim), identity(M.h.dim),
                       zero_cochain(2, M.g.dim, M.h.dim))


def strict_data(M1, M2, phi, f):
    return CocycleData(M1, M2, phi, f, zero_cochain(2, M1.g.dim, M2.h.dim))


def k_xi_data(M, xi):
    """Self-data (id, id, iota p* xi) for a closed central-valued
    2-cochain xi on f."""
    assert is_cocycle(M.f_alg, xi)
    lam = pushforward(pullback(xi, M.p, M.g.dim), M.iota)
    return CocycleData(M, M, identity(M.g.dim), identity(M.h.dim), lam)


def validate_cocycle_data(d):
    M1, M2, phi, f, lam = d.M1, d.M2, d.phi, d.f, d.lam
    g1, g2, h1, h2 = M1.g, M2.g, M1.h, M2.h
    eg1 = identity(g1.dim)
    eh1 = identity(h1.dim)
    report = {}

    report["square"] = {"ok": mat_mul(M2.t, f) == mat_mul(phi, M1.t)}

    res = {"ok": True}
    for i in range(g1.dim):
        pi = mat_vec(phi, eg1[i])
        for j in range(h1.dim):
            lhs = M2.act(pi, mat_vec(f, eh1[j]))
            rhs = vadd(mat_vec(f, M1.act(eg1[i], eh1[j])),
                       lam(eg1[i], M1.t_of(eh1[j])))
            if lhs != rhs:
                res = {"ok": False, "witness": (i, j)}
                break
        if not res["ok"]:
            break
    report["action_compat"] = res

    res = {"ok": True}
    pim = [mat_vec(phi, e) for e in eg1]
    for i in range(g1.dim):
        for j in range(i + 1, g1.dim):
            lhs = vsub(bracket_vectors(g2, pim[i], pim[j]),
                       mat_vec(phi, g1.c[i][j]))
            if lhs != M2.t_of(lam.value((i, j))):
                res = {"ok": False, "witness": (i, j)}
                break
        if not res["ok"]:
            break
    report["curvature"] = res

    dlam = ce_differential(g1, lam)
    res = {"ok": True}
    for i in range(g1.dim):
        for j in range(i + 1, g1.dim):
            for k in range(j + 1, g1.dim):
                cyc = vadd(vadd(
                    M2.act(pim[i], lam.value((j, k))),
                    M2.act(pim[j], lam(eg1[k], eg1[i]))),
                    M2.act(pim[k], lam.value((i, j))))
                if cyc != [-x for x in dlam.value((i, j, k))]:
                    res = {"ok": False, "witness": (i, j, k)}
                    break
            if not res["ok"]:
                break
        if not res["ok"]:
            break
    report["cyclic"] = res

    report["ok"] = all(v["ok"] for v in report.values())
    return report


# ---------------------------------------------------------------------------
# reconstruction and extraction

@dataclass
class Butterfly:
    data: CocycleData
    k_alg: LieAlgebra  # on h2 (+) g1, h2 coordinates first
    i1: list
    i2: list
    r1: list
    r2: list
    q0: list  # canonical section of r1


def reconstruct(d):
    """Middle algebra on h2 (+) g1 with the twisted bracket; the four
    wing maps; the canonical section q0(X) = (0, X)."""
    M1, M2, phi, f, lam = d.M1, d.M2, d.phi, d.f, d.lam
    h2, g1 = M2.h, M1.g
    m, n = h2.dim, g1.dim
    dim = m + n
    eh = identity(m)
    eg = identity(n)

    def pack(x, X):
        return list(x) + list(X)

    c = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            x, X = (eh[i], zeros_vec(n)) if i < m else \
                (zeros_vec(m), eg[i - m])
            y, Y = (eh[j], zeros_vec(n)) if j < m else \
                (zeros_vec(m), eg[j - m])
            top = bracket_vectors(h2, x, y)
            top = vadd(top, M2.act(mat_vec(phi, X), y))
            top = vsub(top, M2.act(mat_vec(phi, Y), x))
            top = vadd(top, lam(X, Y))
            c[i][j] = pack(top, bracket_vectors(g1, X, Y))
    k_alg = LieAlgebra(dim, c)
    assert validate_lie(k_alg)["ok"], "reconstructed middle fails Jacobi"

    i1 = [[ -d.f[r][c2] for c2 in range(M1.h.dim)] for r in range(m)] + \
        [[M1.t[r][c2] for c2 in range(M1.h.dim)] for r in range(n)]
    i2 = [[ONE if r == c2 else ZERO for c2 in range(m)] for r in range(m)] \
        + [[ZERO] * m for _ in range(n)]
    r1 = [[ZERO] * m + [ONE if c2 == r else ZERO for c2 in range(n)]
          for r in range(n)]
    r2 = [[M2.t[r][c2] for c2 in range(m)]
          + [phi[r][c2] for c2 in range(n)] for r in range(M2.g.dim)]
    q0 = [[ZERO] * n for _ in range(m)] + [[ONE if c2 == r else ZERO
                                            for c2 in range(n)]
                                           for r in range(n)]
    return Butterfly(d, k_alg, i1, i2, r1, r2, q0)


def extract(b, q=None):
    """Cocycle data from an explicit realization and a section q of r1
    whose image is complementary to im i2."""
    M1, M2 = b.data.M1, b.data.M2
    if q is None:
        q = b.q0
    n = M1.g.dim
    assert mat_mul(b.r1, q) == identity(n), "q is not a section of r1"
    # retract j: k -> h2 with i2 j + q r1 = id
    resid = mat_sub(identity(len(b.i2)), mat_mul(q, b.r1))
    j = solve_matrix(b.i2, resid)
    assert j is not None, "section image not complementary to im i2"
    phi = mat_mul(b.r2, q)
    f = [[-x for x in row] for row in mat_mul(j, b.i1)]
    eg = identity(n)
    K = b.k_alg

    def val(i, jdx):
        br = bracket_vectors(K, mat_vec(q, eg[i]), mat_vec(q, eg[jdx]))
        return mat_vec(j, br)

    lam = cochain_from_function(2, n, M2.h.dim, val)
    return CocycleData(M1, M2, phi, f, lam)


def shift_section_data(d, gamma):
    """Data extracted along q' = q + i2 gamma, for gamma: g1 -> h2:
    phi' = phi + t2 gamma, f' = f + gamma t1,
    lam'(X,Y) = lam(X,Y) + a2(phi X, gamma Y) - a2(phi Y, gamma X)
                + [gamma X, gamma Y] - gamma[X, Y]."""
    M1, M2 = d.M1, d.M2
    phi2 = mat_add(d.phi, mat_mul(M2.t, gamma))
    f2 = mat_add(d.f, mat_mul(gamma, M1.t))
    n = M1.g.dim
    eg = identity(n)
    gx = [mat_vec(gamma, e) for e in eg]
    px = [mat_vec(d.phi, e) for e in eg]

    def val(i, j):
        v = d.lam.value((i, j))
        v = vadd(v, M2.act(px[i], gx[j]))
        v = vsub(v, M2.act(px[j], gx[i]))
        v = vadd(v, bracket_vectors(M2.h, gx[i], gx[j]))
        v = vsub(v, mat_vec(gamma, M1.g.c[i][j]))
        return v

    lam2 = cochain_from_function(2, n, M2.h.dim, val)
    return CocycleData(M1, M2, phi2, f2, lam2)


def cocycle_equivalent(d1, d2):
    """Search for gamma: g1 -> h2 with shift_section_data(d1, gamma) = d2.

    Fully decided in the central case (equal phi and f, which forces
    gamma to be central-valued and kills the quadratic term); otherwise a
    linear candidate is tried and "undecided" is returned when it fails."""
    M1, M2 = d1.M1, d1.M2
    n, m = M1.g.dim, M2.h.dim
    if d1.phi == d2.phi and d1.f == d2.f:
        # gamma must satisfy t2 gamma = 0 and gamma t1 = 0, hence is
        # central-valued and descends through p1; the shift reduces to
        # lam2 - lam1 = -gamma o bracket.
        diff = cochain_sub(d2.lam, d1.lam)
        nunk = m * n
        rows = []
        rhs = []
        # t2 gamma = 0
        for r in range(M2.g.dim):
            for c in range(n):
                row = zeros_vec(nunk)
                for k in range(m):
                    if M2.t[r][k]:
                        row[k * n + c] = M2.t[r][k]
                rows.append(row)
                rhs.append(ZERO)
        # gamma t1 = 0
        for r in range(m):
            for c in range(M1.h.dim):
                row = zeros_vec(nunk)
                for k in range(n):
                    if M1.t[k][c]:
                        row[r * n + k] = M1.t[k][c]
                rows.append(row)
                rhs.append(ZERO)
        # -gamma([e_i, e_j]) = diff(i, j)
        for i in range(n):
            for j in range(i + 1, n):
                br = M1.g.c[i][j]
                dv = diff.value((i, j))
                for r in range(m):
                    row = zeros_vec(nunk)
                    for k in range(n):
                        if br[k]:
                            row[r * n + k] = -br[k]
                    rows.append(row)
                    rhs.append(dv[r])
        sol, _ = solve_affine(rows, rhs)
        if sol is None:
            return None
        gamma = [sol[r * n:(r + 1) * n] for r in range(m)]
        check = shift_section_data(d1, gamma)
        assert check.phi == d2.phi and check.f == d2.f \
            and cochain_eq(check.lam, d2.lam)
        return gamma
    # general case: solve the two linear relations, verify the quadratic
    nunk = m * n
    rows = []
    rhs = []
    dphi = mat_sub(d2.phi, d1.phi)
    for r in range(M2.g.dim):
        for c in range(n):
            row = zeros_vec(nunk)
            for k in range(m):
                if M2.t[r][k]:
                    row[k * n + c] = M2.t[r][k]
            rows.append(row)
            rhs.append(dphi[r][c])
    df = mat_sub(d2.f, d1.f)
    for r in range(m):
        for c in range(M1.h.dim):
            row = zeros_vec(nunk)
            for k in range(n):
                if M1.t[k][c]:
                    row[r * n + k] = M1.t[k][c]
            rows.append(row)
            rhs.append(df[r][c])
    sol, _ = solve_affine(rows, rhs)
    if sol is None:
        return None
    gamma = [sol[r * n:(r + 1) * n] for r in range(m)]
    check = shift_section_data(d1, gamma)
    if check.phi == d2.phi and check.f == d2.f \
            and cochain_eq(check.lam, d2.lam):
        return gamma
    return "undecided"


def compose(d1, d2):
    """Composite data of d1: M1 -> M2 followed by d2: M2 -> M3:
    phi = phi2 phi1, f = f2 f1,
    lam = (f2)_* lam1 + phi1* lam2."""
    assert d1.M2 is d2.M1 or (d1.M2.g.dim == d2.M1.g.dim
                              and d1.M2.h.dim == d2.M1.h.dim)
    phi = mat_mul(d2.phi, d1.phi)
    f = mat_mul(d2.f, d1.f)
    lam = cochain_add(pushforward(d1.lam, d2.f),
                      pullback(d2.lam, d1.phi, d1.M1.g.dim))
    return CocycleData(d1.M1, d2.M2, phi, f, lam)


# ---------------------------------------------------------------------------
# induced homotopy maps, invertibility

def homotopy_maps(d):
    """(Phi: f1 -> f2, F: a1 -> a2), descent and restriction verified."""
    M1, M2 = d.M1, d.M2
    # Phi = p2 phi lift1, well defined iff p2 phi kills im t1
    p2phi = mat_mul(M2.p, d.phi)
    for v in M1.image_t.basis:
        assert is_zero_vec(mat_vec(p2phi, v)), "phi does not descend"
    Phi = mat_mul(p2phi, M1.lift)
    assert is_homomorphism(M1.f_alg, M2.f_alg, Phi), "Phi not a Lie map"
    # F = corestriction of f iota1 to a2
    fi = mat_mul(d.f, M1.iota)
    for j in range(M1.dim_a):
        col = [fi[r][j] for r in range(M2.h.dim)]
        assert M2.a_space.contains(col), "f does not preserve the kernel"
    F = mat_mul(M2.a_retract, fi)
    return Phi, F


def is_invertible(d):
    Phi, F = homotopy_maps(d)
    M1, M2 = d.M1, d.M2
    if M1.dim_f != M2.dim_f or M1.dim_a != M2.dim_a:
        return False
    return rank(Phi) == M1.dim_f and rank(F) == M1.dim_a


def invert(d):
    """Inverse cocycle data of an invertible butterfly, extracted from
    the vertically reflected realization."""
    assert is_invertible(d)
    b = reconstruct(d)
    M1, M2 = d.M1, d.M2
    dim = b.k_alg.dim
    # section of r2 with image complementary to im i1
    s_im = image(b.i1)
    comp = complement(s_im)
    cmat = comp.basis_matrix()
    r2c = mat_mul(b.r2, cmat)
    w = mat_inverse(r2c)  # square: dim k - dim h1 = dim g2
    q = mat_mul(cmat, w)
    assert mat_mul(b.r2, q) == identity(M2.g.dim)
    # retract j: k -> h1 with i1 j + q r2 = id
    resid = mat_sub(identity(dim), mat_mul(q, b.r2))
    j = solve_matrix(b.i1, resid)
    assert j is not None
    phi = mat_mul(b.r1, q)
    f = [[-x for x in row] for row in mat_mul(j, b.i2)]
    eg = identity(M2.g.dim)

    def val(i, jdx):
        br = bracket_vectors(b.k_alg, mat_vec(q, eg[i]),
                             mat_vec(q, eg[jdx]))
        return mat_vec(j, br)

    lam = cochain_from_function(2, M2.g.dim, M1.h.dim, val)
    out = CocycleData(M2, M1, phi, f, lam)
    assert validate_cocycle_data(out)["ok"]
    return out


# ---------------------------------------------------------------------------
# KL invariance

def compute_R(d, u1, u2):
    """The descended 2-cochain R on f1 valued in h2 with
    p1* R = phi* w_{u2} - f_* w_{u1} - lam; descent verified.
    Returns (R, R_central) where R_central = (id - u2 t2) R corestricted
    to the central kernel of module 2."""
    M1, M2 = d.M1, d.M2
    w1 = omega_u_alt(M1, u1)
    w2 = omega_u_alt(M2, u2)
    Rg = cochain_sub(cochain_sub(pullback(w2, d.phi, M1.g.dim),
                                 pushforward(w1, d.f)), d.lam)
    fdim = M1.dim_f
    ef = identity(fdim)

    def val(i, j):
        return Rg(M1.lift_of(ef[i]), M1.lift_of(ef[j]))

    R = cochain_from_function(2, fdim, M2.h.dim, val)
    assert cochain_eq(pullback(R, M1.p, M1.g.dim), Rg), \
        "R fails to descend"
    proj = mat_sub(identity(M2.h.dim), mat_mul(u2, M2.t))

    def valc(i, j):
        return M2.corestrict_a(mat_vec(proj, R.value((i, j))))

    Rc = cochain_from_function(2, fdim, M2.dim_a, valc)
    return R, Rc


def kl_transfer_check(d, u1=None, u2=None):
    """Verify d(R_central) = Phi* C_{u2} - F_* C_{u1} exactly."""
    M1, M2 = d.M1, d.M2
    if u1 is None:
        u1 = default_splitting(M1)
    if u2 is None:
        u2 = default_splitting(M2)
    Phi, F = homotopy_maps(d)
    R, Rc = compute_R(d, u1, u2)
    C1 = kl_cocycle(M1, u1)
    C2 = kl_cocycle(M2, u2)
    lhs = ce_differential(M1.f_alg, Rc)
    rhs = cochain_sub(pullback(C2, Phi, M1.dim_f), pushforward(C1, F))
    ok = cochain_eq(lhs, rhs)
    return {"ok": ok, "R": R, "R_central": Rc}


# ---------------------------------------------------------------------------
# neat sections and adjustment transfer

def is_neat(d, s1, s2):
    """Neatness of the data relative to sections: (id - s2 p2) phi =
    phi (id - s1 p1)."""
    M1, M2 = d.M1, d.M2
    return mat_mul(rho_s_mat(M2, s2), d.phi) == \
        mat_mul(d.phi, rho_s_mat(M1, s1))


def rho_s_mat(M, s):
    return mat_sub(identity(M.g.dim), mat_mul_shaped(s, M.p, M.g.dim))


def make_neat(d, s1, s2):
    """Shift the data to a neat one: solve s2 Phi = phi s1 + t2 F for
    F: f1 -> h2 and shift by a central correction gamma = -F p1."""
    if is_neat(d, s1, s2):
        return d
    M1, M2 = d.M1, d.M2
    Phi, _ = homotopy_maps(d)
    target = mat_sub(mat_mul(s2, Phi), mat_mul(d.phi, s1))
    F = solve_matrix(M2.t, target)
    assert F is not None, "neatness correction unsolvable"
    for gamma in ([[-x for x in row] for row in mat_mul(F, M1.p)],
                  mat_mul(F, M1.p)):
        d2 = shift_section_data(d, gamma)
        if is_neat(d2, s1, s2):
            assert validate_cocycle_data(d2)["ok"]
            return d2
    raise AssertionError("neat shift failed with both signs")


def transfer_adjustment(d, s1, s2, eta1):
    """Transport an adjustment adapted to s1 along invertible neat data:

        eta2 = w_{u2} + p2* (Phi^{-1})* (F_* beta - R_central)

    where p1* beta = eta1 - w_{u1}.  The result is verified adapted to
    s2 and satisfies phi* eta2 = f_* eta1 + lam."""
    M1, M2 = d.M1, d.M2
    assert is_neat(d, s1, s2), "data must be neat for the given sections"
    assert is_invertible(d)
    u1 = extend_section(M1, s1)
    u2 = extend_section(M2, s2)
    Phi, F = homotopy_maps(d)
    w1 = omega_u(M1, u1)
    beta_g = bilinear_sub(eta1, w1)
    # descend beta to f1, corestrict to the central kernel of module 1
    fdim = M1.dim_f
    ef = identity(fdim)

    def bval(i, j):
        return M1.corestrict_a(beta_g(M1.lift_of(ef[i]),
                                      M1.lift_of(ef[j])))

    beta = bilinear_from_function(fdim, M1.dim_a, bval)
    back = bilinear_pullback(bilinear_pushforward(beta, M1.iota),
                             M1.p, M1.g.dim)
    assert bilinear_eq(back, beta_g), "eta1 - w_{u1} fails to descend"
    _, Rc = compute_R(d, u1, u2)
    inner = bilinear_sub(bilinear_pushforward(beta, F),
                         alt_to_bilinear(Rc))
    Phi_inv = mat_inverse(Phi)
    moved = bilinear_pullback(inner, Phi_inv, M2.dim_f)
    corr = bilinear_pullback(bilinear_pushforward(moved, M2.iota),
                             M2.p, M2.g.dim)
    eta2 = bilinear_add(omega_u(M2, u2), corr)
    # transfer criterion: phi* eta2 = f_* eta1 + lam
    lhs = bilinear_pullback(eta2, d.phi, M1.g.dim)
    rhs = bilinear_add(bilinear_pushforward(eta1, d.f),
                       alt_to_bilinear(d.lam))
    assert bilinear_eq(lhs, rhs), "transfer criterion violated"
    assert is_adjustment(M2, eta2, s2)
    return eta2


def transfer_map_on_directions(d):
    """The linear map rho -> F_* (Phi^{-1})* rho along which transfer is
    affine."""
    Phi, F = homotopy_maps(d)
    Phi_inv = mat_inverse(Phi)

    def move(rho):
        return bilinear_pushforward(
            bilinear_pullback(rho, Phi_inv, d.M2.dim_f), F)

    return move


def transfer_affinity_check(d, s1, s2, eta1, rho):
    """Adj(eta1 + p1* rho) = Adj(eta1) + p2* (F_* (Phi^{-1})* rho) for a
    direction rho on f1 valued in the central kernel of module 1."""
    M1, M2 = d.M1, d.M2
    lift_rho = bilinear_pullback(bilinear_pushforward(rho, M1.iota),
                                 M1.p, M1.g.dim)
    eta1b = bilinear_add(eta1, lift_rho)
    out1 = transfer_adjustment(d, s1, s2, eta1)
    out2 = transfer_adjustment(d, s1, s2, eta1b)
    move = transfer_map_on_directions(d)
    moved = move(rho)
    lift_moved = bilinear_pullback(bilinear_pushforward(moved, M2.iota),
                                   M2.p, M2.g.dim)
    expected = bilinear_add(out1, lift_moved)
    return {"ok": bilinear_eq(out2, expected)}


# ---------------------------------------------------------------------------
# connecting butterfly between modules with equal class

def connect_same_kl(M1, u1, M2, u2):
    """Invertible cocycle data M1 -> M2 inducing identities on the
    common quotient and kernel, when the KL cocycles differ by a
    coboundary; None otherwise.

    Requires the two modules to share quotient structure constants and
    kernel dimension (the implicit identifications are the identity in
    coordinates)."""
    F1, F2 = M1.f_alg, M2.f_alg
    assert F1.dim == F2.dim and M1.dim_a == M2.dim_a
    assert all(F1.c[i][j] == F2.c[i][j]
               for i in range(F1.dim) for j in range(F1.dim)), \
        "quotient algebras differ"
    C1 = kl_cocycle(M1, u1)
    C2 = kl_cocycle(M2, u2)
    diff = cochain_sub(C1, C2)
    ok, R = is_exact(F1, diff)
    if not ok:
        return None
    s2 = section_from_halfsplitting(M2, u2)
    phi = mat_mul_shaped(s2, M1.p, M1.g.dim)
    # j1: h1 -> a1 with iota1 j1 + u1 t1 = id
    resid = mat_sub(identity(M1.h.dim), mat_mul(u1, M1.t))
    j1 = solve_matrix(M1.iota, resid)
    assert j1 is not None
    f = mat_mul(M2.iota, j1)
    w1 = omega_u_alt(M1, u1)
    w2 = omega_u_alt(M2, u2)
    lam = cochain_add(
        pushforward(cochain_sub(pullback(R, M1.p, M1.g.dim),
                                pushforward(w1, j1)), M2.iota),
        pullback(w2, phi, M1.g.dim))
    out = CocycleData(M1, M2, phi, f, lam)
    assert validate_cocycle_data(out)["ok"]
    assert is_invertible(out)
    return out


# ---------------------------------------------------------------------------
# classification of self-butterflies with identity homotopy maps

def classify_self_butterfly(d, H2=None):
    """Class in H^2(f, a) of self-data inducing identities on the
    quotient and the kernel.  Returns (coordinates, H2, normalized lam
    on f)."""
    M = d.M1
    assert d.M2.g.dim == M.g.dim and d.M2.h.dim == M.h.dim
    Phi, F = homotopy_maps(d)
    assert Phi == identity(M.dim_f) and F == identity(M.dim_a), \
        "homotopy maps are not identities"
    # step 1: gamma with t2 gamma = id - phi  (possible since Phi = id)
    g1 = solve_matrix(M.t, mat_sub(identity(M.g.dim), d.phi))
    assert g1 is not None
    d1 = shift_section_data(d, g1)
    assert d1.phi == identity(M.g.dim)
    # step 2: gamma' with t gamma' = 0 and gamma' t = id - f'
    n, m = M.g.dim, M.h.dim
    nunk = m * n
    rows = []
    rhs = []
    for r in range(M.g.dim):
        for c in range(n):
            row = zeros_vec(nunk)
            for k in range(m):
                if M.t[r][k]:
                    row[k * n + c] = M.t[r][k]
            rows.append(row)
            rhs.append(ZERO)
    target = mat_sub(identity(m), d1.f)
    for r in range(m):
        for c in range(m):
            row = zeros_vec(nunk)
            for k in range(n):
                if M.t[k][c]:
                    row[r * n + k] = M.t[k][c]
            rows.append(row)
            rhs.append(target[r][c])
    sol, _ = solve_affine(rows, rhs)
    assert sol is not None, "normalization failed"
    g2 = [sol[r * n:(r + 1) * n] for r in range(m)]
    d2 = shift_section_data(d1, g2)
    assert d2.phi == identity(M.g.dim) and d2.f == identity(m)
    # lam now descends to f and is central-valued and closed
    fdim = M.dim_f
    ef = identity(fdim)

    def val(i, j):
        return M.corestrict_a(d2.lam(M.lift_of(ef[i]), M.lift_of(ef[j])))

    lam_f = cochain_from_function(2, fdim, M.dim_a, val)
    assert cochain_eq(pushforward(pullback(lam_f, M.p, M.g.dim), M.iota),
                      d2.lam), "normalized lam fails to descend"
    assert is_cocycle(M.f_alg, lam_f)
    if H2 is None:
        H2 = cohomology(M.f_alg, M.dim_a, 2)
    return H2.class_coordinates(lam_f), H2, lam_f


# ---------------------------------------------------------------------------
# pullback/differential correction

def gamma_correction(M2, phi, lam):
    """The 3-cochain g(X,Y,Z) = a2(phi X, lam(Y,Z)) + cyclic, measuring
    the failure of pullback along phi to commute with the differential
    for a curvature pair (phi, lam) with [phi X, phi Y] - phi[X,Y] =
    t2 lam(X,Y)."""
    n = lam.source_dim
    eg = identity(n)
    pim = [mat_vec(phi, e) for e in eg]

    def val(i, j, k):
        return vadd(vadd(M2.act(pim[i], lam.value((j, k))),
                         M2.act(pim[j], lam(eg[k], eg[i]))),
                    M2.act(pim[k], lam.value((i, j))))

    return cochain_from_function(3, n, lam.values_dim, val)
