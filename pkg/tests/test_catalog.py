import random

from gmpy2 import mpq

from crossmod.lie import abelian, heisenberg3, so3, validate_lie, bracket_vectors
from crossmod.linalg import identity, zeros_vec, vadd, vscale, vsub
from crossmod.cochains import bilinear_from_function
from crossmod.crossed import kl_class, default_splitting
from crossmod.catalog import (product_module, categorical_torus, matrix_aut,
                              PolyPath, path_zero, path_add, path_sub,
                              path_scale, path_eq, path_bracket, eta_tilde,
                              path_section, path_crossed_module_ops,
                              path_truncation_module)

from util import rand_vec, rand_q


def test_product_module_homotopy_data():
    M = product_module(3, heisenberg3())
    assert M.dim_a == 3
    assert M.dim_f == 3
    assert M.f_alg.c == heisenberg3().c


def test_torus_structure():
    M = categorical_torus(3)
    assert M.dim_a == 1 and M.dim_f == 3
    _, _, coords = kl_class(M)
    assert all(x == 0 for x in coords)


def test_matrix_aut_structure():
    for n in (2, 3):
        M = matrix_aut(n)
        assert M.h.dim == n * n
        assert M.g.dim == n * n - 1  # all derivations are inner
        assert M.dim_a == 1          # scalar matrices
        assert M.dim_f == 0
        assert validate_lie(M.g)["ok"]


def test_path_evaluation_and_bracket():
    rng = random.Random(0)
    F = so3()
    for _ in range(20):
        f = PolyPath(F, [rand_vec(rng, 3) for _ in range(4)])
        g = PolyPath(F, [rand_vec(rng, 3) for _ in range(3)])
        t = mpq(rng.randint(-5, 5), rng.randint(1, 7))
        # bracket of paths is the pointwise bracket
        assert path_bracket(f, g).eval(t) == \
            bracket_vectors(F, f.eval(t), g.eval(t))
    z = path_zero(F)
    assert path_eq(path_add(f, path_sub(z, f)), z)
    assert path_eq(path_scale(mpq(0), f), z)


def test_path_derivative_and_endpoints():
    F = abelian(2)
    f = PolyPath(F, [[mpq(0), mpq(0)], [mpq(1), mpq(2)], [mpq(3), mpq(0)]])
    assert f.at_one() == [mpq(4), mpq(2)]
    df = f.deriv()
    assert df.eval(mpq(0)) == [mpq(1), mpq(2)]
    assert df.eval(mpq(1)) == [mpq(7), mpq(2)]
    assert f.is_based()


def test_eta_tilde_bilinear():
    rng = random.Random(1)
    F = so3()
    B = bilinear_from_function(3, 1, lambda i, j: [mpq(1 if i == j else 0)])
    f = PolyPath(F, [zeros_vec(3)] + [rand_vec(rng, 3) for _ in range(3)])
    g = PolyPath(F, [zeros_vec(3)] + [rand_vec(rng, 3) for _ in range(3)])
    h = PolyPath(F, [zeros_vec(3)] + [rand_vec(rng, 3) for _ in range(2)])
    c = mpq(3, 2)
    assert eta_tilde(B, path_add(f, h), g) == \
        vadd(eta_tilde(B, f, g), eta_tilde(B, h, g))
    assert eta_tilde(B, path_scale(c, f), g) == \
        vscale(c, eta_tilde(B, f, g))


def test_eta_tilde_against_numeric_integral():
    # independent oracle: the defining integral of the degree-wise
    # formula, computed by exact monomial antiderivatives of B(f', g)
    rng = random.Random(2)
    F = abelian(2)
    B = bilinear_from_function(2, 1, lambda i, j: [mpq(2 if i == j else 1)])
    for _ in range(20):
        f = PolyPath(F, [zeros_vec(2)] + [rand_vec(rng, 2) for _ in range(4)])
        g = PolyPath(F, [zeros_vec(2)] + [rand_vec(rng, 2) for _ in range(4)])
        # product polynomial q(t) = B(f'(t), g(t)); integrate exactly
        df = f.deriv()
        deg = len(df.coeffs) + len(g.coeffs)
        prod = [mpq(0)] * deg
        for a, ca in enumerate(df.coeffs):
            for b, cb in enumerate(g.coeffs):
                prod[a + b] += B(ca, cb)[0]
        integral = sum(c / (k + 1) for k, c in enumerate(prod))
        assert eta_tilde(B, f, g) == [mpq(-2) * integral]


def test_path_section_constraints():
    F = so3()
    s = path_section(F)
    x = [mpq(1), mpq(-2), mpq(3)]
    path = s(x)
    assert path.eval(mpq(0)) == zeros_vec(3)
    assert path.at_one() == x
    import pytest
    with pytest.raises(AssertionError):
        path_section(F, [mpq(1), mpq(0)])  # psi(0) != 0
    with pytest.raises(AssertionError):
        path_section(F, [mpq(0), mpq(2)])  # psi(1) != 1


def test_truncation_modules_validate():
    cases = [
        (so3(), bilinear_from_function(3, 1, lambda i, j: [mpq(0)]), 1),
        (so3(), bilinear_from_function(3, 1, lambda i, j: [mpq(0)]), 2),
        (abelian(2), bilinear_from_function(
            2, 1, lambda i, j: [mpq(1 if i == j else 0)]), 1),
        (heisenberg3(), bilinear_from_function(
            3, 1, lambda i, j: [mpq(0)]), 1),
    ]
    for F, B, depth in cases:
        M = path_truncation_module(B, F, 1, depth)
        assert M.dim_a == 1
        assert M.dim_f == F.dim
        assert M.f_alg.c == F.c
        assert validate_lie(M.g)["ok"] and validate_lie(M.h)["ok"]


def test_path_ops_match_truncation_class():
    # the truncated surrogate of the rotation module with trivial form
    # has vanishing class, matching the path model's adjusted class 0
    B0 = bilinear_from_function(3, 1, lambda i, j: [mpq(0)])
    M = path_truncation_module(B0, so3(), 1, 1)
    _, _, coords = kl_class(M)
    assert all(x == 0 for x in coords)
