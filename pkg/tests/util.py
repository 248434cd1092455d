"""Shared helpers for the test suite: seeded random rational data."""

from gmpy2 import mpq


def rand_q(rng, lo=-4, hi=4):
    return mpq(rng.randint(lo, hi))


def rand_vec(rng, n, lo=-4, hi=4):
    return [rand_q(rng, lo, hi) for _ in range(n)]


def rand_mat(rng, r, c, lo=-4, hi=4):
    return [rand_vec(rng, c, lo, hi) for _ in range(r)]


def lift_to_module(M, rho):
    """Pull a kernel-valued bilinear form on the quotient back to g."""
    from crossmod.cochains import bilinear_pullback, bilinear_pushforward
    return bilinear_pullback(bilinear_pushforward(rho, M.iota), M.p, M.g.dim)


def lift_cochain(M, xi):
    """Pull a kernel-valued alternating cochain on the quotient back to g."""
    from crossmod.cochains import pullback, pushforward
    return pushforward(pullback(xi, M.p, M.g.dim), M.iota)
