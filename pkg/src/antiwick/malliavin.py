"""Hida-Malliavin derivatives as annihilation operators on the mode basis.

Along basis function e_i the derivative acts as ``A_i H_alpha =
alpha_i H_{alpha - eps_i}``. Time integrals of derivative products collapse to
mode sums because the basis is orthonormal, so nothing here is discretized.
"""
from dataclasses import dataclass
import math

from .chaos import ChaosVector, combine, expectation, norm_g, pointwise_product


def annihilate(X, i, times=1):
    """Apply A_i ``times`` times (0-based mode)."""
    if not 0 <= i < X.m:
        raise IndexError(f"mode {i} out of range for m={X.m}")
    beta = [0] * X.m
    beta[i] = times
    return annihilate_multi(X, beta)


def annihilate_multi(X, beta):
    """A^beta X: lowers each alpha by beta with falling-factorial weights."""
    if len(beta) != X.m:
        raise ValueError(f"beta needs {X.m} entries")
    if any(b < 0 for b in beta):
        raise ValueError("negative derivative order")
    active = [(i, b) for i, b in enumerate(beta) if b]
    out = {}
    for alpha, c in X.items():
        if any(alpha[i] < b for i, b in active):
            continue
        w = 1
        gamma = list(alpha)
        for i, b in active:
            w *= math.perm(alpha[i], b)
            gamma[i] -= b
        out[tuple(gamma)] = c * w
    return ChaosVector._trusted(X.m, X.N, out, X.truncated)


@dataclass(frozen=True)
class DerivativeField:
    """D_t X = sum_i e_i(t) * components[i]."""

    components: tuple

    @property
    def m(self):
        return len(self.components)

    def energy(self):
        """E[int |D_t X|^2 dt] = sum_i ||A_i X||_2^2."""
        return math.fsum(norm_g(c, 1.0) ** 2 for c in self.components)

    def at(self, grid, t):
        """D_t X at a raw time ``t``, for convenience only."""
        k = min(int(t // grid.dt), grid.m - 1)
        return self.components[k] * (1.0 / math.sqrt(grid.dt))


def derivative_field(X):
    return DerivativeField(tuple(annihilate(X, i) for i in range(X.m)))


def betas(n, caps):
    """Multi-indices with |beta| = n and beta <= caps componentwise, in lex order."""
    m = len(caps)
    out = []
    tail = [0] * (m + 1)
    for i in range(m - 1, -1, -1):
        tail[i] = tail[i + 1] + caps[i]
    if tail[0] < n:
        return out

    def rec(i, left, prefix):
        if i == m - 1:
            if left <= caps[i]:
                out.append(tuple(prefix + [left]))
            return
        for b in range(min(left, caps[i]), -1, -1):
            if left - b <= tail[i + 1]:
                rec(i + 1, left - b, prefix + [b])

    rec(0, n, [])
    return out


def multinomial(beta):
    """n! / beta! for n = |beta|, as an exact integer."""
    out = math.factorial(sum(beta))
    for b in beta:
        out //= math.factorial(b)
    return out


def derivative_pairs(X, Y, n):
    """Yield ``(n!/beta!, A^beta X, A^beta Y)`` over every beta that can contribute."""
    X._compatible(Y)
    caps = [min(a, b) for a, b in zip(X.mode_caps(), Y.mode_caps())]
    for beta in betas(n, caps):
        DX = annihilate_multi(X, beta)
        if not len(DX):
            continue
        DY = annihilate_multi(Y, beta)
        if not len(DY):
            continue
        yield multinomial(beta), DX, DY


def iterated_pairing(X, Y, n, product=pointwise_product):
    """int_{[0,T]^n} D^n X . D^n Y dt as a chaos vector.

    ``product`` combines the two derivatives; the default is the ordinary
    product, other products give the Wick and anti-Wick variants.
    """
    if n < 0:
        raise ValueError("pairing order must be non-negative")
    X._compatible(Y)
    flag = X.truncated or Y.truncated
    if n > min(X.degree, Y.degree):
        return ChaosVector._trusted(X.m, X.N, {}, flag)
    return combine(
        ((w, product(DX, DY)) for w, DX, DY in derivative_pairs(X, Y, n)), X.m, X.N, flag
    )


def smoothness_norm_identity(X):
    """Both sides of sum_n E[int |D^n X|^2] / n! = ||X||^2 in G_sqrt(2)."""
    lhs = math.fsum(
        expectation(iterated_pairing(X, X, n)) / math.factorial(n)
        for n in range(X.degree + 1)
    )
    rhs = norm_g(X, math.sqrt(2.0)) ** 2
    return lhs, rhs
