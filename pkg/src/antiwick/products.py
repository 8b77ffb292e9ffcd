"""Products built from iterated derivative pairings.

The phi-product weights the n-th pairing by the n-th Taylor coefficient of
phi. The anti-Wick product (phi = exp) is computed two ways: directly from
its defining series, and through second quantization of an ordinary product.
"""
from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .basis import inner_product
from .chaos import (
    ChaosVector,
    combine,
    evaluate,
    gamma_scale,
    linearized_product,
    norm_g,
    pointwise_product,
    wick_product,
)
from .malliavin import iterated_pairing

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PhiSeries:
    """Truncated Taylor coefficients (a_0, ..., a_K) of phi with phi(0) = 1."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(float(a) for a in self.coeffs)
        if not c or c[0] != 1.0:
            raise ValueError("phi must satisfy phi(0) = 1 (a_0 == 1)")
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Truncated series at a real argument (Horner)."""
        acc = 0.0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    @classmethod
    def one(cls):
        return cls((1.0,))

    @classmethod
    def exponential(cls, alpha=1.0, K=None, radius=1.0, tail=1e-15):
        """Coefficients of exp(alpha x).

        Without ``K``, picks the smallest K whose Lagrange tail
        ``r^(K+1) / (K+1)! * e^r`` at ``r = |alpha| * radius`` is below ``tail``.
        """
        if K is None:
            r = abs(alpha) * radius
            K = 0
            while r ** (K + 1) / math.factorial(K + 1) * math.exp(r) >= tail:
                K += 1
        return cls(tuple(alpha**k / math.factorial(k) for k in range(K + 1)))

    @classmethod
    def polynomial(cls, coeffs):
        return cls(tuple(coeffs))


def circle_phi(X, Y, phi):
    """X o_phi Y = sum_n a_n int D^n X . D^n Y dt (finite: high pairings vanish)."""
    X._compatible(Y)
    top = min(phi.K, X.degree, Y.degree)
    return combine(
        (
            (a, iterated_pairing(X, Y, n))
            for n, a in enumerate(phi.coeffs[: top + 1])
            if a != 0.0
        ),
        X.m,
        X.N,
        X.truncated or Y.truncated,
    )


def anti_wick_series(X, Y):
    """X o Y from its defining series sum_n (1/n!) int D^n X . D^n Y dt."""
    X._compatible(Y)
    top = min(X.degree, Y.degree)
    return combine(
        ((1.0 / math.factorial(n), iterated_pairing(X, Y, n)) for n in range(top + 1)),
        X.m,
        X.N,
        X.truncated or Y.truncated,
    )


def anti_wick_gamma(X, Y):
    """X o Y = Gamma(1/sqrt2)(Gamma(sqrt2) X . Gamma(sqrt2) Y).

    Exact when deg X + deg Y <= N; otherwise the result is flagged truncated.
    """
    prod = pointwise_product(gamma_scale(X, SQRT2), gamma_scale(Y, SQRT2))
    return gamma_scale(prod, 1.0 / SQRT2)


def anti_wick_power(X, n):
    out = ChaosVector(X.m, X.N, {(0,) * X.m: 1.0})
    for _ in range(n):
        out = anti_wick_gamma(out, X)
    return out


def exp_phi_product(X, Y, alpha):
    """The phi = exp(alpha x) product in one pass.

    Per mode the pairings resum to h_a h_b's linearization with the j-th
    contraction weighted by (1 + alpha)^j; alpha = 0, -1, 1 give the ordinary,
    Wick and anti-Wick products.
    """
    return linearized_product(X, Y, 1.0 + alpha)


def wick_to_antiwick(X, Y):
    """sum_n (2^n / n!) int D^n X <> D^n Y dt, which equals X o Y."""
    X._compatible(Y)
    top = min(X.degree, Y.degree)
    return combine(
        (
            (2.0**n / math.factorial(n), iterated_pairing(X, Y, n, product=wick_product))
            for n in range(top + 1)
        ),
        X.m,
        X.N,
        X.truncated or Y.truncated,
    )


def antiwick_to_wick(X, Y):
    """sum_n ((-2)^n / n!) int D^n X o D^n Y dt, which equals X <> Y."""
    X._compatible(Y)
    top = min(X.degree, Y.degree)
    return combine(
        (
            ((-2.0) ** n / math.factorial(n), iterated_pairing(X, Y, n, product=anti_wick_series))
            for n in range(top + 1)
        ),
        X.m,
        X.N,
        X.truncated or Y.truncated,
    )


def associativity_probe(phi, f, g, h):
    """Scalar sides phi(<f,g>) phi(<f+g,h>) and phi(<f,g+h>) phi(<g,h>).

    On stochastic exponentials the phi-product is associative exactly when
    these agree.
    """
    lhs = phi(inner_product(f, g)) * phi(inner_product(f + g, h))
    rhs = phi(inner_product(f, g + h)) * phi(inner_product(g, h))
    return lhs, rhs


class L1Bound(NamedTuple):
    mc_l1: float
    bound: float
    stderr: float
    samples: int
    seed: int


def l1_bound_check(X, Y, samples, seed, block_size=1 << 16):
    """Monte Carlo E|X o Y| against ||X||_{G_sqrt2} ||Y||_{G_sqrt2}.

    Samples are drawn in fixed-size blocks from generators spawned off one
    seed, so the stream is reproducible for a given (seed, samples, block_size).
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    Z = anti_wick_series(X, Y)
    blocks = -(-samples // block_size)
    children = np.random.SeedSequence(seed).spawn(blocks)
    total = 0.0
    total_sq = 0.0
    left = samples
    for child in children:
        n = min(block_size, left)
        left -= n
        xi = np.random.default_rng(child).standard_normal((n, X.m))
        v = np.abs(evaluate(Z, xi))
        total += float(v.sum())
        total_sq += float((v * v).sum())
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    stderr = math.sqrt(var / samples) if samples > 1 else math.inf
    bound = norm_g(X, SQRT2) * norm_g(Y, SQRT2)
    return L1Bound(mean, bound, stderr, samples, seed)
