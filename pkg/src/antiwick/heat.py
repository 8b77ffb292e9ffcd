"""Functional calculus and the forward heat equation on Brownian motion.

For polynomial initial data both sides of ``u(t, B_t) = f°(B_t)`` live in a
finite chaos and are compared coefficient by coefficient. Bounded analytic
data (cos, sin) is checked statistically through the pairing with stochastic
exponentials, with the exact side computed from chaos coefficients.
"""
from dataclasses import asdict, dataclass, field
import math

import numpy as np

from .basis import indicator, inner_product
from .chaos import (
    ChaosVector,
    gamma_scale,
    gaussian_of,
    pair_expectation,
    pointwise_product,
    stochastic_exponential,
    wick_exp,
    mfactorial,
)
from .products import anti_wick_series

SQRT2 = math.sqrt(2.0)
QUAD_NODES = 40
TAYLOR_DEGREE = 16


class Poly1D:
    """Real polynomial sum_k c_k x^k with trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = [float(a) for a in coeffs]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        self.coeffs = tuple(c) if c else (0.0,)

    @classmethod
    def monomial(cls, k, c=1.0):
        return cls([0.0] * k + [c])

    @property
    def degree(self):
        return 0 if self.coeffs == (0.0,) else len(self.coeffs) - 1

    def __call__(self, x):
        acc = np.zeros_like(np.asarray(x, dtype=np.float64))
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc if acc.ndim else float(acc)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0.0,) * (n - len(self.coeffs))
        b = other.coeffs + (0.0,) * (n - len(other.coeffs))
        return Poly1D([x + y for x, y in zip(a, b)])

    def __mul__(self, other):
        if not isinstance(other, Poly1D):
            return Poly1D([float(other) * a for a in self.coeffs])
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly1D(out)

    __rmul__ = __mul__

    def derivative(self, order=1):
        c = list(self.coeffs)
        for _ in range(order):
            c = [k * c[k] for k in range(1, len(c))] or [0.0]
        return Poly1D(c)

    def __eq__(self, other):
        return isinstance(other, Poly1D) and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self):
        return f"Poly1D({list(self.coeffs)})"


def hermite_poly(n, t=1.0):
    """Monic Hermite polynomial with variance parameter t: t^(n/2) He_n(x/sqrt t)."""
    c = [0.0] * (n + 1)
    for j in range(n // 2 + 1):
        c[n - 2 * j] = (-1) ** j * math.factorial(n) / (
            math.factorial(j) * math.factorial(n - 2 * j) * 2**j
        ) * t**j
    return Poly1D(c)


@dataclass(frozen=True)
class EntireData:
    """Initial datum given both as a vectorized callable and a truncated Taylor series.

    ``remainder`` bounds |f(z) - taylor(z)| pointwise.
    """

    name: str
    func: object
    taylor: Poly1D
    remainder: object
    bounded: bool = True


def _trig_remainder(K):
    return lambda z: np.abs(z) ** (K + 1) / math.factorial(K + 1)


def entire_data(name, K=TAYLOR_DEGREE):
    if name == "cos":
        taylor = Poly1D([(-1) ** (k // 2) / math.factorial(k) if k % 2 == 0 else 0.0 for k in range(K + 1)])
        return EntireData("cos", np.cos, taylor, _trig_remainder(K))
    if name == "sin":
        taylor = Poly1D([(-1) ** (k // 2) / math.factorial(k) if k % 2 else 0.0 for k in range(K + 1)])
        return EntireData("sin", np.sin, taylor, _trig_remainder(K))
    if name == "exp":
        taylor = Poly1D([1.0 / math.factorial(k) for k in range(K + 1)])
        return EntireData(
            "exp",
            np.exp,
            taylor,
            lambda z: np.exp(np.abs(z)) * np.abs(z) ** (K + 1) / math.factorial(K + 1),
            bounded=False,
        )
    raise ValueError(f"unknown entire function {name!r}")


@dataclass(frozen=True)
class McConfig:
    samples: int = 100_000
    seed: int = 42
    confidence_sigma: float = 3.0
    block_size: int = 1 << 16

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")


@dataclass
class CheckResult:
    """One verification record; serializes to the report schema."""

    check: str
    lhs: float
    rhs: float
    residual: float
    passed: bool
    sigma: float = None
    params: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["pass"] = bool(d.pop("passed"))
        return d


# -- chaos composition -------------------------------------------------------

def poly_of_chaos(p, X):
    """p(X) by Horner's rule with ordinary chaos products.

    Exact when deg p * deg X <= N; beyond that the result is flagged truncated.
    """
    one = (0,) * X.m
    acc = ChaosVector(X.m, X.N, {one: p.coeffs[-1]})
    for a in reversed(p.coeffs[:-1]):
        acc = pointwise_product(acc, X) + ChaosVector(X.m, X.N, {one: a})
    if p.degree * X.degree > X.N:
        acc = acc.with_truncated()
    return acc


def functional_calculus(p, X):
    """f°(X) = Gamma(1/sqrt2) f(Gamma(sqrt2) X) for polynomial f."""
    return gamma_scale(poly_of_chaos(p, gamma_scale(X, SQRT2)), 1.0 / SQRT2)


def brownian(grid, t, N):
    """B_t as a first-chaos vector; t must be a grid node."""
    return gaussian_of(indicator(grid, t), N)


# -- exact heat solutions ----------------------------------------------------

def _double_factorial(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def heat_solution_poly(f, t):
    """u(t, .) for polynomial data: x^k -> sum_j C(k, 2j) (2j-1)!! t^j x^(k-2j)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    out = [0.0] * len(f.coeffs)
    for k, c in enumerate(f.coeffs):
        if c == 0.0:
            continue
        for j in range(k // 2 + 1):
            out[k - 2 * j] += c * math.comb(k, 2 * j) * _double_factorial(2 * j - 1) * t**j
    return Poly1D(out)


def heat_solution_quadrature(f, t, x, nodes=QUAD_NODES):
    """E[f(x + sqrt(t) Z)] by Gauss-Hermite quadrature (probabilists' weight)."""
    if not t > 0:
        raise ValueError("quadrature needs t > 0")
    z, w = np.polynomial.hermite_e.hermegauss(nodes)
    w = w / math.sqrt(2.0 * math.pi)
    x = np.asarray(x, dtype=np.float64)
    vals = f(x[..., None] + math.sqrt(t) * z) @ w
    return vals if vals.ndim else float(vals)


def quadrature_error_estimate(f, t, x, nodes=QUAD_NODES):
    """max |Q_nodes - Q_2nodes| over the given points."""
    a = heat_solution_quadrature(f, t, x, nodes)
    b = heat_solution_quadrature(f, t, x, 2 * nodes)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# -- representation checks ----------------------------------------------------------

def _coefficient_record(name, lhs_vec, rhs_vec, params, rtol=1e-9):
    residual = lhs_vec.max_abs_diff(rhs_vec)
    scale = 1.0 + max(lhs_vec.max_abs_coeff(), rhs_vec.max_abs_coeff())
    truncated = lhs_vec.truncated or rhs_vec.truncated
    params = dict(params, truncated=truncated, threshold=rtol * scale)
    return CheckResult(
        check=name,
        lhs=math.sqrt(sum(mfactorial(a) * c * c for a, c in lhs_vec.items())),
        rhs=math.sqrt(sum(mfactorial(a) * c * c for a, c in rhs_vec.items())),
        residual=residual,
        passed=residual <= rtol * scale and not truncated,
        params=params,
    )


def theorem42_check(f, grid, t, N, rtol=1e-9):
    """u(t, B_t) against f°(B_t) for polynomial f, coefficient-wise.

    ``lhs``/``rhs`` of the record are the L^2 norms of the two sides.
    """
    B = brownian(grid, t, N)
    lhs = poly_of_chaos(heat_solution_poly(f, t), B)
    rhs = functional_calculus(f, B)
    params = {"f": list(f.coeffs), "t": t, "m": grid.m, "T": grid.T, "N": N}
    return _coefficient_record("heat.representation", lhs, rhs, params, rtol)


def theorem43_check(f, g, grid, t, N, rtol=1e-9):
    """u(t, B_t) o v(t, B_t) against w(t, B_t) with w(0, .) = f g."""
    B = brownian(grid, t, N)
    U = poly_of_chaos(heat_solution_poly(f, t), B)
    V = poly_of_chaos(heat_solution_poly(g, t), B)
    lhs = anti_wick_series(U, V)
    rhs = poly_of_chaos(heat_solution_poly(f * g, t), B)
    params = {"f": list(f.coeffs), "g": list(g.coeffs), "t": t, "m": grid.m, "T": grid.T, "N": N}
    return _coefficient_record("heat.product_rule", lhs, rhs, params, rtol)


def exp_tail(x, r):
    """Lagrange bound on sum_{i > r} x^i / i! for x >= 0 (the whole series if r < 0)."""
    if r < 0:
        return math.exp(x)
    return x ** (r + 1) / math.factorial(r + 1) * math.exp(x)


def example41_check(h, N, taylor_degree=None):
    """exp°(I_1(h)) against E(h) e^{<h,h>} = exp{I_1(h) + |h|^2 / 2}.

    The exponential is truncated at ``taylor_degree`` (default N); the
    coefficient of H_alpha then misses sum_{i > r} |h|^{2i}/i! times
    h^alpha/alpha!, r = (K - |alpha|) // 2, which is the recorded bound.
    The companion Wick identity exp<>(I_1(h)) = E(h) is exact on all orders.
    """
    K = N if taylor_degree is None else taylor_degree
    X = gaussian_of(h, N)
    exp_taylor = Poly1D([1.0 / math.factorial(k) for k in range(K + 1)])
    lhs = functional_calculus(exp_taylor, X)
    hn2 = inner_product(h, h)
    rhs = stochastic_exponential(h, N) * math.exp(hn2)

    hc = h.coeffs.tolist()
    residual = 0.0
    excess = 0.0
    for alpha in set(lhs) | set(rhs):
        base = abs(math.prod(hc[i] ** a for i, a in enumerate(alpha) if a)) / mfactorial(alpha)
        r = (K - sum(alpha)) // 2
        diff = abs(lhs.coeff(alpha) - rhs.coeff(alpha))
        bound = base * exp_tail(hn2, r) + 1e-12 * (1.0 + abs(rhs.coeff(alpha)))
        residual = max(residual, diff)
        excess = max(excess, diff - bound)

    wick_gap = wick_exp(X).max_abs_diff(stochastic_exponential(h, N))
    wick_scale = 1e-12 * (1.0 + stochastic_exponential(h, N).max_abs_coeff())
    return CheckResult(
        check="heat.exponential",
        lhs=lhs.coeff((0,) * h.grid.m),
        rhs=rhs.coeff((0,) * h.grid.m),
        residual=residual,
        passed=excess <= 0.0 and wick_gap <= wick_scale,
        params={
            "h": hc,
            "N": N,
            "taylor_degree": K,
            "h_norm2": hn2,
            "wick_residual": wick_gap,
        },
    )


def mc_pairing_check(data, grid, t, h, cfg, N=None, nodes=QUAD_NODES):
    """E[u(t, B_t) E(h)] by Monte Carlo against E[f°(B_t) E(h)] from coefficients.

    ``u`` is evaluated pointwise by Gauss-Hermite quadrature; the exact side
    uses the Taylor truncation of ``data``. Blocks of ``cfg.block_size``
    samples come from generators spawned off ``cfg.seed`` and are summed in
    block order, so results are reproducible.
    """
    K = data.taylor.degree
    N = max(K, 1) if N is None else N
    k = grid.node_index(t)
    ind = indicator(grid, t).coeffs
    hc = h.coeffs
    hn2 = inner_product(h, h)

    blocks = -(-cfg.samples // cfg.block_size)
    children = np.random.SeedSequence(cfg.seed).spawn(blocks)
    total = 0.0
    total_sq = 0.0
    left = cfg.samples
    for child in children:
        n = min(cfg.block_size, left)
        left -= n
        xi = np.random.default_rng(child).standard_normal((n, grid.m))
        b_t = xi @ ind
        weight = np.exp(xi @ hc - 0.5 * hn2)
        u = data.func(b_t) if k == 0 else heat_solution_quadrature(data.func, t, b_t, nodes)
        v = u * weight
        total += float(v.sum())
        total_sq += float((v * v).sum())
    lhs = total / cfg.samples
    var = max(total_sq / cfg.samples - lhs * lhs, 0.0)
    sigma = math.sqrt(var / cfg.samples) if cfg.samples > 1 else math.inf

    rhs = pair_expectation(functional_calculus(data.taylor, brownian(grid, t, N)), h)

    # f°(B_t) paired with E(h) is E[f(sqrt2 B_t + H)], H = int_0^t h
    shift = float(np.dot(ind, hc))
    z, w = np.polynomial.hermite_e.hermegauss(4 * nodes)
    taylor_bound = float(data.remainder(shift + math.sqrt(2.0 * t) * z) @ w / math.sqrt(2 * math.pi))
    quad_err = 0.0 if k == 0 else quadrature_error_estimate(data.func, t, np.linspace(-4, 4, 9), nodes)

    diff = abs(lhs - rhs)
    return CheckResult(
        check="heat.mc_pairing",
        lhs=lhs,
        rhs=rhs,
        residual=diff,
        sigma=sigma,
        passed=diff <= cfg.confidence_sigma * sigma,
        params={
            "f": data.name,
            "t": t,
            "h": hc.tolist(),
            "m": grid.m,
            "T": grid.T,
            "N": N,
            "taylor_degree": K,
            "taylor_bound": taylor_bound,
            "quadrature_nodes": nodes,
            "quadrature_error": quad_err,
            "seed": cfg.seed,
            "samples": cfg.samples,
            "block_size": cfg.block_size,
            "confidence_sigma": cfg.confidence_sigma,
        },
    )
