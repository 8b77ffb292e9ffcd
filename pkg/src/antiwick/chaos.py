"""Truncated Wiener-Ito chaos expansions over m independent Gaussian modes.

A :class:`ChaosVector` stores ``X = sum_alpha c_alpha H_alpha`` where
``H_alpha(xi) = prod_i h_{alpha_i}(xi_i)`` and ``h_k`` is the monic
probabilists' Hermite polynomial, so ``E[H_alpha^2] = alpha!``. Multi-indices
are plain tuples of non-negative ints; only ``|alpha| <= N`` is kept.
"""
from functools import lru_cache
from itertools import combinations_with_replacement
import json
import math
from types import MappingProxyType

import numpy as np

from . import _kernels
from .basis import L2Function

# desk-scale caps for which the integer tables stay cheap
MAX_MODES = 12
MAX_ORDER = 20

RTOL = 1e-9
ATOL = 1e-12


# -- multi-index helpers -----------------------------------------------------

def degree(alpha):
    return sum(alpha)


def mfactorial(alpha):
    """alpha! as an exact integer."""
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def graded_lex_key(alpha):
    return (sum(alpha), tuple(alpha))


def unit_index(m, i, k=1):
    alpha = [0] * m
    alpha[i] = k
    return tuple(alpha)


def multi_indices(m, N, modes=None):
    """All multi-indices of degree <= N in graded-lex order.

    With ``modes`` given, only those positions may be non-zero.
    """
    modes = range(m) if modes is None else sorted(modes)
    out = []
    for d in range(N + 1):
        for combo in combinations_with_replacement(modes, d):
            alpha = [0] * m
            for i in combo:
                alpha[i] += 1
            out.append(tuple(alpha))
    out.sort(key=graded_lex_key)
    return out


def count_multi_indices(m, N):
    return math.comb(m + N, N)


@lru_cache(maxsize=None)
def linearization_table(N, scale=1.0):
    """``W[a, b, j] = scale**j * j! * C(a, j) * C(b, j)`` for a, b <= N.

    Integer part is exact; conversion to float happens last.
    """
    W = np.zeros((N + 1, N + 1, N + 1))
    for a in range(N + 1):
        for b in range(N + 1):
            for j in range(min(a, b) + 1):
                w = math.factorial(j) * math.comb(a, j) * math.comb(b, j)
                W[a, b, j] = float(w) if scale == 1.0 else float(w) * scale**j
    W.setflags(write=False)
    return W


# -- the vector type ---------------------------------------------------------

class ChaosVector:
    """Immutable sparse chaos expansion.

    ``truncated`` records whether any term above the order cap was dropped
    while producing this vector (directly or in one of its inputs).
    """

    __slots__ = ("m", "N", "truncated", "_terms", "_arrays")

    def __init__(self, m, N, terms=None, truncated=False):
        if int(m) != m or m < 1:
            raise ValueError(f"m must be a positive integer, got {m}")
        if int(N) != N or N < 0:
            raise ValueError(f"order cap N must be a non-negative integer, got {N}")
        clean = {}
        for alpha, c in dict(terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != m:
                raise ValueError(f"multi-index {alpha} does not have {m} entries")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            c = float(c)
            if c == 0.0:
                continue
            if sum(alpha) > N:
                truncated = True
                continue
            clean[alpha] = clean.get(alpha, 0.0) + c
        self._init(int(m), int(N), clean, truncated)

    def _init(self, m, N, terms, truncated):
        ordered = {a: terms[a] for a in sorted(terms, key=graded_lex_key) if terms[a] != 0.0}
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "truncated", bool(truncated))
        object.__setattr__(self, "_terms", ordered)
        object.__setattr__(self, "_arrays", None)

    @classmethod
    def _trusted(cls, m, N, terms, truncated=False):
        # skips validation; callers guarantee shape and degree
        obj = cls.__new__(cls)
        obj._init(m, N, terms, truncated)
        return obj

    @classmethod
    def _from_arrays(cls, m, N, idx, coeffs, truncated):
        terms = dict(zip(map(tuple, idx.tolist()), coeffs.tolist()))
        return cls._trusted(m, N, terms, truncated)

    def __setattr__(self, name, value):
        raise AttributeError("ChaosVector is immutable")

    # -- container protocol --
    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def coeff(self, alpha):
        return self._terms.get(tuple(alpha), 0.0)

    @property
    def nnz(self):
        return len(self._terms)

    @property
    def degree(self):
        """Largest |alpha| present; 0 for the zero vector."""
        return max((sum(a) for a in self._terms), default=0)

    def mode_caps(self):
        """Largest exponent per mode over the stored terms."""
        caps = [0] * self.m
        for alpha in self._terms:
            for i, a in enumerate(alpha):
                if a > caps[i]:
                    caps[i] = a
        return caps

    def arrays(self):
        """``(idx, coeffs)`` arrays in graded-lex order, cached."""
        if self._arrays is None:
            n = len(self._terms)
            idx = np.array(list(self._terms), dtype=np.int32).reshape(n, self.m)
            c = np.fromiter(self._terms.values(), dtype=np.float64, count=n)
            idx.setflags(write=False)
            c.setflags(write=False)
            object.__setattr__(self, "_arrays", (idx, c))
        return self._arrays

    def with_truncated(self, flag=True):
        return ChaosVector._trusted(self.m, self.N, self._terms, self.truncated or flag)

    # -- linear structure --
    def _compatible(self, other):
        if not isinstance(other, ChaosVector):
            raise TypeError(f"expected ChaosVector, got {type(other).__name__}")
        if other.m != self.m:
            raise ValueError(f"mode count mismatch: {self.m} vs {other.m}")
        if other.N != self.N:
            raise ValueError(f"order cap mismatch: {self.N} vs {other.N}")

    def __add__(self, other):
        if not isinstance(other, ChaosVector):
            return NotImplemented
        self._compatible(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            out[a] = out.get(a, 0.0) + c
        return ChaosVector._trusted(self.m, self.N, out, self.truncated or other.truncated)

    def __sub__(self, other):
        if not isinstance(other, ChaosVector):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return self * -1.0

    def __mul__(self, scalar):
        if isinstance(scalar, ChaosVector):
            raise TypeError("use pointwise_product / wick_product for chaos products")
        s = float(scalar)
        return ChaosVector._trusted(
            self.m, self.N, {a: s * c for a, c in self._terms.items()}, self.truncated
        )

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __eq__(self, other):
        return (
            isinstance(other, ChaosVector)
            and self.m == other.m
            and self.N == other.N
            and self._terms == other._terms
        )

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{a}: {c:.6g}" for a, c in list(self._terms.items())[:6])
        more = ", ..." if len(self._terms) > 6 else ""
        flag = ", truncated" if self.truncated else ""
        return f"ChaosVector(m={self.m}, N={self.N}, {{{body}{more}}}{flag})"

    # -- comparisons --
    def max_abs_diff(self, other):
        self._compatible(other)
        keys = set(self._terms) | set(other._terms)
        return max((abs(self.coeff(a) - other.coeff(a)) for a in keys), default=0.0)

    def max_abs_coeff(self):
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def allclose(self, other, rtol=RTOL, atol=ATOL):
        """Coefficient-wise ``|x - y| <= atol + rtol * max(|x|, |y|)``."""
        self._compatible(other)
        for a in set(self._terms) | set(other._terms):
            x, y = self.coeff(a), other.coeff(a)
            if abs(x - y) > atol + rtol * max(abs(x), abs(y)):
                return False
        return True

    # -- serialization --
    def to_dict(self):
        return {
            "m": self.m,
            "N": self.N,
            "coeffs": [[list(a), c] for a, c in self._terms.items()],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(data["m"], data["N"], {tuple(a): c for a, c in data["coeffs"]})

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def combine(weighted, m, N, truncated=False):
    """sum_k w_k V_k for an iterable of ``(w_k, V_k)``, built in one pass."""
    out = {}
    for w, V in weighted:
        truncated = truncated or V.truncated
        w = float(w)
        for a, c in V.items():
            out[a] = out.get(a, 0.0) + w * c
    return ChaosVector._trusted(m, N, out, truncated)


# -- constructors ------------------------------------------------------------

def constant(c, m, N):
    return ChaosVector(m, N, {(0,) * m: c})


def zeros(m, N):
    return ChaosVector(m, N)


def basis_element(alpha, N, c=1.0):
    """c * H_alpha."""
    return ChaosVector(len(alpha), N, {tuple(alpha): c})


def xi(m, i, N):
    """The i-th standard Gaussian mode (0-based) as a first-chaos vector."""
    return basis_element(unit_index(m, i), N)


def gaussian_of(f, N):
    """First-chaos element I_1(f) = sum_i f_i xi_i."""
    if N < 1:
        raise ValueError("a first-chaos element needs order cap N >= 1")
    m = f.grid.m
    return ChaosVector(m, N, {unit_index(m, i): c for i, c in enumerate(f.coeffs)})


def stochastic_exponential(f, N):
    """E(f) truncated at order N: coefficient f^alpha / alpha!."""
    m = f.grid.m
    fc = f.coeffs.tolist()
    support = [i for i, c in enumerate(fc) if c != 0.0]
    terms = {}
    for alpha in multi_indices(m, N, modes=support):
        w = 1.0
        for i in support:
            if alpha[i]:
                w *= fc[i] ** alpha[i] / math.factorial(alpha[i])
        terms[alpha] = w
    return ChaosVector._trusted(m, N, terms)


def random_chaos(rng, m, N, degree, terms=6, scale=1.0):
    """Random sparse vector with one term of exactly ``degree`` and others below.

    Multi-indices are multinomial splits of a random degree over the modes;
    coefficients are standard normal times ``scale``.
    """
    if degree > N:
        raise ValueError("degree above the order cap")
    p = np.full(m, 1.0 / m)
    out = {}
    for k in range(terms):
        d = degree if k == 0 else int(rng.integers(0, degree + 1))
        alpha = tuple(int(a) for a in rng.multinomial(d, p))
        out[alpha] = out.get(alpha, 0.0) + scale * float(rng.standard_normal())
    return ChaosVector(m, N, out)


# -- evaluation and expectations -----------------------------------------------

def evaluate(X, xi_values):
    """X(xi) for one sample (length m) or a batch (shape (S, m))."""
    arr = np.asarray(xi_values, dtype=np.float64)
    single = arr.ndim == 1
    batch = arr.reshape(1, -1) if single else arr
    if batch.shape[1] != X.m:
        raise ValueError(f"expected samples with {X.m} entries, got {batch.shape[1]}")
    idx, c = X.arrays()
    kern = _kernels.for_shape(X.m, X.degree)
    out = kern.evaluate(idx, c, batch, X.degree)
    return float(out[0]) if single else out


def expectation(X):
    return X.coeff((0,) * X.m)


def pair_expectation(X, h):
    """E[X * E(h)] = sum_alpha c_alpha h^alpha."""
    if not isinstance(h, L2Function) or h.grid.m != X.m:
        raise ValueError("h must be an L2Function on a grid with X.m cells")
    hc = h.coeffs.tolist()
    total = 0.0
    for alpha, c in X.items():
        w = c
        for i, a in enumerate(alpha):
            if a:
                w *= hc[i] ** a
        total += w
    return total


def norm2(X):
    """L^2(Omega) norm: sqrt(sum alpha! c_alpha^2)."""
    return norm_g(X, 1.0)


def norm_g(X, lam):
    """G_lambda norm ||Gamma(lambda) X||_2 for lambda >= 1."""
    if not lam >= 1.0:
        raise ValueError(f"G_lambda norms need lambda >= 1, got {lam}")
    s = math.fsum(
        mfactorial(a) * lam ** (2 * sum(a)) * c * c for a, c in X.items()
    )
    return math.sqrt(s)


def gamma_scale(X, lam):
    """Second quantization of lam * I: each order-n component times lam**n."""
    if not lam > 0:
        raise ValueError(f"Gamma(lambda) needs lambda > 0, got {lam}")
    return ChaosVector._trusted(
        X.m, X.N, {a: c * lam ** sum(a) for a, c in X.items()}, X.truncated
    )


# -- products ------------------------------------------------------------------

def _kernel_inputs(X, Y):
    X._compatible(Y)
    ia, ca = X.arrays()
    ib, cb = Y.arrays()
    return ia, ca, ib, cb


def linearized_product(X, Y, scale=1.0):
    """Per-mode rule h_a * h_b = sum_j scale^j j! C(a,j) C(b,j) h_{a+b-2j}.

    ``scale=1`` is the ordinary product; ``scale=1+alpha`` gives the product
    with weight exp(alpha x) on the derivative pairings.
    """
    ia, ca, ib, cb = _kernel_inputs(X, Y)
    kern = _kernels.for_shape(X.m, X.N)
    idx, c, cut = kern.linearized_product(ia, ca, ib, cb, X.N, linearization_table(X.N, scale))
    return ChaosVector._from_arrays(X.m, X.N, idx, c, cut or X.truncated or Y.truncated)


def pointwise_product(X, Y):
    """Ordinary product X * Y, truncated at the shared order cap."""
    return linearized_product(X, Y, 1.0)


def wick_product(X, Y):
    """H_alpha <> H_beta = H_{alpha+beta}, truncated at the order cap."""
    ia, ca, ib, cb = _kernel_inputs(X, Y)
    kern = _kernels.for_shape(X.m, X.N)
    idx, c, cut = kern.wick_product(ia, ca, ib, cb, X.N)
    return ChaosVector._from_arrays(X.m, X.N, idx, c, cut or X.truncated or Y.truncated)


def wick_power(X, n):
    if n < 0:
        raise ValueError("negative Wick power")
    out = constant(1.0, X.m, X.N)
    for _ in range(n):
        out = wick_product(out, X)
    return out


def wick_exp(X):
    """sum_k X^{<>k} / k! over all orders the cap retains."""
    out = constant(1.0, X.m, X.N)
    term = out
    for k in range(1, X.N + 1):
        term = wick_product(term, X) / k
        out = out + term
    return out
