import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from antiwick import chaos as C

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def multi_index(draw, m, max_degree):
    left = max_degree
    out = []
    for _ in range(m):
        a = draw(st.integers(0, left))
        out.append(a)
        left -= a
    perm = draw(st.permutations(range(m)))
    return tuple(out[p] for p in perm)


coeff = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False).filter(lambda c: abs(c) > 1e-3)


@st.composite
def chaos_vectors(draw, m, N, max_degree=None, max_terms=5):
    d = N if max_degree is None else max_degree
    terms = draw(st.dictionaries(multi_index(m, d), coeff, max_size=max_terms))
    return C.ChaosVector(m, N, terms)


@st.composite
def chaos_pair(draw, max_m=3, N=6):
    m = draw(st.integers(1, max_m))
    half = N // 2
    return draw(chaos_vectors(m, N, half)), draw(chaos_vectors(m, N, half))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def rel_close(a, b, rtol=1e-9):
    return abs(a - b) <= rtol * max(abs(a), abs(b), 1.0)


def sample_xi(rng, m, n=100):
    return rng.standard_normal((n, m))


SQRT2 = math.sqrt(2.0)
