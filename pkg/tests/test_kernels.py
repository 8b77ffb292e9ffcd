import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antiwick import _kernels, _pykernels
from antiwick import chaos as C

from conftest import chaos_pair

BACKENDS = _kernels.backends()
NAMES = sorted(BACKENDS)


def _args(X, Y):
    ia, ca = X.arrays()
    ib, cb = Y.arrays()
    return ia, ca, ib, cb


@pytest.mark.parametrize("name", NAMES)
def test_backend_shapes(name):
    k = BACKENDS[name]
    X, Y = C.xi(2, 0, 4), C.xi(2, 0, 4)
    idx, c, cut = k.linearized_product(*_args(X, Y), 4, C.linearization_table(4))
    assert idx.dtype == np.int32 and idx.shape == (2, 2)
    assert c.dtype == np.float64 and cut is False
    idx, c, cut = k.wick_product(*_args(X, Y), 1)
    assert idx.shape == (0, 2) and cut is True


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
@given(chaos_pair(max_m=4, N=8), st.sampled_from([1.0, 0.0, 2.0, 0.5]))
def test_backends_bitwise_equal(pair, scale):
    X, Y = pair
    args = _args(X, Y)
    table = C.linearization_table(X.N, scale)
    py = _pykernels.linearized_product(*args, X.N, table)
    cc = BACKENDS["compiled"].linearized_product(*args, X.N, table)
    assert np.array_equal(py[0], cc[0]) and np.array_equal(py[1], cc[1]) and py[2] == cc[2]
    py = _pykernels.wick_product(*args, X.N)
    cc = BACKENDS["compiled"].wick_product(*args, X.N)
    assert np.array_equal(py[0], cc[0]) and np.array_equal(py[1], cc[1]) and py[2] == cc[2]


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
def test_evaluate_bitwise_equal(rng):
    for _ in range(20):
        X = C.random_chaos(rng, 4, 10, 8)
        idx, c = X.arrays()
        xs = rng.standard_normal((50, 4))
        a = _pykernels.evaluate(idx, c, xs, X.degree)
        b = BACKENDS["compiled"].evaluate(idx, c, xs, X.degree)
        assert np.array_equal(a, b)


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
def test_truncation_flag_agrees_on_overflow(rng):
    X = C.random_chaos(rng, 3, 6, 5)
    Y = C.random_chaos(rng, 3, 6, 5)
    args = _args(X, Y)
    table = C.linearization_table(6)
    assert _pykernels.linearized_product(*args, 6, table)[2] is True
    assert BACKENDS["compiled"].linearized_product(*args, 6, table)[2] is True


def test_packable_limits():
    assert _kernels.packable(12, 20)
    assert not _kernels.packable(40, 20)
    assert _kernels.for_shape(40, 20) is _pykernels


def test_wide_shape_uses_fallback():
    X = C.xi(30, 29, 25)
    assert C.pointwise_product(X, X).coeff(C.unit_index(30, 29, 2)) == 1.0


def _run_env(backend, code):
    env = dict(os.environ, ANTIWICK_BACKEND=backend)
    return subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)


def test_env_forces_python_backend():
    out = _run_env("python", "import antiwick; print(antiwick.BACKEND)")
    assert out.returncode == 0 and out.stdout.strip() == "python"


def test_env_rejects_unknown_backend():
    out = _run_env("fortran", "import antiwick")
    assert out.returncode != 0 and "ANTIWICK_BACKEND" in out.stderr


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
def test_default_prefers_compiled():
    out = _run_env("auto", "import antiwick; print(antiwick.BACKEND)")
    assert out.stdout.strip() == "compiled"
