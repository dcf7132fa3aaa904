import numpy as np
import pytest

from mswso import _kernels_py, kernels

compiled = pytest.importorskip("mswso._kernels")


def _bidiag(n, lam, rng):
    sup = (1 + rng.random(n - 1)) * np.exp(1j * rng.random(n - 1))
    return -complex(lam), sup.astype(complex)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("n", [1, 5, 200])
def test_affine_recurrence_equal(n):
    rng = np.random.default_rng(n)
    mul = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    add = rng.standard_normal(n) + 0j
    a = compiled.affine_recurrence(mul, add, 0.5 + 0.1j)
    b = _kernels_py.affine_recurrence(mul, add, 0.5 + 0.1j)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("lam", [1.5, 2.0, 3.0, 1.2 + 0.9j])
def test_inverse_iteration_equal(lam):
    rng = np.random.default_rng(0)
    diag, sup = _bidiag(101, lam, rng)
    x0 = 1 + 0.1 * rng.standard_normal(101) + 0j
    s1, v1, it1, ok1 = compiled.inverse_iteration(diag, sup, x0.copy(), 1e-10, 10_000)
    s2, v2, it2, ok2 = _kernels_py.inverse_iteration(diag, sup, x0.copy(), 1e-10, 10_000)
    assert ok1 and ok2 and it1 == it2
    assert s1 == pytest.approx(s2, rel=1e-12)
    M = diag * np.eye(101) + np.diag(sup, 1)
    assert s1 == pytest.approx(np.linalg.svd(M, compute_uv=False)[-1], rel=1e-8)


@pytest.mark.parametrize("flag, expected", [("1", "python"), ("0", "cython"), ("", "cython")])
def test_env_var_selects_backend(flag, expected):
    import os
    import subprocess
    import sys
    env = dict(os.environ, MSWSO_PURE_PYTHON=flag)
    out = subprocess.run([sys.executable, "-c", "import mswso; print(mswso.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    assert out == expected


def test_pure_backend_pipeline_matches(monkeypatch):
    from mswso import discrete

    seq = discrete.CoeffSeq.step(1.0, 2.0)
    fast = discrete.sigma_min(discrete.finite_section(seq, 2.0, 100))
    monkeypatch.setattr(kernels, "inverse_iteration", _kernels_py.inverse_iteration)
    slow = discrete.sigma_min(discrete.finite_section(seq, 2.0, 100))
    assert fast == pytest.approx(slow, rel=1e-12)
