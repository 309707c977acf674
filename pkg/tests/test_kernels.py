import numpy as np
import pytest

from groth_lhv import _fallback, kernels
from groth_lhv.constants import SEESAW_GAIN_TOL, SEESAW_MAX_ITER, ZERO_RESULTANT
from groth_lhv.core import sample_sphere

BACKENDS = kernels.backends()


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.parametrize("m", [1, 2, 5, 13, 18])
def test_backends_agree_on_local_bound(m):
    M = np.random.default_rng(m).standard_normal((m, m + 2))
    vals = {}
    for name, mod in BACKENDS.items():
        v, s = mod.local_bound_signs(np.ascontiguousarray(M))
        assert s[0] == 1 and set(np.abs(s.astype(int))) == {1}
        # the returned signs attain the value
        assert np.abs(s.astype(float) @ M).sum() == pytest.approx(v, rel=1e-12)
        vals[name] = v
    ref = vals["python"]
    for v in vals.values():
        assert v == pytest.approx(ref, rel=1e-12)


def test_compiled_gray_code_beyond_resum_period():
    # 2^17 steps crosses the periodic resummation inside the compiled walk
    if "compiled" not in BACKENDS:
        pytest.skip("compiled backend not built")
    M = np.random.default_rng(3).standard_normal((18, 6))
    v1, _ = BACKENDS["compiled"].local_bound_signs(M)
    v2, _ = _fallback.local_bound_signs(M)
    assert v1 == pytest.approx(v2, rel=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_seesaw_history_monotone(name):
    g = np.random.default_rng(7)
    M = g.standard_normal((8, 8))
    A, B = sample_sphere(g, 3, 8), sample_sphere(g, 3, 8)
    hist, capped = BACKENDS[name].seesaw_run(M, A, B, SEESAW_GAIN_TOL, SEESAW_MAX_ITER, ZERO_RESULTANT)
    hist = np.asarray(hist)
    assert not capped
    assert np.all(np.diff(hist) >= -1e-12)
    assert hist[-1] == pytest.approx(np.sum(M * (A @ B.T)), abs=1e-12)
    assert np.allclose(np.linalg.norm(A, axis=1), 1) and np.allclose(np.linalg.norm(B, axis=1), 1)


def test_seesaw_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend")
    g = np.random.default_rng(11)
    M = g.standard_normal((6, 6))
    A0, B0 = sample_sphere(g, 4, 6), sample_sphere(g, 4, 6)
    out = []
    for mod in BACKENDS.values():
        A, B = A0.copy(), B0.copy()
        hist, _ = mod.seesaw_run(M, A, B, SEESAW_GAIN_TOL, SEESAW_MAX_ITER, ZERO_RESULTANT)
        out.append(hist[-1])
    assert out[0] == pytest.approx(out[1], abs=1e-9)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_seesaw_zero_resultant_keeps_vector(name):
    M = np.array([[1.0, 0.0], [0.0, 0.0]])
    A = np.array([[1.0, 0.0], [0.0, 1.0]])
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    BACKENDS[name].seesaw_run(M, A, B, SEESAW_GAIN_TOL, 50, ZERO_RESULTANT)
    # row 2 of A and column 2 of B never see a nonzero resultant
    assert np.array_equal(A[1], [0.0, 1.0])
    assert np.array_equal(B[1], [1.0, 0.0])


def test_env_var_forces_python(monkeypatch):
    import importlib
    monkeypatch.setenv("GROTH_LHV_PURE", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("GROTH_LHV_PURE")
        importlib.reload(kernels)
