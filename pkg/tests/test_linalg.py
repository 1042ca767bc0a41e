import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from framemult.errors import NumericalError
from framemult.linalg import clip_psd, jacobi_eigh, top_eigenvalue

from oracles import charpoly_eigenvalues


def random_sym(rng, *shape):
    a = rng.standard_normal(shape)
    return a + np.swapaxes(a, -1, -2)


@pytest.mark.parametrize("kernel", ["numpy", "numba"])
def test_matches_lapack(kernel):
    rng = np.random.default_rng(3)
    a = random_sym(rng, 12, 7, 7)
    w, v = jacobi_eigh(a, kernel=kernel)
    ref = np.linalg.eigvalsh(a)[:, ::-1]
    assert np.allclose(w, ref, atol=1e-12)
    # A V = V diag(w), V orthogonal
    assert np.allclose(a @ v, v * w[:, None, :], atol=1e-11)
    assert np.allclose(np.swapaxes(v, -1, -2) @ v, np.eye(7), atol=1e-12)


def test_kernels_agree():
    rng = np.random.default_rng(8)
    a = random_sym(rng, 40, 5, 5)
    w1 = jacobi_eigh(a, vectors=False, kernel="numpy")
    w2 = jacobi_eigh(a, vectors=False, kernel="numba")
    assert np.allclose(w1, w2, atol=1e-12)


def test_charpoly_oracle():
    s = np.array([[4.0, 1.0, -2.0], [1.0, 2.0, 0.5], [-2.0, 0.5, 3.0]])
    assert np.allclose(jacobi_eigh(s, vectors=False), charpoly_eigenvalues(s), atol=1e-10)


def test_descending_and_shapes():
    w, v = jacobi_eigh(np.diag([1.0, 5.0, 3.0]))
    assert list(w) == [5.0, 3.0, 1.0]
    assert np.allclose(np.abs(v[:, 0]), [0, 1, 0])
    assert jacobi_eigh(np.array([[2.5]]), vectors=False)[0] == 2.5
    assert top_eigenvalue(np.zeros((3, 4, 4))).shape == (3,)


def test_rejects_nonsquare():
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))


def test_clip_psd():
    assert np.array_equal(clip_psd(np.array([2.0, -1e-12]), 2.0), [2.0, 0.0])
    with pytest.raises(NumericalError):
        clip_psd(np.array([1.0, -0.1]), 1.0)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-1e3, 1e3)))
def test_property_trace_and_spectrum(a):
    a = a + a.T
    w = jacobi_eigh(a, vectors=False)
    scale = max(1.0, np.abs(a).max())
    assert np.all(np.diff(w) <= 0)
    assert abs(w.sum() - np.trace(a)) <= 1e-10 * scale
    assert np.allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-10 * scale)
