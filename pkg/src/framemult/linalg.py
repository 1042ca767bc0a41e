"""Dense symmetric eigensolver based on cyclic Jacobi rotations.

The solver works on a single matrix or on a stack of matrices with shape
``(..., M, M)``.  Two kernels implement the same iteration:

* a numba kernel sweeping pairs in row-cyclic order (used when numba is
  importable), and
* a pure NumPy kernel that applies rotations in round-robin order, so each
  round zeroes ``M // 2`` disjoint pairs of every matrix in the stack at once.

Both stop when the off-diagonal Frobenius norm drops to ``tol * ||A||_F``.
"""
import math
import os
from functools import lru_cache

import numpy as np

from .errors import NumericalError

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

OFF_TOL = 1e-13
MAX_SWEEPS = 100
NEGATIVE_TOL = 1e-8


@lru_cache(maxsize=None)
def _round_robin(m: int):
    """Pair schedule for one sweep: list of (p, q) index arrays with p < q."""
    slots = list(range(m)) if m % 2 == 0 else list(range(m)) + [-1]
    k = len(slots)
    rounds = []
    for _ in range(k - 1):
        pairs = []
        for i in range(k // 2):
            a, b = slots[i], slots[k - 1 - i]
            if a >= 0 and b >= 0:
                pairs.append((min(a, b), max(a, b)))
        p = np.array([a for a, _ in pairs], dtype=np.intp)
        q = np.array([b for _, b in pairs], dtype=np.intp)
        rounds.append((p, q))
        # circle method: first slot fixed, the rest rotate by one
        slots = [slots[0], slots[-1]] + slots[1:-1]
    return rounds


def _off_norm(a):
    off = a * (1.0 - np.eye(a.shape[-1]))
    return np.sqrt(np.sum(off * off, axis=(-2, -1)))


def _rotation(app, aqq, apq):
    # tangent of the angle zeroing apq, smaller root
    tau = (aqq - app) / (2.0 * apq)
    sgn = 1.0 if tau >= 0.0 else -1.0
    return sgn / (abs(tau) + math.hypot(1.0, tau))


if njit is not None:
    _rotation_jit = njit(cache=True)(_rotation)

    @njit(cache=True, nogil=True)
    def _jacobi_stack(a, v, threshold, max_sweeps, vectors):
        nb, m, _ = a.shape
        for b in range(nb):
            for _ in range(max_sweeps):
                off = 0.0
                for i in range(m):
                    for j in range(m):
                        if i != j:
                            off += a[b, i, j] * a[b, i, j]
                if math.sqrt(off) <= threshold[b]:
                    break
                for p in range(m - 1):
                    for q in range(p + 1, m):
                        apq = a[b, p, q]
                        app = a[b, p, p]
                        aqq = a[b, q, q]
                        if not abs(apq) > 1e-300 + 1e-18 * abs(aqq - app):
                            continue
                        t = _rotation_jit(app, aqq, apq)
                        c = 1.0 / math.sqrt(1.0 + t * t)
                        s = t * c
                        for k in range(m):
                            akp = a[b, k, p]
                            akq = a[b, k, q]
                            a[b, k, p] = c * akp - s * akq
                            a[b, k, q] = s * akp + c * akq
                        for k in range(m):
                            apk = a[b, p, k]
                            aqk = a[b, q, k]
                            a[b, p, k] = c * apk - s * aqk
                            a[b, q, k] = s * apk + c * aqk
                        if vectors:
                            for k in range(m):
                                vkp = v[b, k, p]
                                vkq = v[b, k, q]
                                v[b, k, p] = c * vkp - s * vkq
                                v[b, k, q] = s * vkp + c * vkq


def _use_numba():
    return njit is not None and os.environ.get("FRAMEMULT_NO_NUMBA", "") == ""


def jacobi_eigh(a, vectors=True, tol=OFF_TOL, max_sweeps=MAX_SWEEPS, kernel=None):
    """Eigen-decomposition of symmetric matrices by cyclic Jacobi.

    Parameters
    ----------
    a : array_like, shape (..., M, M)
        Symmetric input; only the symmetric part is used.
    vectors : bool
        Accumulate eigenvectors.
    tol : float
        Stop once the off-diagonal Frobenius norm of every matrix in the
        stack is at most ``tol * ||A||_F``.
    kernel : {None, "numba", "numpy"}
        Force a kernel; by default numba is used when available.

    Returns
    -------
    w : ndarray, shape (..., M)
        Eigenvalues sorted in descending order.
    v : ndarray, shape (..., M, M), optional
        Column ``k`` of ``v`` is the eigenvector for ``w[..., k]``.
    """
    a = np.array(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    m = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, m, m))
    v = np.broadcast_to(np.eye(m), a.shape).copy() if vectors else None

    scale = np.sqrt(np.sum(a * a, axis=(-2, -1)))
    threshold = tol * scale
    if kernel is None:
        kernel = "numba" if _use_numba() else "numpy"
    if kernel == "numba" and m > 1:
        if njit is None:
            raise RuntimeError("numba kernel requested but numba is not installed")
        work_v = v if vectors else np.empty((0, 0, 0))
        _jacobi_stack(a, work_v, threshold, max_sweeps, vectors)
    elif m > 1:
        for _ in range(max_sweeps):
            if np.all(_off_norm(a) <= threshold):
                break
            for p, q in _round_robin(m):
                app = a[:, p, p]
                aqq = a[:, q, q]
                apq = a[:, p, q]
                # rotations on negligible entries are skipped (t = 0)
                active = np.abs(apq) > 1e-300 + 1e-18 * np.abs(aqq - app)
                safe = np.where(active, apq, 1.0)
                tau = np.where(active, (aqq - app) / (2.0 * safe), 0.0)
                t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                c_ = c[:, :, None]
                s_ = s[:, :, None]
                rp = a[:, p, :]
                rq = a[:, q, :]
                a[:, p, :] = c_ * rp - s_ * rq
                a[:, q, :] = s_ * rp + c_ * rq
                c_ = c[:, None, :]
                s_ = s[:, None, :]
                cp = a[:, :, p]
                cq = a[:, :, q]
                a[:, :, p] = c_ * cp - s_ * cq
                a[:, :, q] = s_ * cp + c_ * cq
                if vectors:
                    vp = v[:, :, p]
                    vq = v[:, :, q]
                    v[:, :, p] = c_ * vp - s_ * vq
                    v[:, :, q] = s_ * vp + c_ * vq

    w = np.diagonal(a, axis1=-2, axis2=-1).copy()
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1).reshape(batch + (m,))
    if not vectors:
        return w
    v = np.take_along_axis(v, order[:, None, :], axis=-1).reshape(batch + (m, m))
    return w, v


def top_eigenvalue(a):
    """Largest eigenvalue of each symmetric matrix in a stack."""
    return jacobi_eigh(a, vectors=False)[..., 0]


def clip_psd(w, scale, tol=NEGATIVE_TOL):
    """Clip slightly negative eigenvalues of a PSD matrix to zero.

    Raises NumericalError if any eigenvalue lies more than ``tol * scale``
    below zero.
    """
    w = np.asarray(w, dtype=float)
    worst = float(np.min(w)) if w.size else 0.0
    if worst < -tol * scale:
        raise NumericalError(
            f"eigenvalue {worst:.3e} is below zero beyond tolerance "
            f"{tol:.1e} * {scale:.3e} for a positive semidefinite matrix"
        )
    return np.maximum(w, 0.0)
