"""Brute-force reference implementations used only by the tests.

They share no code with the package beyond numpy: norms come from SVD,
eigenvalues from LAPACK or polynomial roots, minima from grid search.
"""
import itertools

import numpy as np


def all_signs(n):
    """Every +-1 pattern of length n (2^n rows, no symmetry reduction)."""
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def operator(x, f, signs):
    # x -> sum_j s_j <x, f_j> x_j as a matrix acting on column vectors
    return x.T @ (signs[:, None] * f)


def brute_constant(x, f, symbol=None):
    x, f = np.asarray(x, float), np.asarray(f, float)
    if symbol is not None:
        f = f * np.asarray(symbol, float)[:, None]
    best = 0.0
    for s in all_signs(x.shape[0]):
        best = max(best, np.linalg.norm(operator(x, f, s), 2))
    return best


def power_norm(t, iters=5000, seed=0):
    """Operator 2-norm by power iteration on T^T T."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(t.shape[1])
    g = t.T @ t
    lam = 0.0
    for _ in range(iters):
        w = g @ v
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0
        v = w / nrm
        lam = v @ g @ v
    return float(np.sqrt(max(lam, 0.0)))


def charpoly_eigenvalues(s):
    """Eigenvalues of a small symmetric matrix from the characteristic polynomial."""
    m = s.shape[0]
    # Faddeev-LeVerrier coefficients
    coeffs = [1.0]
    mk = np.zeros_like(s)
    for k in range(1, m + 1):
        mk = s @ mk + coeffs[-1] * np.eye(m)
        coeffs.append(-np.trace(s @ mk) / k)
    roots = np.roots(coeffs)
    return np.sort(roots.real)[::-1]


def split_branches(x, f, t):
    """lambda_1(sum t x x^T) and lambda_1(sum f f^T / t) for a batch of t rows."""
    t = np.atleast_2d(t)
    sx = np.einsum("kj,ja,jb->kab", t, x, x)
    sf = np.einsum("kj,ja,jb->kab", 1.0 / t, f, f)
    return np.linalg.eigvalsh(sx)[:, -1], np.linalg.eigvalsh(sf)[:, -1]


def split_objective(x, f, t):
    bx, bf = split_branches(x, f, t)
    return np.maximum(bx, bf)


def grid_split_minimum(x, f, points=60, lo=1e-2, hi=1e2, zooms=40):
    """Minimum of the split objective by repeated log-grid search.

    Scaling t by c multiplies the X branch by c and the F branch by 1/c, so
    the best scaling of any t gives sqrt(branch_x * branch_f).  The grid
    therefore runs over t = (1, t_2, ..., t_N): first the full grid over
    [lo, hi]^(N-1), then 21-point grids around the best point with the span
    halved each round.
    """
    n = x.shape[0]
    if n == 1:
        bx, bf = split_branches(x, f, np.ones((1, 1)))
        return float(np.sqrt(bx[0] * bf[0])), np.ones(1)
    centers = np.full(n - 1, 0.5 * (np.log10(hi) + np.log10(lo)))
    half = 0.5 * (np.log10(hi) - np.log10(lo))
    best, best_t = np.inf, None
    for r in range(zooms + 1):
        per = points if r == 0 else 21
        axes = [np.linspace(c - half, c + half, per) for c in centers]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
        t = np.hstack([np.ones((mesh.shape[0], 1)), 10.0 ** mesh])
        bx, bf = split_branches(x, f, t)
        vals = np.sqrt(np.maximum(bx, 0) * np.maximum(bf, 0))
        i = int(np.argmin(vals))
        if vals[i] < best:
            best = float(vals[i])
            best_t = t[i] * np.sqrt(bf[i] / bx[i])
        centers = mesh[i] if vals[i] <= best else centers
        half /= 2.0
    return best, best_t


def rademacher_mean_abs(a):
    a = np.asarray(a, float)
    return float(np.mean(np.abs(all_signs(a.size) @ a)))
