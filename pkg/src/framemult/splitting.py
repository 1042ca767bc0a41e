"""Weight splittings of a frame multiplier into two Bessel sequences.

For weights d_j > 0 the multiplier with vectors (d_j x_j) and
(m_j f_j / d_j) is the same operator as the original one.  A split is
judged by the larger of the two optimal Bessel bounds.  Working with
t_j = d_j^2 the objective

    g(t) = max( lambda_1(sum_j t_j x_j x_j^T), lambda_1(sum_j (m_j^2 / t_j) f_j f_j^T) )

is convex on the positive orthant, which is what ``optimal_split`` exploits.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .frames import MultiplierSystem, spectral_summary
from .linalg import jacobi_eigh

T_FLOOR = 1e-12
TIE_TOL = 1e-12


@dataclass(frozen=True)
class SplitResult:
    d: np.ndarray
    bessel_x: float
    bessel_f: float
    objective: float
    method: str
    indices: np.ndarray = field(repr=False)
    gap: Optional[float] = None
    iterations: int = 0
    converged: bool = True

    def to_dict(self):
        return {
            "d": self.d.tolist(),
            "bessel_x": self.bessel_x,
            "bessel_f": self.bessel_f,
            "objective": self.objective,
            "method": self.method,
            "gap": self.gap,
        }


def reduced_pairs(sys: MultiplierSystem):
    """Absorb the symbol into F and drop pairs with a zero vector or symbol.

    Returns ``(indices, X, F)`` where X and F are arrays of the kept rows
    and F already carries the symbol.
    """
    f = sys.f.vectors * sys.symbol[:, None]
    x = sys.x.vectors
    keep = np.any(x != 0.0, axis=1) & np.any(f != 0.0, axis=1)
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        raise PreconditionError("no pair (x_j, m_j f_j) with both vectors nonzero")
    return idx, x[idx], f[idx]


class SplitObjective:
    """g(t) and a subgradient, for t = d^2 on the kept pairs."""

    def __init__(self, x, f):
        self.x = np.asarray(x, dtype=float)
        self.f = np.asarray(f, dtype=float)

    def branches(self, t, vectors=False):
        sx = (self.x * t[:, None]).T @ self.x
        sf = (self.f / t[:, None]).T @ self.f
        res = jacobi_eigh(np.stack([sx, sf]), vectors=vectors)
        return res

    def value(self, t) -> float:
        w = self.branches(np.asarray(t, dtype=float))
        return float(max(w[0, 0], w[1, 0]))

    def bessel_pair(self, t):
        w = self.branches(np.asarray(t, dtype=float))
        return float(max(w[0, 0], 0.0)), float(max(w[1, 0], 0.0))

    def subgradient(self, t):
        """Return ``(g(t), subgradient)``.

        The gradient of the active branch comes from its top eigenvector v:
        <v, x_j>^2 for the X branch and -<v, f_j>^2 / t_j^2 for the F branch.
        Near-ties average the two.
        """
        w, v = self.branches(t, vectors=True)
        gx, gf = w[0, 0], w[1, 0]
        dx = (self.x @ v[0][:, 0]) ** 2
        df = -((self.f @ v[1][:, 0]) ** 2) / t ** 2
        top = max(gx, gf)
        if abs(gx - gf) <= TIE_TOL * max(top, 1.0):
            return top, 0.5 * (dx + df)
        return top, (dx if gx > gf else df)


def _result(obj, idx, t, method, gap=None, iterations=0, converged=True):
    bx, bf = obj.bessel_pair(t)
    return SplitResult(
        d=np.sqrt(t),
        bessel_x=bx,
        bessel_f=bf,
        objective=max(bx, bf),
        method=method,
        indices=idx,
        gap=gap,
        iterations=iterations,
        converged=converged,
    )


def explicit_split(sys: MultiplierSystem) -> SplitResult:
    """Split with d_j = ||x_j||^(-1/2) ||f_j||^(1/2).

    Both weighted sequences then have norms (||x_j|| ||f_j||)^(1/2), and each
    has Bessel bound at most C^2 / min_j ||x_j|| ||f_j|| for any
    unconditionality constant C.
    """
    idx, x, f = reduced_pairs(sys)
    t = np.linalg.norm(f, axis=1) / np.linalg.norm(x, axis=1)
    return _result(SplitObjective(x, f), idx, t, "explicit")


def unit_split(sys: MultiplierSystem) -> SplitResult:
    """Baseline split d = 1."""
    idx, x, f = reduced_pairs(sys)
    return _result(SplitObjective(x, f), idx, np.ones(idx.size), "unit")


def dual_lower_bound(x, f, wx, wf) -> float:
    """Certified lower bound on min_t g(t) from a pair of density matrices.

    For PSD ``wx``, ``wf`` with tr(wx) + tr(wf) = 1 every t satisfies
    g(t) >= sum_j t_j <x_j, wx x_j> + <f_j, wf f_j> / t_j, whose minimum over
    t is 2 sum_j sqrt(<x_j, wx x_j> <f_j, wf f_j>).
    """
    a = np.maximum(np.einsum("ji,ik,jk->j", x, wx, x), 0.0)
    b = np.maximum(np.einsum("ji,ik,jk->j", f, wf, f), 0.0)
    return float(2.0 * np.sum(np.sqrt(a * b)))


class _Smoothed:
    """mu * log(tr exp(S_X(t)/mu) + tr exp(S_F(t)/mu)) and its gradient.

    Upper bound on g(t) within mu * log(2M); the normalized exponentials are
    the density pair used by ``dual_lower_bound``.
    """

    def __init__(self, obj: SplitObjective):
        self.obj = obj

    def densities(self, t, mu):
        w, v = self.obj.branches(t, vectors=True)
        top = float(np.max(w[:, 0]))
        e = np.exp((w - top) / mu)
        z = float(np.sum(e))
        wx = (v[0] * (e[0] / z)) @ v[0].T
        wf = (v[1] * (e[1] / z)) @ v[1].T
        return top + mu * math.log(z), wx, wf, w, v, e / z

    def __call__(self, t, mu):
        val, _, _, _, v, p = self.densities(t, mu)
        gx = ((self.obj.x @ v[0]) ** 2) @ p[0]
        gf = ((self.obj.f @ v[1]) ** 2) @ p[1]
        return val, gx - gf / t ** 2


def optimal_split(sys: MultiplierSystem, tol: float = 1e-8, max_iters: int = 2000) -> SplitResult:
    """Minimize the larger weighted Bessel bound over all weights.

    Two phases on t = d^2, both warm started from the explicit split:

    1. projected subgradient descent with step s0 / sqrt(k),
       s0 = g(t0) / ||subgradient(t0)||, iterates clipped below at 1e-12;
    2. box-constrained L-BFGS on a log-sum-exp smoothing of the two largest
       eigenvalues, with the smoothing parameter shrunk by 10 per stage.

    The best iterate is returned.  ``gap`` is the distance to a certified
    lower bound on the true minimum (see ``dual_lower_bound``); the result
    is flagged ``converged`` when gap <= tol * max(1, objective).
    """
    from scipy.optimize import minimize

    if not tol > 0:
        raise ValueError("tol must be positive")
    idx, x, f = reduced_pairs(sys)
    obj = SplitObjective(x, f)
    smooth = _Smoothed(obj)
    t = np.linalg.norm(f, axis=1) / np.linalg.norm(x, axis=1)
    g, sg = obj.subgradient(t)
    best_t, best_g = t.copy(), g
    lower = 0.0

    def certify(t_, mu):
        _, wx, wf, *_ = smooth.densities(t_, mu)
        return dual_lower_bound(x, f, wx, wf)

    def done():
        return best_g - lower <= tol * max(1.0, best_g)

    scale = best_g if best_g > 0 else 1.0
    lower = max(lower, certify(best_t, 1e-3 * scale))
    iters = 0
    sub_iters = min(max_iters // 4, 200)
    norm0 = float(np.linalg.norm(sg))
    s0 = g / norm0 if norm0 > 0 else 0.0
    for k in range(1, sub_iters + 1):
        if done() or not np.any(sg):
            break
        t = np.maximum(t - (s0 / math.sqrt(k)) * sg, T_FLOOR)
        g, sg = obj.subgradient(t)
        iters += 1
        if g < best_g:
            best_t, best_g = t.copy(), g

    mu = 1e-2 * scale
    budget = max_iters - iters
    t = best_t.copy()
    bounds = [(T_FLOOR, None)] * t.size
    while not done() and budget > 0 and mu > 1e-13 * scale:
        res = minimize(smooth, t, args=(mu,), jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": budget, "ftol": 1e-15, "gtol": 1e-14 * scale})
        budget -= max(int(res.nit), 1)
        iters += max(int(res.nit), 1)
        t = np.maximum(res.x, T_FLOOR)
        g = obj.value(t)
        if g < best_g:
            best_t, best_g = t.copy(), g
        lower = max(lower, certify(t, mu))
        mu /= 10.0
    gap = max(best_g - lower, 0.0)
    return _result(obj, idx, best_t, "optimal", gap=gap, iterations=iters,
                   converged=gap <= tol * max(1.0, best_g))


def trace_lower_bound(sys: MultiplierSystem, rtol: float = 1e-9) -> float:
    """Lower bound A on the objective of every split.

    Requires ||x_j|| = ||f_j|| for all j and a unit symbol; A is the larger of
    the two lower frame bounds, and must be positive.
    """
    if np.any(sys.symbol != 1.0):
        raise PreconditionError("trace lower bound needs the unit symbol")
    nx, nf = sys.x.norms, sys.f.norms
    if np.any(np.abs(nx - nf) > rtol * np.maximum(1.0, np.maximum(nx, nf))):
        raise PreconditionError("trace lower bound needs ||x_j|| = ||f_j|| for all j")
    a = max(spectral_summary(sys.x).lower, spectral_summary(sys.f).lower)
    if not a > 0:
        raise PreconditionError("neither X nor F spans the space")
    return a
