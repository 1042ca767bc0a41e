"""Unconditionality constants of frame multipliers.

The unconditionality constant of a system is

    C = max over signs eps in {-1, +1}^N of || sum_j eps_j m_j <., f_j> x_j ||,

the operator norm taken on R^M.  ``exact_constant`` enumerates sign
patterns, ``randomized_constant`` gives a certified lower bound for systems
too large to enumerate, and ``khintchine_witness`` builds the explicit
random-sign test vectors used in the equal-norm Bessel estimate.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError, PreconditionError, SearchFailure
from .frames import MultiplierSystem, _signs, spectral_summary
from .generators import make_rng
from .linalg import jacobi_eigh

ENUMERATION_CUTOFF = 22
DEFAULT_K1 = 2.0 ** -0.5
WITNESS_ENUM_LIMIT = 20
WITNESS_SAMPLES = 10_000
_CHUNK_ENTRIES = 1 << 20


@dataclass(frozen=True)
class UnconditionalityEstimate:
    value: float
    status: str  # "exact" or "lower_bound"
    witness_signs: np.ndarray
    witness_vector: np.ndarray
    patterns_evaluated: int = 0

    def to_dict(self):
        return {
            "value": self.value,
            "status": self.status,
            "witness_signs": [int(s) for s in self.witness_signs],
        }


def sign_block(start: int, count: int, n: int, fix_first: bool = True) -> np.ndarray:
    """Rows ``start .. start+count-1`` of the lexicographic list of sign patterns.

    With ``fix_first`` the list has 2^(n-1) rows and the first coordinate is
    always +1; otherwise it has 2^n rows.  ``+1`` sorts before ``-1``.
    """
    free = n - 1 if fix_first else n
    idx = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    signs = 1.0 - 2.0 * bits
    if fix_first:
        signs = np.hstack([np.ones((count, 1)), signs])
    return signs


class _NormEvaluator:
    """Batched operator norms of U_X^T diag(eps * m) U_F.

    Both analysis matrices are rotated into the eigenbases of their frame
    operators; columns that vanish exactly are dropped.  The operator norm is
    unchanged and rank-deficient systems reduce to small Gram matrices.
    """

    def __init__(self, sys: MultiplierSystem):
        self.n = sys.n
        px = self._core(sys.x.vectors)
        pf = self._core(sys.f.vectors) * sys.symbol[:, None]
        self.rx, self.rf = px.shape[1], pf.shape[1]
        self.r = min(self.rx, self.rf)
        # outer products x-core_j (x) f-core_j, flattened: K = eps @ outer
        self.outer = (px[:, :, None] * pf[:, None, :]).reshape(self.n, -1)

    @staticmethod
    def _core(u):
        _, v = jacobi_eigh(u.T @ u)
        p = u @ v
        keep = np.any(p != 0.0, axis=0)
        return p[:, keep]

    def chunk_size(self):
        return max(1, _CHUNK_ENTRIES // max(1, self.rx * self.rf + self.r * self.r))

    def norms(self, signs) -> np.ndarray:
        signs = np.atleast_2d(signs)
        if self.r == 0:
            return np.zeros(signs.shape[0])
        k = (signs @ self.outer).reshape(-1, self.rx, self.rf)
        if self.rx <= self.rf:
            g = k @ np.swapaxes(k, 1, 2)
        else:
            g = np.swapaxes(k, 1, 2) @ k
        top = jacobi_eigh(g, vectors=False)[:, 0]
        return np.sqrt(np.maximum(top, 0.0))


def multiplier_norm(sys: MultiplierSystem, signs) -> float:
    """Operator norm of x -> sum eps_j m_j <x, f_j> x_j.

    Computed as the square root of the top eigenvalue of T^T T.
    """
    t = sys.operator(_signs(signs, sys.n))
    w = jacobi_eigh(t.T @ t, vectors=False)
    return math.sqrt(max(float(w[0]), 0.0))


def top_singular_vector(sys: MultiplierSystem, signs) -> np.ndarray:
    t = sys.operator(signs)
    _, v = jacobi_eigh(t.T @ t)
    vec = v[:, 0]
    # fix the sign so the output is reproducible
    k = int(np.argmax(np.abs(vec)))
    return vec if vec[k] >= 0 else -vec


def _estimate(sys, value, signs, status, evaluated):
    return UnconditionalityEstimate(
        value=float(value),
        status=status,
        witness_signs=signs.astype(int),
        witness_vector=top_singular_vector(sys, signs),
        patterns_evaluated=int(evaluated),
    )


def exact_constant(sys: MultiplierSystem, cutoff: int = ENUMERATION_CUTOFF,
                   workers: Optional[int] = None) -> UnconditionalityEstimate:
    """Unconditionality constant by enumerating all sign patterns.

    Patterns with eps_1 = -1 are skipped since eps and -eps give the same
    norm.  The sign space is split into contiguous ranges that are evaluated
    concurrently; ties go to the smallest pattern index, so the result does
    not depend on scheduling.
    """
    n = sys.n
    if n > cutoff:
        raise CapacityError(n, cutoff)
    ev = _NormEvaluator(sys)
    total = 1 << (n - 1)
    step = ev.chunk_size()
    ranges = [(s, min(step, total - s)) for s in range(0, total, step)]

    def run(rng_):
        start, count = rng_
        vals = ev.norms(sign_block(start, count, n))
        i = int(np.argmax(vals))
        return float(vals[i]), start + i

    if workers is None:
        workers = min(len(ranges), os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, ranges))
    else:
        results = [run(r) for r in ranges]
    best_val, best_idx = max(results, key=lambda vi: (vi[0], -vi[1]))
    signs = sign_block(best_idx, 1, n)[0]
    return _estimate(sys, best_val, signs, "exact", total)


def _climb(ev, start, values, tol=1e-12):
    """First-improvement single-flip ascent, run for every start in parallel.

    Each start scans coordinates cyclically from where its last accepted flip
    happened and stops after a full cycle without improvement.
    """
    state = start.copy()
    vals = values.copy()
    n = state.shape[1]
    ptr = np.zeros(len(state), dtype=np.intp)
    active = np.ones(len(state), dtype=bool)
    evaluated = 0
    order = np.arange(n)
    while np.any(active):
        rows = np.flatnonzero(active)
        nb = np.repeat(state[rows], n, axis=0).reshape(len(rows), n, n)
        nb[:, order, order] *= -1.0
        flat = nb.reshape(-1, n)
        step = ev.chunk_size()
        nv = np.concatenate([ev.norms(flat[s:s + step]) for s in range(0, len(flat), step)])
        nv = nv.reshape(len(rows), n)
        evaluated += flat.shape[0]
        better = nv > vals[rows, None] * (1.0 + tol)
        for r, b in enumerate(rows):
            cyc = (ptr[b] + order) % n
            hits = cyc[better[r, cyc]]
            if hits.size == 0:
                active[b] = False
                continue
            j = hits[0]
            state[b, j] = -state[b, j]
            vals[b] = nv[r, j]
            ptr[b] = (j + 1) % n
    return state, vals, evaluated


def randomized_constant(sys: MultiplierSystem, trials: int, seed: int,
                        climb: bool = True) -> UnconditionalityEstimate:
    """Lower bound on the unconditionality constant by random sign search.

    Draws ``trials`` uniform sign patterns from a stream fixed by ``seed``;
    each draw is improved by single-coordinate flips until no flip helps.
    Draw ``i`` does not depend on ``trials``, so more trials never lower the
    result.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = sys.n
    rng = make_rng(seed)
    draws = np.where(rng.random((trials, n)) < 0.5, 1.0, -1.0)
    ev = _NormEvaluator(sys)
    step = ev.chunk_size()
    vals = np.concatenate([ev.norms(draws[s:s + step]) for s in range(0, trials, step)])
    evaluated = trials
    if climb:
        draws, vals, extra = _climb(ev, draws, vals)
        evaluated += extra
    i = int(np.argmax(vals))
    return _estimate(sys, vals[i], draws[i], "lower_bound", evaluated)


def convex_sign_decomposition(a):
    """Write a vector with entries in [-1, 1] as a convex combination of sign vectors.

    Returns ``(weights, patterns)`` with ``weights`` of length 2N+1 summing to
    1 and ``patterns`` of shape (2N+1, N) with +-1 entries such that
    ``weights @ patterns == a``.  Coordinates are processed in increasing
    order of |a_j|; pattern i carries sign(a_j) on the first 2r-1 weights of
    the coordinate of rank r and alternating signs after that.
    """
    a = np.asarray(a, dtype=float)
    if np.any(np.abs(a) > 1.0):
        raise PreconditionError("entries must satisfy |a_j| <= 1")
    n = a.size
    order = np.argsort(np.abs(a), kind="stable")
    mags = np.abs(a[order])
    weights = np.empty(2 * n + 1)
    weights[0] = mags[0] if n else 1.0
    gaps = np.diff(np.append(mags, 1.0)) / 2.0
    weights[1::2] = gaps
    weights[2::2] = gaps
    patterns = np.empty((2 * n + 1, n))
    alt = np.where(np.arange(1, 2 * n + 2) % 2 == 0, 1.0, -1.0)
    for rank, j in enumerate(order, start=1):
        phase = 1.0 if a[j] >= 0 else -1.0
        patterns[:, j] = alt
        patterns[: 2 * rank - 1, j] = phase
    return weights, patterns


def hull_norm_bound(sys: MultiplierSystem, a, x) -> float:
    """|| sum a_j m_j <x, f_j> x_j || for coefficients with |a_j| <= 1.

    Every such vector lies in the convex hull of the sign-pattern images of
    x, so the result never exceeds C ||x||.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (sys.n,):
        raise PreconditionError(f"expected {sys.n} coefficients, got shape {a.shape}")
    if np.any(np.abs(a) > 1.0):
        raise PreconditionError("hull coefficients must satisfy |a_j| <= 1")
    x = np.asarray(x, dtype=float)
    coef = a * sys.symbol * (sys.f.vectors @ x)
    return float(np.linalg.norm(coef @ sys.x.vectors))


def rademacher_mean_abs(a) -> float:
    """2^-N sum over all sign vectors of |sum delta_j a_j|, by enumeration."""
    a = np.asarray(a, dtype=float).ravel()
    n = a.size
    if n == 0:
        return 0.0
    if n > 26:
        raise CapacityError(n, 26)
    total = 0.0
    count = 1 << (n - 1)
    step = max(1, _CHUNK_ENTRIES // n)
    for s in range(0, count, step):
        block = sign_block(s, min(step, count - s), n)
        total += float(np.sum(np.abs(block @ a)))
    return total / count


def _best_signs(mat, weights_mask, rng, enum_limit, samples):
    """Sign vector maximizing sum_i |(mat @ s)_i| over rows in the mask.

    Exhaustive (first maximizer in lexicographic order) when the dimension is
    at most ``enum_limit``, otherwise the best of ``samples`` random draws.
    """
    sub = mat[weights_mask]
    m = mat.shape[1]
    if m <= enum_limit:
        count = 1 << (m - 1)
        step = max(1, _CHUNK_ENTRIES // max(1, sub.shape[0]))
        best, best_s = -1.0, None
        for s in range(0, count, step):
            block = sign_block(s, min(step, count - s), m)
            scores = np.sum(np.abs(block @ sub.T), axis=1)
            i = int(np.argmax(scores))
            if scores[i] > best:
                best, best_s = float(scores[i]), block[i]
        return best_s, best
    block = np.where(rng.random((samples, m)) < 0.5, 1.0, -1.0)
    scores = np.sum(np.abs(block @ sub.T), axis=1)
    i = int(np.argmax(scores))
    return block[i], float(scores[i])


@dataclass(frozen=True)
class KhintchineWitness:
    delta: np.ndarray
    gamma: np.ndarray
    alpha: float
    index_set: np.ndarray
    phases: np.ndarray
    certified_lower_bound: float
    witness_norm: float
    norm: float
    k1: float
    beta: float
    delta_sum: float
    delta_target: float
    gamma_sum: float
    gamma_target: float
    cardinality_bound: float

    def to_dict(self):
        return {
            "delta": [int(v) for v in self.delta],
            "gamma": [int(v) for v in self.gamma],
            "alpha": self.alpha,
            "index_set": [int(i) for i in self.index_set],
            "phases": [int(v) for v in self.phases],
            "certified_lower_bound": self.certified_lower_bound,
            "witness_norm": self.witness_norm,
            "norm": self.norm,
            "k1": self.k1,
            "beta": self.beta,
            "delta_sum": self.delta_sum,
            "delta_target": self.delta_target,
            "gamma_sum": self.gamma_sum,
            "gamma_target": self.gamma_target,
            "cardinality_bound": self.cardinality_bound,
        }


def common_norm(sys: MultiplierSystem, rtol: float = 1e-9) -> float:
    """The shared norm D of all x_j and m_j f_j; raises if they differ."""
    nx = sys.x.norms
    nf = sys.f.norms * np.abs(sys.symbol)
    d = float(nx[0])
    spread = max(np.max(np.abs(nx - d)), np.max(np.abs(nf - d)))
    if not d > 0 or spread > rtol * max(1.0, d):
        raise PreconditionError("witness construction needs ||x_j|| = ||f_j|| = D > 0 for all j")
    return d


def khintchine_witness(sys: MultiplierSystem, k1: float = DEFAULT_K1, seed: int = 0,
                       samples: int = WITNESS_SAMPLES, retries: int = 5,
                       enum_limit: int = WITNESS_ENUM_LIMIT) -> KhintchineWitness:
    """Random-sign test vectors certifying a lower bound on C.

    With a the analysis matrix of F and b the synthesis matrix of X, picks
    delta with sum_i |(a delta)_i| >= k1 D N, the index set of rows where
    |(a delta)_i| >= D k1/3, and gamma making the restricted column sums of b
    large.  For x = delta / sqrt(M), f = gamma / sqrt(M) and phases
    eps_i = sign(<x, f_i><x_i, f>),

        C >= ||sum eps_i <x, f_i> x_i|| >= sum_i |<x_i, f><x, f_i>|,

    and the right-hand side is returned as ``certified_lower_bound``.
    """
    sys = sys.absorbed()
    d = common_norm(sys)
    n, m = sys.n, sys.m
    a = sys.f.vectors
    b = sys.x.vectors
    spec = spectral_summary(sys.f)
    beta = spec.beta
    alpha = k1 / 3.0
    rng = make_rng(seed)
    everyone = np.ones(n, dtype=bool)

    delta_target = k1 * d * n
    slack = 1e-12 * max(1.0, delta_target)
    for _ in range(max(1, retries)):
        delta, delta_sum = _best_signs(a, everyone, rng, enum_limit, samples)
        if delta_sum >= delta_target - slack or m <= enum_limit:
            break
    if delta_sum < delta_target - slack:
        raise SearchFailure(
            f"no delta with sum |a delta| >= {delta_target:.6g} found (best {delta_sum:.6g})"
        )

    coeff = a @ delta
    in_set = np.abs(coeff) >= d * alpha
    gamma_target = d * k1 * (k1 - alpha) ** 2 * n / beta
    slack = 1e-12 * max(1.0, gamma_target)
    for _ in range(max(1, retries)):
        gamma, gamma_sum = _best_signs(b, in_set, rng, enum_limit, samples)
        if gamma_sum >= gamma_target - slack or m <= enum_limit:
            break
    if gamma_sum < gamma_target - slack:
        raise SearchFailure(
            f"no gamma with restricted sum >= {gamma_target:.6g} found (best {gamma_sum:.6g})"
        )

    xv = delta / math.sqrt(m)
    fv = gamma / math.sqrt(m)
    left = a @ xv   # <x, f_i>
    right = b @ fv  # <x_i, f>
    prod = left * right
    phases = np.where(prod < 0, -1.0, 1.0)
    certified = float(np.sum(np.abs(prod)))
    image = (phases * left) @ b
    return KhintchineWitness(
        delta=delta.astype(int),
        gamma=gamma.astype(int),
        alpha=alpha,
        index_set=np.flatnonzero(in_set),
        phases=phases.astype(int),
        certified_lower_bound=certified,
        witness_norm=float(np.linalg.norm(image)),
        norm=d,
        k1=k1,
        beta=beta,
        delta_sum=delta_sum,
        delta_target=delta_target,
        gamma_sum=gamma_sum,
        gamma_target=gamma_target,
        cardinality_bound=(k1 - alpha) ** 2 * n / beta,
    )
