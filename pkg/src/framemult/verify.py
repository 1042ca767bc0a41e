"""Checkers that evaluate each bound on a concrete system.

Every checker returns a TheoremReport with the two sides of the inequality
it tests (``lhs <= rhs``), the hypothesis status and the intermediate
quantities.  When the unconditionality constant is only a lower bound
(randomized search), a check with C on the large side cannot fail
conclusively and is reported as ``inconclusive`` instead.
"""
import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .frames import MultiplierSystem, spectral_summary
from .generators import make_rng, random_equalnorm_pair, random_gaussian, tight_equinorm_pair
from .splitting import explicit_split, optimal_split, trace_lower_bound
from .unconditionality import (
    DEFAULT_K1,
    ENUMERATION_CUTOFF,
    exact_constant,
    rademacher_mean_abs,
    randomized_constant,
)

TOL = 1e-8
HYP_RTOL = 1e-8
THEOREMS = (
    "par_split",
    "main_equal_norm",
    "tight_corollary",
    "equinorm_tight_corollary",
    "trace_minmax",
    "khintchine",
)


@dataclass(frozen=True)
class TheoremReport:
    theorem_id: str
    hypothesis_satisfied: bool
    lhs: float
    rhs: float
    margin: float
    inputs_digest: str
    details: dict = field(default_factory=dict)
    tolerance: float = TOL
    one_sided: bool = False

    @property
    def holds(self) -> bool:
        return self.margin >= -self.tolerance

    @property
    def status(self) -> str:
        if not self.hypothesis_satisfied:
            return "skipped"
        if self.holds:
            return "pass"
        return "inconclusive" if self.one_sided else "fail"

    @property
    def passed(self) -> bool:
        return self.hypothesis_satisfied and self.holds

    def to_dict(self):
        return {
            "theorem_id": self.theorem_id,
            "status": self.status,
            "hypothesis_satisfied": self.hypothesis_satisfied,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "inputs_digest": self.inputs_digest,
            "details": self.details,
        }


def digest(*parts) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, MultiplierSystem):
            for arr in (part.x.vectors, part.f.vectors, part.symbol):
                h.update(str(arr.shape).encode())
                h.update(np.ascontiguousarray(arr).tobytes())
        else:
            h.update(json.dumps(part, sort_keys=True, default=str).encode())
    return h.hexdigest()[:16]


def kappa(k1: float) -> float:
    """Constant 27 / (4 k1^4) in the equal-norm Bessel estimate."""
    return 27.0 / (4.0 * k1 ** 4)


def unconditionality(sys, trials=200, seed=0, cutoff=ENUMERATION_CUTOFF):
    """C and whether it is exact; randomized lower bound above the cutoff."""
    if sys.n <= cutoff:
        return exact_constant(sys, cutoff=cutoff)
    return randomized_constant(sys, trials, seed)


def _close(a, b, rtol=HYP_RTOL):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.all(np.abs(a - b) <= rtol * np.maximum(np.abs(a), np.abs(b))))


def equal_norms(sys) -> bool:
    return _close(sys.x.norms, sys.f.norms * np.abs(sys.symbol))


def _skip(theorem_id, key, why, **details):
    return TheoremReport(theorem_id, False, math.nan, math.nan, math.nan, key,
                         dict(details, reason=why))


def check_par_split(sys, tol=TOL, trials=200, seed=0) -> TheoremReport:
    """Explicit split bounds against C^2 / b with b = min ||x_j|| ||m_j f_j||."""
    key = digest("par_split", sys, tol, trials, seed)
    prod = sys.x.norms * sys.f.norms * np.abs(sys.symbol)
    b = float(np.min(prod))
    if not b > 0:
        return _skip("par_split", key, "some ||x_j|| ||m_j f_j|| is zero", b=b)
    est = unconditionality(sys, trials, seed)
    split = explicit_split(sys)
    lhs = max(split.bessel_x, split.bessel_f)
    rhs = est.value ** 2 / b
    return TheoremReport(
        "par_split", True, lhs, rhs, rhs - lhs, key,
        {"C": est.value, "C_status": est.status, "b": b, "bessel_x": split.bessel_x,
         "bessel_f": split.bessel_f, "N": sys.n, "M": sys.m},
        tol, one_sided=est.status != "exact",
    )


def check_main_equal_norm(sys, k1=DEFAULT_K1, tol=TOL, trials=200, seed=0) -> TheoremReport:
    """lambda_1 <= (27/4) k1^-4 beta^2 C, for F and for X."""
    key = digest("main_equal_norm", sys, k1, tol, trials, seed)
    if not equal_norms(sys):
        return _skip("main_equal_norm", key, "||x_j|| != ||m_j f_j|| for some j")
    est = unconditionality(sys, trials, seed)
    c = est.value
    kap = kappa(k1)
    sides = {}
    for name, frame in (("f", sys.absorbed().f), ("x", sys.x)):
        summ = spectral_summary(frame)
        if summ.degenerate:
            return _skip("main_equal_norm", key, f"frame {name} is all zero")
        sides[name] = (summ.bessel, kap * summ.beta ** 2 * c, summ.beta)
    worst = min(sides, key=lambda s: sides[s][1] - sides[s][0])
    lhs, rhs, _ = sides[worst]
    return TheoremReport(
        "main_equal_norm", True, lhs, rhs, rhs - lhs, key,
        {"C": c, "C_status": est.status, "k1": k1, "kappa": kap,
         "beta_f": sides["f"][2], "beta_x": sides["x"][2],
         "bessel_f": sides["f"][0], "bessel_x": sides["x"][0],
         "bound_f": sides["f"][1], "bound_x": sides["x"][1],
         "binding": worst, "N": sys.n, "M": sys.m},
        tol, one_sided=est.status != "exact",
    )


def _tight_pair(sys):
    sx = spectral_summary(sys.x)
    sf = spectral_summary(sys.absorbed().f)
    ok = sx.is_tight(HYP_RTOL) and sf.is_tight(HYP_RTOL) and equal_norms(sys)
    return ok, sx, sf


def check_tight_corollary(sys, k1=DEFAULT_K1, tol=TOL, trials=200, seed=0) -> TheoremReport:
    """Equal-norm tight pair: common bound B = trace / M and C <= B <= kappa C."""
    key = digest("tight_corollary", sys, k1, tol, trials, seed)
    ok, sx, sf = _tight_pair(sys)
    if not ok:
        return _skip("tight_corollary", key, "needs two tight frames with ||x_j|| = ||m_j f_j||")
    est = unconditionality(sys, trials, seed)
    c = est.value
    kap = kappa(k1)
    b_formula = sx.trace / sys.m
    b_x, b_f = sx.bessel, sf.bessel
    shared = max(abs(b_x - b_formula), abs(b_f - b_formula))
    lower_margin = b_x - c
    upper_margin = kap * c - b_x
    margin = min(lower_margin, upper_margin, -shared)
    binding_upper = upper_margin <= lower_margin
    lhs, rhs = (b_x, kap * c) if binding_upper else (c, b_x)
    # a lower-bound C can only make "B <= kappa C" fail spuriously
    one_sided = est.status != "exact" and lower_margin >= -tol and shared <= tol
    return TheoremReport(
        "tight_corollary", True, lhs, rhs, margin, key,
        {"C": c, "C_status": est.status, "B": b_formula, "B_x": b_x, "B_f": b_f,
         "k1": k1, "kappa": kap, "C_le_B_margin": lower_margin,
         "B_le_kappaC_margin": upper_margin, "N": sys.n, "M": sys.m},
        tol, one_sided=one_sided,
    )


def check_equinorm_tight_corollary(sys, tol=TOL, trials=200, seed=0) -> TheoremReport:
    """Equi-norm tight pair: d = ||x_1||^-1/2 ||f_1||^1/2 gives bounds <= sqrt(N/M) C."""
    key = digest("equinorm_tight_corollary", sys, tol, trials, seed)
    ok, sx, sf = _tight_pair(sys)
    nx, nf = sys.x.norms, sys.f.norms * np.abs(sys.symbol)
    equi = ok and _close(nx, nx[0]) and _close(nf, nf[0])
    if not equi:
        return _skip("equinorm_tight_corollary", key, "needs two equi-norm tight frames")
    est = unconditionality(sys, trials, seed)
    c = est.value
    d = nx[0] ** -0.5 * nf[0] ** 0.5
    bx = sx.bessel * d ** 2
    bf = sf.bessel / d ** 2
    lhs = max(bx, bf)
    rhs = math.sqrt(sys.n / sys.m) * c
    return TheoremReport(
        "equinorm_tight_corollary", True, lhs, rhs, rhs - lhs, key,
        {"C": c, "C_status": est.status, "d": d, "bessel_x": bx, "bessel_f": bf,
         "N": sys.n, "M": sys.m},
        tol, one_sided=est.status != "exact",
    )


def check_trace_minmax(sys, tol=1e-6) -> TheoremReport:
    """Optimal split objective >= A; equality for two tight frames."""
    key = digest("trace_minmax", sys, tol)
    try:
        a = trace_lower_bound(sys)
    except PreconditionError as exc:
        return _skip("trace_minmax", key, str(exc))
    split = optimal_split(sys, tol=min(tol, 1e-8))
    tight = spectral_summary(sys.x).is_tight(HYP_RTOL) and spectral_summary(sys.f).is_tight(HYP_RTOL)
    margin = split.objective - a
    if tight:
        margin = min(margin, a + tol - split.objective)
    return TheoremReport(
        "trace_minmax", True, a, split.objective, margin, key,
        {"A": a, "objective": split.objective, "gap": split.gap, "both_tight": tight,
         "d": split.d.tolist(), "N": sys.n, "M": sys.m},
        tol,
    )


def khintchine_ratios(n_max, samples, seed):
    """Exact E|sum delta_j a_j| / ||a||_2 for Gaussian a, ``samples`` per length."""
    rng = make_rng(seed)
    ratios = []
    worst = None
    for n in range(1, n_max + 1):
        for _ in range(samples):
            a = rng.standard_normal(n)
            r = rademacher_mean_abs(a) / float(np.linalg.norm(a))
            ratios.append(r)
            if worst is None or r < worst[0]:
                worst = (r, a)
    return np.array(ratios), worst


def check_khintchine(n_max=14, samples=100, seed=0, k1=DEFAULT_K1, tol=1e-12) -> TheoremReport:
    """Minimum over random coefficient vectors of E|sum delta_j a_j| / ||a|| against k1."""
    key = digest("khintchine", n_max, samples, seed, k1, tol)
    if n_max > 16 or n_max < 1:
        return _skip("khintchine", key, "n_max must be between 1 and 16")
    ratios, worst = khintchine_ratios(n_max, samples, seed)
    lo = float(ratios.min())
    return TheoremReport(
        "khintchine", True, k1, lo, lo - k1, key,
        {"k1": k1, "min_ratio": lo, "vectors": int(ratios.size), "n_max": n_max,
         "argmin": worst[1].tolist()},
        tol,
    )


# -- batch suites ------------------------------------------------------------

def seeded_system(theorem_id, seed, n_max=8, m_max=4):
    """Instance for a checker, sized deterministically by the seed."""
    rng = make_rng(10_000 + seed)
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(m, n_max + 1))
    if theorem_id in ("par_split",):
        return random_gaussian(n, m, seed)
    if theorem_id in ("tight_corollary", "equinorm_tight_corollary"):
        return tight_equinorm_pair(n, m, seed, scale=float(rng.uniform(0.5, 2.0)))
    if theorem_id == "trace_minmax" and seed % 2 == 0:
        return tight_equinorm_pair(n, m, seed)
    return random_equalnorm_pair(n, m, seed)


def run_check(theorem_id, sys=None, k1=DEFAULT_K1, tol=TOL, trials=200, seed=0):
    if theorem_id == "khintchine":
        return check_khintchine(seed=seed, k1=k1)
    if theorem_id == "par_split":
        return check_par_split(sys, tol, trials, seed)
    if theorem_id == "main_equal_norm":
        return check_main_equal_norm(sys, k1, tol, trials, seed)
    if theorem_id == "tight_corollary":
        return check_tight_corollary(sys, k1, tol, trials, seed)
    if theorem_id == "equinorm_tight_corollary":
        return check_equinorm_tight_corollary(sys, tol, trials, seed)
    if theorem_id == "trace_minmax":
        return check_trace_minmax(sys, max(tol, 1e-6))
    raise ValueError(f"unknown theorem {theorem_id!r}")


def run_suite(theorems, seeds, k1=DEFAULT_K1, tol=TOL, trials=200, workers=None):
    """Run checkers over generated instances; output order follows the input order."""
    jobs = []
    for th in theorems:
        if th == "khintchine":
            jobs.append((th, None, seeds[0] if seeds else 0))
            continue
        for s in seeds:
            jobs.append((th, seeded_system(th, s), s))

    def one(job):
        th, sys, s = job
        return run_check(th, sys, k1=k1, tol=tol, trials=trials, seed=s)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, jobs))
    return [one(j) for j in jobs]
