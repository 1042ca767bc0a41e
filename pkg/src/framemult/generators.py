"""Deterministic constructions of frames and multiplier systems."""
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericalError, PreconditionError, SchemaError
from .frames import Frame, MultiplierSystem, frame_operator

KINDS = (
    "harmonic_funtf",
    "random_gaussian",
    "random_equalnorm_pair",
    "random_equinorm_pair",
    "example_basis_pair",
    "tight_equinorm_pair",
    "replicated",
)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator: the stream is a function of (seed, draw index)."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.Philox(key=int(seed)))


def harmonic_funtf(n: int, m: int) -> Frame:
    """Real harmonic unit-norm tight frame of n vectors in R^m.

    Rows are samples of cosine/sine pairs at frequencies 1..m//2 (plus a
    constant column when m is odd), scaled so every row has unit norm. The
    frame operator is (n/m) I.
    """
    if m < 1 or n < m:
        raise PreconditionError(f"a unit norm tight frame of {n} vectors in R^{m} needs n >= m >= 1")
    if n == m:
        return Frame(np.eye(m))
    j = np.arange(n)[:, None]
    cols = []
    if m % 2 == 1:
        cols.append(np.full((n, 1), np.sqrt(1.0 / m)))
    k = np.arange(1, m // 2 + 1)[None, :]
    angle = 2.0 * np.pi * ((j * k) % n) / n
    pair = np.empty((n, 2 * k.shape[1]))
    pair[:, 0::2] = np.cos(angle)
    pair[:, 1::2] = np.sin(angle)
    cols.append(pair * np.sqrt(2.0 / m))
    frame = Frame(np.hstack(cols))
    err = np.linalg.norm(frame_operator(frame) - (n / m) * np.eye(m))
    if err > 1e-10:
        raise NumericalError(f"harmonic frame ({n}, {m}) misses tightness by {err:.2e}")
    return frame


def example_basis_pair(n: int) -> MultiplierSystem:
    """x_j = e_j and f_j = e_1 in R^n with unit symbol."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    f = np.zeros((n, n))
    f[:, 0] = 1.0
    return MultiplierSystem(Frame(np.eye(n)), Frame(f))


def _gaussian_rows(rng, n, m):
    rows = rng.standard_normal((n, m))
    for i in range(n):
        # redraw the (probability zero) all-zero row
        while not np.any(rows[i]):
            rows[i] = rng.standard_normal(m)
    return rows


def random_gaussian(n: int, m: int, seed: int, scale: float = 1.0) -> MultiplierSystem:
    """Independent Gaussian X and F with unit symbol."""
    rng = make_rng(seed)
    x = _gaussian_rows(rng, n, m) * scale
    f = _gaussian_rows(rng, n, m) * scale
    return MultiplierSystem(Frame(x), Frame(f))


def random_equalnorm_pair(n: int, m: int, seed: int, scale: float = 1.0) -> MultiplierSystem:
    """Gaussian rows with f_j rescaled so that ||f_j|| = ||x_j||."""
    if n < 1 or m < 1:
        raise PreconditionError("n and m must be at least 1")
    rng = make_rng(seed)
    x = _gaussian_rows(rng, n, m) * scale
    f = _gaussian_rows(rng, n, m)
    f *= (np.linalg.norm(x, axis=1) / np.linalg.norm(f, axis=1))[:, None]
    return MultiplierSystem(Frame(x), Frame(f))


def random_equinorm_pair(n: int, m: int, seed: int, scale: float = 1.0) -> MultiplierSystem:
    """Gaussian directions with every x_j and f_j of norm ``scale``."""
    if n < 1 or m < 1:
        raise PreconditionError("n and m must be at least 1")
    rng = make_rng(seed)
    x = _gaussian_rows(rng, n, m)
    f = _gaussian_rows(rng, n, m)
    x *= scale / np.linalg.norm(x, axis=1)[:, None]
    f *= scale / np.linalg.norm(f, axis=1)[:, None]
    return MultiplierSystem(Frame(x), Frame(f))


def random_orthogonal(m: int, rng) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.where(np.diag(r) < 0, -1.0, 1.0)


def tight_equinorm_pair(n: int, m: int, seed: int, scale: float = 1.0) -> MultiplierSystem:
    """Two equal-norm tight frames with matched norms.

    X is the harmonic frame; F is the harmonic frame rotated by a random
    orthogonal matrix, with rows permuted and randomly negated. Both are
    scaled by ``scale`` so ||x_j|| = ||f_j|| = scale.
    """
    base = harmonic_funtf(n, m).vectors
    rng = make_rng(seed)
    q = random_orthogonal(m, rng)
    perm = rng.permutation(n)
    flips = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    f = (base @ q)[perm] * flips[:, None]
    return MultiplierSystem(Frame(base * scale), Frame(f * scale))


def replicate_rational(sys: MultiplierSystem, k) -> MultiplierSystem:
    """Replace pair j by k_j copies of (x_j, f_j) / sqrt(k_j).

    The frame operators of X and F are unchanged; copies of one pair share
    the symbol m_j.
    """
    k = np.asarray(k)
    if k.shape != (sys.n,) or not np.issubdtype(k.dtype, np.integer) or np.any(k < 1):
        raise PreconditionError(f"k must be {sys.n} positive integers")
    idx = np.repeat(np.arange(sys.n), k)
    w = 1.0 / np.sqrt(k[idx].astype(float))
    return MultiplierSystem(
        Frame(sys.x.vectors[idx] * w[:, None]),
        Frame(sys.f.vectors[idx] * w[:, None]),
        sys.symbol[idx],
    )


@dataclass
class GeneratorSpec:
    kind: str
    n: int
    m: Optional[int] = None
    seed: int = 0
    scale: float = 1.0
    k: Optional[list] = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown generator kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind not in ("example_basis_pair", "replicated") and self.m is None:
            raise SchemaError(f"generator {self.kind} needs m")
        if self.kind in ("harmonic_funtf", "tight_equinorm_pair") and not self.n >= self.m >= 1:
            raise SchemaError(f"generator {self.kind} needs n >= m >= 1")

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "kind" not in data:
            raise SchemaError('generator spec must be an object with a "kind" field')
        known = {"kind", "n", "m", "seed", "scale", "k"}
        extra = set(data) - known
        if extra:
            raise SchemaError(f"unknown generator fields: {sorted(extra)}")
        return cls(**data)

    def to_dict(self):
        return {key: val for key, val in asdict(self).items() if val is not None}


def generate(spec: GeneratorSpec, base: Optional[MultiplierSystem] = None):
    """Build the object described by ``spec`` (Frame or MultiplierSystem)."""
    kind = spec.kind
    if kind == "harmonic_funtf":
        frame = harmonic_funtf(spec.n, spec.m)
        return frame if spec.scale == 1.0 else frame.scaled(np.full(frame.n, spec.scale))
    if kind == "random_gaussian":
        return random_gaussian(spec.n, spec.m, spec.seed, spec.scale)
    if kind == "random_equalnorm_pair":
        return random_equalnorm_pair(spec.n, spec.m, spec.seed, spec.scale)
    if kind == "random_equinorm_pair":
        return random_equinorm_pair(spec.n, spec.m, spec.seed, spec.scale)
    if kind == "example_basis_pair":
        return example_basis_pair(spec.n)
    if kind == "tight_equinorm_pair":
        return tight_equinorm_pair(spec.n, spec.m, spec.seed, spec.scale)
    if kind == "replicated":
        if base is None:
            raise SchemaError("the replicated generator needs an input system")
        k = spec.k if spec.k is not None else [spec.n] * base.n
        return replicate_rational(base, np.asarray(k, dtype=np.int64))
    raise SchemaError(f"unknown generator kind {kind!r}")
