"""Frames, multiplier systems and spectral analysis of frame operators.

A frame is stored as its analysis matrix: an ``N x M`` array whose rows are
the frame vectors, so ``U @ x`` gives the coefficients ``<x, x_j>``.
"""
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericalError, SchemaError
from .linalg import NEGATIVE_TOL, clip_psd, jacobi_eigh


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered list of N vectors in M-dimensional real Euclidean space."""

    vectors: np.ndarray

    def __post_init__(self):
        try:
            vecs = np.array(self.vectors, dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"frame vectors are not a real matrix: {exc}") from None
        if vecs.ndim != 2:
            raise SchemaError(f"frame vectors must be a 2-d array, got shape {vecs.shape}")
        if vecs.shape[0] < 1 or vecs.shape[1] < 1:
            raise SchemaError(f"frame needs N >= 1 vectors of dimension M >= 1, got {vecs.shape}")
        if not np.all(np.isfinite(vecs)):
            raise SchemaError("frame vectors contain non-finite entries")
        object.__setattr__(self, "vectors", _frozen(vecs))

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def m(self) -> int:
        return self.vectors.shape[1]

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.vectors ** 2, axis=1))

    def scaled(self, weights) -> "Frame":
        """Frame with vector j multiplied by ``weights[j]``."""
        return Frame(self.vectors * np.asarray(weights, dtype=float)[:, None])

    def subset(self, idx) -> "Frame":
        return Frame(self.vectors[np.asarray(idx, dtype=np.intp)])

    def to_dict(self):
        return {"m": self.m, "n": self.n, "vectors": self.vectors.tolist()}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "vectors" not in data:
            raise SchemaError('frame object must have a "vectors" field')
        frame = cls(data["vectors"])
        for key, actual in (("n", frame.n), ("m", frame.m)):
            if key in data and data[key] != actual:
                raise SchemaError(f'frame declares {key} = {data[key]} but vectors give {actual}')
        return frame

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.vectors.shape == other.vectors.shape and bool(np.all(self.vectors == other.vectors))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MultiplierSystem:
    """Pair of frames with a real symbol, representing x -> sum m_j <x, f_j> x_j."""

    x: Frame
    f: Frame
    symbol: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.x, Frame):
            object.__setattr__(self, "x", Frame(self.x))
        if not isinstance(self.f, Frame):
            object.__setattr__(self, "f", Frame(self.f))
        if self.x.n != self.f.n:
            raise SchemaError(f"X has {self.x.n} vectors but F has {self.f.n}")
        if self.x.m != self.f.m:
            raise SchemaError(f"X lives in dimension {self.x.m} but F in {self.f.m}")
        sym = np.ones(self.x.n) if self.symbol is None else np.array(self.symbol, dtype=float)
        if sym.shape != (self.x.n,):
            raise SchemaError(f"symbol must have length {self.x.n}, got shape {sym.shape}")
        if not np.all(np.isfinite(sym)):
            raise SchemaError("symbol contains non-finite entries")
        object.__setattr__(self, "symbol", _frozen(sym))

    @property
    def n(self) -> int:
        return self.x.n

    @property
    def m(self) -> int:
        return self.x.m

    def absorbed(self) -> "MultiplierSystem":
        """Equivalent system with the symbol moved into F (f_j <- m_j f_j)."""
        return MultiplierSystem(self.x, self.f.scaled(self.symbol))

    def operator(self, signs=None) -> np.ndarray:
        """M x M matrix of x -> sum eps_j m_j <x, f_j> x_j."""
        coef = self.symbol if signs is None else self.symbol * _signs(signs, self.n)
        return self.x.vectors.T @ (coef[:, None] * self.f.vectors)

    def to_dict(self):
        return {"x": self.x.to_dict(), "f": self.f.to_dict(), "symbol": self.symbol.tolist()}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "x" not in data or "f" not in data:
            raise SchemaError('system object must have "x" and "f" fields')
        return cls(Frame.from_dict(data["x"]), Frame.from_dict(data["f"]), data.get("symbol"))

    def __eq__(self, other):
        if not isinstance(other, MultiplierSystem):
            return NotImplemented
        return (self.x == other.x and self.f == other.f
                and bool(np.all(self.symbol == other.symbol)))

    __hash__ = None


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    trace: float
    bessel: float
    lower: float
    beta: Optional[float]
    degenerate: bool = False
    eigenvectors: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def condition_number(self) -> float:
        """Ratio of optimal frame bounds; infinite if not a frame."""
        if self.lower <= 0.0:
            return float("inf")
        return self.bessel / self.lower

    def is_tight(self, rtol=1e-8) -> bool:
        return self.lower > 0.0 and self.bessel - self.lower <= rtol * self.bessel

    def to_dict(self):
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "trace": self.trace,
            "bessel": self.bessel,
            "lower": self.lower,
            "beta": self.beta,
            "condition_number": self.condition_number if self.lower > 0 else None,
            "degenerate": self.degenerate,
        }


def _signs(signs, n):
    e = np.asarray(signs, dtype=float)
    if e.shape != (n,):
        raise SchemaError(f"expected {n} signs, got shape {e.shape}")
    return e


def analysis_matrix(frame: Frame) -> np.ndarray:
    """N x M matrix with row j equal to x_j (read-only)."""
    return frame.vectors


def frame_operator(frame: Frame) -> np.ndarray:
    """S = U^T U = sum_j x_j x_j^T."""
    u = frame.vectors
    s = u.T @ u
    return 0.5 * (s + s.T)


def spectral_summary(frame: Frame, tol: float = 1e-10) -> SpectralSummary:
    """Eigenvalues of the frame operator with the derived frame bounds.

    ``bessel`` is the optimal Bessel bound (largest eigenvalue), ``lower``
    the optimal lower frame bound (smallest eigenvalue, 0 when the vectors
    do not span), and ``beta = bessel * M / trace`` measures how far the
    spectrum is from flat.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    s = frame_operator(frame)
    norm = float(np.linalg.norm(s))
    w, v = jacobi_eigh(s)
    if norm > 0:
        residual = np.linalg.norm(s @ v - v * w, axis=0)
        if np.any(residual > tol * norm):
            raise NumericalError(
                f"eigenpair residual {residual.max():.3e} exceeds {tol:.1e} * ||S||"
            )
    w = clip_psd(w, norm, NEGATIVE_TOL)
    m = frame.m
    trace = float(np.sum(frame.vectors ** 2))
    degenerate = trace == 0.0
    beta = None if degenerate else float(w[0] * m / trace)
    return SpectralSummary(
        eigenvalues=_frozen(w),
        trace=trace,
        bessel=float(w[0]),
        lower=float(w[-1]),
        beta=beta,
        degenerate=degenerate,
        eigenvectors=_frozen(v),
    )


def bessel_bound(vectors) -> float:
    """Optimal Bessel bound of the rows of ``vectors``."""
    u = np.asarray(vectors, dtype=float)
    s = u.T @ u
    w = jacobi_eigh(s, vectors=False)
    return float(max(w[0], 0.0))


def multiplier_apply(sys: MultiplierSystem, signs, x) -> np.ndarray:
    """sum_j eps_j m_j <x, f_j> x_j."""
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.m,):
        raise SchemaError(f"vector must have dimension {sys.m}, got shape {x.shape}")
    coef = sys.symbol * _signs(signs, sys.n) * (sys.f.vectors @ x)
    return coef @ sys.x.vectors


# -- JSON ------------------------------------------------------------------

def loads(text: str):
    """Parse a Frame or MultiplierSystem from JSON text.

    Malformed JSON propagates ``json.JSONDecodeError`` (which carries line and
    column); well-formed JSON of the wrong shape raises SchemaError.
    """
    data = json.loads(text)
    if isinstance(data, dict) and "x" in data:
        return MultiplierSystem.from_dict(data)
    return Frame.from_dict(data)


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def dumps(obj, indent=None) -> str:
    return json.dumps(obj.to_dict(), indent=indent)


def dump(obj, path):
    with open(path, "w") as fh:
        fh.write(dumps(obj, indent=1))
        fh.write("\n")
