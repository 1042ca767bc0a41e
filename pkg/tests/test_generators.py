import numpy as np
import pytest

from framemult import PreconditionError, SchemaError, spectral_summary
from framemult.frames import frame_operator
from framemult.generators import (
    GeneratorSpec,
    example_basis_pair,
    generate,
    harmonic_funtf,
    make_rng,
    random_equalnorm_pair,
    random_equinorm_pair,
    random_gaussian,
    replicate_rational,
    tight_equinorm_pair,
)


@pytest.mark.parametrize("n,m", [(3, 2), (6, 3), (10, 4), (7, 7), (9, 5), (2, 1)])
def test_harmonic_is_unit_norm_tight(n, m):
    fr = harmonic_funtf(n, m)
    assert np.allclose(fr.norms, 1.0, atol=1e-14)
    assert np.linalg.norm(frame_operator(fr) - n / m * np.eye(m)) <= 1e-10


def test_harmonic_rejects_short():
    with pytest.raises(PreconditionError):
        harmonic_funtf(2, 3)


def test_example_basis_pair():
    sys = example_basis_pair(4)
    assert np.array_equal(sys.x.vectors, np.eye(4))
    assert np.array_equal(sys.f.vectors[:, 0], np.ones(4))
    assert spectral_summary(sys.f).bessel == 4.0


def test_seed_determinism():
    a, b = random_gaussian(5, 3, 42), random_gaussian(5, 3, 42)
    assert a == b
    assert not a == random_gaussian(5, 3, 43)
    assert np.array_equal(make_rng(5).random(4), make_rng(5).random(8)[:4])


def test_equalnorm_and_tight_pairs():
    sys = random_equalnorm_pair(6, 3, 1, scale=2.0)
    assert np.allclose(sys.x.norms, sys.f.norms)
    eq = random_equinorm_pair(5, 3, 1, scale=0.7)
    assert np.allclose(eq.x.norms, 0.7) and np.allclose(eq.f.norms, 0.7)
    tp = tight_equinorm_pair(7, 3, 2, scale=1.5)
    assert np.allclose(tp.x.norms, 1.5) and np.allclose(tp.f.norms, 1.5)
    for fr in (tp.x, tp.f):
        assert np.allclose(frame_operator(fr), 1.5 ** 2 * 7 / 3 * np.eye(3), atol=1e-10)


def test_replication_preserves_operators():
    sys = random_gaussian(4, 2, 3)
    rep = replicate_rational(sys, np.array([1, 3, 2, 5]))
    assert rep.n == 11
    assert np.allclose(frame_operator(rep.x), frame_operator(sys.x), atol=1e-13)
    assert np.allclose(frame_operator(rep.f), frame_operator(sys.f), atol=1e-13)
    with pytest.raises(PreconditionError):
        replicate_rational(sys, np.array([1, 0, 1, 1]))
    with pytest.raises(PreconditionError):
        replicate_rational(sys, np.array([1.5, 1, 1, 1]))


def test_spec_dispatch_and_validation():
    spec = GeneratorSpec.from_dict({"kind": "harmonic_funtf", "n": 5, "m": 2})
    assert generate(spec).n == 5
    assert GeneratorSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(SchemaError):
        GeneratorSpec.from_dict({"kind": "nope", "n": 3})
    with pytest.raises(SchemaError):
        GeneratorSpec.from_dict({"kind": "random_gaussian", "n": 3})
    with pytest.raises(SchemaError):
        GeneratorSpec.from_dict({"kind": "harmonic_funtf", "n": 3, "m": 2, "color": 1})
    with pytest.raises(SchemaError):
        generate(GeneratorSpec(kind="replicated", n=2))
    base = example_basis_pair(2)
    assert generate(GeneratorSpec(kind="replicated", n=2, k=[2, 3]), base).n == 5
