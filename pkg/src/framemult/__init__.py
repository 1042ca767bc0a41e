"""Finite frame multipliers: unconditionality constants, Bessel bounds and weight splits."""
from .errors import (
    CapacityError,
    FrameError,
    NumericalError,
    PreconditionError,
    SchemaError,
    SearchFailure,
)
from .frames import (
    Frame,
    MultiplierSystem,
    SpectralSummary,
    analysis_matrix,
    frame_operator,
    multiplier_apply,
    spectral_summary,
)
from .generators import (
    example_basis_pair,
    harmonic_funtf,
    random_equalnorm_pair,
    random_equinorm_pair,
    random_gaussian,
    replicate_rational,
    tight_equinorm_pair,
)
from .splitting import SplitResult, explicit_split, optimal_split, trace_lower_bound, unit_split
from .unconditionality import (
    DEFAULT_K1,
    KhintchineWitness,
    UnconditionalityEstimate,
    exact_constant,
    hull_norm_bound,
    khintchine_witness,
    multiplier_norm,
    randomized_constant,
)

__version__ = "0.1.0"
