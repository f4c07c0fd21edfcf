"""
Exact weight distributions of pre-transformed polar codes.

Typical use::

    from pcdwd import PAC, BitVector, make_code, compute_wd

    code = make_code(6, PAC(BitVector.from_string("10101011")), K=32)
    wd = compute_wd(code)
"""

from .code import (
    CRC,
    PAC,
    CodeSpec,
    Explicit,
    Identity,
    ParityCheck,
    RandomUpper,
    ReliabilityError,
    ReliabilitySequence,
    build_info_set,
    load_reliability_sequence,
    make_code,
    nr_reliability_sequence,
    validate,
)
from .engine import (
    EngineStats,
    ExpansionError,
    PCDEngine,
    PolarCosetSpec,
    ResourceLimitError,
    WeightDistribution,
    compute_wd,
    polar_coset_wd,
)
from .equivalence import (
    EquivalenceReport,
    class_member,
    equivalence_class,
    monte_carlo_reduction,
    optimize_pretransform,
    recover_memory,
)
from .expansion import ExpansionResult, baseline_expansion_size, expanded_information_set
from .gf2 import BitVector, UnitUpperTriangularMatrix, encode, kernel_row, shift_matrix
from .identities import run_identities
from .oracle import OracleLimitError, OracleLimits, brute_force_wd

__version__ = "0.1.0"

__all__ = [
    "BitVector",
    "CRC",
    "CodeSpec",
    "EngineStats",
    "EquivalenceReport",
    "ExpansionError",
    "ExpansionResult",
    "Explicit",
    "Identity",
    "OracleLimitError",
    "OracleLimits",
    "PAC",
    "PCDEngine",
    "ParityCheck",
    "PolarCosetSpec",
    "RandomUpper",
    "ReliabilityError",
    "ReliabilitySequence",
    "ResourceLimitError",
    "UnitUpperTriangularMatrix",
    "WeightDistribution",
    "baseline_expansion_size",
    "brute_force_wd",
    "build_info_set",
    "class_member",
    "compute_wd",
    "encode",
    "equivalence_class",
    "expanded_information_set",
    "kernel_row",
    "load_reliability_sequence",
    "make_code",
    "monte_carlo_reduction",
    "nr_reliability_sequence",
    "optimize_pretransform",
    "polar_coset_wd",
    "recover_memory",
    "run_identities",
    "shift_matrix",
    "validate",
]
