"""hecke-lab: exact twisted Hecke algebras for GL2 over the p-adic integers,
their induced-representation spectra, and a numerical operator engine that
cuts out newspaces of classical cusp forms."""

from .cache import DiskCache, cache_roundtrip
from .campaign import Campaign, run_verify
from .characters import (
    DirChar,
    PChar,
    char_eval,
    conductor,
    crt_decompose,
    unit_generators,
)
from .cosets import (
    MatPn,
    coset_decompose,
    double_coset_label,
    enumerate_Kg,
    in_K0,
    right_coset_reps,
    single_cosets_of_double,
)
from .cyclotomic import CycNum, CyclotomicField
from .dimoracle import dim_cusp, dim_new, oldspace_dimensions
from .hecke import (
    HeckeElem,
    convolve,
    is_supported,
    structure_table,
    supported_basis,
    verify_relations,
    y_element,
)
from .induced import (
    build_In,
    component_dimensions,
    eigenvalue_tables,
    eigenvector_basis,
    fixed_subspace,
    piL_matrix,
    verify_induced,
)
from .newspace import characterize as newspace_characterize
from .newspace import placement_checks, qualifying_primes
from .operators import (
    OpMatrix,
    atkin_lehner_matrix,
    eigenspace,
    op_matrix,
    op_Q,
    op_Qprime,
    op_S,
    op_Sprime,
    op_U,
    op_W,
    quad_ratio,
    slash_evaluate,
)
from .qexp import QExpansion, evaluate, op_Up, op_Utilde, op_Vp
from .report import Assertion, Report
from .spaces import CuspSpace, SpaceFormatError, load_space

__version__ = "0.1.0"

__all__ = [
    "Assertion",
    "Campaign",
    "CuspSpace",
    "CycNum",
    "CyclotomicField",
    "DirChar",
    "DiskCache",
    "HeckeElem",
    "MatPn",
    "OpMatrix",
    "PChar",
    "QExpansion",
    "Report",
    "SpaceFormatError",
    "atkin_lehner_matrix",
    "build_In",
    "cache_roundtrip",
    "char_eval",
    "component_dimensions",
    "conductor",
    "convolve",
    "coset_decompose",
    "crt_decompose",
    "dim_cusp",
    "dim_new",
    "double_coset_label",
    "eigenspace",
    "eigenvalue_tables",
    "eigenvector_basis",
    "enumerate_Kg",
    "evaluate",
    "fixed_subspace",
    "in_K0",
    "is_supported",
    "load_space",
    "newspace_characterize",
    "oldspace_dimensions",
    "op_matrix",
    "op_Q",
    "op_Qprime",
    "op_S",
    "op_Sprime",
    "op_U",
    "op_Up",
    "op_Utilde",
    "op_Vp",
    "op_W",
    "piL_matrix",
    "placement_checks",
    "qualifying_primes",
    "quad_ratio",
    "right_coset_reps",
    "run_verify",
    "single_cosets_of_double",
    "slash_evaluate",
    "structure_table",
    "supported_basis",
    "unit_generators",
    "verify_induced",
    "verify_relations",
    "y_element",
]
