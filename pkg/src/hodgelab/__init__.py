"""hodgelab: exact-arithmetic workbench for quadratic lattices, Clifford
algebras, trace descent over quadratic fields, and Lie-algebra invariant
computation on tensor carriers.

All arithmetic is exact (rationals and quadratic field elements); every
equality check in the package is at literal zero tolerance.  Values are
immutable and operations pure, so everything is safe to share across
threads.
"""

from .field import (
    FieldError,
    FieldSpec,
    QuadFieldElement,
    RATIONALS,
    field_mul,
    field_trace_norm,
    squarefree_part,
)
from .matrix import (
    DegenerateFormError,
    ExactMatrix,
    congruent_diagonalize,
    kernel_basis,
    rank,
    signature,
)
from .qspace import (
    QuadraticSpace,
    hyperbolic_plane,
    k3_16_lattice,
    kunneth_summands,
    orthogonal_complement,
    weil_cm_field,
)
from .tensor import (
    MultiTensor,
    Partition,
    WedgeElement,
    contract_slot,
    diag_pullback,
    is_alternating,
    proj_pullback,
    realization_embed,
    realization_in_power,
    wedge_to_tensor,
)
from .clifford import (
    CliffordAlgebra,
    CliffordElement,
    clifford_build,
    clifford_mul,
    center,
    ks_embed,
    omega_squared,
    spin_conjugate,
)
from .descent import (
    DescentError,
    EStructure,
    EValuedForm,
    eigenspace_decompose,
    trace_descend,
    wedge_E_embed,
    weil_classes,
    weil_hermitian,
)
from .carriers import CarrierParseError, carrier_dim, parse_carrier
from .invariants import (
    CarrierVector,
    LieRep,
    build_rep,
    carrier_action,
    complete_contractions,
    galois_stable_subgroups,
    generator_coverage,
    invariant_basis,
    invariant_dimension,
    lie_constructor,
)
from .identities import (
    SpecializationInput,
    binom_unity,
    det_quotient_identity,
    specialize_det,
    verify_sum_identity,
)

__version__ = "0.1.0"
