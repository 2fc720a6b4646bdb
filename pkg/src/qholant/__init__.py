"""Classical and quantum factor graphs with holographic transformations."""

__version__ = "0.1.0"

from .config import DEFAULT_TOL, MAX_CLASSICAL_STATES, MAX_DIM, Tolerances
from .errors import (
    DegenerateModelError,
    DimensionError,
    DocumentError,
    FormMismatchError,
    HolantError,
    InvariantError,
    LabelError,
    PSDError,
    SizeGuardError,
    TransformError,
)
from .linalg import (
    LabeledOperator,
    SpaceLabel,
    Tier,
    base_label,
    commutation_residual,
    frac_power,
    hat_label,
    partial_trace,
    prime_label,
    psd_eigh,
    support_projector,
    tensor_product,
)
from .report import EXPLORATORY, FAIL, PASS, HolantReport
from .classical import (
    ClassicalEdgeTransform,
    ClassicalFactor,
    ClassicalFactorGraph,
    ClassicalVariable,
    check_biorthogonality,
    classical_transform,
    verify_classical_holant,
    z_classical,
    z_transformed_classical,
)
from .quantum import (
    QuantumFactor,
    QuantumFactorGraph,
    QuantumVariable,
    density_operator,
    odot,
    star,
    star_n,
    z_quantum,
)
from .superop import (
    SuperOperator,
    adjoint,
    apply,
    bar_otimes,
    cj_from_action,
    compose,
    invert,
    otimes,
    swap_witness,
)
from .qholo import (
    EdgeTransform,
    QuantumTransformSet,
    SizeParams,
    gen_instance,
    swap_teleport_check,
    transform_factor,
    transform_graph,
    transform_variable,
    verify_quantum_holant,
    z_transformed,
)
