from mpattractors.engine.omega import (
    AttractorEstimate,
    ConstantFields,
    NormBall,
    PointSet,
    RateProfile,
    attraction_profile,
    backward_extension,
    directional_compare,
    directional_uniformity,
    eps_net,
    hausdorff,
    omega_estimate,
    set_distance,
    strict_invariance_defect,
)
from mpattractors.engine.semigroup import (
    FIELD,
    VECTOR,
    DirectionSpec,
    SemigroupHandle,
    ball_sample,
    directional_semigroup,
    linear_contraction,
    radial_logistic,
    rotation_contraction,
    semigroup_law_defect,
    shift_semigroup,
)

__all__ = [
    "FIELD",
    "VECTOR",
    "AttractorEstimate",
    "ConstantFields",
    "DirectionSpec",
    "NormBall",
    "PointSet",
    "RateProfile",
    "SemigroupHandle",
    "attraction_profile",
    "backward_extension",
    "ball_sample",
    "directional_compare",
    "directional_semigroup",
    "directional_uniformity",
    "eps_net",
    "hausdorff",
    "linear_contraction",
    "omega_estimate",
    "radial_logistic",
    "rotation_contraction",
    "semigroup_law_defect",
    "set_distance",
    "shift_semigroup",
    "strict_invariance_defect",
]
