"""Rolling maps of semi-Riemannian symmetric spaces and Stiefel manifolds.

The package computes intrinsic and extrinsic rolling of a curved space on
its flat tangent development inside a sign-diagonal ambient space, checks
the defining no-slip/no-twist conditions numerically, and ships concrete
models (hyperboloid, sphere, pseudo-orthogonal groups, Stiefel manifolds)
plus a small command-line front end.
"""

from .linalg import (
    RigidMotion,
    SignatureForm,
    indefinite_ip,
    is_oriented_isometry,
    se_act,
    se_compose,
    se_inverse,
)
from .integrate import TimeGrid, flow_matrix_ode, integrate_vector, reproject
from .rolling import (
    ResidualReport,
    RollingMapPath,
    RollingTriple,
    TangentFramePath,
    compose_rolling,
    invert_rolling,
    no_slip_residual,
    no_twist_residuals,
    parallel_transport_embedded,
    perturb_normal_generator,
    rolling_condition_residuals,
    rolling_point_residual,
    tangency_residual,
)
from .homogeneous import (
    CartanModel,
    ControlCurve,
    EmbeddedCurve,
    GroupPath,
    develop_intrinsic,
    extrinsic_develop,
    extrinsic_roll,
    horizontal_lift,
    horizontality_residual,
    intrinsic_roll,
    isometry_chain_A,
    model_residual_report,
    normal_extension_by_frames,
    transport_homogeneous,
)

__version__ = "0.1.0"

__all__ = [
    "SignatureForm",
    "RigidMotion",
    "indefinite_ip",
    "se_act",
    "se_compose",
    "se_inverse",
    "is_oriented_isometry",
    "TimeGrid",
    "flow_matrix_ode",
    "integrate_vector",
    "reproject",
    "TangentFramePath",
    "RollingMapPath",
    "RollingTriple",
    "ResidualReport",
    "rolling_point_residual",
    "tangency_residual",
    "no_slip_residual",
    "no_twist_residuals",
    "rolling_condition_residuals",
    "invert_rolling",
    "compose_rolling",
    "perturb_normal_generator",
    "parallel_transport_embedded",
    "CartanModel",
    "ControlCurve",
    "EmbeddedCurve",
    "GroupPath",
    "horizontal_lift",
    "horizontality_residual",
    "develop_intrinsic",
    "transport_homogeneous",
    "isometry_chain_A",
    "intrinsic_roll",
    "extrinsic_develop",
    "extrinsic_roll",
    "model_residual_report",
    "normal_extension_by_frames",
    "__version__",
]
