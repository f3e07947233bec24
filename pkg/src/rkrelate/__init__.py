"""Runge-Kutta discretizations of related vector fields.

If ``L X(x) = Y(L x + p)`` then every RK stepper, explicit or with a fixed
number of Picard sweeps, satisfies ``L D_X(x) + p = D_Y(L x + p)``.  This
package builds such pairs (including coupled-cell networks and their
fibrations) and measures how closely floating point honours that identity.
"""

from .errors import EvaluationError, ExpressionSyntaxError, NetworkError, StepError, TableauError
from .integrator import (
    Trajectory,
    explicit_stages,
    implicit_stages,
    integrate,
    step,
    step_explicit,
    step_implicit,
)
from .relatedness import ExperimentRecord, discrete_residual, nonaffine_pushforward_residual, trajectory_commute
from .systems import RelatedSystem, builtin_system
from .tableau import ButcherTableau, builtin, validate
from .vecfield import AffineMap, NonAffineMap, VectorField, apply_affine, continuous_residual, parse_field

__version__ = "0.1.0"
