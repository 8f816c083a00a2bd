"""Finite element solvers on network-enriched spaces.

Train a small tanh network against a PDE residual or variational energy,
then enrich a Lagrange or Hermite finite element space with it (additively
or multiplicatively) and solve the resulting Galerkin system.  See the CLI
(`pinnfem train|study|solve`) for the packaged workflows.
"""

from .adam import AdamState, adam_step
from .checkpoint import load_checkpoint, save_checkpoint
from .collocation import CollocationSet, make_collocation
from .engine import Jets
from .errors import (
    CapabilityError,
    ConfigError,
    FormatError,
    InputError,
    MeshError,
    PinnFemError,
    ShiftMarginError,
    SolverError,
    TrainingDivergence,
)
from .losses import (
    boundary_loss,
    pinn_l2_error,
    residual_loss,
    ritz_loss,
    shifted_ritz,
)
from .network import (
    DenseNetwork,
    JetValue,
    constant_network,
    evaluate_jet,
    forward,
    forward_many,
    initialize_network,
    parameter_count,
    parameter_gradient,
    value_and_parameter_gradient,
    zero_network,
)
from .operators import NetworkField, apply_boundary_operator, as_field
from .problems import REGISTRY_IDS, ProblemSpec, SymField, get_problem
from .training import TrainingConfig, TrainingLog, train

__version__ = "0.1.0"
