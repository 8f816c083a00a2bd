"""Two-phase full-batch training of the network.

Phase 1 minimizes the variational energy (when requested), phase 2 the
strong-form residual, optionally with a boundary penalty when no boundary
operator is used.  One gradient step per epoch over the full collocation set;
runs are deterministic given (problem, config, seed).
"""

from dataclasses import dataclass, field

import numpy as np

from . import engine
from .adam import AdamState, adam_step
from .collocation import make_collocation
from .errors import CapabilityError, InputError, TrainingDivergence
from .losses import (
    _BoundaryTables,
    _ResidualTables,
    _RitzTables,
    ritz_minimum,
)
from .network import initialize_network
from .operators import make_composer

BOUNDARY_MODES = {"operator": "dirichlet_product", "penalty": "none"}


@dataclass
class TrainingConfig:
    layer_sizes: tuple
    learning_rate: float
    epochs_ritz: int = 0
    epochs_residual: int = 0
    collocation_count: int = 1000
    boundary_mode: str = "operator"
    penalty_lambda: float = 1000.0
    seed: int = 0
    log_every: int = 100

    def __post_init__(self):
        if self.boundary_mode not in BOUNDARY_MODES:
            raise InputError("boundary_mode must be 'operator' or 'penalty'")
        if self.epochs_ritz < 0 or self.epochs_residual < 0:
            raise InputError("epoch counts must be nonnegative")
        if self.epochs_ritz + self.epochs_residual == 0:
            raise InputError("at least one training epoch is required")

    @property
    def total_epochs(self):
        return self.epochs_ritz + self.epochs_residual


@dataclass
class TrainingLog:
    """Per-epoch history: residual loss, boundary loss, shifted energy.

    The shifted energy column is NaN when it is not defined (no exact
    solution, or the biharmonic operator).  phase_switch_epoch is the number
    of energy epochs that ran before the residual phase started.
    """

    epochs: np.ndarray
    residual: np.ndarray
    boundary: np.ndarray
    ritz_shifted: np.ndarray
    phase_switch_epoch: int
    final_params: np.ndarray = field(repr=False, default=None)

    def __len__(self):
        return len(self.epochs)


def train(problem, config, progress=None):
    """Train a network on a problem; returns (network, TrainingLog).

    The returned network embeds the boundary mode and shift 0; `progress`,
    when given, is called as progress(epoch, j_r, j_b) every
    config.log_every epochs.
    """
    if config.epochs_ritz > 0 and problem.operator != "second_order_elliptic":
        raise CapabilityError(
            "the energy phase is defined for the second-order operator only"
        )
    if tuple(config.layer_sizes)[0] != problem.dim:
        raise InputError("network input width must equal the problem dimension")

    colloc = make_collocation(problem.dim, config.collocation_count)
    net = initialize_network(
        config.layer_sizes, config.seed, BOUNDARY_MODES[config.boundary_mode]
    )
    params = net.to_flat()
    weights, biases = _param_views(net.layer_sizes, params)

    order = problem.derivative_order
    interior = colloc.interior_points
    boundary = colloc.boundary_points
    res_tables = _ResidualTables(problem, interior)
    bnd_tables = _BoundaryTables(problem, boundary)
    elliptic = problem.operator == "second_order_elliptic"
    ritz_tables = _RitzTables(problem, interior) if elliptic else None
    ritz_const = (
        ritz_minimum(problem, colloc) if elliptic and problem.exact_u else None
    )
    composer_int = make_composer(net, problem, interior, order)
    composer_bnd = make_composer(net, problem, boundary, 0)
    penalty = config.boundary_mode == "penalty"

    state = AdamState.fresh(params.size, config.learning_rate)
    total = config.total_epochs
    log_r = np.empty(total)
    log_b = np.empty(total)
    log_jz = np.full(total, np.nan)

    for epoch in range(1, total + 1):
        ritz_phase = epoch <= config.epochs_ritz

        raw, cache = engine.forward(weights, biases, interior, problem.dim, order)
        jets = raw if composer_int is None else composer_int.apply(raw)
        j_r, cot_res = res_tables.value_and_cotangents(jets, colloc.interior_weight)

        raw_b, cache_b = engine.forward(weights, biases, boundary, problem.dim, 0)
        jets_b = raw_b if composer_bnd is None else composer_bnd.apply(raw_b)
        j_b, cot_b = bnd_tables.value_and_cotangents(
            jets_b, colloc.boundary_weight, config.penalty_lambda
        )
        j_b /= config.penalty_lambda

        if ritz_tables is not None:
            j_ritz = colloc.interior_weight * float(ritz_tables.energies(jets).sum())
            if ritz_const is not None:
                log_jz[epoch - 1] = j_ritz - ritz_const

        if not (np.isfinite(j_r) and np.isfinite(j_b)):
            raise TrainingDivergence(
                epoch, {"residual": j_r, "boundary": j_b, "phase": epoch}
            )

        if ritz_phase:
            _, cot = ritz_tables.value_and_cotangents(jets, colloc.interior_weight)
        else:
            cot = cot_res
        if composer_int is not None:
            cot = composer_int.pullback(cot)
        grad = engine.vjp(cache, cot)
        if penalty and not ritz_phase:
            cb = cot_b if composer_bnd is None else composer_bnd.pullback(cot_b)
            grad += engine.vjp(cache_b, cb)

        new_params, state = adam_step(state, params, grad)
        params[:] = new_params

        log_r[epoch - 1] = j_r
        log_b[epoch - 1] = j_b
        if progress is not None and epoch % config.log_every == 0:
            progress(epoch, j_r, j_b)

    trained = net.with_params(params)
    log = TrainingLog(
        epochs=np.arange(1, total + 1),
        residual=log_r,
        boundary=log_b,
        ritz_shifted=log_jz,
        phase_switch_epoch=config.epochs_ritz,
        final_params=params.copy(),
    )
    return trained, log


def _param_views(layer_sizes, flat):
    """Weight/bias views into one flat parameter vector (zero-copy)."""
    weights, biases, pos = [], [], 0
    for layer in range(len(layer_sizes) - 1):
        n_out, n_in = layer_sizes[layer + 1], layer_sizes[layer]
        weights.append(flat[pos : pos + n_out * n_in].reshape(n_out, n_in))
        pos += n_out * n_in
        biases.append(flat[pos : pos + n_out])
        pos += n_out
    return weights, biases
