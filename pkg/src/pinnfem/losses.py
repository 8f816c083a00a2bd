"""Training loss functionals over collocation sets.

Every loss exists in two forms: a plain value (callable on a network or on
any jet-evaluable field, e.g. the exact solution injected as a hook) and a
`Functional` carrying the term structure that `network.parameter_gradient`
differentiates: points, derivative order, boundary composition, and the map
from jets to (value, jet cotangents).
"""

from dataclasses import dataclass

import numpy as np

from .engine import Jets
from .errors import CapabilityError
from .operators import as_field, make_composer


# ---------------------------------------------------------------------------
# Pointwise formulas, shared by value-only and gradient paths


class _ResidualTables:
    """Problem coefficients frozen at the interior points."""

    def __init__(self, problem, pts):
        self.problem = problem
        self.a = problem.coeff_a.value(pts)
        self.c = problem.coeff_c.value(pts)
        self.f = problem.source_f.value(pts)
        self.grad_a = None if problem.a_is_constant else problem.coeff_a.gradient(pts)

    def residuals(self, jets):
        if self.problem.operator == "biharmonic_1d":
            return jets.d4 - self.f
        lap = np.trace(jets.hess, axis1=1, axis2=2)
        r = -self.a * lap + self.c * jets.value - self.f
        if self.grad_a is not None:
            r -= np.einsum("na,na->n", self.grad_a, jets.grad)
        return r

    def value_and_cotangents(self, jets, weight, scale=1.0):
        r = self.residuals(jets)
        value = scale * weight * float(r @ r)
        w2 = 2.0 * scale * weight * r
        if self.problem.operator == "biharmonic_1d":
            cot = Jets(value=np.zeros_like(r), d4=w2)
            return value, cot
        n, d = jets.grad.shape
        eye = np.eye(d)
        cot = Jets(
            value=w2 * self.c,
            hess=(-w2 * self.a)[:, None, None] * eye[None, :, :],
        )
        if self.grad_a is not None:
            cot.grad = -w2[:, None] * self.grad_a
        return value, cot


class _RitzTables:
    def __init__(self, problem, pts):
        if problem.operator != "second_order_elliptic":
            raise CapabilityError("the energy loss is defined for the "
                                  "second-order operator only")
        self.a = problem.coeff_a.value(pts)
        self.c = problem.coeff_c.value(pts)
        self.f = problem.source_f.value(pts)

    def energies(self, jets):
        grad_sq = np.einsum("na,na->n", jets.grad, jets.grad)
        return (
            0.5 * self.a * grad_sq
            + self.c * jets.value * jets.value
            - jets.value * self.f
        )

    def value_and_cotangents(self, jets, weight, scale=1.0):
        value = scale * weight * float(self.energies(jets).sum())
        w = scale * weight
        cot = Jets(
            value=w * (2.0 * self.c * jets.value - self.f),
            grad=(w * self.a)[:, None] * jets.grad,
        )
        return value, cot


class _BoundaryTables:
    def __init__(self, problem, pts):
        self.g = problem.boundary_g.value(pts)

    def value_and_cotangents(self, jets, weight, scale=1.0):
        mismatch = jets.value - self.g
        value = scale * weight * float(mismatch @ mismatch)
        return value, Jets(value=2.0 * scale * weight * mismatch)


# ---------------------------------------------------------------------------
# Value-only operations


def residual_loss(net_or_field, problem, colloc):
    """Mean squared strong-form residual over the interior collocation grid."""
    field = as_field(net_or_field, problem)
    pts = colloc.interior_points
    tables = _ResidualTables(problem, pts)
    jets = field.jet_batch(pts, problem.derivative_order)
    r = tables.residuals(jets)
    return colloc.interior_weight * float(r @ r)


def boundary_loss(net_or_field, problem, colloc):
    """Mean squared boundary mismatch against the Dirichlet data."""
    field = as_field(net_or_field, problem)
    pts = colloc.boundary_points
    values = field.jet_batch(pts, 0).value
    mismatch = values - problem.boundary_g.value(pts)
    return colloc.boundary_weight * float(mismatch @ mismatch)


def ritz_loss(net_or_field, problem, colloc):
    """Variational energy 1/2 a |grad u|^2 + c u^2 - u f, discrete mean."""
    field = as_field(net_or_field, problem)
    pts = colloc.interior_points
    tables = _RitzTables(problem, pts)
    jets = field.jet_batch(pts, 1)
    return colloc.interior_weight * float(tables.energies(jets).sum())


def ritz_minimum(problem, colloc):
    """Energy of the exact solution on the same grid (the offset that makes
    the shifted energy nonnegative near the optimum)."""
    return ritz_loss(problem.require_exact(), problem, colloc)


def shifted_ritz(net_or_field, problem, colloc):
    """Energy relative to the exact solution's energy, same quadrature."""
    return ritz_loss(net_or_field, problem, colloc) - ritz_minimum(problem, colloc)


# ---------------------------------------------------------------------------
# Differentiable functionals


@dataclass
class Term:
    points: np.ndarray
    order: int
    composer: object
    value_and_cotangents: object


class ResidualFunctional:
    """J_r: squared PDE residual, differentiable in the parameters."""

    def __init__(self, problem, colloc):
        self.problem = problem
        self.colloc = colloc
        self.tables = _ResidualTables(problem, colloc.interior_points)
        self.order = problem.derivative_order

    def value(self, net):
        return residual_loss(net, self.problem, self.colloc)

    def terms(self, net, scale=1.0):
        pts = self.colloc.interior_points
        composer = make_composer(net, self.problem, pts, self.order)
        w = self.colloc.interior_weight
        return [
            Term(
                pts,
                self.order,
                composer,
                lambda jets: self.tables.value_and_cotangents(jets, w, scale),
            )
        ]


class RitzFunctional:
    """J_R: the variational energy, differentiable in the parameters."""

    def __init__(self, problem, colloc):
        self.problem = problem
        self.colloc = colloc
        self.tables = _RitzTables(problem, colloc.interior_points)
        self.order = 1

    def value(self, net):
        return ritz_loss(net, self.problem, self.colloc)

    def terms(self, net, scale=1.0):
        pts = self.colloc.interior_points
        composer = make_composer(net, self.problem, pts, self.order)
        w = self.colloc.interior_weight
        return [
            Term(
                pts,
                self.order,
                composer,
                lambda jets: self.tables.value_and_cotangents(jets, w, scale),
            )
        ]


class BoundaryFunctional:
    """J_b: squared boundary mismatch, differentiable in the parameters."""

    def __init__(self, problem, colloc):
        self.problem = problem
        self.colloc = colloc
        self.tables = _BoundaryTables(problem, colloc.boundary_points)

    def value(self, net):
        return boundary_loss(net, self.problem, self.colloc)

    def terms(self, net, scale=1.0):
        pts = self.colloc.boundary_points
        composer = make_composer(net, self.problem, pts, 0)
        w = self.colloc.boundary_weight
        return [
            Term(
                pts,
                0,
                composer,
                lambda jets: self.tables.value_and_cotangents(jets, w, scale),
            )
        ]


class PenaltyFunctional:
    """J_r + lambda * J_b for penalty-mode training."""

    def __init__(self, problem, colloc, penalty_lambda):
        self.residual = ResidualFunctional(problem, colloc)
        self.boundary = BoundaryFunctional(problem, colloc)
        self.penalty_lambda = float(penalty_lambda)

    def value(self, net):
        return self.residual.value(net) + self.penalty_lambda * self.boundary.value(
            net
        )

    def terms(self, net, scale=1.0):
        return self.residual.terms(net, scale) + self.boundary.terms(
            net, scale * self.penalty_lambda
        )


# ---------------------------------------------------------------------------
# Reporting metric


def pinn_l2_error(net_or_field, problem, resolution=None):
    """L2 distance between the evaluated field and the exact solution.

    Computed by tensor Gauss quadrature with `resolution` nodes per axis
    (defaults chosen high enough that the value is quadrature-converged for
    the smooth fields this package trains).
    """
    exact = problem.require_exact()
    if resolution is None:
        resolution = {1: 64, 2: 32, 3: 16}[problem.dim]
    nodes, weights = np.polynomial.legendre.leggauss(int(resolution))
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    field = as_field(net_or_field, problem)
    if problem.dim == 1:
        pts = nodes
        w = weights
    else:
        grids = np.meshgrid(*([nodes] * problem.dim), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        wg = np.meshgrid(*([weights] * problem.dim), indexing="ij")
        w = np.prod(np.stack([g.ravel() for g in wg], axis=1), axis=1)
    diff = field.jet_batch(pts, 0).value - exact.value(pts)
    return float(np.sqrt(w @ (diff * diff)))
