"""Boundary-value problem descriptions and the built-in registry.

A problem is posed on the unit box [0,1]^dim and carries its coefficients,
source, Dirichlet data and (optionally) the exact solution as symbolic
expressions; evaluations and exact derivatives come from lambdified sympy,
so manufactured sources are always consistent with the stated solution.
Every registry entry is spot-checked numerically at construction.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import sympy as sp

from .engine import Jets
from .errors import CapabilityError, InputError

OPERATORS = ("second_order_elliptic", "biharmonic_1d")

_XYZ = sp.symbols("x y z")


class SymField:
    """Scalar field defined by a sympy expression, with exact derivatives.

    Implements the same batched-jet protocol as evaluated networks
    (`jet_batch(points, order) -> Jets`), which is what lets tests inject an
    analytic solution anywhere a network is expected.
    """

    def __init__(self, expr, dim):
        if dim not in (1, 2, 3):
            raise InputError("dim must be 1, 2 or 3")
        self.dim = dim
        self.expr = sp.sympify(expr)
        self._vars = _XYZ[:dim]
        self._cache = {}

    def _fn(self, key, expr):
        if key not in self._cache:
            self._cache[key] = sp.lambdify(self._vars, expr, modules="numpy")
        return self._cache[key]

    def _eval(self, key, expr, pts):
        pts = np.asarray(pts, dtype=np.float64)
        if self.dim == 1:
            args = (pts.reshape(-1),)
        else:
            args = tuple(pts[:, a] for a in range(self.dim))
        n = args[0].shape[0]
        out = np.asarray(self._fn(key, expr)(*args), dtype=np.float64)
        if out.shape != (n,):
            out = np.full(n, float(out))
        return out

    def value(self, pts):
        return self._eval("v", self.expr, pts)

    def derivative_1d(self, pts, k):
        if self.dim != 1:
            raise CapabilityError("single-order derivatives are 1D only")
        return self._eval(("d", k), sp.diff(self.expr, self._vars[0], k), pts)

    def gradient(self, pts):
        cols = [
            self._eval(("g", a), sp.diff(self.expr, self._vars[a]), pts)
            for a in range(self.dim)
        ]
        return np.stack(cols, axis=1)

    def hessian(self, pts):
        n = np.asarray(pts).shape[0] if self.dim > 1 else np.asarray(pts).size
        H = np.empty((n, self.dim, self.dim))
        for a in range(self.dim):
            for b in range(a, self.dim):
                val = self._eval(
                    ("h", a, b),
                    sp.diff(self.expr, self._vars[a], self._vars[b]),
                    pts,
                )
                H[:, a, b] = val
                H[:, b, a] = val
        return H

    def jet_batch(self, pts, order):
        """Jets of the field at a batch of points, exact to any order."""
        jets = Jets(value=self.value(pts))
        if order >= 1:
            jets.grad = self.gradient(pts)
        if order >= 2:
            jets.hess = self.hessian(pts)
        if order >= 3:
            if self.dim != 1:
                raise CapabilityError("orders above 2 are 1D only")
            jets.d3 = self.derivative_1d(pts, 3)
        if order >= 4:
            jets.d4 = self.derivative_1d(pts, 4)
        return jets


@dataclass
class ProblemSpec:
    """One boundary-value problem on [0,1]^dim.

    operator "second_order_elliptic" means -div(a grad u) + c u = f with
    u = g on the boundary; "biharmonic_1d" means u'''' = f with clamped
    (value and slope) data, 1D only.
    """

    id: str
    dim: int
    coeff_a: SymField
    coeff_c: SymField
    source_f: SymField
    boundary_g: SymField
    exact_u: SymField = None
    operator: str = "second_order_elliptic"

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise InputError(f"unknown operator {self.operator!r}")
        if self.operator == "biharmonic_1d" and self.dim != 1:
            raise InputError("the biharmonic operator is 1D only")
        self.a_is_constant = not self.coeff_a.expr.free_symbols
        self.c_is_constant = not self.coeff_c.expr.free_symbols

    @property
    def derivative_order(self):
        """Derivative order of the strong-form residual."""
        return 4 if self.operator == "biharmonic_1d" else 2

    def require_exact(self):
        if self.exact_u is None:
            raise CapabilityError(f"problem {self.id!r} has no exact solution")
        return self.exact_u

    def apply_operator(self, field, pts):
        """Strong-form operator applied to jets of any evaluated field."""
        if self.operator == "biharmonic_1d":
            jets = field.jet_batch(pts, 4)
            return jets.d4
        jets = field.jet_batch(pts, 2)
        return self.apply_operator_to_jets(jets, pts)

    def apply_operator_to_jets(self, jets, pts):
        """Elliptic operator -div(a grad u) + c u from precomputed jets."""
        a = self.coeff_a.value(pts)
        c = self.coeff_c.value(pts)
        lap = np.trace(jets.hess, axis1=1, axis2=2)
        out = -a * lap + c * jets.value
        if not self.a_is_constant:
            grad_a = self.coeff_a.gradient(pts)
            out -= np.einsum("na,na->n", grad_a, jets.grad)
        return out

    def shifted(self, shift):
        """The constant-shifted problem: source f + C*c, boundary g + C.

        Solving it and subtracting C recovers the original solution.
        """
        C = sp.Float(repr(float(shift)))
        f_expr = self.source_f.expr + C * self.coeff_c.expr
        u_expr = None if self.exact_u is None else self.exact_u.expr + C
        return ProblemSpec(
            id=f"{self.id}+shift",
            dim=self.dim,
            coeff_a=self.coeff_a,
            coeff_c=self.coeff_c,
            source_f=SymField(f_expr, self.dim),
            boundary_g=SymField(self.boundary_g.expr + C, self.dim),
            exact_u=None if u_expr is None else SymField(u_expr, self.dim),
            operator=self.operator,
        )


def make_problem(pid, dim, exact_u, a=1, c=0, g=None, operator="second_order_elliptic"):
    """Manufacture a problem from its exact solution.

    The source is derived symbolically by applying the operator to `exact_u`;
    `g` defaults to the exact solution itself (fine whenever only boundary
    traces of g are consumed, e.g. for the 1D biharmonic problem).
    """
    vars_ = _XYZ[:dim]
    u = sp.sympify(exact_u)
    a_e, c_e = sp.sympify(a), sp.sympify(c)
    if operator == "biharmonic_1d":
        f = sp.diff(u, vars_[0], 4)
    else:
        f = -sum(sp.diff(a_e * sp.diff(u, v), v) for v in vars_) + c_e * u
    g_e = u if g is None else sp.sympify(g)
    prob = ProblemSpec(
        id=pid,
        dim=dim,
        coeff_a=SymField(a_e, dim),
        coeff_c=SymField(c_e, dim),
        source_f=SymField(f, dim),
        boundary_g=SymField(g_e, dim),
        exact_u=SymField(u, dim),
        operator=operator,
    )
    self_check(prob)
    return prob


def self_check(problem, tol=1e-8):
    """Spot check that the source equals the operator applied to exact_u."""
    if problem.exact_u is None:
        return
    pts = _check_grid(problem.dim)
    lhs = problem.apply_operator(problem.exact_u, pts)
    rhs = problem.source_f.value(pts)
    scale = 1.0 + np.abs(rhs).max()
    err = np.abs(lhs - rhs).max() / scale
    if err > tol:
        raise InputError(
            f"problem {problem.id!r}: source does not match the operator "
            f"applied to the exact solution (relative mismatch {err:.3e})"
        )


def _check_grid(dim):
    per_axis = {1: 1000, 2: 32, 3: 10}[dim]
    axis = (np.arange(per_axis) + 0.5) / per_axis
    if dim == 1:
        return axis
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


_x, _y, _z = _XYZ

_REGISTRY_DEFS = {
    "p1d_poisson": dict(
        dim=1, exact_u=(1 - _x) * sp.sin(5 * _x) + 2, a=1, c=0, g=2
    ),
    "p1d_biharmonic": dict(
        dim=1,
        exact_u=3 * _x**2 + (_x + 1) * sp.sin(4 * _x) + 1,
        operator="biharmonic_1d",
    ),
    "p2d_c0": dict(
        dim=2, exact_u=sp.sin(sp.pi * _x) * sp.sin(sp.pi * _y) + 2, c=0, g=2
    ),
    "p2d_cm5": dict(
        dim=2, exact_u=sp.sin(sp.pi * _x) * sp.sin(sp.pi * _y) + 2, c=-5, g=2
    ),
    "p2d_eig": dict(
        dim=2,
        exact_u=sp.sin(sp.pi * _x) * sp.sin(sp.pi * _y) + 2,
        c=-2 * sp.pi**2 + sp.Rational(1, 100),
        g=2,
    ),
    "p3d_poisson": dict(
        dim=3,
        exact_u=sp.exp(_x + _y + _z)
        * sp.sin(sp.pi * _x)
        * sp.sin(sp.pi * _y)
        * sp.sin(sp.pi * _z)
        + 1,
        c=0,
        g=1,
    ),
}

REGISTRY_IDS = tuple(_REGISTRY_DEFS)


@lru_cache(maxsize=None)
def get_problem(pid):
    """Fetch a built-in problem by id (constructed and checked once)."""
    if pid not in _REGISTRY_DEFS:
        raise InputError(
            f"unknown problem id {pid!r}; known ids: {', '.join(REGISTRY_IDS)}"
        )
    return make_problem(pid, **_REGISTRY_DEFS[pid])
