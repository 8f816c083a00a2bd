"""Dirichlet product operator: wrap a raw network u into u_bar = D*u + G + C.

D is a distance-like factor vanishing on the boundary of the unit box
(x(1-x) per axis for second-order problems, x^2(1-x)^2 for the clamped 1D
biharmonic case), G extends the boundary data into the domain, and C is the
optional shift constant.  Because boundary data is reproduced exactly, the
boundary mismatch of a wrapped network is zero to rounding.

Everything here works on batched `Jets` and is linear in the network's jets,
so the reverse-mode pullback is exact and cheap.
"""

from math import comb

import numpy as np

from . import engine
from .engine import Jets
from .errors import CapabilityError, InputError
from .network import DenseNetwork
from .problems import SymField


def distance_factor(problem):
    """The boundary distance factor for a problem, as a symbolic field."""
    import sympy as sp

    vars_ = sp.symbols("x y z")[: problem.dim]
    if problem.operator == "biharmonic_1d":
        x = vars_[0]
        return SymField(x**2 * (1 - x) ** 2, 1)
    expr = 1
    for v in vars_:
        expr = expr * v * (1 - v)
    return SymField(expr, problem.dim)


def boundary_extension(problem):
    """Extension G of the boundary data into the domain.

    Second-order problems use the globally defined g itself; the clamped
    biharmonic case takes the cubic Hermite interpolant of (g, g') at the
    endpoints, which matches both the value and the slope there.
    """
    import sympy as sp

    g = problem.boundary_g
    if problem.operator != "biharmonic_1d":
        return g
    x = sp.symbols("x")
    ends = np.array([0.0, 1.0])
    g0, g1 = g.value(ends)
    s0, s1 = g.derivative_1d(ends, 1)
    expr = (
        g0 * (1 - 3 * x**2 + 2 * x**3)
        + s0 * (x - 2 * x**2 + x**3)
        + g1 * (3 * x**2 - 2 * x**3)
        + s1 * (-(x**2) + x**3)
    )
    return SymField(expr, 1)


class ShiftComposer:
    """Adds the shift constant only: u_bar = u + C."""

    def __init__(self, shift):
        self.shift = float(shift)

    def apply(self, jets):
        out = jets.copy()
        out.value = out.value + self.shift
        return out

    def pullback(self, cot):
        return cot


class ProductComposer1D:
    """1D composition via the Leibniz rule on derivative tables."""

    def __init__(self, d_tab, g_tab, shift, order):
        self.d_tab = d_tab  # (N, order+1): derivatives of D
        self.g_tab = g_tab
        self.shift = float(shift)
        self.order = order

    def apply(self, jets):
        u = _jets_to_rows(jets, self.order)
        out = np.array(self.g_tab, copy=True)
        out[:, 0] += self.shift
        for k in range(self.order + 1):
            for j in range(k + 1):
                out[:, k] += comb(k, j) * self.d_tab[:, j] * u[:, k - j]
        return _rows_to_jets(out)

    def pullback(self, cot):
        cbar = _jets_to_rows(cot, self.order)
        out = np.zeros_like(cbar)
        for m in range(self.order + 1):
            for k in range(m, self.order + 1):
                out[:, m] += comb(k, m) * self.d_tab[:, k - m] * cbar[:, k]
        return _rows_to_jets(out)


class ProductComposerND:
    """Composition in d >= 2 through value/gradient/Hessian slots."""

    def __init__(self, d_val, d_grad, d_hess, g_jets, shift, order):
        self.d_val = d_val
        self.d_grad = d_grad
        self.d_hess = d_hess
        self.g_jets = g_jets
        self.shift = float(shift)
        self.order = order

    def apply(self, jets):
        D, order = self.d_val, self.order
        out = Jets(value=D * jets.value + self.g_jets.value + self.shift)
        if order >= 1:
            out.grad = (
                D[:, None] * jets.grad
                + jets.value[:, None] * self.d_grad
                + self.g_jets.grad
            )
        if order >= 2:
            cross = (
                self.d_grad[:, :, None] * jets.grad[:, None, :]
                + jets.grad[:, :, None] * self.d_grad[:, None, :]
            )
            out.hess = (
                D[:, None, None] * jets.hess
                + cross
                + jets.value[:, None, None] * self.d_hess
                + self.g_jets.hess
            )
        return out

    def pullback(self, cot):
        D, order = self.d_val, self.order
        val = D * cot.value
        grad = hess = None
        if order >= 1:
            grad = np.zeros((val.shape[0], self.d_grad.shape[1]))
            if cot.grad is not None:
                val = val + np.einsum("na,na->n", cot.grad, self.d_grad)
                grad += D[:, None] * cot.grad
        if order >= 2 and cot.hess is not None:
            val = val + np.einsum("nab,nab->n", cot.hess, self.d_hess)
            sym = cot.hess + cot.hess.transpose(0, 2, 1)
            grad += np.einsum("nab,nb->na", sym, self.d_grad)
            hess = D[:, None, None] * cot.hess
        return Jets(value=val, grad=grad, hess=hess)


def make_composer(net, problem, points, order):
    """Composer for the network's boundary mode and shift (None if neither)."""
    if net.boundary_mode == "none":
        if net.shift == 0.0:
            return None
        return ShiftComposer(net.shift)
    if problem is None:
        raise CapabilityError(
            "evaluating a boundary-wrapped network needs the problem context"
        )
    D = distance_factor(problem)
    G = boundary_extension(problem)
    if problem.dim == 1:
        pts = np.asarray(points, dtype=np.float64).reshape(-1)
        d_tab = np.stack(
            [D.derivative_1d(pts, k) for k in range(order + 1)], axis=1
        )
        g_tab = np.stack(
            [G.derivative_1d(pts, k) for k in range(order + 1)], axis=1
        )
        return ProductComposer1D(d_tab, g_tab, net.shift, order)
    pts = np.asarray(points, dtype=np.float64)
    d_val = D.value(pts)
    d_grad = D.gradient(pts) if order >= 1 else None
    d_hess = D.hessian(pts) if order >= 2 else None
    g_jets = G.jet_batch(pts, order)
    return ProductComposerND(d_val, d_grad, d_hess, g_jets, net.shift, order)


class NetworkField:
    """Evaluated network u_bar as a field with batched exact jets."""

    def __init__(self, net, problem=None):
        self.net = net
        self.problem = problem
        if net.boundary_mode != "none" and problem is None:
            raise CapabilityError("boundary-wrapped network needs a problem")
        self.dim = net.dim
        if problem is not None and problem.dim != net.dim:
            raise InputError("network and problem dimensions differ")

    def jet_batch(self, points, order):
        jets, _ = engine.forward(
            self.net.weights, self.net.biases, points, self.net.dim, order
        )
        composer = make_composer(self.net, self.problem, points, order)
        return jets if composer is None else composer.apply(jets)

    def value(self, points):
        return self.jet_batch(points, 0).value

    def forward_with_cache(self, points, order):
        """Composed jets plus what the parameter VJP needs."""
        jets, cache = engine.forward(
            self.net.weights, self.net.biases, points, self.net.dim, order
        )
        composer = make_composer(self.net, self.problem, points, order)
        composed = jets if composer is None else composer.apply(jets)
        return composed, cache, composer


def as_field(net_or_field, problem=None):
    """Wrap a DenseNetwork into a field; pass any jet-evaluable through."""
    if isinstance(net_or_field, DenseNetwork):
        return NetworkField(net_or_field, problem)
    return net_or_field


def field_jets(net_or_field, points, order, problem=None):
    return as_field(net_or_field, problem).jet_batch(points, order)


def apply_boundary_operator(net, problem):
    """The evaluable wrapped field u_bar = D*u + G + shift."""
    if net.boundary_mode == "none":
        raise CapabilityError("network was not trained with the boundary operator")
    return NetworkField(net, problem)


def _jets_to_rows(jets, order):
    n = jets.value.shape[0]
    rows = np.zeros((n, order + 1))
    rows[:, 0] = jets.value
    if order >= 1 and jets.grad is not None:
        rows[:, 1] = jets.grad[:, 0]
    if order >= 2 and jets.hess is not None:
        rows[:, 2] = jets.hess[:, 0, 0]
    if order >= 3 and jets.d3 is not None:
        rows[:, 3] = jets.d3
    if order >= 4 and jets.d4 is not None:
        rows[:, 4] = jets.d4
    return rows


def _rows_to_jets(rows):
    n, cols = rows.shape
    jets = Jets(value=rows[:, 0].copy())
    if cols >= 2:
        jets.grad = rows[:, 1].reshape(n, 1).copy()
    if cols >= 3:
        jets.hess = rows[:, 2].reshape(n, 1, 1).copy()
    if cols >= 4:
        jets.d3 = rows[:, 3].copy()
    if cols >= 5:
        jets.d4 = rows[:, 4].copy()
    return jets
