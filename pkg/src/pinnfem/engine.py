"""Batched network evaluation with exact input derivatives and parameter VJPs.

The driver here owns the layer loop and the affine contractions (plain BLAS
matmuls on the (batch*slot, unit) reshape); the slot-coupling tanh kernels are
delegated to the selected backend in `pinnfem.kernels`.

Two propagation modes:

* Taylor mode (inputs in R^1): normalized Taylor coefficients along the input
  line up to order K <= 4.  Exposes derivative orders 0..K.
* Jet mode (inputs in R^d, d >= 2): value, gradient and Hessian slots,
  order <= 2.

Both expose a forward returning a `Jets` bundle (derivative units, not Taylor
coefficients) plus an opaque cache, and a `vjp` mapping cotangents of those
jets to the flat parameter gradient, ordered layer by layer (weights row-major,
then biases).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapabilityError

_FACT = (1.0, 1.0, 2.0, 6.0, 24.0)

MAX_ORDER_1D = 4
MAX_ORDER_ND = 2


@dataclass
class Jets:
    """Network derivatives at a batch of points, in derivative units.

    value: (N,); grad: (N, d); hess: (N, d, d) when order >= 2;
    d3, d4: (N,), third/fourth derivatives, 1D Taylor mode only.
    Unused orders are None.
    """

    value: np.ndarray
    grad: np.ndarray = None
    hess: np.ndarray = None
    d3: np.ndarray = None
    d4: np.ndarray = None

    @property
    def n(self):
        return self.value.shape[0]

    def copy(self):
        c = lambda a: None if a is None else a.copy()
        return Jets(c(self.value), c(self.grad), c(self.hess), c(self.d3), c(self.d4))


def zero_cotangents(jets):
    """A Jets bundle of zeros matching the filled slots of `jets`."""
    z = lambda a: None if a is None else np.zeros_like(a)
    return Jets(
        np.zeros_like(jets.value), z(jets.grad), z(jets.hess), z(jets.d3), z(jets.d4)
    )


def _affine_fwd(W, b, Z):
    N, S, _ = Z.shape
    P = (Z.reshape(N * S, -1) @ W.T).reshape(N, S, -1)
    P[:, 0, :] += b
    return np.ascontiguousarray(P)


def _forward_pass(weights, biases, Z, K, tanh_fwd):
    """Run all layers; returns output state plus per-layer caches."""
    n_layers = len(weights)
    Zs, Ps, Ys = [Z], [], []
    for layer, (W, b) in enumerate(zip(weights, biases)):
        P = _affine_fwd(W, b, Z)
        if layer == n_layers - 1:
            return P, (Zs, Ps, Ys)
        Y = np.empty_like(P)
        tanh_fwd(layer, P, Y, K)
        Ps.append(P)
        Ys.append(Y)
        Z = Y
        Zs.append(Z)
    raise AssertionError("unreachable")


def _backward_pass(weights, Pbar, caches, tanh_bwd):
    """Reverse sweep; returns the flat parameter gradient."""
    Zs, Ps, Ys = caches
    n_layers = len(weights)
    grads = [None] * (2 * n_layers)
    for layer in range(n_layers - 1, -1, -1):
        N, S, n_out = Pbar.shape
        P2 = Pbar.reshape(N * S, n_out)
        Z = Zs[layer]
        grads[2 * layer] = P2.T @ Z.reshape(N * S, -1)
        grads[2 * layer + 1] = Pbar[:, 0, :].sum(axis=0)
        if layer == 0:
            break
        Ybar = np.ascontiguousarray((P2 @ weights[layer]).reshape(N, S, -1))
        Pbar = np.empty_like(Ybar)
        tanh_bwd(layer - 1, Ps[layer - 1], Ys[layer - 1], Ybar, Pbar)
    return np.concatenate([g.ravel() for g in grads])


# ---------------------------------------------------------------------------
# Taylor mode (1D)


def taylor_forward(weights, biases, x, order, backend=None):
    """Jets of the raw network along a 1D batch `x`, orders 0..order."""
    if order > MAX_ORDER_1D:
        raise CapabilityError(f"1D derivatives supported up to order {MAX_ORDER_1D}")
    B = backend or kernels.backend
    x = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    N, K = x.shape[0], order
    Z = np.zeros((N, K + 1, 1))
    Z[:, 0, 0] = x
    if K >= 1:
        Z[:, 1, 0] = 1.0
    W2s = []

    def fwd(layer, P, Y, K):
        W2 = np.empty_like(P)
        B.tanh_taylor_fwd(P, Y, W2, K)
        W2s.append(W2)

    out, caches = _forward_pass(weights, biases, Z, K, fwd)
    coeffs = out[:, :, 0]
    jets = Jets(value=coeffs[:, 0].copy())
    if K >= 1:
        jets.grad = coeffs[:, 1].copy().reshape(N, 1)
    if K >= 2:
        jets.hess = (2.0 * coeffs[:, 2]).reshape(N, 1, 1)
    if K >= 3:
        jets.d3 = 6.0 * coeffs[:, 3]
    if K >= 4:
        jets.d4 = 24.0 * coeffs[:, 4]
    cache = ("taylor", weights, K, caches, W2s)
    return jets, cache


def taylor_vjp(cache, cot, backend=None):
    """Flat parameter gradient from cotangents of taylor_forward jets."""
    kind, weights, K, caches, W2s = cache
    assert kind == "taylor"
    B = backend or kernels.backend
    N = cot.value.shape[0]
    Pbar = np.zeros((N, K + 1, 1))
    Pbar[:, 0, 0] = cot.value
    if K >= 1 and cot.grad is not None:
        Pbar[:, 1, 0] = cot.grad[:, 0]
    if K >= 2 and cot.hess is not None:
        Pbar[:, 2, 0] = 2.0 * cot.hess[:, 0, 0]
    if K >= 3 and cot.d3 is not None:
        Pbar[:, 3, 0] = 6.0 * cot.d3
    if K >= 4 and cot.d4 is not None:
        Pbar[:, 4, 0] = 24.0 * cot.d4

    def bwd(hidden, P, Y, Ybar, Pout):
        B.tanh_taylor_bwd(P, Y, W2s[hidden], Ybar, Pout, K)

    return _backward_pass(weights, Pbar, caches, bwd)


# ---------------------------------------------------------------------------
# Jet mode (d >= 2)


def jet_forward(weights, biases, X, order, backend=None):
    """Value / gradient / Hessian of the raw network at points X (N, d)."""
    if order > MAX_ORDER_ND:
        raise CapabilityError(
            f"derivatives in d >= 2 supported up to order {MAX_ORDER_ND}"
        )
    B = backend or kernels.backend
    X = np.ascontiguousarray(X, dtype=np.float64)
    N, d = X.shape
    S = 1 + (d if order >= 1 else 0) + (d * d if order >= 2 else 0)
    Z = np.zeros((N, S, d))
    Z[:, 0, :] = X
    if order >= 1:
        for a in range(d):
            Z[:, 1 + a, a] = 1.0

    def fwd(layer, P, Y, K):
        B.tanh_jet_fwd(P, Y, d, order)

    out, caches = _forward_pass(weights, biases, Z, order, fwd)
    jets = Jets(value=out[:, 0, 0].copy())
    if order >= 1:
        jets.grad = out[:, 1 : 1 + d, 0].copy()
    if order >= 2:
        jets.hess = out[:, 1 + d :, 0].reshape(N, d, d).copy()
    cache = ("jet", weights, d, order, caches)
    return jets, cache


def jet_vjp(cache, cot, backend=None):
    """Flat parameter gradient from cotangents of jet_forward jets."""
    kind, weights, d, order, caches = cache
    assert kind == "jet"
    B = backend or kernels.backend
    N = cot.value.shape[0]
    S = 1 + (d if order >= 1 else 0) + (d * d if order >= 2 else 0)
    Pbar = np.zeros((N, S, 1))
    Pbar[:, 0, 0] = cot.value
    if order >= 1 and cot.grad is not None:
        Pbar[:, 1 : 1 + d, 0] = cot.grad
    if order >= 2 and cot.hess is not None:
        Pbar[:, 1 + d :, 0] = cot.hess.reshape(N, d * d)

    def bwd(hidden, P, Y, Ybar, Pout):
        B.tanh_jet_bwd(P, Y, Ybar, Pout, d, order)

    return _backward_pass(weights, Pbar, caches, bwd)


# ---------------------------------------------------------------------------
# Dispatch


def forward(weights, biases, X, dim, order, backend=None):
    """Raw-network jets at `X` with the propagation mode chosen by `dim`."""
    if dim == 1:
        return taylor_forward(weights, biases, X, order, backend)
    return jet_forward(weights, biases, X, order, backend)


def vjp(cache, cot, backend=None):
    if cache[0] == "taylor":
        return taylor_vjp(cache, cot, backend)
    return jet_vjp(cache, cot, backend)
