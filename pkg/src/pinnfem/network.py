"""Dense tanh networks with exact input derivatives and parameter gradients.

The network is a plain fully-connected multilayer perceptron: tanh on every
hidden layer, linear output of width one.  Derivatives with respect to the
input are computed analytically (Taylor propagation in 1D, jet propagation in
higher dimension) by `pinnfem.engine`; nothing here is a finite difference.
"""

from dataclasses import dataclass, field

import numpy as np

from . import engine
from .errors import CapabilityError, InputError
from .rng import SplitMix64

ACTIVATIONS = ("tanh",)
BOUNDARY_MODES = ("none", "dirichlet_product")


@dataclass
class DenseNetwork:
    """Weights and metadata of one network.

    layer_sizes runs input..output; the first entry is the spatial dimension
    and the last must be 1.  At least one hidden layer is required.
    boundary_mode tags whether evaluations should be wrapped in the
    Dirichlet product operator, and shift is the constant added on top
    (used by the multiplicative enrichment).
    """

    layer_sizes: tuple
    weights: list = field(repr=False)
    biases: list = field(repr=False)
    activation: str = "tanh"
    boundary_mode: str = "none"
    shift: float = 0.0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        self.layer_sizes = sizes
        if len(sizes) < 3:
            raise InputError("network needs at least one hidden layer")
        if any(s < 1 for s in sizes):
            raise InputError("layer sizes must be positive")
        if sizes[-1] != 1:
            raise InputError("output layer must have width 1")
        if self.activation not in ACTIVATIONS:
            raise CapabilityError(f"unsupported activation {self.activation!r}")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise InputError(f"unknown boundary mode {self.boundary_mode!r}")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise InputError("one weight matrix and bias vector per layer expected")
        for layer, (W, b) in enumerate(zip(self.weights, self.biases)):
            n_out, n_in = sizes[layer + 1], sizes[layer]
            if W.shape != (n_out, n_in):
                raise InputError(
                    f"weight {layer} has shape {W.shape}, expected {(n_out, n_in)}"
                )
            if b.shape != (n_out,):
                raise InputError(
                    f"bias {layer} has shape {b.shape}, expected {(n_out,)}"
                )
        self.shift = float(self.shift)

    @property
    def dim(self):
        return self.layer_sizes[0]

    @property
    def n_params(self):
        return parameter_count(self.layer_sizes)

    def to_flat(self):
        """Parameters as one vector: per layer, weights row-major then bias."""
        parts = []
        for W, b in zip(self.weights, self.biases):
            parts.append(W.ravel())
            parts.append(b)
        return np.concatenate(parts)

    def with_params(self, flat):
        """Same structure, parameters replaced from a flat vector."""
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.n_params,):
            raise InputError(
                f"expected {self.n_params} parameters, got {flat.shape[0]}"
            )
        weights, biases, pos = [], [], 0
        for layer in range(len(self.layer_sizes) - 1):
            n_out, n_in = self.layer_sizes[layer + 1], self.layer_sizes[layer]
            weights.append(flat[pos : pos + n_out * n_in].reshape(n_out, n_in).copy())
            pos += n_out * n_in
            biases.append(flat[pos : pos + n_out].copy())
            pos += n_out
        return DenseNetwork(
            self.layer_sizes,
            weights,
            biases,
            self.activation,
            self.boundary_mode,
            self.shift,
        )

    def with_shift(self, shift):
        return DenseNetwork(
            self.layer_sizes,
            [W.copy() for W in self.weights],
            [b.copy() for b in self.biases],
            self.activation,
            self.boundary_mode,
            float(shift),
        )


@dataclass
class JetValue:
    """Derivatives of a scalar field at one point.

    In 1D `derivatives[k]` is the k-th derivative (slot 0 equals value).
    In d >= 2 the gradient and, for order >= 2, the symmetric Hessian are
    filled instead.
    """

    value: float
    derivatives: np.ndarray = None
    gradient: np.ndarray = None
    hessian: np.ndarray = None


def parameter_count(layer_sizes):
    sizes = tuple(layer_sizes)
    return sum(sizes[l + 1] * sizes[l] + sizes[l + 1] for l in range(len(sizes) - 1))


def initialize_network(layer_sizes, seed, boundary_mode="none"):
    """Fresh network with uniform Glorot weights and zero biases.

    Sampling is driven by the package's splitmix64 stream seeded with `seed`,
    drawing weights row by row per layer, so initialization is reproducible
    bit for bit everywhere.
    """
    sizes = tuple(int(s) for s in layer_sizes)
    rng = SplitMix64(seed)
    weights, biases = [], []
    for layer in range(len(sizes) - 1):
        n_in, n_out = sizes[layer], sizes[layer + 1]
        bound = np.sqrt(6.0 / (n_in + n_out))
        W = np.empty((n_out, n_in))
        for o in range(n_out):
            for i in range(n_in):
                W[o, i] = rng.uniform(-bound, bound)
        weights.append(W)
        biases.append(np.zeros(n_out))
    return DenseNetwork(sizes, weights, biases, boundary_mode=boundary_mode)


def zero_network(layer_sizes=(1, 1, 1), dim=None):
    """All-zero network (identically zero output)."""
    if dim is not None:
        layer_sizes = (dim, 1, 1)
    sizes = tuple(layer_sizes)
    weights = [np.zeros((sizes[l + 1], sizes[l])) for l in range(len(sizes) - 1)]
    biases = [np.zeros(sizes[l + 1]) for l in range(len(sizes) - 1)]
    return DenseNetwork(sizes, weights, biases)


def constant_network(value, dim=1):
    """Network computing exactly the constant `value`."""
    net = zero_network(dim=dim)
    net.biases[-1][0] = float(value)
    return net


def forward(net, x):
    """Raw network output at one point: no boundary operator, no shift."""
    return float(forward_many(net, _as_batch(net, x))[0])


def forward_many(net, X):
    """Raw network values over a batch of points (N,) in 1D or (N, d)."""
    X = np.asarray(X, dtype=np.float64)
    if net.dim == 1:
        jets, _ = engine.taylor_forward(net.weights, net.biases, X.reshape(-1), 0)
    else:
        if X.ndim != 2 or X.shape[1] != net.dim:
            raise InputError(f"points must have shape (N, {net.dim})")
        jets, _ = engine.jet_forward(net.weights, net.biases, X, 0)
    return jets.value


def evaluate_jet(net, x, order, problem=None):
    """Exact derivatives of the evaluated field at one point.

    When the network carries a boundary mode other than "none" the Dirichlet
    product operator is applied, which needs the problem for its boundary
    data; the shift constant is included whenever it is nonzero.  Supported
    orders: up to 4 in 1D, up to 2 otherwise.
    """
    from .operators import field_jets  # local import to avoid a cycle

    x_arr = _as_batch(net, x)
    jets = field_jets(net, x_arr, order, problem)
    if net.dim == 1:
        derivs = np.zeros(order + 1)
        derivs[0] = jets.value[0]
        if order >= 1:
            derivs[1] = jets.grad[0, 0]
        if order >= 2:
            derivs[2] = jets.hess[0, 0, 0]
        if order >= 3:
            derivs[3] = jets.d3[0]
        if order >= 4:
            derivs[4] = jets.d4[0]
        return JetValue(value=float(derivs[0]), derivatives=derivs)
    return JetValue(
        value=float(jets.value[0]),
        gradient=None if jets.grad is None else jets.grad[0].copy(),
        hessian=None if jets.hess is None else jets.hess[0].copy(),
    )


def value_and_parameter_gradient(net, functional):
    """Loss value plus dLoss/dparams for a functional of the network.

    The functional describes itself as a list of terms (points, derivative
    order, optional boundary composition, and the map from jets to a scalar
    with its jet cotangents); reverse-mode accumulation then runs through both
    the network and every input-derivative slot the loss touches.
    """
    total = 0.0
    grad = np.zeros(net.n_params)
    for term in functional.terms(net):
        raw, cache = engine.forward(
            net.weights, net.biases, term.points, net.dim, term.order
        )
        jets = raw if term.composer is None else term.composer.apply(raw)
        value, cot = term.value_and_cotangents(jets)
        if term.composer is not None:
            cot = term.composer.pullback(cot)
        total += value
        grad += engine.vjp(cache, cot)
    return total, grad


def parameter_gradient(net, functional):
    """Flat gradient of a scalar functional with respect to the parameters."""
    return value_and_parameter_gradient(net, functional)[1]


def _as_batch(net, x):
    x = np.asarray(x, dtype=np.float64)
    if net.dim == 1:
        if x.size != 1:
            raise InputError("expected a single 1D point")
        return x.reshape(1)
    if x.shape != (net.dim,):
        raise InputError(f"expected a point in R^{net.dim}")
    return x.reshape(1, net.dim)
