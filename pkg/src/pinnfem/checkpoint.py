"""Text checkpoint format for trained networks.

Layout (UTF-8, LF line endings)::

    PINNFEM-NET v1
    dim <d>
    layers n0 n1 ... nk
    activation tanh
    boundary <none|dirichlet_product>
    shift <decimal>
    W1
    <n1 lines of n0 floats>
    b1
    <one line of n1 floats>
    ...per layer...

Floats are written with Python's shortest round-trip repr, so a save/load
cycle is bitwise lossless.
"""

import numpy as np

from .errors import FormatError
from .network import DenseNetwork

MAGIC = "PINNFEM-NET v1"


def save_checkpoint(net, path):
    lines = [
        MAGIC,
        f"dim {net.dim}",
        "layers " + " ".join(str(s) for s in net.layer_sizes),
        f"activation {net.activation}",
        f"boundary {net.boundary_mode}",
        f"shift {repr(net.shift)}",
    ]
    for layer, (W, b) in enumerate(zip(net.weights, net.biases), start=1):
        lines.append(f"W{layer}")
        for row in W:
            lines.append(" ".join(repr(float(v)) for v in row))
        lines.append(f"b{layer}")
        lines.append(" ".join(repr(float(v)) for v in b))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")

    def need(lineno):
        if lineno > len(lines) or not lines[lineno - 1].strip():
            raise FormatError("unexpected end of checkpoint", lineno)
        return lines[lineno - 1].strip()

    if need(1) != MAGIC:
        raise FormatError(f"bad magic, expected {MAGIC!r}", 1)
    dim = _int_field(need(2), "dim", 2)
    layers_tok = need(3).split()
    if layers_tok[0] != "layers" or len(layers_tok) < 2:
        raise FormatError("expected 'layers n0 n1 ...'", 3)
    try:
        sizes = tuple(int(t) for t in layers_tok[1:])
    except ValueError:
        raise FormatError("layer sizes must be integers", 3) from None
    if sizes and sizes[0] != dim:
        raise FormatError(f"dim {dim} does not match layers[0] = {sizes[0]}", 3)
    activation = _tag_field(need(4), "activation", 4)
    boundary = _tag_field(need(5), "boundary", 5)
    shift = _float_field(need(6), "shift", 6)

    weights, biases = [], []
    lineno = 7
    for layer in range(1, len(sizes)):
        n_out, n_in = sizes[layer], sizes[layer - 1]
        if need(lineno) != f"W{layer}":
            raise FormatError(f"expected 'W{layer}'", lineno)
        lineno += 1
        W = np.empty((n_out, n_in))
        for row in range(n_out):
            W[row] = _float_row(need(lineno), n_in, lineno)
            lineno += 1
        weights.append(W)
        if need(lineno) != f"b{layer}":
            raise FormatError(f"expected 'b{layer}'", lineno)
        lineno += 1
        biases.append(_float_row(need(lineno), n_out, lineno))
        lineno += 1
    for extra in range(lineno - 1, len(lines)):
        if lines[extra].strip():
            raise FormatError("trailing content after last layer", extra + 1)

    try:
        return DenseNetwork(
            sizes, weights, biases, activation, boundary, shift
        )
    except Exception as exc:
        raise FormatError(str(exc)) from exc


def _int_field(line, key, lineno):
    tok = line.split()
    if len(tok) != 2 or tok[0] != key:
        raise FormatError(f"expected '{key} <int>'", lineno)
    try:
        return int(tok[1])
    except ValueError:
        raise FormatError(f"{key} must be an integer", lineno) from None


def _float_field(line, key, lineno):
    tok = line.split()
    if len(tok) != 2 or tok[0] != key:
        raise FormatError(f"expected '{key} <decimal>'", lineno)
    try:
        value = float(tok[1])
    except ValueError:
        raise FormatError(f"{key} must be a decimal number", lineno) from None
    if not np.isfinite(value):
        raise FormatError(f"{key} must be finite", lineno)
    return value


def _tag_field(line, key, lineno):
    tok = line.split()
    if len(tok) != 2 or tok[0] != key:
        raise FormatError(f"expected '{key} <tag>'", lineno)
    return tok[1]


def _float_row(line, expected, lineno):
    tok = line.split()
    if len(tok) != expected:
        raise FormatError(f"expected {expected} floats, got {len(tok)}", lineno)
    try:
        row = np.array([float(t) for t in tok])
    except ValueError:
        raise FormatError("malformed float", lineno) from None
    if not np.all(np.isfinite(row)):
        raise FormatError("non-finite value", lineno)
    return row
