"""Pure-numpy jet propagation kernels.

These four functions are the hot inner loops of network evaluation and
training: the tanh coupling of derivative slots, forward and reverse.  The
compiled backend (`pinnfem.kernels._fast`) implements the same contracts with
fused loops; this module is the always-available fallback and the reference
the compiled version is checked against.

Array layout is (batch, slot, unit) throughout, C-contiguous float64:

* Taylor state (1D inputs): slot k holds the k-th normalized Taylor
  coefficient of the unit's value along the input line, k = 0..K (K <= 4).
* Jet state (inputs in R^d): slot 0 is the value, slots 1..d the gradient,
  slots 1+d..d*d+d the Hessian in row-major order.

All functions fill preallocated output arrays in place.
"""

import numpy as np

BACKEND_NAME = "python"

_C23 = 2.0 / 3.0
_C13 = 1.0 / 3.0


def tanh_taylor_fwd(P, Y, W2, K):
    """Propagate Taylor coefficients through tanh.

    P holds the input series per unit; Y receives tanh(P) as a series and W2
    the series of Y*Y (needed again in the reverse sweep).  Uses the identity
    tanh' = 1 - tanh^2, which turns the composition into a convolution
    recurrence in the coefficients.
    """
    y0 = np.tanh(P[:, 0])
    Y[:, 0] = y0
    W2[:, 0] = y0 * y0
    if K >= 1:
        A = 1.0 - W2[:, 0]
        Y[:, 1] = P[:, 1] * A
        W2[:, 1] = 2.0 * Y[:, 0] * Y[:, 1]
    if K >= 2:
        Y[:, 2] = P[:, 2] * A - 0.5 * P[:, 1] * W2[:, 1]
        W2[:, 2] = 2.0 * Y[:, 0] * Y[:, 2] + Y[:, 1] * Y[:, 1]
    if K >= 3:
        Y[:, 3] = P[:, 3] * A - _C23 * P[:, 2] * W2[:, 1] - _C13 * P[:, 1] * W2[:, 2]
        W2[:, 3] = 2.0 * (Y[:, 0] * Y[:, 3] + Y[:, 1] * Y[:, 2])
    if K >= 4:
        Y[:, 4] = (
            P[:, 4] * A
            - 0.75 * P[:, 3] * W2[:, 1]
            - 0.5 * P[:, 2] * W2[:, 2]
            - 0.25 * P[:, 1] * W2[:, 3]
        )


def tanh_taylor_bwd(P, Y, W2, Ybar, Pbar, K):
    """Adjoint of tanh_taylor_fwd: cotangents of Y to cotangents of P.

    Mirrors the forward assignments in reverse, accumulating into the
    intermediate cotangents (series of Y, of W2 = Y*Y, and of A = 1 - W2[0])
    exactly once per use site.
    """
    y0 = Y[:, 0]
    if K == 0:
        Pbar[:, 0] = Ybar[:, 0] * (1.0 - y0 * y0)
        return
    A = 1.0 - W2[:, 0]
    yb0 = Ybar[:, 0].copy()
    yb1 = Ybar[:, 1].copy()
    Ab = np.zeros_like(y0)
    wb1 = np.zeros_like(y0)
    if K >= 2:
        yb2 = Ybar[:, 2].copy()
        wb2 = np.zeros_like(y0)
    if K >= 3:
        yb3 = Ybar[:, 3].copy()
        wb3 = np.zeros_like(y0)
    if K >= 4:
        yb4 = Ybar[:, 4]
        Pbar[:, 4] = yb4 * A
        Ab += yb4 * P[:, 4]
        Pbar[:, 3] = -0.75 * yb4 * W2[:, 1]
        wb1 += -0.75 * yb4 * P[:, 3]
        sb2_4 = -0.5 * yb4 * W2[:, 2]
        wb2 += -0.5 * yb4 * P[:, 2]
        sb1_4 = -0.25 * yb4 * W2[:, 3]
        wb3 += -0.25 * yb4 * P[:, 1]
    if K >= 3:
        # w3 = 2 y0 y3 + 2 y1 y2
        yb0 += 2.0 * wb3 * Y[:, 3]
        yb3 += 2.0 * wb3 * y0
        yb1 += 2.0 * wb3 * Y[:, 2]
        yb2 += 2.0 * wb3 * Y[:, 1]
        # y3 = s3 A - 2/3 s2 w1 - 1/3 s1 w2
        if K >= 4:
            Pbar[:, 3] += yb3 * A
        else:
            Pbar[:, 3] = yb3 * A
        Ab += yb3 * P[:, 3]
        sb2_3 = -_C23 * yb3 * W2[:, 1]
        wb1 += -_C23 * yb3 * P[:, 2]
        sb1_3 = -_C13 * yb3 * W2[:, 2]
        wb2 += -_C13 * yb3 * P[:, 1]
    if K >= 2:
        # w2 = 2 y0 y2 + y1^2
        yb0 += 2.0 * wb2 * Y[:, 2]
        yb2 += 2.0 * wb2 * y0
        yb1 += 2.0 * wb2 * Y[:, 1]
        # y2 = s2 A - 1/2 s1 w1
        sb2 = yb2 * A
        if K >= 3:
            sb2 += sb2_3
        if K >= 4:
            sb2 += sb2_4
        Pbar[:, 2] = sb2
        Ab += yb2 * P[:, 2]
        sb1_2 = -0.5 * yb2 * W2[:, 1]
        wb1 += -0.5 * yb2 * P[:, 1]
    # w1 = 2 y0 y1
    yb0 += 2.0 * wb1 * Y[:, 1]
    yb1 += 2.0 * wb1 * y0
    # y1 = s1 A
    sb1 = yb1 * A
    if K >= 2:
        sb1 += sb1_2
    if K >= 3:
        sb1 += sb1_3
    if K >= 4:
        sb1 += sb1_4
    Pbar[:, 1] = sb1
    Ab += yb1 * P[:, 1]
    # A = 1 - w0; w0 = y0^2; y0 = tanh(s0)
    yb0 += -2.0 * Ab * y0
    Pbar[:, 0] = yb0 * A


def tanh_jet_fwd(P, Y, d, order):
    """Propagate value / gradient / Hessian slots through tanh."""
    y = np.tanh(P[:, 0])
    Y[:, 0] = y
    if order >= 1:
        Y1 = 1.0 - y * y
        Y[:, 1 : 1 + d] = Y1[:, None, :] * P[:, 1 : 1 + d]
    if order >= 2:
        n = P.shape[2]
        Y2 = -2.0 * y * Y1
        PJ = P[:, 1 : 1 + d]
        PH = P[:, 1 + d :].reshape(P.shape[0], d, d, n)
        YH = Y[:, 1 + d :].reshape(P.shape[0], d, d, n)
        # Grouping y2*(pj_a*pj_b) keeps the result bitwise symmetric in (a, b).
        YH[...] = Y1[:, None, None, :] * PH + Y2[:, None, None, :] * (
            PJ[:, :, None, :] * PJ[:, None, :, :]
        )


def tanh_jet_bwd(P, Y, Ybar, Pbar, d, order):
    """Adjoint of tanh_jet_fwd (the tanh derivative chain is recomputed
    from the cached value slot rather than stored)."""
    y = Y[:, 0]
    Y1 = 1.0 - y * y
    if order == 0:
        Pbar[:, 0] = Ybar[:, 0] * Y1
        return
    N, _, n = P.shape
    Y2 = -2.0 * y * Y1
    PJ = P[:, 1 : 1 + d]
    Jbar = Ybar[:, 1 : 1 + d]
    pbar0 = Ybar[:, 0] * Y1 + Y2 * np.einsum("nai,nai->ni", Jbar, PJ)
    if order == 1:
        Pbar[:, 0] = pbar0
        Pbar[:, 1 : 1 + d] = Jbar * Y1[:, None, :]
        return
    Y3 = -2.0 * (Y1 * Y1 + y * Y2)
    PH = P[:, 1 + d :].reshape(N, d, d, n)
    Hbar = Ybar[:, 1 + d :].reshape(N, d, d, n)
    pbar0 += Y2 * np.einsum("nabi,nabi->ni", Hbar, PH)
    pbar0 += Y3 * np.einsum("nabi,nai,nbi->ni", Hbar, PJ, PJ)
    Pbar[:, 0] = pbar0
    sym = Hbar + Hbar.transpose(0, 2, 1, 3)
    Pbar[:, 1 : 1 + d] = Jbar * Y1[:, None, :] + Y2[:, None, :] * np.einsum(
        "nabi,nbi->nai", sym, PJ
    )
    Pbar[:, 1 + d :] = (Hbar * Y1[:, None, None, :]).reshape(N, d * d, n)
