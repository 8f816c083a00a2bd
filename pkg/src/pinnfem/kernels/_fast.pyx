# cython: language_level=3
"""Compiled jet-propagation kernels.

Same contracts and array layout as `pinnfem.kernels.reference`; the slot
coupling is fused into single passes per (point, unit), which is where the
pure-numpy version spends most of its time in temporaries.
"""

from libc.math cimport tanh

import numpy as np

BACKEND_NAME = "compiled"

cdef double C23 = 2.0 / 3.0
cdef double C13 = 1.0 / 3.0


def tanh_taylor_fwd(double[:, :, ::1] P, double[:, :, ::1] Y,
                    double[:, :, ::1] W2, int K):
    cdef Py_ssize_t N = P.shape[0], n = P.shape[2], i, j
    cdef double y0, y1, y2, y3, y4, w0, w1, w2, w3, A
    with nogil:
        for i in range(N):
            for j in range(n):
                y0 = tanh(P[i, 0, j])
                Y[i, 0, j] = y0
                w0 = y0 * y0
                W2[i, 0, j] = w0
                if K >= 1:
                    A = 1.0 - w0
                    y1 = P[i, 1, j] * A
                    Y[i, 1, j] = y1
                    w1 = 2.0 * y0 * y1
                    W2[i, 1, j] = w1
                if K >= 2:
                    y2 = P[i, 2, j] * A - 0.5 * P[i, 1, j] * w1
                    Y[i, 2, j] = y2
                    w2 = 2.0 * y0 * y2 + y1 * y1
                    W2[i, 2, j] = w2
                if K >= 3:
                    y3 = P[i, 3, j] * A - C23 * P[i, 2, j] * w1 - C13 * P[i, 1, j] * w2
                    Y[i, 3, j] = y3
                    w3 = 2.0 * (y0 * y3 + y1 * y2)
                    W2[i, 3, j] = w3
                if K >= 4:
                    y4 = (P[i, 4, j] * A - 0.75 * P[i, 3, j] * w1
                          - 0.5 * P[i, 2, j] * w2 - 0.25 * P[i, 1, j] * w3)
                    Y[i, 4, j] = y4


def tanh_taylor_bwd(double[:, :, ::1] P, double[:, :, ::1] Y,
                    double[:, :, ::1] W2, double[:, :, ::1] Ybar,
                    double[:, :, ::1] Pbar, int K):
    cdef Py_ssize_t N = P.shape[0], n = P.shape[2], i, j
    cdef double y0, A
    cdef double yb0, yb1, yb2, yb3, yb4
    cdef double Ab, wb1, wb2, wb3
    cdef double sb1, sb2, sb3, sb1_2, sb1_3, sb1_4, sb2_3, sb2_4
    with nogil:
        for i in range(N):
            for j in range(n):
                y0 = Y[i, 0, j]
                if K == 0:
                    Pbar[i, 0, j] = Ybar[i, 0, j] * (1.0 - y0 * y0)
                    continue
                A = 1.0 - W2[i, 0, j]
                yb0 = Ybar[i, 0, j]
                yb1 = Ybar[i, 1, j]
                Ab = 0.0
                wb1 = 0.0
                sb1_2 = sb1_3 = sb1_4 = sb2_3 = sb2_4 = 0.0
                if K >= 2:
                    yb2 = Ybar[i, 2, j]
                    wb2 = 0.0
                if K >= 3:
                    yb3 = Ybar[i, 3, j]
                    wb3 = 0.0
                if K >= 4:
                    yb4 = Ybar[i, 4, j]
                    Pbar[i, 4, j] = yb4 * A
                    Ab = Ab + yb4 * P[i, 4, j]
                    sb3 = -0.75 * yb4 * W2[i, 1, j]
                    wb1 = wb1 - 0.75 * yb4 * P[i, 3, j]
                    sb2_4 = -0.5 * yb4 * W2[i, 2, j]
                    wb2 = wb2 - 0.5 * yb4 * P[i, 2, j]
                    sb1_4 = -0.25 * yb4 * W2[i, 3, j]
                    wb3 = wb3 - 0.25 * yb4 * P[i, 1, j]
                if K >= 3:
                    yb0 = yb0 + 2.0 * wb3 * Y[i, 3, j]
                    yb3 = yb3 + 2.0 * wb3 * y0
                    yb1 = yb1 + 2.0 * wb3 * Y[i, 2, j]
                    yb2 = yb2 + 2.0 * wb3 * Y[i, 1, j]
                    if K >= 4:
                        sb3 = sb3 + yb3 * A
                    else:
                        sb3 = yb3 * A
                    Pbar[i, 3, j] = sb3
                    Ab = Ab + yb3 * P[i, 3, j]
                    sb2_3 = -C23 * yb3 * W2[i, 1, j]
                    wb1 = wb1 - C23 * yb3 * P[i, 2, j]
                    sb1_3 = -C13 * yb3 * W2[i, 2, j]
                    wb2 = wb2 - C13 * yb3 * P[i, 1, j]
                if K >= 2:
                    yb0 = yb0 + 2.0 * wb2 * Y[i, 2, j]
                    yb2 = yb2 + 2.0 * wb2 * y0
                    yb1 = yb1 + 2.0 * wb2 * Y[i, 1, j]
                    sb2 = yb2 * A
                    if K >= 3:
                        sb2 = sb2 + sb2_3
                    if K >= 4:
                        sb2 = sb2 + sb2_4
                    Pbar[i, 2, j] = sb2
                    Ab = Ab + yb2 * P[i, 2, j]
                    sb1_2 = -0.5 * yb2 * W2[i, 1, j]
                    wb1 = wb1 - 0.5 * yb2 * P[i, 1, j]
                yb0 = yb0 + 2.0 * wb1 * Y[i, 1, j]
                yb1 = yb1 + 2.0 * wb1 * y0
                sb1 = yb1 * A
                if K >= 2:
                    sb1 = sb1 + sb1_2
                if K >= 3:
                    sb1 = sb1 + sb1_3
                if K >= 4:
                    sb1 = sb1 + sb1_4
                Pbar[i, 1, j] = sb1
                Ab = Ab + yb1 * P[i, 1, j]
                yb0 = yb0 - 2.0 * Ab * y0
                Pbar[i, 0, j] = yb0 * A


def tanh_jet_fwd(double[:, :, ::1] P, double[:, :, ::1] Y, int d, int order):
    cdef Py_ssize_t N = P.shape[0], n = P.shape[2], i, j
    cdef int a, b
    cdef double y, y1, y2, pja
    with nogil:
        for i in range(N):
            for j in range(n):
                y = tanh(P[i, 0, j])
                Y[i, 0, j] = y
                if order >= 1:
                    y1 = 1.0 - y * y
                    for a in range(d):
                        Y[i, 1 + a, j] = y1 * P[i, 1 + a, j]
                if order >= 2:
                    y2 = -2.0 * y * y1
                    for a in range(d):
                        pja = P[i, 1 + a, j]
                        for b in range(d):
                            # y2*(pj_a*pj_b): bitwise symmetric in (a, b)
                            Y[i, 1 + d + a * d + b, j] = (
                                y1 * P[i, 1 + d + a * d + b, j]
                                + y2 * (pja * P[i, 1 + b, j])
                            )


def tanh_jet_bwd(double[:, :, ::1] P, double[:, :, ::1] Y,
                 double[:, :, ::1] Ybar, double[:, :, ::1] Pbar,
                 int d, int order):
    cdef Py_ssize_t N = P.shape[0], n = P.shape[2], i, j
    cdef int a, b
    cdef double y, y1, y2, y3, acc, g, hb
    with nogil:
        for i in range(N):
            for j in range(n):
                y = Y[i, 0, j]
                y1 = 1.0 - y * y
                if order == 0:
                    Pbar[i, 0, j] = Ybar[i, 0, j] * y1
                    continue
                y2 = -2.0 * y * y1
                acc = Ybar[i, 0, j] * y1
                for a in range(d):
                    acc = acc + y2 * Ybar[i, 1 + a, j] * P[i, 1 + a, j]
                if order >= 2:
                    y3 = -2.0 * (y1 * y1 + y * y2)
                    for a in range(d):
                        for b in range(d):
                            hb = Ybar[i, 1 + d + a * d + b, j]
                            acc = acc + y2 * hb * P[i, 1 + d + a * d + b, j]
                            acc = acc + y3 * hb * P[i, 1 + a, j] * P[i, 1 + b, j]
                Pbar[i, 0, j] = acc
                for a in range(d):
                    g = Ybar[i, 1 + a, j] * y1
                    if order >= 2:
                        for b in range(d):
                            g = g + (Ybar[i, 1 + d + a * d + b, j]
                                     + Ybar[i, 1 + d + b * d + a, j]) * y2 * P[i, 1 + b, j]
                    Pbar[i, 1 + a, j] = g
                if order >= 2:
                    for a in range(d):
                        for b in range(d):
                            Pbar[i, 1 + d + a * d + b, j] = (
                                Ybar[i, 1 + d + a * d + b, j] * y1
                            )
