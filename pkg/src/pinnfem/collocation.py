"""Uniform collocation grids on the unit box.

Interior points form the cell-centered tensor grid ((i+1/2)/m per axis), so
they never touch the boundary; boundary points are separate cell-centered
grids per face at the same resolution (in 1D, the two endpoints).  Quadrature
weights are plain means: volume 1 over the interior count, and the boundary
normalized to total weight 1 over the boundary count.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass
class CollocationSet:
    dim: int
    resolution: int
    interior_points: np.ndarray  # (N,) in 1D, (N, dim) otherwise
    boundary_points: np.ndarray
    interior_weight: float
    boundary_weight: float


def make_collocation(dim, count):
    """Collocation set with the largest tensor grid m^dim not exceeding count."""
    if dim not in (1, 2, 3):
        raise InputError("dim must be 1, 2 or 3")
    if count < 2**dim:
        raise InputError(f"need at least {2 ** dim} points in {dim}D")
    m = int(round(count ** (1.0 / dim)))
    while m**dim > count:
        m -= 1
    while (m + 1) ** dim <= count:
        m += 1
    axis = (np.arange(m) + 0.5) / m
    if dim == 1:
        interior = axis.copy()
        boundary = np.array([0.0, 1.0])
    else:
        grids = np.meshgrid(*([axis] * dim), indexing="ij")
        interior = np.stack([g.ravel() for g in grids], axis=1)
        boundary = _face_grids(dim, m, axis)
    return CollocationSet(
        dim=dim,
        resolution=m,
        interior_points=interior,
        boundary_points=boundary,
        interior_weight=1.0 / m**dim,
        boundary_weight=1.0 / len(boundary),
    )


def _face_grids(dim, m, axis):
    faces = []
    if dim == 2:
        tangent = axis
        for fixed_axis in (0, 1):
            for fixed_value in (0.0, 1.0):
                pts = np.empty((m, 2))
                pts[:, fixed_axis] = fixed_value
                pts[:, 1 - fixed_axis] = tangent
                faces.append(pts)
    else:
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        tangent = np.stack([g1.ravel(), g2.ravel()], axis=1)
        for fixed_axis in (0, 1, 2):
            others = [a for a in (0, 1, 2) if a != fixed_axis]
            for fixed_value in (0.0, 1.0):
                pts = np.empty((m * m, 3))
                pts[:, fixed_axis] = fixed_value
                pts[:, others[0]] = tangent[:, 0]
                pts[:, others[1]] = tangent[:, 1]
                faces.append(pts)
    return np.concatenate(faces, axis=0)
