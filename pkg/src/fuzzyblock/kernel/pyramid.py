"""Cone emptiness tests for joint / excavation / block pyramids.

A pyramid {v : n_i . v >= 0 for all i} always contains the zero vector; it
counts as nonempty only when it contains some nonzero vector (boundary rays
included).  The decision is made by linear programming: first maximize the
margin eps subject to n_i . v >= eps inside the unit box, then, if the
optimum margin is zero, probe each +-coordinate direction to distinguish a
boundary-only cone from the trivial one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

_TOL = 1e-9
_PIVOT_TOL = 1e-11


class PyramidSolveError(RuntimeError):
    """Raised when the LP solver fails to converge."""


@dataclass(frozen=True)
class HalfSpaceSystem:
    """Homogeneous half-space constraints n_i . v >= 0 with unit normals."""

    normals: np.ndarray

    def __post_init__(self) -> None:
        arr = np.atleast_2d(np.asarray(self.normals, dtype=float))
        if arr.size == 0:
            arr = np.zeros((0, 3))
        if arr.shape[1] != 3:
            raise ValueError(f"normals must be 3-vectors, got shape {arr.shape}")
        lengths = np.linalg.norm(arr, axis=1)
        if arr.shape[0] and not np.all(np.abs(lengths - 1.0) <= 1e-9):
            raise ValueError("all normals must be unit length within 1e-9")
        arr.setflags(write=False)
        object.__setattr__(self, "normals", arr)

    @property
    def size(self) -> int:
        return self.normals.shape[0]

    def extended(self, extra: np.ndarray) -> "HalfSpaceSystem":
        extra = np.atleast_2d(np.asarray(extra, dtype=float))
        if self.size == 0:
            return HalfSpaceSystem(extra)
        return HalfSpaceSystem(np.vstack([self.normals, extra]))


@dataclass(frozen=True)
class PyramidResult:
    nonempty: bool
    witness: Optional[np.ndarray]
    margin: float
    boundary_only: bool


def _simplex_max(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_iter: int = 2000):
    """Maximize c.x subject to A x <= b, x >= 0, with b >= 0.

    Dense tableau simplex with Bland's rule, so no cycling.  Sizes here are
    tiny (a dozen rows), so exactness and determinism beat speed.
    """
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        col = -1
        for j in range(n + m):
            if T[m, j] < -_PIVOT_TOL:
                col = j
                break
        if col < 0:
            x = np.zeros(n + m)
            for i, bi in enumerate(basis):
                x[bi] = T[i, -1]
            return x[:n], T[m, -1]
        row, best_ratio, best_basis = -1, np.inf, None
        for i in range(m):
            if T[i, col] > _PIVOT_TOL:
                ratio = T[i, -1] / T[i, col]
                if ratio < best_ratio - _PIVOT_TOL or (
                    abs(ratio - best_ratio) <= _PIVOT_TOL
                    and (best_basis is None or basis[i] < best_basis)
                ):
                    row, best_ratio, best_basis = i, ratio, basis[i]
        if row < 0:
            raise PyramidSolveError("LP unbounded; constraint set malformed")
        T[row] /= T[row, col]
        for i in range(m + 1):
            if i != row and T[i, col] != 0.0:
                T[i] -= T[i, col] * T[row]
        basis[row] = col
    raise PyramidSolveError("simplex iteration limit exceeded")


def _cone_margin_lp(normals: np.ndarray) -> tuple[np.ndarray, float]:
    """Max eps with n_i.(p - q) >= eps, p - q in the unit box, p, q, eps >= 0."""
    n, dim = normals.shape
    ncols = 2 * dim + 1
    rows = []
    rhs = []
    for i in range(n):
        row = np.zeros(ncols)
        row[:dim] = -normals[i]
        row[dim : 2 * dim] = normals[i]
        row[-1] = 1.0
        rows.append(row)
        rhs.append(0.0)
    for k in range(dim):
        row = np.zeros(ncols)
        row[k] = 1.0
        row[dim + k] = -1.0
        rows.append(row)
        rhs.append(1.0)
        rows.append(-row)
        rhs.append(1.0)
    c = np.zeros(ncols)
    c[-1] = 1.0
    x, value = _simplex_max(c, np.array(rows), np.array(rhs))
    v = x[:dim] - x[dim : 2 * dim]
    return v, value


def _cone_probe_lp(normals: np.ndarray, axis: int, sign: float) -> tuple[np.ndarray, float]:
    """Max sign*v[axis] with n_i . v >= 0 and v in the unit box."""
    n, dim = normals.shape
    ncols = 2 * dim
    rows = []
    rhs = []
    for i in range(n):
        row = np.zeros(ncols)
        row[:dim] = -normals[i]
        row[dim:] = normals[i]
        rows.append(row)
        rhs.append(0.0)
    for k in range(dim):
        row = np.zeros(ncols)
        row[k] = 1.0
        row[dim + k] = -1.0
        rows.append(row)
        rhs.append(1.0)
        rows.append(-row)
        rhs.append(1.0)
    c = np.zeros(ncols)
    c[axis] = sign
    c[dim + axis] = -sign
    x, value = _simplex_max(c, np.array(rows), np.array(rhs))
    return x[:dim] - x[dim:], value


def cone_nonempty(normals: np.ndarray) -> PyramidResult:
    """Decide whether {v != 0 : n_i . v >= 0 for all i} is nonempty.

    Works in any dimension >= 1; used for 3-D pyramids and for 2-D fuzzy
    half-plane systems in their crisp limit.
    """
    normals = np.atleast_2d(np.asarray(normals, dtype=float))
    if normals.size == 0:
        dim = normals.shape[1] if normals.shape[1] else 3
        w = np.zeros(dim)
        w[-1] = 1.0
        return PyramidResult(True, w, 1.0, False)
    dim = normals.shape[1]
    v, margin = _cone_margin_lp(normals)
    if margin > _TOL:
        return PyramidResult(True, v / np.linalg.norm(v), float(margin), False)
    for axis in range(dim):
        for sign in (1.0, -1.0):
            v, value = _cone_probe_lp(normals, axis, sign)
            if value > _TOL:
                return PyramidResult(True, v / np.linalg.norm(v), 0.0, True)
    return PyramidResult(False, None, float(min(margin, 0.0)), False)


def pyramid_nonempty(sys: HalfSpaceSystem) -> PyramidResult:
    """Emptiness test for a half-space pyramid, with a witness when nonempty."""
    return cone_nonempty(sys.normals)
