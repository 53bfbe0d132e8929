"""Orthogonal orbital rotations as networks of nearest-neighbour planar rotations.

A rotation ``(i, i+1, theta)`` acts on coordinates ``(i, i+1)`` as
``[[cos theta, -sin theta], [sin theta, cos theta]]``. Networks are applied in
list order, so ``to_matrix`` returns ``P_k ... P_2 P_1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class GivensNetwork:
    n: int
    rotations: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self) -> None:
        rots = tuple((int(i), int(j), float(t)) for i, j, t in self.rotations)
        for i, j, t in rots:
            if not (0 <= i < self.n and 0 <= j < self.n and i != j):
                raise ValueError(f"rotation ({i}, {j}) out of range for n={self.n}")
            if not np.isfinite(t):
                raise ValueError("rotation angles must be finite")
        object.__setattr__(self, "rotations", rots)

    def __len__(self) -> int:
        return len(self.rotations)

    def inverse(self) -> GivensNetwork:
        return GivensNetwork(self.n, tuple((i, j, -t) for i, j, t in reversed(self.rotations)))


def planar(n: int, i: int, j: int, theta: float) -> np.ndarray:
    m = np.eye(n)
    c, s = np.cos(theta), np.sin(theta)
    m[i, i] = c
    m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return m


def to_matrix(net: GivensNetwork) -> np.ndarray:
    m = np.eye(net.n)
    for i, j, t in net.rotations:
        m = planar(net.n, i, j, t) @ m
    return m


def _check_orthogonal(U: np.ndarray) -> None:
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    res = float(np.max(np.abs(U.T @ U - np.eye(U.shape[0]))))
    if res > ORTHO_TOL:
        raise ValueError(f"matrix is not orthogonal (residual {res:.3e})")


def fix_determinant(U: np.ndarray) -> np.ndarray:
    """Negate the last column when det(U) = -1, so the result lies in SO(N)."""
    _check_orthogonal(U)
    out = np.array(U, dtype=float)
    if np.linalg.det(out) < 0:
        out[:, -1] = -out[:, -1]
    return out


def decompose(U: np.ndarray) -> GivensNetwork:
    """Nearest-neighbour network with ``to_matrix(net) == U`` (N(N-1)/2 rotations).

    Columns are cleared left to right, each from the bottom row upward, by
    left-multiplied rotations; the resulting identity is then unwound.
    """
    _check_orthogonal(U)
    M = np.array(U, dtype=float)
    n = M.shape[0]
    if np.linalg.det(M) < 0:
        raise ValueError("det(U) = -1; apply fix_determinant first")
    applied: list[tuple[int, int, float]] = []
    for col in range(n - 1):
        for row in range(n - 1, col, -1):
            a, b = M[row - 1, col], M[row, col]
            # rotate (row-1, row) by -phi so that b -> 0 and a -> hypot(a, b) >= 0
            phi = np.arctan2(b, a)
            M = planar(n, row - 1, row, -phi) @ M
            M[row, col] = 0.0
            applied.append((row - 1, row, -phi))
    # now G_m ... G_1 U = I, hence U = G_1^T ... G_m^T: apply G_m^T first
    rotations = tuple((i, j, -t) for i, j, t in reversed(applied))
    return GivensNetwork(n, rotations)


def merge(first: GivensNetwork, second: GivensNetwork) -> GivensNetwork:
    """Single canonical network equivalent to applying ``first`` then ``second``."""
    if first.n != second.n:
        raise ValueError(f"network sizes differ: {first.n} vs {second.n}")
    return decompose(to_matrix(second) @ to_matrix(first))


def random_orthogonal(n: int, rng: np.random.Generator, *, special: bool = True) -> np.ndarray:
    """Haar-random O(n) (or SO(n)) matrix via sign-fixed QR."""
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    q = q * np.sign(np.diag(r))
    if special and np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q
