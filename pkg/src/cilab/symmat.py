"""Small symmetric matrices: determinants, cofactors, Schur complements.

Functions accept either a :class:`SymMat` or a dense array of shape
``(..., n, n)``; array inputs are processed in batch over the leading axes
and return arrays, ``SymMat`` inputs return ``SymMat`` / ``float``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, NegativeDensity, NonPositivePivot

MAX_DIM = 6
PSD_TOL = 1e-10


def packed_size(n: int) -> int:
    return n * (n + 1) // 2


def dim_from_packed(size: int) -> int:
    n = int(round((np.sqrt(8 * size + 1) - 1) / 2))
    if packed_size(n) != size:
        raise DimensionMismatch(f"{size} is not a triangular number")
    return n


def pack(a: np.ndarray) -> np.ndarray:
    """Upper triangle of ``(..., n, n)`` in row-major order."""
    a = np.asarray(a, dtype=float)
    n = a.shape[-1]
    iu = np.triu_indices(n)
    return a[..., iu[0], iu[1]]


def unpack(p: np.ndarray, n: int | None = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if n is None:
        n = dim_from_packed(p.shape[-1])
    out = np.empty(p.shape[:-1] + (n, n))
    iu = np.triu_indices(n)
    out[..., iu[0], iu[1]] = p
    out[..., iu[1], iu[0]] = p
    return out


class SymMat:
    """Immutable ``n x n`` symmetric matrix stored as its packed upper triangle."""

    __slots__ = ("n", "packed")

    def __init__(self, packed, n: int | None = None):
        packed = np.array(packed, dtype=float).reshape(-1)
        if n is None:
            n = dim_from_packed(packed.size)
        elif packed.size != packed_size(n):
            raise DimensionMismatch(f"expected {packed_size(n)} entries for n={n}, got {packed.size}")
        if not 1 <= n <= MAX_DIM:
            raise DimensionMismatch(f"dimension {n} outside [1, {MAX_DIM}]")
        packed.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "packed", packed)

    def __setattr__(self, name, value):
        raise AttributeError("SymMat is immutable")

    @classmethod
    def from_dense(cls, a, atol: float = 0.0) -> SymMat:
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if not np.allclose(a, a.T, rtol=0.0, atol=atol):
            raise ValueError("matrix is not symmetric")
        return cls(pack(a), a.shape[0])

    @classmethod
    def identity(cls, n: int) -> SymMat:
        return cls.from_dense(np.eye(n))

    @classmethod
    def diag(cls, values) -> SymMat:
        return cls.from_dense(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def zeros(cls, n: int) -> SymMat:
        return cls(np.zeros(packed_size(n)), n)

    def to_dense(self) -> np.ndarray:
        return unpack(self.packed, self.n)

    def __array__(self, dtype=None, copy=None):
        a = self.to_dense()
        return a if dtype is None else a.astype(dtype)

    def __getitem__(self, ij):
        return self.to_dense()[ij]

    def __add__(self, other):
        if not isinstance(other, SymMat) or other.n != self.n:
            return NotImplemented
        return SymMat(self.packed + other.packed, self.n)

    def __sub__(self, other):
        if not isinstance(other, SymMat) or other.n != self.n:
            return NotImplemented
        return SymMat(self.packed - other.packed, self.n)

    def __mul__(self, scalar):
        return SymMat(self.packed * float(scalar), self.n)

    __rmul__ = __mul__

    def __neg__(self):
        return SymMat(-self.packed, self.n)

    def __eq__(self, other):
        return isinstance(other, SymMat) and other.n == self.n and np.array_equal(other.packed, self.packed)

    def __hash__(self):
        return hash((self.n, self.packed.tobytes()))

    def __repr__(self):
        return f"SymMat(n={self.n}, packed={self.packed.tolist()})"


@dataclass(frozen=True)
class BlockSplit:
    """``a = [[rho, m^T], [m, b]]`` with scalar ``rho``."""

    rho: float
    m: np.ndarray
    b: SymMat

    def assemble(self) -> SymMat:
        n = self.b.n + 1
        a = np.empty((n, n))
        a[0, 0] = self.rho
        a[0, 1:] = self.m
        a[1:, 0] = self.m
        a[1:, 1:] = self.b.to_dense()
        return SymMat.from_dense(a)


def _dense(a) -> np.ndarray:
    if isinstance(a, SymMat):
        return a.to_dense()
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionMismatch(f"expected (..., n, n), got shape {a.shape}")
    return a


def block_split(a: SymMat) -> BlockSplit:
    d = _dense(a)
    return BlockSplit(float(d[0, 0]), d[0, 1:].copy(), SymMat.from_dense(d[1:, 1:]))


def det(a):
    """Determinant of a square matrix or a batch of them.

    Closed-form cofactor expansion for ``n <= 3``; LU with partial pivoting
    (LAPACK) for larger sizes.
    """
    d = _dense(a)
    n = d.shape[-1]
    if n == 1:
        out = d[..., 0, 0].copy()
    elif n == 2:
        out = d[..., 0, 0] * d[..., 1, 1] - d[..., 0, 1] * d[..., 1, 0]
    elif n == 3:
        out = (
            d[..., 0, 0] * (d[..., 1, 1] * d[..., 2, 2] - d[..., 1, 2] * d[..., 2, 1])
            - d[..., 0, 1] * (d[..., 1, 0] * d[..., 2, 2] - d[..., 1, 2] * d[..., 2, 0])
            + d[..., 0, 2] * (d[..., 1, 0] * d[..., 2, 1] - d[..., 1, 1] * d[..., 2, 0])
        )
    else:
        # LAPACK reports an exact zero pivot as a divide warning; the result is 0
        with np.errstate(divide="ignore"):
            out = np.linalg.det(d)
    if isinstance(a, SymMat):
        return float(out)
    return out


def cofactor(a):
    """Cofactor matrix ``C`` with ``C_ij = (-1)^(i+j) det(minor_ij)``.

    Defined for singular input. For symmetric ``a`` the result is symmetric and
    ``a @ C = det(a) I``.
    """
    d = _dense(a)
    n = d.shape[-1]
    if n == 1:
        out = np.ones_like(d)
    else:
        out = np.empty_like(d)
        idx = np.arange(n)
        for i in range(n):
            rows = idx[idx != i]
            for j in range(n):
                cols = idx[idx != j]
                minor = d[..., rows[:, None], cols[None, :]]
                out[..., i, j] = (-1) ** (i + j) * det(minor)
    if isinstance(a, SymMat):
        return SymMat.from_dense(0.5 * (out + out.T))
    return out


def schur_complement(a):
    """Return ``(rho, s)`` with ``rho = a_11`` and ``s = b - m m^T / rho``.

    Raises :class:`NonPositivePivot` when ``a_11 <= 0`` anywhere in a batch.
    """
    d = _dense(a)
    rho = d[..., 0, 0]
    if np.any(rho <= 0):
        raise NonPositivePivot("a_11 must be strictly positive; use a Sigma-type decomposition instead")
    m = d[..., 1:, 0]
    s = d[..., 1:, 1:] - m[..., :, None] * m[..., None, :] / rho[..., None, None]
    if isinstance(a, SymMat):
        return float(rho), SymMat.from_dense(0.5 * (s + s.T))
    return rho.copy(), s


def rank_one(rho, u):
    """``rho * U U^T`` with ``U = (1, u)``."""
    u = np.asarray(u, dtype=float)
    scalar = np.ndim(rho) == 0 and u.ndim == 1
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0):
        raise NegativeDensity("rho must be non-negative")
    big_u = np.concatenate([np.ones(u.shape[:-1] + (1,)), u], axis=-1)
    out = rho_arr[..., None, None] * (big_u[..., :, None] * big_u[..., None, :])
    if scalar:
        return SymMat.from_dense(out)
    return out


def min_eigenvalue(a):
    d = _dense(a)
    out = np.linalg.eigvalsh(d)[..., 0]
    return float(out) if isinstance(a, SymMat) else out


def is_psd(a, tol: float = PSD_TOL):
    """True where the smallest eigenvalue is ``>= -tol * (1 + ||a||_F)``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    d = _dense(a)
    lam = np.linalg.eigvalsh(d)[..., 0]
    ok = lam >= -tol * (1.0 + np.linalg.norm(d, axis=(-2, -1)))
    return bool(ok) if isinstance(a, SymMat) else ok
