"""Structured grids, tensor fields with zero extension, and their Divergence.

A :class:`TensorField` stores one symmetric ``n x n`` matrix per cell centre of
a box in ``R^n``; outside the box the field is zero. Its Divergence is a
vector measure with three kinds of atoms (see :class:`DivMeasure`):

* interior cells -- centered differences of the rows times the cell volume;
* boundary sheets -- the jump ``A n`` across the box faces created by the
  zero extension, times the face area;
* cores -- balls around declared singular points (extreme tensors) that are
  lumped into a single atom carrying the net divergence of the ball.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import symmat
from .exceptions import GridMismatch, NotPSDField, SingularOnNode
from .summation import total

MAX_CELLS = 1 << 25


@dataclass(frozen=True)
class Grid:
    """Cell-centred box grid: cell ``i`` along axis ``a`` is centred at
    ``origin[a] + (i + 1/2) * spacing[a]``."""

    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "spacing", tuple(float(v) for v in self.spacing))
        object.__setattr__(self, "counts", tuple(int(v) for v in self.counts))
        if not (len(self.origin) == len(self.spacing) == len(self.counts)):
            raise GridMismatch("origin, spacing and counts must have equal length")
        if any(h <= 0 for h in self.spacing):
            raise ValueError("spacing must be positive")
        if any(c < 1 for c in self.counts):
            raise ValueError("counts must be positive")
        if self.size > MAX_CELLS:
            raise ValueError(f"{self.size} cells exceed the budget of {MAX_CELLS}")

    @classmethod
    def box(cls, lo, hi, counts) -> Grid:
        lo = np.broadcast_to(np.asarray(lo, float), np.shape(counts))
        hi = np.broadcast_to(np.asarray(hi, float), np.shape(counts))
        counts = np.asarray(counts, int)
        return cls(tuple(lo), tuple((hi - lo) / counts), tuple(counts))

    @classmethod
    def cube(cls, n: int, half_width: float, cells: int) -> Grid:
        """``[-L, L]^n`` with ``cells`` per axis."""
        return cls.box([-half_width] * n, [half_width] * n, [cells] * n)

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def upper(self) -> tuple[float, ...]:
        return tuple(o + h * c for o, h, c in zip(self.origin, self.spacing, self.counts))

    def axis(self, a: int) -> np.ndarray:
        return self.origin[a] + (np.arange(self.counts[a]) + 0.5) * self.spacing[a]

    def corner_axis(self, a: int) -> np.ndarray:
        return self.origin[a] + np.arange(self.counts[a] + 1) * self.spacing[a]

    def centers(self) -> np.ndarray:
        """Cell centres, shape ``counts + (n,)``."""
        return np.stack(np.meshgrid(*[self.axis(a) for a in range(self.n)], indexing="ij"), axis=-1)

    def face_area(self, a: int) -> float:
        return self.cell_volume / self.spacing[a]

    def snap_to_dual(self, point) -> np.ndarray:
        """Nearest cell corner, so cell-centred quadrature never hits the point."""
        point = np.asarray(point, float)
        o, h = np.asarray(self.origin), np.asarray(self.spacing)
        return o + np.round((point - o) / h) * h

    def on_node(self, point, rtol: float = 1e-12) -> bool:
        point = np.asarray(point, float)
        o, h = np.asarray(self.origin), np.asarray(self.spacing)
        q = (point - o) / h - 0.5
        return bool(np.all(np.abs(q - np.round(q)) <= rtol * np.maximum(1.0, np.abs(q))))

    def scaled(self, factors) -> Grid:
        f = np.broadcast_to(np.asarray(factors, float), (self.n,))
        return Grid(tuple(np.asarray(self.origin) * f), tuple(np.asarray(self.spacing) * f), self.counts)

    def describe(self) -> str:
        cnt = "x".join(str(c) for c in self.counts)
        sp = ",".join(repr(h) for h in self.spacing)
        org = ",".join(repr(o) for o in self.origin)
        return f"n={self.n};counts={cnt};spacing={sp};origin={org}"


@dataclass(frozen=True)
class Core:
    """Ball around a singular point whose divergence is lumped into one atom."""

    center: tuple[float, ...]
    radius: float


@dataclass(frozen=True, eq=False)
class TensorField:
    """Cell-centred symmetric tensor field; ``values`` has shape ``counts + (n, n)``."""

    grid: Grid
    values: np.ndarray
    psd: bool = False
    cores: tuple[Core, ...] = ()
    psd_tol: float = symmat.PSD_TOL

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        n = self.grid.n
        if vals.shape != self.grid.counts + (n, n):
            raise GridMismatch(f"values shape {vals.shape} does not match grid {self.grid.counts}+({n},{n})")
        if not np.all(np.isfinite(vals)):
            raise ValueError("tensor values must be finite")
        vals = 0.5 * (vals + np.swapaxes(vals, -1, -2))
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        if self.psd:
            ok = symmat.is_psd(vals, self.psd_tol)
            if not np.all(ok):
                bad = tuple(int(i) for i in np.argwhere(~ok)[0])
                raise NotPSDField(f"cell {bad} is not positive semi-definite")

    @property
    def n(self) -> int:
        return self.grid.n

    @classmethod
    def from_scalar(cls, grid: Grid, f: np.ndarray, psd: bool | None = None) -> TensorField:
        """``f * I_n``."""
        f = np.asarray(f, float)
        vals = f[..., None, None] * np.eye(grid.n)
        if psd is None:
            psd = bool(np.all(f >= 0))
        return cls(grid, vals, psd=psd)

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray], psd: bool = True) -> TensorField:
        return cls(grid, func(grid.centers()), psd=psd)

    def require_psd(self) -> None:
        if not self.psd:
            raise NotPSDField("operation requires a field flagged positive semi-definite")

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.grid.describe().encode())
        h.update(np.ascontiguousarray(self.values).tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class DivMeasure:
    """Discrete Divergence of a tensor field as a finite collection of vector atoms.

    ``interior``: ``counts + (n,)`` cell atoms (cells inside a core are zeroed);
    ``sheets``: ``{(axis, side): face_counts + (n,)}`` with ``side`` 0 (low) or 1 (high);
    ``cores``: ``(k, n)`` lumped atoms.
    """

    interior: np.ndarray
    sheets: dict
    cores: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def _atoms(self) -> list[np.ndarray]:
        n = self.interior.shape[-1]
        out = [self.interior.reshape(-1, n)]
        out += [s.reshape(-1, n) for s in self.sheets.values()]
        if self.cores.size:
            out.append(self.cores.reshape(-1, n))
        return out

    def interior_mass(self) -> float:
        return total(np.linalg.norm(self.interior, axis=-1))

    def sheet_mass(self) -> float:
        return sum(total(np.linalg.norm(s, axis=-1)) for s in self.sheets.values())

    def core_mass(self) -> float:
        return total(np.linalg.norm(self.cores, axis=-1)) if self.cores.size else 0.0

    def total_mass(self) -> float:
        """Mass of the Euclidean norm of the vector measure."""
        return self.interior_mass() + self.sheet_mass() + self.core_mass()

    def row_masses(self) -> np.ndarray:
        """Mass of each component measure ``(Div A)_i``."""
        return np.array([sum(total(np.abs(a[:, i])) for a in self._atoms()) for i in range(self.interior.shape[-1])])

    def directional_mass(self, e) -> float:
        """Mass of ``div(A e) = e . Div A``."""
        e = np.asarray(e, float)
        return sum(total(np.abs(a @ e)) for a in self._atoms())

    def net(self) -> np.ndarray:
        return sum(a.sum(axis=0) for a in self._atoms())


def divergence(a: TensorField) -> DivMeasure:
    """Discrete Divergence measure of the zero-extended field.

    Interior: ``sum_j d_j a_ij`` by second-order centered differences (first
    order one-sided at the box edge) times the cell volume. Sheets: ``+A e_j``
    on low faces and ``-A e_j`` on high faces times the face area.
    """
    g = a.grid
    n = g.n
    vol = g.cell_volume
    interior = np.zeros(g.counts + (n,))
    for j in range(n):
        if g.counts[j] < 2:
            raise GridMismatch("each axis needs at least two cells")
        interior += np.gradient(a.values[..., :, j], g.spacing[j], axis=j, edge_order=1)
    interior *= vol
    sheets = {}
    for j in range(n):
        area = g.face_area(j)
        low = np.take(a.values[..., :, j], 0, axis=j)
        high = np.take(a.values[..., :, j], g.counts[j] - 1, axis=j)
        sheets[(j, 0)] = low * area
        sheets[(j, 1)] = -high * area
    cores = np.zeros((len(a.cores), n))
    if a.cores:
        x = g.centers()
        taken = np.zeros(g.counts, bool)
        for k, core in enumerate(a.cores):
            mask = (np.linalg.norm(x - np.asarray(core.center), axis=-1) < core.radius) & ~taken
            cores[k] = interior[mask].sum(axis=0)
            interior[mask] = 0.0
            taken |= mask
    return DivMeasure(interior, sheets, cores)


def check_same_grid(fields: Sequence) -> Grid:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise GridMismatch("all fields must live on the same grid")
    return g


# --- kernels and extreme tensors ------------------------------------------


def smoothstep_cutoff(r, radius: float, width: float = 1.0):
    """1 on ``[0, R]``, 0 beyond ``R + width``, C1 cubic smoothstep in between."""
    s = np.clip((np.asarray(r, float) - radius) / width, 0.0, 1.0)
    return 1.0 - s * s * (3.0 - 2.0 * s)


KERNEL_KINDS = ("anisotropic_schur", "plain_inverse_r", "sphere_profile")


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Weight kernel centred at ``xi``.

    ``anisotropic_schur``: ``((w.z)^2 / (a (w.z)^2 + b |z_perp|^2)^((n+1)/2))^(1/(n-1))``
    with ``z = x - xi`` and ``w = omega``; ``a = b = 1`` gives the isotropic
    ``((w.z)^2 / |z|^(n+1))^(1/(n-1))``.

    ``plain_inverse_r``: ``1 / |z|``.

    ``sphere_profile``: ``g(z/|z|) / |z|`` for a non-negative ``profile``.

    ``radius`` is the cut-off radius ``R`` for extreme tensors built from this
    kernel; ``core_radius`` (default ``R / 2``) is the lumped ball around ``xi``.
    """

    kind: str
    xi: tuple[float, ...]
    omega: tuple[float, ...] | None = None
    weights: tuple[float, float] = (1.0, 1.0)
    radius: float = 1.0
    profile: object = None
    core_radius: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        object.__setattr__(self, "xi", tuple(float(v) for v in self.xi))
        n = len(self.xi)
        omega = self.omega
        if omega is None:
            omega = (1.0,) + (0.0,) * (n - 1)
        omega = np.asarray(omega, float)
        if omega.shape != (n,) or abs(np.linalg.norm(omega) - 1.0) > 1e-12:
            raise ValueError("omega must be a unit vector of the same dimension as xi")
        object.__setattr__(self, "omega", tuple(omega))
        a, b = self.weights
        if a <= 0 or b <= 0:
            raise ValueError("anisotropy weights must be positive")
        if self.radius <= 0:
            raise ValueError("cut-off radius must be positive")
        if self.kind == "sphere_profile" and self.profile is None:
            raise ValueError("sphere_profile kernels need a profile")

    @property
    def n(self) -> int:
        return len(self.xi)

    def with_xi(self, xi) -> KernelSpec:
        return KernelSpec(self.kind, tuple(xi), self.omega, self.weights, self.radius, self.profile, self.core_radius)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        """Kernel value at offsets ``z = x - xi`` (shape ``(..., n)``); 0 at ``z = 0``."""
        z = np.asarray(z, float)
        n = z.shape[-1]
        r = np.linalg.norm(z, axis=-1)
        safe = np.where(r > 0, r, 1.0)
        if self.kind == "plain_inverse_r":
            out = 1.0 / safe
        elif self.kind == "sphere_profile":
            out = np.asarray(self.profile(z / safe[..., None])) / safe
        else:
            a, b = self.weights
            w = np.asarray(self.omega)
            par = z @ w
            perp2 = np.maximum(r * r - par * par, 0.0)
            den = np.where(r > 0, a * par * par + b * perp2, 1.0)
            out = (par * par / den ** ((n + 1) / 2.0)) ** (1.0 / (n - 1))
        return np.where(r > 0, out, 0.0)


def extreme_tensor(g: Grid, k: KernelSpec) -> TensorField:
    """``F = phi(r) g(x/r)^(n-1) x (x) x / r^(n+1)`` around ``k.xi``.

    ``g`` is ``k.profile`` for ``sphere_profile`` kernels and 1 otherwise;
    ``phi`` is :func:`smoothstep_cutoff` with radius ``k.radius``.
    """
    if k.n != g.n:
        raise GridMismatch("kernel and grid dimensions differ")
    if g.on_node(k.xi):
        raise SingularOnNode(f"singular point {k.xi} coincides with a cell centre")
    n = g.n
    x = g.centers() - np.asarray(k.xi)
    r = np.linalg.norm(x, axis=-1)
    weight = smoothstep_cutoff(r, k.radius) / r ** (n + 1)
    if k.kind == "sphere_profile":
        weight = weight * np.asarray(k.profile(x / r[..., None])) ** (n - 1)
    vals = weight[..., None, None] * x[..., :, None] * x[..., None, :]
    core_r = k.core_radius if k.core_radius is not None else 0.5 * k.radius
    return TensorField(g, vals, psd=True, cores=(Core(k.xi, core_r),))


# --- test-family builders ---------------------------------------------------


def smoothed_indicator(r, radius: float, width: float):
    """Radial profile: 1 inside ``radius - width/2``, 0 outside ``radius + width/2``.

    ``width = 0`` gives the sharp indicator of ``r < radius``.
    """
    if width <= 0:
        return (np.asarray(r, float) < radius).astype(float)
    s = np.clip((np.asarray(r, float) - (radius - 0.5 * width)) / width, 0.0, 1.0)
    return 1.0 - s * s * (3.0 - 2.0 * s)


def ball_field(g: Grid, radius: float = 1.0, width_cells: float = 3.0, center=None, axes=None) -> TensorField:
    """Smoothed ``chi_B * I_n``; ``axes`` stretches the ball into an ellipsoid."""
    center = np.zeros(g.n) if center is None else np.asarray(center, float)
    axes = np.ones(g.n) if axes is None else np.asarray(axes, float)
    x = (g.centers() - center) / axes
    r = np.linalg.norm(x, axis=-1)
    f = smoothed_indicator(r, radius, width_cells * min(g.spacing))
    return TensorField.from_scalar(g, f, psd=True)
