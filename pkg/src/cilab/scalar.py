"""Scalar BV applications: convolution bounds and Gagliardo-type products.

The supremum over singular points ``xi`` is taken on the dual lattice (cell
corners) with an FFT correlation, then refined once per axis by golden-section
search. Off-lattice evaluations shift ``f`` by multilinear interpolation so the
kernel is still sampled at half-integer offsets and never at ``r = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage, optimize, signal

from .exceptions import DimensionMismatch, GridMismatch, SingularOnNode
from .grid import Grid, smoothed_indicator
from .report import Report
from .summation import total


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Cell-centred scalar function on ``grid``, zero outside."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.grid.counts:
            raise GridMismatch(f"values shape {vals.shape} does not match grid counts {self.grid.counts}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("scalar values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> ScalarField:
        return cls(grid, func(grid.centers()))

    def scaled(self, factor: float) -> ScalarField:
        return ScalarField(self.grid, factor * self.values)

    def norm(self, q: float) -> float:
        return (total(np.abs(self.values) ** q) * self.grid.cell_volume) ** (1.0 / q)


def ball_indicator(g: Grid, radius: float = 1.0, width_cells: float = 3.0, center=None) -> ScalarField:
    """Smoothed ``chi_{B_R}`` with a ``width_cells``-cell smoothstep ramp."""
    center = np.zeros(g.n) if center is None else np.asarray(center, float)
    r = np.linalg.norm(g.centers() - center, axis=-1)
    return ScalarField(g, smoothed_indicator(r, radius, width_cells * min(g.spacing)))


def total_variation(f: ScalarField) -> float:
    """``sum |grad f| vol`` over cells plus ``|f|`` times face area on the box boundary."""
    g = f.grid
    grad = np.zeros(g.counts + (g.n,))
    for j in range(g.n):
        if g.counts[j] < 2:
            raise GridMismatch("each axis needs at least two cells")
        grad[..., j] = np.gradient(f.values, g.spacing[j], axis=j, edge_order=1)
    tv = total(np.linalg.norm(grad, axis=-1)) * g.cell_volume
    for j in range(g.n):
        area = g.face_area(j)
        tv += (total(np.abs(np.take(f.values, 0, axis=j))) + total(np.abs(np.take(f.values, -1, axis=j)))) * area
    return tv


# --- sphere profiles ----------------------------------------------------------


class SphereProfile:
    """Non-negative function ``g`` on ``S_{n-1}`` with a fixed quadrature rule.

    ``n = 2``: ``nodes`` equispaced angles, trapezoid weights ``2 pi / m``.
    ``n = 3``: Gauss-Legendre in ``cos(theta)`` times trapezoid in ``phi``.
    """

    def __init__(self, n: int, func: Callable[[np.ndarray], np.ndarray], order: int = 64):
        if n not in (2, 3):
            raise DimensionMismatch("sphere profiles are implemented for n = 2 and n = 3")
        self.n = n
        self.func = func
        if n == 2:
            th = 2 * np.pi * np.arange(order) / order
            self.nodes = np.stack([np.cos(th), np.sin(th)], axis=-1)
            self.weights = np.full(order, 2 * np.pi / order)
        else:
            x, w = np.polynomial.legendre.leggauss(order)
            m = 2 * order
            ph = 2 * np.pi * np.arange(m) / m
            s = np.sqrt(1 - x * x)
            self.nodes = np.stack(
                [np.outer(s, np.cos(ph)).ravel(), np.outer(s, np.sin(ph)).ravel(), np.repeat(x, m)], axis=-1
            )
            self.weights = np.repeat(w, m) * (2 * np.pi / m)
        self.values = np.asarray(func(self.nodes), float)
        if np.any(self.values < 0):
            raise ValueError("sphere profile must be non-negative")

    @classmethod
    def constant(cls, n: int, value: float = 1.0, order: int = 64) -> SphereProfile:
        return cls(n, lambda w: np.full(w.shape[:-1], float(value)), order)

    def __call__(self, omega: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(omega), float)

    def norm(self) -> float:
        """``||g||_{L^{n-1}(S_{n-1})}``."""
        p = self.n - 1
        return float(np.sum(self.weights * self.values**p)) ** (1.0 / p)

    def moment(self) -> np.ndarray:
        """``V = int g^{n-1} omega ds``."""
        return np.sum((self.weights * self.values ** (self.n - 1))[:, None] * self.nodes, axis=0)


# --- sup of kernel convolutions ------------------------------------------------


def _kernel_on_offsets(g: Grid, kernel) -> np.ndarray:
    """Kernel sampled at ``(m + 1/2) h`` for ``m = -N..N-1`` per axis."""
    axes = [(np.arange(-c, c) + 0.5) * h for c, h in zip(g.counts, g.spacing)]
    z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return kernel(z)


def dual_lattice_convolution(f: ScalarField, kernel) -> np.ndarray:
    """``S[k] = sum_i f_i K(x_i - c_k) vol`` for every cell corner ``c_k``.

    ``kernel`` maps offsets ``z = x - xi`` (shape ``(..., n)``) to values.
    Result has shape ``counts + 1`` per axis.
    """
    g = f.grid
    kd = _kernel_on_offsets(g, kernel)
    flipped = kd[(slice(None, None, -1),) * g.n]
    full = signal.fftconvolve(f.values, flipped, mode="full")
    sl = tuple(slice(c - 1, 2 * c) for c in g.counts)
    return full[sl] * g.cell_volume


def _direct(f: ScalarField, kernel, xi: np.ndarray) -> float:
    return total(f.values * kernel(f.grid.centers() - xi)) * f.grid.cell_volume


def _shifted_value(padded: np.ndarray, pgrid: Grid, kvals: np.ndarray, shift: np.ndarray) -> float:
    coords = np.indices(padded.shape, dtype=float) + (shift / np.asarray(pgrid.spacing)).reshape((-1,) + (1,) * pgrid.n)
    fs = ndimage.map_coordinates(padded, coords, order=1, mode="constant", cval=0.0)
    return total(fs * kvals) * pgrid.cell_volume


def sup_convolution(f: ScalarField, kernel, refine: bool = True) -> tuple[float, np.ndarray, dict]:
    """``sup_xi int f(x) K(x - xi) dx`` over the dual lattice, then golden-section refined."""
    g = f.grid
    s = dual_lattice_convolution(f, kernel)
    k = np.unravel_index(int(np.argmax(s)), s.shape)
    xi = np.array([g.origin[a] + k[a] * g.spacing[a] for a in range(g.n)])
    best = _direct(f, kernel, xi)
    info = {"lattice_sup": best, "lattice_fft_sup": float(s[k]), "refined": False}
    if refine and best > 0:
        pad = np.pad(f.values, 1)
        pgrid = Grid(tuple(np.asarray(g.origin) - g.spacing), g.spacing, tuple(c + 2 for c in g.counts))
        kvals = kernel(pgrid.centers() - xi)
        shift = np.zeros(g.n)
        for a in range(g.n):
            h = g.spacing[a]

            def neg(sa, a=a):
                sh = shift.copy()
                sh[a] = sa
                return -_shifted_value(pad, pgrid, kvals, sh)

            try:
                res = optimize.minimize_scalar(neg, bracket=(-h, 0.0, h), method="golden", options={"xtol": 1e-4})
            except ValueError:
                continue
            if -res.fun > best and abs(res.x) <= h:
                best = -res.fun
                shift[a] = res.x
                info["refined"] = True
        xi = xi + shift
    info["xi"] = xi
    return best, xi, info


def _positive(f: ScalarField) -> tuple[ScalarField, bool]:
    if np.any(f.values < 0):
        return ScalarField(f.grid, np.abs(f.values)), True
    return f, False


def _conv_report(estimate: str, f: ScalarField, kernel, norm_factor: float, refine: bool, extra: dict) -> Report:
    fp, replaced = _positive(f)
    tv = total_variation(fp)
    if tv == 0:
        return Report(estimate, 0.0, 0.0, grid=f.grid.describe(), extra={"tv": 0.0, "abs_substituted": replaced, **extra})
    lhs, xi, info = sup_convolution(fp, kernel, refine)
    return Report(
        estimate,
        lhs,
        tv * norm_factor,
        grid=f.grid.describe(),
        extra={"tv": tv, "abs_substituted": replaced, "xi": xi, "lattice_sup": info["lattice_sup"], **extra},
    )


def inverse_r(z: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(z, axis=-1)
    return np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), 0.0)


def profile_kernel(g: SphereProfile):
    """``z -> g(-z/|z|)/|z|``: the weight of ``(g_bar * f)(xi)`` at offset ``z = x - xi``."""

    def kern(z):
        r = np.linalg.norm(z, axis=-1)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, g(-z / safe[..., None]) / safe, 0.0)

    return kern


def conv_ratio(f: ScalarField, refine: bool = True) -> Report:
    """``sup_xi int f / |x - xi|`` against ``TV(f)``."""
    return _conv_report("convolution", f, inverse_r, 1.0, refine, {})


def conv_kernel_bound(f: ScalarField, g: SphereProfile, refine: bool = True) -> Report:
    """``sup (g_bar * f)`` against ``TV(f) ||g||_{L^{n-1}(S_{n-1})}``."""
    if g.n != f.grid.n:
        raise DimensionMismatch("profile and field dimensions differ")
    nrm = g.norm()
    return _conv_report("kernel-convolution", f, profile_kernel(g), nrm, refine, {"g_norm": nrm, "V": g.moment()})


# --- Gagliardo -----------------------------------------------------------------


def _axis_key(g: Grid, a: int) -> tuple:
    return (g.origin[a], g.spacing[a], g.counts[a])


def _assemble(fs: Sequence[ScalarField], lead: int) -> tuple[np.ndarray, Grid]:
    """Product ``prod_j |f_j|`` on the full grid.

    ``f_j`` lives on the axes ``(lead axes..., y_1..y_d without y_j)``; ``lead``
    is 0 for the classic form and 1 when a time axis comes first.
    """
    d = len(fs)
    axes: dict[int, tuple] = {}
    for j, f in enumerate(fs):
        own = list(range(lead)) + [lead + i for i in range(d) if i != j]
        if f.grid.n != len(own):
            raise DimensionMismatch(f"f_{j + 1} must have dimension {len(own)}, got {f.grid.n}")
        for a_local, a_full in enumerate(own):
            key = _axis_key(f.grid, a_local)
            if axes.setdefault(a_full, key) != key:
                raise GridMismatch(f"axis {a_full} differs between the factors")
    n = lead + d
    grid = Grid(*(tuple(axes[a][i] for a in range(n)) for i in range(3)))
    prod = np.ones(grid.counts)
    for j, f in enumerate(fs):
        prod = prod * np.expand_dims(np.abs(f.values), axis=lead + j)
    return prod, grid


def gagliardo_classic(fs: Sequence[ScalarField]) -> Report:
    """``||prod f_j(y_hat_j)||_{L^1(R^d)}`` against ``prod ||f_j||_{L^{d-1}}``."""
    d = len(fs)
    if d < 2:
        raise DimensionMismatch("need d >= 2 factors")
    prod, grid = _assemble(fs, 0)
    lhs = total(prod) * grid.cell_volume
    norms = [f.norm(d - 1) for f in fs]
    return Report("gagliardo", lhs, float(np.prod(norms)), grid=grid.describe(), extra={"norms": norms})


def time_kernel(z: np.ndarray) -> np.ndarray:
    """``(t^2 / (t^2 + |y|^2)^(1 + d/2))^(1/d)`` with ``z = (t, y)``."""
    d = z.shape[-1] - 1
    r2 = np.sum(z * z, axis=-1)
    safe = np.where(r2 > 0, r2, 1.0)
    return np.where(r2 > 0, (z[..., 0] ** 2 / safe ** (1 + d / 2)) ** (1.0 / d), 0.0)


def gagliardo_time(fs: Sequence[ScalarField]) -> Report:
    """Time-weighted Gagliardo functional; the kernel is singular at the origin only."""
    d = len(fs)
    if d < 2:
        raise DimensionMismatch("need d >= 2 factors")
    prod, grid = _assemble(fs, 1)
    if grid.on_node(np.zeros(grid.n)):
        raise SingularOnNode("the origin coincides with a cell centre; shift the grid by half a cell")
    lhs = total(time_kernel(grid.centers()) * prod) * grid.cell_volume
    norms = [f.norm(d) for f in fs]
    return Report("gagliardo-time", lhs, float(np.prod(norms)), grid=grid.describe(), extra={"norms": norms})


def dilate_factors(fs: Sequence[ScalarField], lam: float) -> list[ScalarField]:
    """``f_j -> lam^(-1) f_j(x / lam)``: preserves ``||f_j||_{L^d}`` over ``R^d``."""
    return [ScalarField(f.grid.scaled(lam), f.values / lam) for f in fs]


def isoperimetric_ratio(n: int) -> float:
    """``|S_{n-1}|^(-1/(n-1)) / n``: the ball value of the fundamental ratio."""
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    return area ** (-1.0 / (n - 1)) / n
