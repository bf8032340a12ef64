"""Integral inequalities for positive semi-definite Div-BV tensor fields.

Each ``verify_*`` function returns a :class:`~cilab.report.Report` holding the
left-hand side, the right-hand-side scale (the bound without its unknown
dimensional constant) and their ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import mixed, symmat
from .exceptions import DegenerateDirection, GridMismatch, NotPSDField, ZeroDivMass, ZeroRowMass
from .grid import Grid, KernelSpec, TensorField, check_same_grid, divergence, smoothstep_cutoff
from .report import Report, clamped
from .summation import total


def det_root_density(a: TensorField, power: float | None = None) -> tuple[np.ndarray, int]:
    """``max(det A, 0)^power`` per cell (default power ``1/(n-1)``) and the number of clamped cells."""
    n = a.n
    power = 1.0 / (n - 1) if power is None else power
    d = symmat.det(a.values)
    neg = int(np.count_nonzero(d < 0))
    return np.clip(d, 0.0, None) ** power, neg


def integral_det_root(a: TensorField) -> float:
    """Cell-centred quadrature of ``(det A)^(1/(n-1))``."""
    a.require_psd()
    dens, _ = det_root_density(a)
    return total(dens) * a.grid.cell_volume


def _status(clamped_cells: int) -> str:
    return clamped(clamped_cells) if clamped_cells else "ok"


def verify_fund(a: TensorField, fingerprint: str | None = None) -> Report:
    """``int (det A)^(1/(n-1))`` against ``||Div A||^(n/(n-1))``."""
    a.require_psd()
    n = a.n
    dens, neg = det_root_density(a)
    lhs = total(dens) * a.grid.cell_volume
    div = divergence(a)
    mass = div.total_mass()
    rhs = mass ** (n / (n - 1))
    if rhs == 0 and lhs > 0:
        raise ZeroDivMass("zero divergence mass with a non-zero determinant integral")
    return Report(
        "fundamental",
        lhs,
        rhs,
        status=_status(neg),
        fingerprint=fingerprint or a.fingerprint(),
        grid=a.grid.describe(),
        extra={
            "div_mass": mass,
            "interior_mass": div.interior_mass(),
            "sheet_mass": div.sheet_mass(),
            "core_mass": div.core_mass(),
        },
    )


def rescale_rows(a: TensorField, mu) -> TensorField:
    """Field under ``x'_j = mu_j x_j``, ``a'_ij = mu_i mu_j a_ij``."""
    mu = np.broadcast_to(np.asarray(mu, float), (a.n,))
    if np.any(mu <= 0):
        raise ValueError("scaling factors must be positive")
    vals = a.values * mu[:, None] * mu[None, :]
    cores = ()
    if a.cores:
        if not np.allclose(mu, mu[0]):
            raise ValueError("anisotropic rescaling of a field with lumped cores is not supported")
        cores = tuple(type(c)(tuple(np.asarray(c.center) * mu[0]), c.radius * mu[0]) for c in a.cores)
    return TensorField(a.grid.scaled(mu), vals, psd=a.psd, cores=cores)


def dilate(a: TensorField, lam: float) -> TensorField:
    """Same values on the grid dilated by ``lam``."""
    cores = tuple(type(c)(tuple(np.asarray(c.center) * lam), c.radius * lam) for c in a.cores)
    return TensorField(a.grid.scaled(lam), a.values, psd=a.psd, cores=cores)


def verify_prod(a: TensorField, fingerprint: str | None = None) -> Report:
    """Per-row refinement: rhs scale ``(prod_i ||(Div A)_i||)^(1/(n-1))``.

    ``extra`` records the optimal row scaling ``mu_i = 1/||(Div A)_i||`` and the
    consistency ``n^(n/(n-1)) (prod m_i)^(1/(n-1)) <= (sum m_i)^(n/(n-1))``.
    """
    a.require_psd()
    n = a.n
    div = divergence(a)
    rows = div.row_masses()
    for i, m in enumerate(rows):
        if m <= 0:
            raise ZeroRowMass(i)
    dens, neg = det_root_density(a)
    lhs = total(dens) * a.grid.cell_volume
    rhs = float(np.prod(rows)) ** (1.0 / (n - 1))
    factor = n ** (n / (n - 1))
    rhs_sum = float(rows.sum()) ** (n / (n - 1))
    return Report(
        "row-product",
        lhs,
        rhs,
        status=_status(neg),
        fingerprint=fingerprint or a.fingerprint(),
        grid=a.grid.describe(),
        extra={
            "row_masses": rows,
            "mu": 1.0 / rows,
            "rhs_with_factor": factor * rhs,
            "rhs_row_sum": rhs_sum,
            "rhs_fundamental": div.total_mass() ** (n / (n - 1)),
            "amgm_consistent": bool(factor * rhs <= rhs_sum * (1 + 1e-12)),
        },
    )


@dataclass(frozen=True)
class DirectionalAverage:
    rhs_scale: float
    estimate: float
    stderr: float
    log_mean: float
    log_stderr: float
    used: int
    skipped: int


def log_avg_direction(a: TensorField, samples: int, seed: int = 0) -> DirectionalAverage:
    """Monte-Carlo ``exp(mean over e in S_{n-1} of log ||div(A e)||)``.

    ``rhs_scale`` is ``(n * estimate)^(n/(n-1))``. Directions with zero mass are
    skipped and counted.
    """
    a.require_psd()
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n = a.n
    rng = np.random.default_rng(seed)
    e = rng.standard_normal((samples, n))
    e /= np.linalg.norm(e, axis=1, keepdims=True)
    div = divergence(a)
    masses = np.array([div.directional_mass(v) for v in e])
    good = masses > 0
    logs = np.log(masses[good])
    if logs.size == 0:
        return DirectionalAverage(0.0, 0.0, math.nan, -math.inf, math.nan, 0, samples)
    mean = float(logs.mean())
    se = float(logs.std(ddof=1) / math.sqrt(logs.size)) if logs.size > 1 else math.nan
    est = math.exp(mean)
    return DirectionalAverage(
        rhs_scale=(n * est) ** (n / (n - 1)),
        estimate=est,
        stderr=est * se,
        log_mean=mean,
        log_stderr=se,
        used=int(logs.size),
        skipped=int(samples - logs.size),
    )


def mixed_density(fields: Sequence[TensorField]) -> tuple[np.ndarray, int]:
    """``max(D_n(A_1..A_n), 0)^(1/(n-1))`` per cell."""
    n = fields[0].n
    if len(fields) != n:
        raise GridMismatch(f"need {n} fields, got {len(fields)}")
    if all(f.values is fields[0].values for f in fields):
        d = symmat.det(fields[0].values)
    else:
        d = mixed.mixed_det([f.values for f in fields])
    neg = int(np.count_nonzero(d < 0))
    return np.clip(d, 0.0, None) ** (1.0 / (n - 1)), neg


def verify_mulest(fields: Sequence[TensorField], fingerprint: str | None = None) -> Report:
    """``int D_n(A_1..A_n)^(1/(n-1))`` against ``(prod ||Div A_j||)^(1/(n-1))``."""
    g = check_same_grid(fields)
    for k, f in enumerate(fields):
        if not f.psd:
            raise NotPSDField(f"field {k} is not flagged positive semi-definite")
    n = g.n
    dens, neg = mixed_density(fields)
    lhs = total(dens) * g.cell_volume
    masses = [divergence(f).total_mass() for f in fields]
    rhs = float(np.prod(masses)) ** (1.0 / (n - 1))
    fp = fingerprint or "+".join(f.fingerprint()[:8] for f in fields)
    return Report("mixed", lhs, rhs, status=_status(neg), fingerprint=fp, grid=g.describe(), extra={"div_masses": masses})


def _kernel_weights(g: Grid, k: KernelSpec, snap: bool) -> tuple[np.ndarray, np.ndarray]:
    xi = g.snap_to_dual(k.xi) if snap else np.asarray(k.xi)
    return k(g.centers() - xi), xi


def schur_kernel_functional(a: TensorField, k: KernelSpec, snap: bool = True) -> float:
    """``int K(x - xi) (det A / w^T A w)^(1/(n-1)) dx`` for an ``anisotropic_schur`` kernel.

    ``xi`` is snapped to the nearest cell corner unless ``snap`` is false.
    With ``omega = e_1`` the quotient is the determinant of the Schur complement
    of ``a_11``.
    """
    a.require_psd()
    if k.kind != "anisotropic_schur":
        raise ValueError("schur_kernel_functional needs an anisotropic_schur kernel")
    n = a.n
    d = symmat.det(a.values)
    w = np.asarray(k.omega)
    q = np.einsum("i,...ij,j->...", w, a.values, w)
    scale = np.linalg.norm(a.values, axis=(-2, -1))
    live = d > 1e-13 * scale**n
    if np.any(live & (q <= 0)):
        raise DegenerateDirection("w^T A w vanishes where det A > 0")
    quot = np.where(live, np.clip(d, 0.0, None) / np.where(live, q, 1.0), 0.0)
    weights, _ = _kernel_weights(a.grid, k, snap)
    return total(weights * quot ** (1.0 / (n - 1))) * a.grid.cell_volume


def schur_kernel_sup(a: TensorField, k: KernelSpec, candidates) -> tuple[float, np.ndarray]:
    """Largest :func:`schur_kernel_functional` over candidate singular points."""
    best, arg = -math.inf, None
    for xi in np.atleast_2d(candidates):
        v = schur_kernel_functional(a, k.with_xi(xi))
        if v > best:
            best, arg = v, a.grid.snap_to_dual(xi)
    return best, arg


def sigma_schur_functional(k_field: TensorField, sigma, kern: KernelSpec, snap: bool = True) -> float:
    """``int (f_11 det Sigma)^(1/(n-1)) dx`` for ``A = K + diag(0, Sigma)``.

    ``f_11`` is the (1,1) entry of the extreme tensor built from ``kern``
    (weight ``K(x - xi)^(n-1)`` times the smoothstep cut-off at ``kern.radius``).
    """
    k_field.require_psd()
    g = k_field.grid
    n = g.n
    sigma = np.asarray(sigma, float)
    if sigma.shape != g.counts + (n - 1, n - 1):
        raise GridMismatch(f"sigma must have shape {g.counts + (n - 1, n - 1)}")
    if n > 1 and not np.all(symmat.is_psd(sigma)):
        raise NotPSDField("sigma is not positive semi-definite")
    dsig = np.clip(symmat.det(sigma), 0.0, None) if n > 1 else np.ones(g.counts)
    weights, xi = _kernel_weights(g, kern, snap)
    phi = smoothstep_cutoff(np.linalg.norm(g.centers() - xi, axis=-1), kern.radius)
    return total(weights * phi ** (1.0 / (n - 1)) * dsig ** (1.0 / (n - 1))) * g.cell_volume
