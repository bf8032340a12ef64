"""Admissible test flows: exact pressureless transport and a Rusanov solver.

Both generators keep the flow compactly supported inside the box, so total
mass is finite and nothing leaves through the boundary.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .exceptions import CharacteristicCrossing, GridMismatch, NonPhysicalState, SupportReachedBoundary
from .gas import VACUUM, FlowField
from .grid import Grid

DENSITY_FLOOR = 1e-14


# --- dust ----------------------------------------------------------------------


def _velocity_at(u0, g: Grid, x: np.ndarray, cell_index: np.ndarray) -> np.ndarray:
    if callable(u0):
        return np.asarray(u0(x), float)
    u0 = np.asarray(u0, float)
    if u0.shape == (g.n,):
        return np.broadcast_to(u0, x.shape).copy()
    if u0.shape != g.counts + (g.n,):
        raise GridMismatch(f"u0 must have shape {g.counts + (g.n,)}")
    return u0.reshape(-1, g.n)[cell_index]


def _jacobian_min(u0, g: Grid, t: float) -> float:
    """Smallest ``det(I + t Du0)`` over the grid (centered differences)."""
    if callable(u0):
        vel = np.asarray(u0(g.centers()), float)
    else:
        vel = np.broadcast_to(np.asarray(u0, float), g.counts + (g.n,))
    jac = np.zeros(g.counts + (g.n, g.n))
    for j in range(g.n):
        jac[..., :, j] = np.gradient(vel, g.spacing[j], axis=j, edge_order=1)
    return float(np.linalg.det(np.eye(g.n) + t * jac).min())


def _deposit(g: Grid, centers: np.ndarray, half: np.ndarray, weights: np.ndarray, t: float) -> np.ndarray:
    """Area-weighted deposition of boxes ``centers +- half`` (``half <= h/2``) onto cells."""
    n = g.n
    o, h = np.asarray(g.origin), np.asarray(g.spacing)
    lo = (centers - half - o) / h
    i0 = np.floor(lo).astype(np.int64)
    width = 2 * half / h
    f0 = np.clip((i0 + 1 - lo) / width, 0.0, 1.0)
    counts = np.asarray(g.counts)
    flat_size = g.size
    strides = np.array([int(np.prod(counts[a + 1 :])) for a in range(n)], dtype=np.int64)
    k = weights.shape[1]
    out = np.zeros((flat_size, k))
    for combo in np.ndindex(*([2] * n)):
        c = np.asarray(combo)
        idx = i0 + c
        frac = np.prod(np.where(c == 0, f0, 1.0 - f0), axis=1)
        live = frac > 0
        if np.any(live & np.any((idx < 0) | (idx >= counts), axis=1)):
            raise SupportReachedBoundary(time=t)
        flat = np.where(live, (np.clip(idx, 0, counts - 1) * strides).sum(axis=1), 0)
        for j in range(k):
            out[:, j] += np.bincount(flat, weights=np.where(live, frac * weights[:, j], 0.0), minlength=flat_size)
    return out.reshape(g.counts + (k,))


def dust_flow(rho0, u0, times, subcells: int = 8) -> FlowField:
    """Pressureless flow ``y -> y + t u0(y)`` by sub-cell push-forward.

    Each cell is split into ``subcells^d`` boxes that are translated along their
    characteristic and deposited by overlap, so mass is conserved to rounding
    and a zero velocity gives a static flow. Mass, momentum and kinetic energy
    are deposited; the cell velocity points along the momentum with the speed
    that reproduces the deposited kinetic energy, so ``E(t)`` is conserved to
    rounding (the momentum average alone would lose the sub-cell variance).

    ``rho0`` is a ScalarField; ``u0`` a constant vector, a cell array or a
    callable on points.
    """
    g = rho0.grid
    n = g.n
    times = np.asarray(times, float)
    h = np.asarray(g.spacing)
    for t in times:
        if t > 0 and _jacobian_min(u0, g, t) <= 0:
            raise CharacteristicCrossing(float(t))
    s = int(subcells)
    sub = (np.arange(s) + 0.5) / s - 0.5
    offs = np.stack(np.meshgrid(*([sub] * n), indexing="ij"), axis=-1).reshape(-1, n) * h
    x = g.centers().reshape(-1, n)
    pts = (x[:, None, :] + offs[None, :, :]).reshape(-1, n)
    cell = np.repeat(np.arange(g.size), offs.shape[0])
    vel = _velocity_at(u0, g, pts, cell)
    mass = np.repeat(np.asarray(rho0.values, float).reshape(-1), offs.shape[0]) / offs.shape[0]
    half = h / (2 * s)
    live = mass > 0
    pts, vel, mass = pts[live], vel[live], mass[live]
    kin = 0.5 * mass * np.sum(vel * vel, axis=1)
    rho, u = [], []
    for t in times:
        dep = _deposit(g, pts + t * vel, half, np.column_stack([mass, mass[:, None] * vel, kin]), float(t))
        r, mom, k = dep[..., 0], dep[..., 1:-1], dep[..., -1]
        pos = r > VACUUM * max(r.max(), 1e-300)
        safe = np.where(pos, r, 1.0)
        # momentum direction, magnitude from the deposited kinetic energy
        mnorm = np.linalg.norm(mom, axis=-1)
        live = pos & (mnorm > 0)
        speed = np.sqrt(2.0 * k / safe)
        unit = np.where(live[..., None], mom / np.where(live, mnorm, 1.0)[..., None], 0.0)
        rho.append(r)
        u.append(unit * speed[..., None])
    z = np.zeros((times.size,) + g.counts)
    return FlowField(times, g, np.array(rho), np.array(u), z, z.copy(), {"generator": "dust", "subcells": s})


# --- finite volumes --------------------------------------------------------------


def _primitives(U: np.ndarray, gamma: float, vac: float):
    rho = U[0]
    d = U.shape[0] - 2
    pos = rho > vac
    safe = np.where(pos, rho, 1.0)
    u = np.where(pos, U[1 : 1 + d] / safe, 0.0)
    kin = 0.5 * rho * np.sum(u * u, axis=0)
    p = np.where(pos, np.maximum((gamma - 1) * (U[-1] - kin), 0.0), 0.0)
    return rho, u, p


def _flux(U, rho, u, p, axis: int):
    d = u.shape[0]
    un = u[axis]
    F = np.empty_like(U)
    F[0] = rho * un
    for i in range(d):
        F[1 + i] = rho * u[i] * un
    F[1 + axis] += p
    F[-1] = (U[-1] + p) * un
    return F


def _interface(U, F, a, axis: int) -> np.ndarray:
    """Rusanov flux on interior faces of ``axis`` padded with zero boundary flux."""
    ax = axis + 1
    n = U.ndim - 1
    lo = [slice(None)] * (n + 1)
    hi = [slice(None)] * (n + 1)
    lo[ax] = slice(None, -1)
    hi[ax] = slice(1, None)
    lo, hi = tuple(lo), tuple(hi)
    alpha = np.maximum(a[lo[1:]], a[hi[1:]])
    fh = 0.5 * (F[lo] + F[hi]) - 0.5 * alpha * (U[hi] - U[lo])
    pad = [(0, 0)] * (n + 1)
    pad[ax] = (1, 1)
    return np.pad(fh, pad)


def _boundary_touched(rho: np.ndarray, vac: float) -> bool:
    for ax in range(rho.ndim):
        if np.take(rho, 0, axis=ax).max() > vac or np.take(rho, -1, axis=ax).max() > vac:
            return True
    return False


def fv_solve(
    g: Grid,
    rho0: np.ndarray,
    u0: np.ndarray,
    p0: np.ndarray,
    gamma: float = 1.4,
    cfl: float = 0.5,
    t_end: float = 0.05,
    outputs: int = 50,
    max_steps: int = 1_000_000,
) -> FlowField:
    """Perfect-gas Euler equations by first-order Rusanov finite volumes.

    Closed box, forward Euler with a CFL-limited step that lands exactly on the
    ``outputs + 1`` equispaced snapshot times. Cells with
    ``rho <= 1e-12 max rho`` are vacuum: their velocity and pressure are 0 in
    flux and wave-speed evaluation (conserved values are never modified).
    """
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    if not 0 < cfl <= 0.5:
        raise ValueError("cfl must lie in (0, 0.5]")
    if g.n not in (1, 2):
        raise ValueError("the solver supports d = 1 and d = 2")
    d = g.n
    rho0 = np.asarray(rho0, float)
    u0 = np.asarray(u0, float).reshape(g.counts + (d,))
    p0 = np.asarray(p0, float)
    if np.any(rho0 < 0) or np.any(p0 < 0):
        raise NonPhysicalState(0, "negative initial density or pressure")
    rmax = float(rho0.max())
    vac, floor = VACUUM * rmax, DENSITY_FLOOR * rmax
    if _boundary_touched(rho0, vac):
        raise SupportReachedBoundary(step=0, time=0.0)
    U = np.empty((d + 2,) + g.counts)
    U[0] = rho0
    U[1 : 1 + d] = np.moveaxis(rho0[..., None] * u0, -1, 0)
    U[-1] = 0.5 * rho0 * np.sum(u0 * u0, axis=-1) + p0 / (gamma - 1)
    touts = np.linspace(0.0, t_end, outputs + 1)
    snaps = [U.copy()]
    t, k, steps = 0.0, 1, 0
    h = np.asarray(g.spacing)
    while k <= outputs:
        rho, u, p = _primitives(U, gamma, vac)
        c = np.sqrt(gamma * p / np.maximum(rho, floor))
        speeds = [np.abs(u[a]) + c for a in range(d)]
        rate = sum(float(s.max()) / h[a] for a, s in enumerate(speeds))
        dt = cfl / rate if rate > 0 else touts[k] - t
        hit = t + dt >= touts[k]
        if hit:
            dt = touts[k] - t
        dU = np.zeros_like(U)
        for a in range(d):
            fh = _interface(U, _flux(U, rho, u, p, a), speeds[a], a)
            sl_hi = [slice(None)] * (d + 1)
            sl_lo = [slice(None)] * (d + 1)
            sl_hi[a + 1] = slice(1, None)
            sl_lo[a + 1] = slice(None, -1)
            dU -= dt / h[a] * (fh[tuple(sl_hi)] - fh[tuple(sl_lo)])
        U = U + dU
        steps += 1
        t = touts[k] if hit else t + dt
        if U[0].min() < 0:
            raise NonPhysicalState(steps, f"negative density {U[0].min():.3e}")
        if _boundary_touched(U[0], vac):
            raise SupportReachedBoundary(step=steps, time=t)
        if hit:
            snaps.append(U.copy())
            k += 1
        if steps >= max_steps:
            raise NonPhysicalState(steps, "step budget exhausted")
    S = np.array(snaps)
    rho_s, u_s, p_s = [], [], []
    for Uk in S:
        r, u, p = _primitives(Uk, gamma, vac)
        rho_s.append(r)
        u_s.append(np.moveaxis(u, 0, -1))
        p_s.append(p)
    rho_s, u_s, p_s = np.array(rho_s), np.array(u_s), np.array(p_s)
    pos = rho_s > vac
    e_s = np.where(pos, p_s / ((gamma - 1) * np.where(pos, rho_s, 1.0)), 0.0)
    meta = {
        "generator": "fv",
        "gamma": gamma,
        "cfl": cfl,
        "steps": steps,
        "momentum": [float(S[k, 1 : 1 + d].sum()) * g.cell_volume for k in range(S.shape[0])],
        "conserved_energy": [float(S[k, -1].sum()) * g.cell_volume for k in range(S.shape[0])],
    }
    return FlowField(touts, g, rho_s, u_s, p_s, e_s, meta)


# --- initial data ------------------------------------------------------------------


def sod_in_vacuum(cells: int = 1024, half_width: float = 1.0, support: float = 0.25):
    """Sod states (1, 0, 1) | (0.125, 0, 0.1) on ``|x| < support``, vacuum elsewhere."""
    g = Grid.cube(1, half_width, cells)
    x = g.axis(0)
    inside = np.abs(x) < support
    rho = np.where(inside, np.where(x < 0, 1.0, 0.125), 0.0)
    p = np.where(inside, np.where(x < 0, 1.0, 0.1), 0.0)
    return g, rho, np.zeros((cells, 1)), p


def gaussian_bump(g: Grid, amplitude: float = 1.0, sigma: float = 0.1, support: float = 0.4, pressure: float = 1.0):
    """Compactly supported bump ``amplitude * exp(-r^2 / 2 sigma^2)`` cut at ``support``, at rest."""
    r = np.linalg.norm(g.centers(), axis=-1)
    rho = np.where(r < support, amplitude * np.exp(-0.5 * (r / sigma) ** 2), 0.0)
    p = pressure * rho / max(amplitude, 1e-300)
    return rho, np.zeros(g.counts + (g.n,)), p


def linear_velocity(alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: alpha * np.asarray(x, float)


def linear_dust_density(rho0: Callable[[np.ndarray], np.ndarray], alpha: float, t: float, x: np.ndarray) -> np.ndarray:
    """Exact density for ``u0(y) = alpha y``: ``rho0(x / s) / s^d`` with ``s = 1 + alpha t``."""
    s = 1 + alpha * t
    d = x.shape[-1]
    return rho0(x / s) / s**d


def gaussian(sigma: float, center=0.0) -> Callable[[np.ndarray], np.ndarray]:
    def f(x):
        x = np.asarray(x, float) - center
        return np.exp(-0.5 * np.sum(x * x, axis=-1) / sigma**2)

    return f


def cutoff_gaussian(sigma: float, support: float) -> Callable[[np.ndarray], np.ndarray]:
    g = gaussian(sigma)
    return lambda x: np.where(np.linalg.norm(x, axis=-1) < support, g(x), 0.0)


def run_config(cfg: dict) -> FlowField:
    """Build a flow from a flat key-value configuration (see :func:`cilab.io.parse_config`)."""
    from .scalar import ScalarField

    kind = cfg.get("kind", "fv")
    dim = int(cfg.get("dim", 1))
    cells = int(cfg.get("cells", 256))
    half = float(cfg.get("half_width", 1.0))
    t_end = float(cfg.get("t_end", 0.05))
    outputs = int(cfg.get("outputs", 50))
    if kind == "fv":
        init = cfg.get("init", "sod")
        if init == "sod":
            if dim != 1:
                raise ValueError("init = sod needs dim = 1")
            g, rho, u, p = sod_in_vacuum(cells, half, float(cfg.get("support", 0.25)))
        elif init == "bump":
            g = Grid.cube(dim, half, cells)
            rho, u, p = gaussian_bump(g, float(cfg.get("amplitude", 1.0)), float(cfg.get("sigma", 0.1)),
                                      float(cfg.get("support", 0.4)), float(cfg.get("pressure", 1.0)))
        else:
            raise ValueError(f"unknown init {init!r}")
        return fv_solve(g, rho, u, p, float(cfg.get("gamma", 1.4)), float(cfg.get("cfl", 0.5)), t_end, outputs)
    if kind == "dust":
        g = Grid.cube(dim, half, cells)
        sigma = float(cfg.get("sigma", 0.15))
        support = float(cfg.get("support", 4 * sigma))
        rho0 = ScalarField(g, cutoff_gaussian(sigma, support)(g.centers()))
        if "alpha" in cfg:
            u0 = linear_velocity(float(cfg["alpha"]))
        else:
            vel = cfg.get("velocity", 0.0)
            u0 = np.broadcast_to(np.asarray(vel, float), (dim,)).copy()
        times = np.linspace(0.0, t_end, outputs + 1)
        return dust_flow(rho0, u0, times, int(cfg.get("subcells", 8)))
    raise ValueError(f"unknown flow kind {kind!r}")


def exact_shift_velocity(g: Grid, times: np.ndarray, cells: int = 1) -> float:
    """Boost speed that moves the frame by ``cells`` cells per snapshot interval."""
    dt = float(np.diff(times)[0])
    return cells * g.spacing[0] / dt if math.isfinite(dt) and dt > 0 else 0.0
