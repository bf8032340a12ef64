"""Space-time functionals of inviscid gas flows.

A :class:`FlowField` holds snapshots ``(rho, u, p, e)`` on a spatial grid.
Space integrals use the cell-centred midpoint rule; time integrals use the
trapezoid rule over the snapshot times. Spatial shifts and kernel singular
points are snapped to the grid so every quadrature stays on the lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import symmat
from .exceptions import GridMismatch, NegativeState, NotAdmissible, NotPSDField, ZeroEnergy
from .grid import Grid, TensorField
from .report import Report, clamped
from .summation import total

VACUUM = 1e-12
ADMISSIBILITY_TOL = 1e-10
# |det Sigma| below this multiple of (tr Sigma)^d is rounding noise of a singular matrix
DEFECT_DET_RTOL = 1e-12


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class FlowField:
    """Snapshots of a gas state; index 0 of every array is the time index.

    ``rho``, ``p``, ``e``: ``(K+1,) + counts``; ``u``: ``(K+1,) + counts + (d,)``.
    Velocities are zeroed where ``rho <= VACUUM * max(rho)``.
    """

    times: np.ndarray
    grid: Grid
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    e: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.atleast_1d(np.asarray(self.times, float))
        if times.ndim != 1 or np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        shape = (times.size,) + self.grid.counts
        d = self.grid.n
        rho, p, e = (np.asarray(a, float) for a in (self.rho, self.p, self.e))
        u = np.asarray(self.u, float)
        for name, arr, want in (("rho", rho, shape), ("p", p, shape), ("e", e, shape), ("u", u, shape + (d,))):
            if arr.shape != want:
                raise GridMismatch(f"{name} has shape {arr.shape}, expected {want}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        for name, arr in (("rho", rho), ("p", p), ("e", e)):
            if np.any(arr < 0):
                raise NegativeState(name, tuple(int(i) for i in np.argwhere(arr < 0)[0]))
        rmax = rho.max() if rho.size else 0.0
        u = np.where((rho > VACUUM * rmax)[..., None], u, 0.0)
        object.__setattr__(self, "times", _readonly(times))
        for name, arr in (("rho", rho), ("u", u), ("p", p), ("e", e)):
            object.__setattr__(self, name, _readonly(arr))

    @property
    def d(self) -> int:
        return self.grid.n

    @property
    def K(self) -> int:
        return self.times.size - 1

    def truncate(self, k: int) -> FlowField:
        """First ``k + 1`` snapshots."""
        s = slice(0, k + 1)
        return FlowField(self.times[s], self.grid, self.rho[s], self.u[s], self.p[s], self.e[s], dict(self.meta))

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256(self.grid.describe().encode())
        for a in (self.times, self.rho, self.u, self.p, self.e):
            h.update(np.ascontiguousarray(a).tobytes())
        return h.hexdigest()[:16]


def time_weights(times: np.ndarray) -> np.ndarray:
    """Trapezoid weights; a single snapshot has zero weight."""
    times = np.asarray(times, float)
    w = np.zeros(times.size)
    if times.size > 1:
        dt = np.diff(times)
        w[:-1] += 0.5 * dt
        w[1:] += 0.5 * dt
    return w


def space_integral(g: Grid, values: np.ndarray) -> float:
    return total(values) * g.cell_volume


def space_time_integral(w: FlowField, integrand: np.ndarray) -> float:
    tw = time_weights(w.times).reshape((-1,) + (1,) * w.d)
    return total(integrand * tw) * w.grid.cell_volume


# --- summary and admissibility -------------------------------------------------


@dataclass(frozen=True)
class FlowSummary:
    M_of_t: np.ndarray
    E_of_t: np.ndarray
    M: float
    E0: float
    ubar: float
    mass_drift: float
    energy_overshoot: float
    admissible: bool
    violations: tuple[str, ...]


def kinetic_internal(w: FlowField, k: int) -> float:
    rho = w.rho[k]
    return space_integral(w.grid, 0.5 * rho * np.sum(w.u[k] ** 2, axis=-1) + rho * w.e[k])


def summary(w: FlowField, tol: float = ADMISSIBILITY_TOL, extra_energy=None) -> FlowSummary:
    """Mass and energy per snapshot and the admissibility verdict.

    ``extra_energy`` (one value per snapshot) is added to ``E(t)`` for ``t > 0``,
    e.g. half the trace mass of a defect field.
    """
    m = np.array([space_integral(w.grid, w.rho[k]) for k in range(w.times.size)])
    en = np.array([kinetic_internal(w, k) for k in range(w.times.size)])
    if extra_energy is not None:
        en = en + np.asarray(extra_energy, float)
    mass, e0 = float(m[0]), float(en[0])
    drift = float(np.max(np.abs(m - mass)) / mass) if mass > 0 else float(np.max(np.abs(m)))
    over = float(max(0.0, np.max(en - e0)) / e0) if e0 > 0 else float(max(0.0, np.max(en)))
    violations = []
    if drift > tol:
        violations.append(f"mass drift {drift:.3e}")
    if over > tol:
        violations.append(f"energy overshoot {over:.3e}")
    ubar = math.sqrt(2 * e0 / mass) if mass > 0 else 0.0
    return FlowSummary(m, en, mass, e0, ubar, drift, over, not violations, tuple(violations))


def _admissibility(w: FlowField, strict: bool, extra_energy=None) -> tuple[FlowSummary, str]:
    s = summary(w, extra_energy=extra_energy)
    if s.admissible:
        return s, "ok"
    if strict:
        raise NotAdmissible("; ".join(s.violations))
    return s, "inadmissible-input"


def galilean_energy(w: FlowField) -> float:
    """``(1/4) int int rho rho' |u' - u|^2 + M int rho e`` at the first snapshot."""
    g = w.grid
    rho, u = w.rho[0], w.u[0]
    mass = space_integral(g, rho)
    mom = np.array([space_integral(g, rho * u[..., i]) for i in range(w.d)])
    kin = space_integral(g, rho * np.sum(u * u, axis=-1))
    internal = space_integral(g, rho * w.e[0])
    return 0.5 * (mass * kin - float(mom @ mom)) + mass * internal


def galilean_energy_bruteforce(w: FlowField) -> float:
    """Double-sum oracle for :func:`galilean_energy` (small grids only)."""
    g = w.grid
    rho = w.rho[0].ravel() * g.cell_volume
    u = w.u[0].reshape(-1, w.d)
    diff = np.sum((u[:, None, :] - u[None, :, :]) ** 2, axis=-1)
    pair = 0.25 * float(rho @ diff @ rho)
    return pair + float(rho.sum()) * float(np.sum(rho * w.e[0].ravel()))


# --- the Euler tensor ------------------------------------------------------------


def euler_tensor(w: FlowField) -> TensorField:
    """``A = rho U (x) U + p J`` over ``(t, y)`` with ``U = (1, u)``.

    The time axis is treated as cell-centred at the (uniform) snapshot times.
    """
    dt = np.diff(w.times)
    if dt.size == 0 or not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ValueError("euler_tensor needs at least two uniformly spaced snapshots")
    for name, arr in (("rho", w.rho), ("p", w.p)):
        if np.any(arr < 0):
            raise NegativeState(name, tuple(int(i) for i in np.argwhere(arr < 0)[0]))
    n = w.d + 1
    vals = symmat.rank_one(w.rho, w.u)
    vals[..., 1:, 1:] += w.p[..., None, None] * np.eye(w.d)
    g = w.grid
    tg = Grid((w.times[0] - 0.5 * dt[0],) + g.origin, (float(dt[0]),) + g.spacing, (w.times.size,) + g.counts)
    assert tg.n == n
    return TensorField(tg, vals, psd=True)


def euler_state(rho, u, p) -> np.ndarray:
    """Pointwise ``rho U (x) U + p J`` for batches of states."""
    u = np.asarray(u, float)
    a = symmat.rank_one(np.asarray(rho, float), u)
    a = np.array(a, dtype=float) if not isinstance(a, np.ndarray) else a
    d = u.shape[-1]
    a[..., 1:, 1:] += np.asarray(p, float)[..., None, None] * np.eye(d)
    return a


def trace_masses(w: FlowField) -> dict:
    """``int sqrt(rho^2 + |rho u|^2) dy`` at the first and last snapshot."""
    out = {}
    for label, k in (("t0", 0), ("T", w.K)):
        rho = w.rho[k]
        out[label] = space_integral(w.grid, np.sqrt(rho**2 + np.sum((rho[..., None] * w.u[k]) ** 2, axis=-1)))
    return out


# --- pressure-density estimate ---------------------------------------------------


def _rhs_pair(w: FlowField, s: FlowSummary) -> dict:
    d = w.d
    gal = galilean_energy(w)
    return {
        "M": s.M,
        "E0": s.E0,
        "galilean_energy": gal,
        "rhs_energy": s.M ** (1.0 / d) * math.sqrt(s.M * s.E0),
        "rhs_galilean": s.M ** (1.0 / d) * math.sqrt(max(gal, 0.0)),
    }


def _pick(pair: dict, normalization: str) -> float:
    if normalization not in ("energy", "galilean"):
        raise ValueError("normalization must be 'energy' or 'galilean'")
    return pair["rhs_energy"] if normalization == "energy" else pair["rhs_galilean"]


def functional_pgd(w: FlowField, normalization: str = "energy", strict: bool = False) -> Report:
    """``int rho^(1/d) p dy dt`` against ``M^(1/d) sqrt(M E0)``.

    ``normalization="galilean"`` replaces ``M E0`` by :func:`galilean_energy`.
    """
    s, status = _admissibility(w, strict)
    lhs = space_time_integral(w, w.rho ** (1.0 / w.d) * w.p)
    pair = _rhs_pair(w, s)
    return Report(
        "pressure-density",
        lhs,
        _pick(pair, normalization),
        status=status,
        fingerprint=w.fingerprint(),
        grid=w.grid.describe(),
        extra={**pair, "normalization": normalization, "T": float(w.times[-1] - w.times[0])},
    )


# --- velocity correlations ---------------------------------------------------------


def cor(us: Sequence) -> np.ndarray | float:
    """``det [[1 ... 1], [u_0 ... u_d]]`` computed as ``det(u_1 - u_0, ..., u_d - u_0)``.

    Each ``u_j`` is a ``d``-vector or a batch ``(..., d)``.
    """
    arrs = [np.asarray(u, float) for u in us]
    d = arrs[0].shape[-1]
    if len(arrs) != d + 1:
        raise ValueError(f"Cor needs d + 1 = {d + 1} velocities, got {len(arrs)}")
    diffs = np.stack([a - arrs[0] for a in arrs[1:]], axis=-1)
    out = symmat.det(diffs)
    return float(out) if np.ndim(out) == 0 else out


def rank_one_sum_det(rhos: Sequence, us: Sequence) -> np.ndarray:
    """``det(sum_j rho_j U_j (x) U_j)`` for ``U_j = (1, u_j)``."""
    terms = [symmat._dense(symmat.rank_one(np.asarray(r, float), np.asarray(u, float))) for r, u in zip(rhos, us)]
    out = symmat.det(np.sum(terms, axis=0))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ShiftSet:
    """Shifts ``h_0..h_d``; stored relative to ``h_0`` so ``h[0] = 0``."""

    h: np.ndarray

    def __post_init__(self):
        h = np.atleast_2d(np.asarray(self.h, float))
        if h.shape[0] != h.shape[1] + 1:
            raise ValueError(f"need d + 1 shifts of dimension d, got shape {h.shape}")
        object.__setattr__(self, "h", _readonly(h - h[0]))

    @property
    def d(self) -> int:
        return self.h.shape[1]

    @property
    def affinely_independent(self) -> bool:
        m = self.h[1:]
        scale = max(1.0, float(np.abs(m).max()))
        return abs(float(np.linalg.det(m))) > 1e-12 * scale**self.d

    def snapped(self, g: Grid) -> np.ndarray:
        """Integer cell offsets of each shift."""
        return np.round(self.h / np.asarray(g.spacing)).astype(int)

    def scaled(self, mu: float) -> ShiftSet:
        return ShiftSet(self.h * mu)


def shift_array(a: np.ndarray, offset: Sequence[int], naxes: int) -> np.ndarray:
    """``out[i] = a[i + offset]`` over the first ``naxes`` axes, zero outside."""
    out = np.zeros_like(a)
    src, dst = [], []
    for k, c in zip(offset, a.shape[:naxes]):
        k = int(k)
        if abs(k) >= c:
            return out
        src.append(slice(max(k, 0), c + min(k, 0)))
        dst.append(slice(max(-k, 0), c - max(k, 0)))
    out[tuple(dst)] = a[tuple(src)]
    return out


def _h_integrand(w: FlowField, k: int, offsets: np.ndarray) -> np.ndarray:
    d = w.d
    rhos = [shift_array(w.rho[k], o, d) for o in offsets]
    us = [shift_array(w.u[k], o, d) for o in offsets]
    prod = np.prod(rhos, axis=0)
    c = cor(us)
    return (prod * c * c) ** (1.0 / d)


def functional_h(w: FlowField, t_index: int, s: ShiftSet) -> float:
    """``H(t, h) = int (prod_j rho_j Cor(u_0..u_d)^2)^(1/d) dy`` at one snapshot."""
    if s.d != w.d:
        raise ValueError("shift dimension differs from the flow dimension")
    return space_integral(w.grid, _h_integrand(w, t_index, s.snapped(w.grid)))


def functional_estuu(w: FlowField, s: ShiftSet, normalization: str = "energy", strict: bool = False) -> Report:
    """``int_t H(t, h) dt`` against ``M^(1/d) sqrt(M E0)``."""
    if s.d != w.d:
        raise ValueError("shift dimension differs from the flow dimension")
    st, status = _admissibility(w, strict)
    offsets = s.snapped(w.grid)
    integrand = np.stack([_h_integrand(w, k, offsets) for k in range(w.times.size)])
    lhs = space_time_integral(w, integrand)
    pair = _rhs_pair(w, st)
    return Report(
        "velocity-correlation",
        lhs,
        _pick(pair, normalization),
        status=status,
        fingerprint=w.fingerprint(),
        grid=w.grid.describe(),
        extra={
            **pair,
            "normalization": normalization,
            "cell_offsets": offsets,
            "affinely_independent": s.affinely_independent,
            "T": float(w.times[-1] - w.times[0]),
        },
    )


def sup_estuu(w: FlowField, shift_sets: Sequence[ShiftSet], normalization: str = "energy") -> Report:
    """Largest :func:`functional_estuu` over candidate shift sets."""
    best = None
    for s in shift_sets:
        r = functional_estuu(w, s, normalization)
        if best is None or r.lhs > best.lhs:
            best = r
    if best is None:
        raise ValueError("no shift sets given")
    best.extra["candidates"] = len(shift_sets)
    return best


def direct_bound(w: FlowField, t_index: int, partial_shifts=(), radius: int | None = None, strict: bool = False) -> Report:
    """``int H(t, h_1..h_d)^d dh_d`` over the lattice of cell offsets ``h_d``, against ``M E0^d``.

    ``radius`` truncates ``h_d`` to offsets with ``|k|_inf <= radius`` cells;
    the exact tail beyond it is recorded.
    """
    st, status = _admissibility(w, strict)
    d = w.d
    g = w.grid
    hp = np.asarray(partial_shifts, float).reshape(-1, d) if d > 1 else np.zeros((0, d))
    if hp.shape[0] != d - 1:
        raise ValueError(f"need d - 1 = {d - 1} partial shifts")
    fixed = [np.zeros(d, int)] + [np.round(h / np.asarray(g.spacing)).astype(int) for h in hp]
    ranges = [range(-c + 1, c) for c in g.counts]
    inside = outside = 0.0
    for kd in np.ndindex(*[len(r) for r in ranges]):
        off = np.array([r[i] for r, i in zip(ranges, kd)])
        offsets = np.stack(fixed + [off])
        hval = space_integral(g, _h_integrand(w, t_index, offsets)) ** d
        if radius is None or np.max(np.abs(off)) <= radius:
            inside += hval
        else:
            outside += hval
    hvol = g.cell_volume
    return Report(
        "direct-mass-energy",
        inside * hvol,
        st.M * st.E0**d,
        status=status,
        fingerprint=w.fingerprint(),
        grid=g.describe(),
        extra={"t": float(w.times[t_index]), "radius_cells": radius, "tail": outside * hvol, "M": st.M, "E0": st.E0},
    )


def direct_vs_ci(w: FlowField, s: ShiftSet) -> list[Report]:
    """The direct bound at its worst snapshot next to the correlation estimate.

    The first row is ``sup_t int H^d dh_d`` (``L^inf_t L^d_h``), the second is
    ``int_t H dt`` (``L^inf_h L^1_t``) for the shift set ``s``.
    """
    rows = [direct_bound(w, k, s.h[1:-1]) for k in range(w.times.size)]
    best = max(rows, key=lambda r: r.lhs)
    best.extra["sup_over_snapshots"] = w.times.size
    return [best, functional_estuu(w, s)]


# --- pressure kernels ---------------------------------------------------------------


def snap_tau(times: np.ndarray, tau: float) -> float:
    """Nearest midpoint between consecutive snapshot times."""
    times = np.asarray(times, float)
    if times.size < 2:
        return float(tau)
    mids = 0.5 * (times[1:] + times[:-1])
    return float(mids[np.argmin(np.abs(mids - tau))])


def pressure_kernel(times, g: Grid, tau: float, eta, a: float = 1.0, b: float = 1.0) -> np.ndarray:
    """``((t - tau)^2 / (a (t - tau)^2 + b |y - eta|^2)^(d/2 + 1))^(1/d)`` on all nodes."""
    d = g.n
    dt = (np.asarray(times, float) - tau).reshape((-1,) + (1,) * d)
    r2 = np.sum((g.centers() - np.asarray(eta, float)) ** 2, axis=-1)[None]
    den = a * dt * dt + b * r2
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, (dt * dt / safe ** (d / 2 + 1)) ** (1.0 / d), 0.0)


def functional_schurp(
    w: FlowField, tau: float, eta, form: str = "homogeneous", strict: bool = False, normalization: str = "energy"
) -> Report:
    """Kernel-weighted pressure integral.

    ``form="homogeneous"``: kernel with ``E0 (t - tau)^2 + M |y - eta|^2``;
    ``rhs_scale`` is ``E0^(1/2 - 1/d)``, the exponent that makes the ratio
    invariant under the scaling ``y -> mu y``. The printed exponent ``1 - 1/d``
    is kept in ``extra['rhs_printed']``. ``normalization="galilean"`` uses
    ``galilean_energy / M`` in place of ``E0`` in both the kernel and the
    scale.

    ``form="raw"``: unit weights, ``rhs_scale = M + sqrt(M E0)``.
    """
    st, status = _admissibility(w, strict)
    d = w.d
    tau_s = snap_tau(w.times, tau)
    eta_s = w.grid.snap_to_dual(eta)
    if normalization not in ("energy", "galilean"):
        raise ValueError("normalization must be 'energy' or 'galilean'")
    e0 = st.E0 if normalization == "energy" or st.M <= 0 else galilean_energy(w) / st.M
    if form == "homogeneous":
        if e0 <= 0:
            raise ZeroEnergy("the homogeneous form needs E0 > 0")
        kern = pressure_kernel(w.times, w.grid, tau_s, eta_s, e0, st.M)
        rhs = e0 ** (0.5 - 1.0 / d)
        estimate = "pressure-kernel"
    elif form == "raw":
        kern = pressure_kernel(w.times, w.grid, tau_s, eta_s)
        rhs = st.M + math.sqrt(st.M * e0)
        estimate = "pressure-kernel-raw"
    else:
        raise ValueError("form must be 'homogeneous' or 'raw'")
    lhs = space_time_integral(w, kern * w.p)
    return Report(
        estimate,
        lhs,
        rhs,
        status=status,
        fingerprint=w.fingerprint(),
        grid=w.grid.describe(),
        extra={
            "tau": tau_s,
            "eta": eta_s,
            "M": st.M,
            "E0": st.E0,
            "normalization": normalization,
            "kernel_energy": e0,
            "rhs_printed": e0 ** (1.0 - 1.0 / d) if e0 > 0 else 0.0,
        },
    )


def sup_schurp(w: FlowField, taus: Sequence[float], etas: Sequence, form: str = "homogeneous") -> Report:
    """Lattice search of :func:`functional_schurp` over ``(tau, eta)`` candidates."""
    best = None
    for tau in taus:
        for eta in etas:
            r = functional_schurp(w, tau, eta, form)
            if best is None or r.lhs > best.lhs:
                best = r
    if best is None:
        raise ValueError("empty (tau, eta) lattice")
    best.extra["candidates"] = len(taus) * len(etas)
    return best


def centroid(w: FlowField) -> tuple[float, np.ndarray]:
    """Pressure-weighted space-time centroid ``(tau, eta)``."""
    weight = w.p * time_weights(w.times).reshape((-1,) + (1,) * w.d)
    tot = float(weight.sum())
    if tot <= 0:
        raise ZeroEnergy("no pressure to locate")
    tau = float(np.sum(weight.sum(axis=tuple(range(1, w.d + 1))) * w.times) / tot)
    x = w.grid.centers()
    eta = np.array([float(np.sum(weight * x[..., i][None])) / tot for i in range(w.d)])
    return tau, eta


# --- transforms -------------------------------------------------------------------


def scaling_transform(w: FlowField, mu: float) -> FlowField:
    """``t' = t, y' = mu y, rho' = rho, u' = mu u, p' = mu^2 p, e' = mu^2 e``."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    meta = dict(w.meta)
    meta["scaled_by"] = meta.get("scaled_by", 1.0) * mu
    return FlowField(w.times, w.grid.scaled(mu), w.rho, mu * w.u, mu * mu * w.p, mu * mu * w.e, meta)


def _translate(a: np.ndarray, cells: np.ndarray, naxes: int) -> np.ndarray:
    """``out(y) = a(y - cells * h)``: integer part exact, fractional part by donor-cell remap."""
    out = a
    for ax in range(naxes):
        s = float(cells[ax])
        if abs(s - round(s)) < 1e-9:
            s = float(round(s))
        whole = math.floor(s)
        frac = s - whole
        off = [0] * naxes
        off[ax] = -whole
        base = shift_array(out, off, naxes)
        if frac > 0:
            off[ax] = -whole - 1
            base = (1 - frac) * base + frac * shift_array(out, off, naxes)
        out = base
    return out


def galilean_boost(w: FlowField, wvec) -> FlowField:
    """``u' = u + w`` in the frame ``y' = y + t w`` (``t`` as stored in ``times``).

    Each snapshot is translated by ``t w / h`` cells; mass, momentum and energy
    densities are remapped conservatively, then velocities are recovered from
    the momentum. Integer cell shifts are exact.
    """
    wvec = np.asarray(wvec, float).reshape(w.d)
    h = np.asarray(w.grid.spacing)
    rho, u, p, e = [], [], [], []
    mass_in = mass_out = 0.0
    for k, t in enumerate(w.times):
        cells = t * wvec / h
        r = _translate(w.rho[k], cells, w.d)
        pk = _translate(w.p[k], cells, w.d)
        pos = r > 0
        if np.all(np.abs(cells - np.round(cells)) < 1e-9):
            # whole-cell shift: carry u and e directly, bit-exact
            vel = _translate(w.u[k], cells, w.d) + wvec
            ek = _translate(w.e[k], cells, w.d)
        else:
            m = _translate(w.rho[k][..., None] * w.u[k], cells, w.d)
            re = _translate(w.rho[k] * w.e[k], cells, w.d)
            safe = np.where(pos, r, 1.0)
            vel = m / safe[..., None] + wvec
            ek = re / safe
        rho.append(r)
        u.append(np.where(pos[..., None], vel, 0.0))
        p.append(pk)
        e.append(np.where(pos, ek, 0.0))
        mass_in += float(w.rho[k].sum())
        mass_out += float(r.sum())
    if abs(mass_out - mass_in) > 1e-12 * max(mass_in, 1e-300):
        raise ValueError("the boost moves part of the flow outside the grid")
    meta = dict(w.meta)
    meta["boost"] = list(np.asarray(meta.get("boost", np.zeros(w.d))) + wvec)
    return FlowField(w.times, w.grid, np.array(rho), np.array(u), np.array(p), np.array(e), meta)


# --- defect measure ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DefectField:
    """PSD ``d x d`` matrices per ``(t, y)`` node: shape ``(K+1,) + counts + (d, d)``."""

    times: np.ndarray
    grid: Grid
    sigma: np.ndarray

    def __post_init__(self):
        times = np.atleast_1d(np.asarray(self.times, float))
        d = self.grid.n
        sig = np.array(self.sigma, dtype=float)
        if sig.shape != (times.size,) + self.grid.counts + (d, d):
            raise GridMismatch(f"sigma has shape {sig.shape}")
        sig = 0.5 * (sig + np.swapaxes(sig, -1, -2))
        if not np.all(symmat.is_psd(sig)):
            raise NotPSDField("defect field is not positive semi-definite")
        sig.flags.writeable = False
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "sigma", sig)

    @classmethod
    def zeros(cls, w: FlowField) -> DefectField:
        return cls(w.times, w.grid, np.zeros(w.rho.shape + (w.d, w.d)))

    @classmethod
    def isotropic(cls, w: FlowField, s: np.ndarray) -> DefectField:
        return cls(w.times, w.grid, np.asarray(s, float)[..., None, None] * np.eye(w.d))


def functional_defect(w: FlowField, sigma: DefectField, tau: float, eta, strict: bool = False) -> Report:
    """``int K(t - tau, y - eta) (det Sigma)^(1/d) dy dt`` with the homogeneous pressure kernel.

    ``E(t)`` includes half the trace mass of ``Sigma``; ``rhs_scale`` is
    ``E0^(1/2 - 1/d)`` as for :func:`functional_schurp`.
    """
    if sigma.grid != w.grid or not np.array_equal(sigma.times, w.times):
        raise GridMismatch("defect field and flow must share times and grid")
    d = w.d
    half_tr = [0.5 * space_integral(w.grid, np.trace(sigma.sigma[k], axis1=-2, axis2=-1)) for k in range(w.times.size)]
    extra_energy = np.array(half_tr)
    extra_energy[0] = 0.0
    st, status = _admissibility(w, strict, extra_energy)
    if st.E0 <= 0:
        raise ZeroEnergy("the homogeneous kernel needs E0 > 0")
    tau_s = snap_tau(w.times, tau)
    eta_s = w.grid.snap_to_dual(eta)
    dets = symmat.det(sigma.sigma)
    floor = DEFECT_DET_RTOL * np.trace(sigma.sigma, axis1=-2, axis2=-1) ** d
    dets = np.where(np.abs(dets) <= floor, 0.0, dets)
    neg = int(np.count_nonzero(dets < 0))
    root = np.clip(dets, 0.0, None) ** (1.0 / d)
    kern = pressure_kernel(w.times, w.grid, tau_s, eta_s, st.E0, st.M)
    lhs = space_time_integral(w, kern * root)
    if status == "ok" and neg:
        status = clamped(neg)
    return Report(
        "defect",
        lhs,
        st.E0 ** (0.5 - 1.0 / d),
        status=status,
        fingerprint=w.fingerprint(),
        grid=w.grid.describe(),
        extra={"tau": tau_s, "eta": eta_s, "M": st.M, "E0": st.E0, "rhs_printed": st.E0 ** (1.0 - 1.0 / d)},
    )
