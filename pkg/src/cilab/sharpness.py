"""Derivative-free search for the largest fundamental ratio over tensor families.

Each family maps a parameter vector to a PSD field on a fixed grid. The probe
maximizes the ratio returned by :func:`cilab.estimates.verify_fund` with
bounded Nelder-Mead plus seeded restarts, and keeps the full evaluation trace.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .estimates import verify_fund
from .exceptions import BelowResolution
from .grid import Grid, TensorField, ball_field, smoothed_indicator

WIDTH_FLOOR_CELLS = 2.0


@dataclass(frozen=True)
class Family:
    name: str
    params: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]
    x0: tuple[float, ...]
    build: Callable[[Grid, np.ndarray], TensorField]
    width: Callable[[np.ndarray], float]


def _radial(g: Grid, p) -> TensorField:
    radius, width = p
    r = np.linalg.norm(g.centers(), axis=-1)
    return TensorField.from_scalar(g, smoothed_indicator(r, radius, width), psd=True)


def _gaussian(g: Grid, p) -> TensorField:
    (sigma,) = p
    r2 = np.sum(g.centers() ** 2, axis=-1)
    return TensorField.from_scalar(g, np.exp(-0.5 * r2 / sigma**2), psd=True)


def _ellipsoid(g: Grid, p) -> TensorField:
    aspect, width = p
    axes = np.ones(g.n)
    axes[0] = aspect
    x = g.centers() / axes
    r = np.linalg.norm(x, axis=-1)
    return TensorField.from_scalar(g, smoothed_indicator(r, 1.0, width / max(aspect, 1.0)), psd=True)


FAMILIES = {
    "radial_smoothed_indicator": Family(
        "radial_smoothed_indicator", ("radius", "width"), ((0.5, 1.5), (0.0, 0.5)), (1.0, 0.3), _radial, lambda p: p[1]
    ),
    "gaussian_profiles": Family("gaussian_profiles", ("sigma",), ((0.05, 0.6), ), (0.3,), _gaussian, lambda p: p[0]),
    "anisotropic_ellipsoids": Family(
        "anisotropic_ellipsoids", ("aspect", "width"), ((0.5, 1.5), (0.0, 0.5)), (1.2, 0.3), _ellipsoid, lambda p: p[1]
    ),
}


def family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None


def default_grid(n: int = 2, cells: int = 256, half_width: float = 2.0) -> Grid:
    return Grid.cube(n, half_width, cells)


@dataclass
class Evaluation:
    params: tuple[float, ...]
    lhs: float
    rhs_scale: float
    ratio: float
    grid: str
    below_resolution: bool


def evaluate(fam: Family, g: Grid, params) -> Evaluation:
    p = np.asarray(params, float)
    below = fam.width(p) < WIDTH_FLOOR_CELLS * min(g.spacing)
    r = verify_fund(fam.build(g, p))
    return Evaluation(tuple(float(v) for v in p), r.lhs, r.rhs_scale, r.ratio, g.describe(), bool(below))


class _Budget(Exception):
    pass


@dataclass
class ProbeResult:
    family: str
    best_params: tuple[float, ...]
    best_ratio: float
    trace: list[Evaluation] = field(default_factory=list)
    flagged: int = 0

    @property
    def evaluations(self) -> int:
        return len(self.trace)


def probe(
    name: str,
    bounds: Sequence[tuple[float, float]] | None = None,
    budget: int = 60,
    g: Grid | None = None,
    restarts: int = 1,
    seed: int = 0,
    x0: Sequence[float] | None = None,
) -> ProbeResult:
    """Maximize the fundamental ratio of family ``name`` within ``budget`` evaluations.

    Points whose profile width falls below two cells are kept in the trace but
    flagged and never returned as the optimum; :class:`BelowResolution` is
    raised if every evaluated point is flagged.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    fam = family(name)
    g = g or default_grid()
    bounds = tuple(tuple(map(float, b)) for b in (bounds or fam.bounds))
    if len(bounds) != len(fam.params):
        raise ValueError(f"{name} takes {len(fam.params)} parameters")
    lo, hi = np.array([b[0] for b in bounds]), np.array([b[1] for b in bounds])
    trace: list[Evaluation] = []

    def objective(x):
        if len(trace) >= budget:
            raise _Budget
        ev = evaluate(fam, g, np.clip(x, lo, hi))
        trace.append(ev)
        return math.inf if ev.below_resolution else -ev.ratio

    rng = np.random.default_rng(seed)
    starts = [np.clip(np.asarray(x0 if x0 is not None else fam.x0, float), lo, hi)]
    starts += [lo + (hi - lo) * rng.random(lo.size) for _ in range(max(restarts, 0))]
    try:
        objective(starts[0])
        for x in starts:
            if len(trace) >= budget:
                break
            optimize.minimize(
                objective,
                x,
                method="Nelder-Mead",
                bounds=list(zip(lo, hi)),
                options={"maxfev": budget, "xatol": 1e-4, "fatol": 1e-7},
            )
    except _Budget:
        pass
    ok = [e for e in trace if not e.below_resolution]
    flagged = len(trace) - len(ok)
    if not ok:
        raise BelowResolution(f"all {len(trace)} evaluations fall below the {WIDTH_FLOOR_CELLS:g}-cell width floor")
    best = max(ok, key=lambda e: e.ratio)
    return ProbeResult(name, best.params, best.ratio, trace, flagged)


def ratio_surface(name: str, param_grid: Sequence[Sequence[float]], g: Grid | None = None) -> list[Evaluation]:
    """Evaluate the family at every parameter tuple, in order."""
    fam = family(name)
    g = g or default_grid()
    return [evaluate(fam, g, p) for p in param_grid]


def lattice(*axes: Sequence[float]) -> list[tuple[float, ...]]:
    """Cartesian product of parameter axes."""
    if not axes or any(len(a) == 0 for a in axes):
        return []
    mesh = np.meshgrid(*[np.asarray(a, float) for a in axes], indexing="ij")
    return [tuple(float(v) for v in row) for row in np.stack([m.ravel() for m in mesh], axis=-1)]


def trace_csv(trace: Sequence[Evaluation], param_names: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*param_names, "lhs", "rhs_scale", "ratio", "grid", "below_resolution"])
    for e in trace:
        w.writerow([*map(repr, e.params), repr(e.lhs), repr(e.rhs_scale), repr(e.ratio), e.grid, int(e.below_resolution)])
    return buf.getvalue()


def ball_ratio(g: Grid, radius: float = 1.0, width_cells: float = 3.0) -> float:
    """Fundamental ratio of the smoothed ball ``chi_B I_n``."""
    return verify_fund(ball_field(g, radius, width_cells)).ratio
