"""Command-line driver: ``cilab <group> <command> [inputs] [options]``.

Every command writes CSV reports (``estimate,lhs,rhs_scale,ratio,status,
fingerprint,grid,extra``) to ``-o PATH`` or stdout. Exit status: 0 on
success, 2 when an input is inadmissible, 1 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import estimates, gas, io, mixed, scalar, sharpness
from .exceptions import BelowResolution, CILabError
from .grid import Grid, KernelSpec, ball_field, extreme_tensor
from .report import Report, merge, to_csv
from .summation import set_mode

EXIT_OK, EXIT_USAGE, EXIT_INADMISSIBLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _common(p: argparse.ArgumentParser, top: bool = False) -> None:
    p.add_argument("-o", "--output", default="-" if top else argparse.SUPPRESS, help="CSV destination (default: stdout)")
    p.add_argument("--deterministic", action="store_true", default=False if top else argparse.SUPPRESS,
                   help="exactly rounded, order-independent reductions")


def build_parser() -> _Parser:
    top = _Parser(prog="cilab", description="Compensated-integrability verification lab")
    _common(top, top=True)
    groups = top.add_subparsers(dest="group", parser_class=_Parser, required=True)

    def leaf(sub, name, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        return p

    verify = groups.add_parser("verify", help="tensor-field estimates on DBV1 files").add_subparsers(
        dest="command", parser_class=_Parser, required=True
    )
    for name, help_ in (("fund", "fundamental bound"), ("prod", "per-row product bound")):
        p = leaf(verify, name, help_)
        p.add_argument("field")
        if name == "prod":
            p.add_argument("--directions", type=int, default=0, help="also report the direction-averaged rhs")
            p.add_argument("--seed", type=int, default=0)
    p = leaf(verify, "mulest", "mixed-determinant bound")
    p.add_argument("fields", nargs="+")
    p = leaf(verify, "schur", "Schur-kernel functional")
    p.add_argument("field")
    p.add_argument("--xi", type=_floats, required=True)
    p.add_argument("--omega", type=_floats, default=None)
    p.add_argument("--weights", type=_floats, default=(1.0, 1.0))

    md = groups.add_parser("mixed-det", help="mixed-determinant campaigns").add_subparsers(
        dest="command", parser_class=_Parser, required=True
    )
    p = leaf(md, "check", "polarization vs oracle and Garding campaigns")
    p.add_argument("--dims", type=_floats, default=[2, 3, 4, 5])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--garding-samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)

    sc = groups.add_parser("scalar", help="BV applications").add_subparsers(dest="command", parser_class=_Parser, required=True)
    p = leaf(sc, "conv", "sup of 1/|x| convolution against TV")
    p.add_argument("field")
    p.add_argument("--no-refine", action="store_true")
    p = leaf(sc, "gagliardo", "classic or time-weighted Gagliardo product")
    p.add_argument("fields", nargs="+")
    p.add_argument("--time", action="store_true", help="time-weighted form; first axis of each factor is t")

    gs = groups.add_parser("gas", help="gas-dynamics functionals on FLW1 files").add_subparsers(
        dest="command", parser_class=_Parser, required=True
    )
    for name in ("pgd", "estuu", "schurp", "h", "direct", "defect"):
        p = leaf(gs, name, f"{name} functional")
        p.add_argument("flow")
        p.add_argument("--shifts", type=_floats, default=None, help="h_1..h_d flattened (h_0 = 0)")
        p.add_argument("--tau", type=float, default=None)
        p.add_argument("--eta", type=_floats, default=None)
        p.add_argument("--t-index", type=int, default=0)
        p.add_argument("--normalization", choices=("energy", "galilean"), default="energy")
        p.add_argument("--form", choices=("homogeneous", "raw"), default="homogeneous")
        p.add_argument("--radius", type=int, default=None, help="h_d truncation in cells (direct)")
        p.add_argument("--sigma", default=None, help="DBV1 defect field with a time-axis header (defect)")

    fl = groups.add_parser("flows", help="generate flows").add_subparsers(dest="command", parser_class=_Parser, required=True)
    for name in ("dust", "fv"):
        p = leaf(fl, name, f"{name} flow from a key-value config")
        p.add_argument("config")
        p.add_argument("--flow", default=None, help="FLW1 destination (default: config key 'output')")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")

    sh = groups.add_parser("sharpness", help="constant probing").add_subparsers(dest="command", parser_class=_Parser, required=True)
    p = leaf(sh, "probe", "Nelder-Mead over a field family")
    p.add_argument("family", choices=sorted(sharpness.FAMILIES))
    p.add_argument("--budget", type=int, default=60)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--cells", type=int, default=256)
    p.add_argument("--trace", default=None, help="CSV evaluation trace destination")

    rp = groups.add_parser("report", help="report utilities").add_subparsers(dest="command", parser_class=_Parser, required=True)
    p = leaf(rp, "merge", "concatenate report CSVs")
    p.add_argument("inputs", nargs="+")

    mk = groups.add_parser("make-field", help="write DBV1 fixtures").add_subparsers(dest="command", parser_class=_Parser, required=True)
    for name in ("ball", "extreme", "scalar-ball"):
        p = mk.add_parser(name, help=f"{name} fixture")
        p.add_argument("path")
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--cells", type=int, default=256)
        p.add_argument("--half-width", type=float, default=2.0)
        p.add_argument("--radius", type=float, default=1.0)
        p.add_argument("--width-cells", type=float, default=3.0)
        p.add_argument("--xi", type=_floats, default=None)
    return top


# --- command implementations -------------------------------------------------------


def _fp(*paths) -> str:
    return "+".join(io.file_fingerprint(p) for p in paths)


def _verify(a) -> list[Report]:
    if a.command == "mulest":
        fields = [io.read_tensor_field(p) for p in a.fields]
        return [estimates.verify_mulest(fields, fingerprint=_fp(*a.fields))]
    f = io.read_tensor_field(a.field)
    fp = _fp(a.field)
    if a.command == "fund":
        return [estimates.verify_fund(f, fingerprint=fp)]
    if a.command == "prod":
        r = estimates.verify_prod(f, fingerprint=fp)
        if a.directions:
            avg = estimates.log_avg_direction(f, a.directions, a.seed)
            r.extra.update({"direction_rhs": avg.rhs_scale, "direction_stderr": avg.stderr, "direction_skipped": avg.skipped})
        return [r]
    k = KernelSpec("anisotropic_schur", tuple(a.xi), None if a.omega is None else tuple(a.omega), tuple(a.weights))
    val = estimates.schur_kernel_functional(f, k)
    mass = estimates.divergence(f).total_mass()
    return [Report("schur-kernel", val, mass, fingerprint=fp, grid=f.grid.describe(),
                   extra={"xi": f.grid.snap_to_dual(a.xi), "omega": k.omega})]


def _mixed(a) -> list[Report]:
    rows = []
    for n in (int(v) for v in a.dims):
        cv = mixed.cross_validate(n, a.samples, a.seed)
        rows.append(Report("mixed-crosscheck", cv["max_rel_polarization_vs_oracle"], mixed.TOL, extra=cv, grid=f"n={n}",
                           fingerprint=f"seed={a.seed};samples={a.samples}"))
        gc = mixed.garding_campaign(n, a.garding_samples, a.seed)
        rows.append(Report("garding", gc["garding_violations"] + gc["upper_violations"], gc["samples"], extra=gc,
                           grid=f"n={n}", fingerprint=f"seed={a.seed};samples={a.garding_samples}"))
    return rows


def _scalar_field(path) -> scalar.ScalarField:
    d = io.read_dbv1(path)
    if d["layout"] != "scalar":
        raise CILabError(f"{path}: expected layout scalar")
    return scalar.ScalarField(d["grid"], d["values"])


def _scalar(a) -> list[Report]:
    if a.command == "conv":
        r = scalar.conv_ratio(_scalar_field(a.field), refine=not a.no_refine)
        r.fingerprint = _fp(a.field)
        return [r]
    fs = [_scalar_field(p) for p in a.fields]
    r = scalar.gagliardo_time(fs) if a.time else scalar.gagliardo_classic(fs)
    r.fingerprint = _fp(*a.fields)
    return [r]


def _shiftset(a, d: int) -> gas.ShiftSet:
    if a.shifts is None:
        raise UsageError("--shifts is required for this functional")
    h = np.asarray(a.shifts, float).reshape(-1, d)
    return gas.ShiftSet(np.vstack([np.zeros((1, d)), h]))


def _gas(a) -> list[Report]:
    w = io.read_flw1(a.flow)
    fp = _fp(a.flow)
    d = w.d
    if a.command == "pgd":
        rows = [gas.functional_pgd(w, a.normalization)]
    elif a.command == "estuu":
        rows = [gas.functional_estuu(w, _shiftset(a, d), a.normalization)]
    elif a.command == "h":
        s = _shiftset(a, d)
        st = gas.summary(w)
        val = gas.functional_h(w, a.t_index, s)
        rows = [Report("h-functional", val, st.M ** (1.0 / d) * np.sqrt(st.M * st.E0), grid=w.grid.describe(),
                       extra={"t": float(w.times[a.t_index]), "cell_offsets": s.snapped(w.grid)},
                       status="ok" if st.admissible else "inadmissible-input")]
    elif a.command == "direct":
        partial = np.zeros((0, d)) if a.shifts is None else np.asarray(a.shifts, float).reshape(-1, d)
        rows = [gas.direct_bound(w, a.t_index, partial, a.radius)]
    else:
        tau, eta = (a.tau, a.eta)
        if tau is None or eta is None:
            c_tau, c_eta = gas.centroid(w) if float(w.p.max()) > 0 else (float(w.times.mean()), np.zeros(d))
            tau = c_tau if tau is None else tau
            eta = c_eta if eta is None else eta
        if a.command == "schurp":
            rows = [gas.functional_schurp(w, tau, eta, a.form, normalization=a.normalization)]
        else:
            if a.sigma is None:
                raise UsageError("--sigma is required for the defect functional")
            sd = io.read_dbv1(a.sigma)
            sig = gas.DefectField(w.times, w.grid, sd["values"])
            rows = [gas.functional_defect(w, sig, tau, eta)]
            fp = _fp(a.flow, a.sigma)
    for r in rows:
        r.fingerprint = fp
    return rows


def _flows(a) -> list[Report]:
    from .flows import run_config

    cfg = io.read_config(a.config)
    for item in a.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        cfg.update(io.parse_config(f"{key} = {value}"))
    cfg.setdefault("kind", a.command)
    if cfg["kind"] != a.command:
        raise UsageError(f"config kind {cfg['kind']!r} does not match command {a.command!r}")
    w = run_config(cfg)
    dest = a.flow or cfg.get("output") or str(Path(a.config).with_suffix(".flw1"))
    io.write_flw1(dest, w)
    s = gas.summary(w)
    return [Report("mass-energy", float(np.max(s.E_of_t)), s.E0, status="ok" if s.admissible else "inadmissible-input",
                   fingerprint=";".join([_fp(a.config), *a.set]), grid=w.grid.describe(),
                   extra={"flow": dest, "mass_drift": s.mass_drift, "energy_overshoot": s.energy_overshoot,
                          "M": s.M, "snapshots": int(w.times.size), "steps": w.meta.get("steps")})]


def _sharpness(a) -> list[Report]:
    g = sharpness.default_grid(a.n, a.cells)
    fp = f"family={a.family};budget={a.budget};restarts={a.restarts};seed={a.seed}"
    try:
        res = sharpness.probe(a.family, budget=a.budget, g=g, restarts=a.restarts, seed=a.seed)
    except BelowResolution as exc:
        return [Report(f"sharpness:{a.family}", 0.0, 0.0, status="below-resolution", fingerprint=fp, grid=g.describe(),
                       extra={"message": str(exc)})]
    if a.trace:
        Path(a.trace).write_text(sharpness.trace_csv(res.trace, sharpness.family(a.family).params))
    best = next(e for e in res.trace if e.params == res.best_params and not e.below_resolution)
    return [Report(f"sharpness:{a.family}", best.lhs, best.rhs_scale, fingerprint=fp, grid=g.describe(),
                   extra={"params": res.best_params, "evaluations": res.evaluations, "flagged": res.flagged,
                          "isoperimetric": scalar.isoperimetric_ratio(a.n)})]


def _make_field(a) -> None:
    g = Grid.cube(a.n, a.half_width, a.cells)
    if a.command == "ball":
        io.write_dbv1(a.path, ball_field(g, a.radius, a.width_cells))
    elif a.command == "scalar-ball":
        io.write_dbv1(a.path, scalar.ball_indicator(g, a.radius, a.width_cells))
    else:
        xi = tuple(a.xi) if a.xi else tuple(g.snap_to_dual(np.zeros(a.n)))
        io.write_dbv1(a.path, extreme_tensor(g, KernelSpec("plain_inverse_r", xi, radius=a.radius)))


def _emit(rows: list[Report], output: str) -> None:
    text = to_csv(rows)
    if output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    set_mode("exact" if a.deterministic else "ordered")
    try:
        if a.group == "report":
            text = merge(a.inputs)
            if a.output == "-":
                sys.stdout.write(text)
            else:
                Path(a.output).write_text(text)
            return EXIT_OK
        if a.group == "make-field":
            _make_field(a)
            return EXIT_OK
        handler = {"verify": _verify, "mixed-det": _mixed, "scalar": _scalar, "gas": _gas, "flows": _flows,
                   "sharpness": _sharpness}[a.group]
        rows = handler(a)
    except UsageError as exc:
        print(f"cilab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"cilab: inadmissible input: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    finally:
        set_mode("ordered")
    _emit(rows, a.output)
    return EXIT_INADMISSIBLE if any(r.status == "inadmissible-input" for r in rows) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
