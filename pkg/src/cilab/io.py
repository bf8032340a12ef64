"""DBV1 / FLW1 containers and the flat key-value configuration format.

Both containers are a text header followed by a little-endian float64 payload
in C order. Floats in headers are written with ``repr`` so that a write/read
cycle reproduces every bit.

DBV1 header::

    dbv1
    n <dim>
    origin <floats>
    spacing <floats>
    counts <ints>
    [time-axis <index>]          optional, for defect fields over (t, y)
    [core <center...> <radius>]  optional, repeated
    layout packed-upper|scalar

FLW1 header::

    flw1
    d <dim>
    times <floats>
    origin / spacing / counts as above
    fields rho u p e

followed by one block per snapshot: ``rho`` (cells), ``u`` (cells x d),
``p`` (cells), ``e`` (cells).
"""

from __future__ import annotations

import functools
import hashlib
from pathlib import Path

import numpy as np

from . import symmat
from .exceptions import CILabError, MalformedFile
from .grid import Core, Grid, TensorField

_LE = "<f8"


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _grid_lines(g: Grid) -> list[str]:
    return [
        f"origin {_fmt(g.origin)}",
        f"spacing {_fmt(g.spacing)}",
        f"counts {' '.join(str(c) for c in g.counts)}",
    ]


def _parse_errors(fn):
    """Re-raise low-level parse failures of ``fn`` as :class:`MalformedFile`."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CILabError:
            raise
        except (ValueError, KeyError, IndexError) as exc:
            raise MalformedFile(f"malformed input: {exc}") from exc

    return wrapper


def _read_header(raw: bytes, magic: str, last_key: str) -> tuple[dict, list, int]:
    pos = 0
    header: dict = {}
    extras: list = []
    first = True
    while True:
        end = raw.index(b"\n", pos)
        line = raw[pos:end].decode("ascii").strip()
        pos = end + 1
        if first:
            if line != magic:
                raise MalformedFile(f"not a {magic} file (first line {line!r})")
            first = False
            continue
        key, _, rest = line.partition(" ")
        if key in ("core",):
            extras.append((key, rest.split()))
        else:
            header[key] = rest.split()
        if key == last_key:
            return header, extras, pos


def _grid_from(header: dict) -> Grid:
    return Grid(
        tuple(float(v) for v in header["origin"]),
        tuple(float(v) for v in header["spacing"]),
        tuple(int(v) for v in header["counts"]),
    )


def file_fingerprint(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


# --- DBV1 -------------------------------------------------------------------


def dumps_dbv1(obj, time_axis: int | None = None) -> bytes:
    """Serialize a :class:`TensorField`, a :class:`ScalarField` or ``(grid, values)``."""
    if isinstance(obj, TensorField):
        g, payload, layout = obj.grid, symmat.pack(obj.values), "packed-upper"
        cores = obj.cores
    elif hasattr(obj, "grid") and hasattr(obj, "values"):
        g, payload, layout, cores = obj.grid, np.asarray(obj.values), "scalar", ()
    else:
        g, values = obj
        values = np.asarray(values, float)
        if values.shape == g.counts:
            payload, layout = values, "scalar"
        else:
            payload, layout = symmat.pack(values), "packed-upper"
        cores = ()
    lines = ["dbv1", f"n {g.n}", *_grid_lines(g)]
    if time_axis is not None:
        lines.append(f"time-axis {int(time_axis)}")
    for c in cores:
        lines.append(f"core {_fmt(tuple(c.center) + (c.radius,))}")
    lines.append(f"layout {layout}")
    head = ("\n".join(lines) + "\n").encode("ascii")
    return head + np.ascontiguousarray(payload, dtype=_LE).tobytes()


def write_dbv1(path, obj, time_axis: int | None = None) -> None:
    Path(path).write_bytes(dumps_dbv1(obj, time_axis))


@_parse_errors
def loads_dbv1(raw: bytes) -> dict:
    """Parse DBV1 bytes into ``{grid, layout, values, cores, time_axis}``.

    ``values`` is the dense ``counts + (m, m)`` array for ``packed-upper``
    (``m`` is inferred from the record length, so fields of dimension other
    than ``n`` such as defect fields are allowed) and ``counts`` for ``scalar``.
    """
    header, extras, pos = _read_header(raw, "dbv1", "layout")
    g = _grid_from(header)
    if int(header["n"][0]) != g.n:
        raise MalformedFile("n does not match the grid dimension")
    layout = header["layout"][0]
    data = np.frombuffer(raw[pos:], dtype=_LE).astype(float)
    if layout == "scalar":
        if data.size != g.size:
            raise MalformedFile(f"payload has {data.size} values, expected {g.size}")
        values = data.reshape(g.counts)
    elif layout == "packed-upper":
        if data.size % g.size:
            raise MalformedFile("payload size is not a multiple of the cell count")
        per = data.size // g.size
        values = symmat.unpack(data.reshape(g.counts + (per,)))
    else:
        raise MalformedFile(f"unknown layout {layout!r}")
    cores = tuple(Core(tuple(float(v) for v in args[:-1]), float(args[-1])) for key, args in extras if key == "core")
    ta = header.get("time-axis")
    return {"grid": g, "layout": layout, "values": values, "cores": cores, "time_axis": int(ta[0]) if ta else None}


def read_dbv1(path) -> dict:
    return loads_dbv1(Path(path).read_bytes())


def read_tensor_field(path, psd: bool = True) -> TensorField:
    d = read_dbv1(path)
    if d["layout"] != "packed-upper":
        raise MalformedFile(f"{path}: expected a tensor field, found layout {d['layout']}")
    return TensorField(d["grid"], d["values"], psd=psd, cores=d["cores"])


# --- FLW1 -------------------------------------------------------------------


def dumps_flw1(w) -> bytes:
    g = w.grid
    lines = ["flw1", f"d {g.n}", f"times {_fmt(w.times)}", *_grid_lines(g), "fields rho u p e"]
    parts = [("\n".join(lines) + "\n").encode("ascii")]
    for k in range(len(w.times)):
        for arr in (w.rho[k], w.u[k], w.p[k], w.e[k]):
            parts.append(np.ascontiguousarray(arr, dtype=_LE).tobytes())
    return b"".join(parts)


def write_flw1(path, w) -> None:
    Path(path).write_bytes(dumps_flw1(w))


@_parse_errors
def loads_flw1(raw: bytes):
    from .gas import FlowField

    header, _, pos = _read_header(raw, "flw1", "fields")
    if header["fields"] != ["rho", "u", "p", "e"]:
        raise MalformedFile(f"unsupported field list {header['fields']}")
    g = _grid_from(header)
    d = int(header["d"][0])
    if d != g.n:
        raise MalformedFile("d does not match the grid dimension")
    times = np.array([float(v) for v in header["times"]])
    per = g.size * (3 + d)
    data = np.frombuffer(raw[pos:], dtype=_LE).astype(float)
    if data.size != per * times.size:
        raise MalformedFile(f"payload has {data.size} values, expected {per * times.size}")
    blocks = data.reshape(times.size, per)
    c = g.size
    rho = blocks[:, :c].reshape((times.size,) + g.counts)
    u = blocks[:, c : c + c * d].reshape((times.size,) + g.counts + (d,))
    p = blocks[:, c + c * d : 2 * c + c * d].reshape((times.size,) + g.counts)
    e = blocks[:, 2 * c + c * d :].reshape((times.size,) + g.counts)
    return FlowField(times, g, rho, u, p, e)


def read_flw1(path):
    return loads_flw1(Path(path).read_bytes())


# --- key-value configuration ----------------------------------------------


def _coerce(text: str):
    parts = text.split()
    out = []
    for p in parts:
        for cast in (int, float):
            try:
                out.append(cast(p))
                break
            except ValueError:
                continue
        else:
            out.append(p)
    if len(out) == 1:
        return out[0]
    return out


def parse_config(text: str) -> dict:
    """``key = value`` or ``key value`` lines; ``#`` starts a comment.

    Whitespace-separated values become lists; numbers are converted.
    """
    cfg = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
        else:
            key, _, value = line.partition(" ")
        key = key.strip()
        if not key or not value.strip():
            raise MalformedFile(f"line {lineno}: expected 'key = value'")
        cfg[key] = _coerce(value.strip())
    return cfg


def read_config(path) -> dict:
    return parse_config(Path(path).read_text())
