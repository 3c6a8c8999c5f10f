"""JSON/CSV serialization of bodies, groups, step functions and run outputs."""
from __future__ import annotations

import csv
import io as _io
import json
import math
from typing import Any

import numpy as np

from .bodies import ConvexBody, Ellipsoid, HPolytope, HullBody, box, regular_polygon, simplex, unit_ball
from .errors import ConfigError
from .projective import AffineChart, ProjTransform

SCHEMA = "hilbert-kit/1"


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy values to plain JSON; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj: Any) -> str:
    """Deterministic JSON text (sorted keys, shortest round-trip floats)."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def _require(d: dict, allowed: set, what: str):
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {what}: {sorted(unknown)}")


def _check_schema(d: dict, what: str):
    if "schema" in d and d["schema"] != SCHEMA:
        raise ConfigError(f"{what} has schema {d['schema']!r}, expected {SCHEMA!r}")


# -- bodies ------------------------------------------------------------------

BUILTIN_BODIES = {
    "disk": lambda: unit_ball(2),
    "ball3": lambda: unit_ball(3),
    "square": lambda: box([1.0, 1.0]),
    "cube": lambda: box([1.0, 1.0, 1.0]),
    "simplex": lambda: simplex(2),
    "hexagon": lambda: regular_polygon(6),
    "pentagon": lambda: regular_polygon(5),
    "segment": lambda: box([1.0]),
}


def body_to_dict(body: ConvexBody) -> dict:
    return body.to_dict()


def body_from_dict(d: dict) -> ConvexBody:
    if "builtin" in d:
        _require(d, {"schema", "builtin"}, "body")
        name = d["builtin"]
        if name not in BUILTIN_BODIES:
            raise ConfigError(f"unknown builtin body {name!r}; choose from {sorted(BUILTIN_BODIES)}")
        return BUILTIN_BODIES[name]()
    _check_schema(d, "body")
    kind = d.get("kind")
    common = {"schema", "kind", "chart", "base"}
    try:
        chart = AffineChart(np.asarray(d["chart"], float)) if "chart" in d else None
        if kind == "omegaf":
            _require(d, common | {"spec", "grid_n"}, "omegaf body")
            from .omegaf import StepFunctionSpec, build_omega_f
            return build_omega_f(StepFunctionSpec.from_dict(d["spec"]), int(d.get("grid_n", 720)))
        if chart is None:
            raise ConfigError("body needs a chart covector")
        base = chart.to_chart(np.asarray(d["base"], float)) if d.get("base") is not None else None
        if kind == "hpolytope":
            _require(d, common | {"A", "b"}, "hpolytope body")
            return HPolytope(chart=chart, base=base, A=np.asarray(d["A"], float), b=np.asarray(d["b"], float))
        if kind == "ellipsoid":
            _require(d, common | {"center", "shape"}, "ellipsoid body")
            return Ellipsoid(chart=chart, base=base, center=np.asarray(d["center"], float),
                             shape=np.asarray(d["shape"], float))
        if kind == "hull":
            _require(d, common | {"points"}, "hull body")
            return HullBody(chart=chart, base=base, points=np.asarray(d["points"], float))
    except KeyError as e:
        raise ConfigError(f"body description is missing {e}") from None
    raise ConfigError(f"unknown body kind {kind!r}")


# -- groups ------------------------------------------------------------------

def group_from_dict(d: dict):
    """GroupExample from a builtin name or explicit generators plus a body."""
    from .dynamics import GroupExample, build_simplex_diagonal_group, build_triangle_reflection_group
    _check_schema(d, "group")
    if "builtin" in d:
        _require(d, {"schema", "builtin", "m", "t", "L0", "preserve_tol"}, "group")
        name = d["builtin"]
        if name == "triangle":
            m = d.get("m", [3, 3, 4])
            return build_triangle_reflection_group(*m, t=float(d.get("t", 2.0)), L0=int(d.get("L0", 10)),
                                                   preserve_tol=d.get("preserve_tol"))
        if name == "simplex-diagonal":
            return build_simplex_diagonal_group()
        raise ConfigError(f"unknown builtin group {name!r}")
    _require(d, {"schema", "name", "generators", "involutions", "relations_hint", "body", "params",
                 "preserve_tol"}, "group")
    if "generators" not in d or "body" not in d:
        raise ConfigError("group needs generators and a body")
    gens = [ProjTransform(np.asarray(g, float), chr(ord("a") + i)) for i, g in enumerate(d["generators"])]
    inv = [bool(v) for v in d.get("involutions", [False] * len(gens))]
    if len(inv) != len(gens):
        raise ConfigError("involutions must have one flag per generator")
    params = dict(d.get("params", {}))
    params["relations_hint"] = d.get("relations_hint", "")
    return GroupExample(d.get("name", "custom"), gens, inv, body_from_dict(d["body"]), params,
                        float(d.get("preserve_tol", 1e-6)))


# -- CSV ---------------------------------------------------------------------

def csv_text(header: list, rows, config: dict | None = None) -> str:
    """CSV with the resolved config as leading '#' comment lines."""
    buf = _io.StringIO()
    if config is not None:
        for line in json.dumps(jsonable(config), sort_keys=True).splitlines():
            buf.write("# config: " + line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return v


def read_csv_points(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = list(csv.reader(lines[1:]))
    return np.array([[float(c) for c in r] for r in rows])
