"""Command-line entry point.

Every command resolves its parameters from built-in defaults, then an optional
JSON config file (``--config``), then scalar flags. The resolved config is
embedded in every artifact. Exit codes: 0 success, 1 probe failure,
2 configuration error, 3 computation error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import io as hio
from .errors import ConfigError, HilbertKitError

EXIT_OK, EXIT_PROBE, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2, 3


# -- configuration -----------------------------------------------------------

COMMON = {"seed": 0, "out": None, "svg": None}

DEFAULTS: dict = {
    "distance": {"body": "disk", "x": [0.0, 0.0], "y": [0.5, 0.0], "method": "auto"},
    "face": {"body": "square", "x": [1.0, 0.3]},
    "ball": {"body": "disk", "x": [0.0, 0.0], "R": 0.5, "n": 512},
    "shadow": {"body": "disk", "light": [-1.0, 0.0], "center": [0.3, 0.2], "R": 0.5, "n": 256},
    "limitset": {"group": "simplex-diagonal", "L": 6},
    "coverage": {"group": "simplex-diagonal", "L": 6, "samples": 2000},
    "verify-facts": {"configs": 100, "samples": 256, "mu_rule": "stated", "tol": 1e-6},
    "grain-probe": {"spec": "constant", "theta": 0.0, "z0": 0.0, "r": 0.25 * math.log(3),
                    "R": 0.5 * math.log(3), "u_halfwidth": 0.05, "u_height": None, "delta": 1e-3,
                    "samples": 64},
    "omegaf-build": {"spec": "jump", "grid_n": 720},
    "shadow-lemma": {"group": "triangle", "L": 8, "trials": 100, "R_grid": None, "k": 16},
}

# probe anchors named in failure messages
ANCHORS = {
    "face-in-scaled-ball": "homothety bound (1): closed face inside the scaled closed r-ball",
    "scaled-ball-in-ball": "homothety bound (2): scaled closed r-ball inside the closed R-ball",
    "lower-semicontinuity": "lower semi-continuity of the extended metric",
    "grain-of-sand": "grain-of-sand lemma: r-ball inside the interior of the R-neighbourhood of U",
    "shadow-lemma": "shadow lemma: shadows contain proximal limit points",
}

BUILTIN_SPECS = {
    "constant": {"breakpoints": [], "values": [1.0]},
    "jump": {"breakpoints": [0.0], "values": [1.0], "point_values": {"0.0": 2.0}},
}

BUILTIN_GROUPS = {
    "triangle": {"builtin": "triangle", "m": [3, 3, 4], "t": 2.0, "L0": 10},
    "triangle-t1": {"builtin": "triangle", "m": [3, 3, 4], "t": 1.0, "L0": 10},
    "simplex-diagonal": {"builtin": "simplex-diagonal"},
}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in DEFAULTS:
            raise ConfigError(f"unknown command {self.command!r}")
        allowed = set(DEFAULTS[self.command]) | set(COMMON)
        unknown = set(self.params) - allowed
        if unknown:
            raise ConfigError(f"unknown keys for {self.command}: {sorted(unknown)}")
        merged = {**COMMON, **DEFAULTS[self.command], **self.params}
        for k in ("tol", "delta", "R", "r"):
            if k in merged and merged[k] is not None and not float(merged[k]) > 0:
                raise ConfigError(f"{k} must be positive")
        self.params = merged

    def header(self) -> dict:
        p = {k: v for k, v in self.params.items() if k not in ("out", "svg")}
        return {"schema": hio.SCHEMA, "command": self.command, "params": p}


def load_config(command: str, path: str | None, overrides: dict) -> RunConfig:
    params: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        extra = set(raw) - {"schema", "command", "params"}
        if extra:
            raise ConfigError(f"unknown keys in config file: {sorted(extra)}")
        if raw.get("command", command) != command:
            raise ConfigError(f"config is for {raw['command']!r}, not {command!r}")
        params.update(raw.get("params", {}))
    params.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(command, params)


def _load_json_ref(ref, builtins: dict, what: str) -> dict | str:
    """A dict, a builtin name, or a path to a JSON file."""
    if isinstance(ref, dict):
        return ref
    if isinstance(ref, str) and ref in builtins:
        return builtins[ref]
    if isinstance(ref, str) and os.path.exists(ref):
        try:
            with open(ref) as fh:
                return json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad {what} file {ref}: {e}") from None
    raise ConfigError(f"cannot resolve {what} {ref!r}")


def resolve_body(ref):
    if isinstance(ref, str) and ref in hio.BUILTIN_BODIES:
        return hio.BUILTIN_BODIES[ref]()
    return hio.body_from_dict(_load_json_ref(ref, {}, "body"))


def resolve_group(ref):
    return hio.group_from_dict(_load_json_ref(ref, BUILTIN_GROUPS, "group"))


def resolve_spec(ref):
    from .omegaf import StepFunctionSpec
    return StepFunctionSpec.from_dict(_load_json_ref(ref, BUILTIN_SPECS, "step function"))


def _vec(v) -> np.ndarray:
    if isinstance(v, str):
        try:
            v = [float(c) for c in v.split(",")]
        except ValueError:
            raise ConfigError(f"cannot parse point {v!r}") from None
    return np.asarray(v, float)


# -- commands ----------------------------------------------------------------

@dataclass
class Result:
    payload: dict
    passed: bool = True
    csv: str | None = None
    svg: str | None = None
    summary: str = ""


def cmd_distance(cfg: RunConfig) -> Result:
    from .metric import hilbert_distance
    p = cfg.params
    body = resolve_body(p["body"])
    d = hilbert_distance(body, _vec(p["x"]), _vec(p["y"]), method=p["method"])
    return Result({"distance": d}, summary=repr(d))


def cmd_face(cfg: RunConfig) -> Result:
    from .faces import face_of
    p = cfg.params
    body = resolve_body(p["body"])
    F = face_of(body, _vec(p["x"]))
    payload = {"dim": F.dim, "extremal": F.is_extremal, "anchor": F.anchor,
               "basis": F.basis.T, "active": list(F.active) if F.active is not None else None}
    return Result(payload, summary=f"face dimension {F.dim}")


def cmd_ball(cfg: RunConfig) -> Result:
    from .faces import closure_ball_sample
    p = cfg.params
    body = resolve_body(p["body"])
    S = closure_ball_sample(body, _vec(p["x"]), float(p["R"]), int(p["n"]))
    hdr = [f"x{i}" for i in range(body.dim)]
    svg = None
    if body.dim == 2:
        from .render import render_planar
        svg = render_planar(body, S, metadata=cfg.header())
    return Result({"count": len(S)}, csv=hio.csv_text(hdr, S.tolist(), cfg.header()), svg=svg,
                  summary=f"{len(S)} ball samples")


def cmd_shadow(cfg: RunConfig) -> Result:
    from .shadows import ShadowQuery, shadow_minima
    p = cfg.params
    body = resolve_body(p["body"])
    q = ShadowQuery(_vec(p["light"]), _vec(p["center"]), float(p["R"]))
    bd = body.boundary_samples(int(p["n"]))
    m = shadow_minima(body, q, bd)
    inside = m < q.radius
    rows = [[*b, mm, int(f)] for b, mm, f in zip(bd.tolist(), m.tolist(), inside)]
    hdr = [f"x{i}" for i in range(body.dim)] + ["min_distance", "in_shadow"]
    svg = None
    if body.dim == 2:
        from .render import render_planar
        svg = render_planar(body, [q.center], bd[inside], metadata=cfg.header())
    return Result({"in_shadow": int(inside.sum()), "checked": len(bd)},
                  csv=hio.csv_text(hdr, rows, cfg.header()), svg=svg,
                  summary=f"{int(inside.sum())} of {len(bd)} boundary samples in the shadow")


def cmd_limitset(cfg: RunConfig) -> Result:
    p = cfg.params
    G = resolve_group(p["group"])
    lam = G.limit_set(int(p["L"]))
    hdr = [f"x{i}" for i in range(G.body.dim)] + ["word_length"]
    svg = None
    if G.body.dim == 2:
        from .render import render_planar
        svg = render_planar(G.body, lam.points, metadata=cfg.header())
    return Result({"group": G.name, "points": len(lam), "min_proximal_length": lam.min_proximal_length},
                  csv=hio.csv_text(hdr, lam.csv_rows(), cfg.header()), svg=svg,
                  summary=f"{len(lam)} limit points")


def cmd_coverage(cfg: RunConfig) -> Result:
    from .dynamics import coverage_gap
    p = cfg.params
    G = resolve_group(p["group"])
    L = int(p["L"])
    lam = G.limit_set(L)
    bd = G.body.boundary_samples(int(p["samples"]))
    rows = []
    for k in range(0, L + 1):
        sub = lam.truncate(k)
        rows.append({"L": k, "points": len(sub), "gap": coverage_gap(sub, bd) if len(sub) else math.inf})
    return Result({"group": G.name, "levels": rows},
                  summary="; ".join(f"L={r['L']}: {r['gap']:.6g}" for r in rows))


def cmd_verify_facts(cfg: RunConfig) -> Result:
    from .suites import standard_fact_suite
    p = cfg.params
    out = standard_fact_suite(n_configs=int(p["configs"]), samples=int(p["samples"]),
                              mu_rule=p["mu_rule"], tol=float(p["tol"]), seed=int(p["seed"]))
    lines = []
    for name, rep in out["probes"].items():
        status = "PASS" if rep["pass"] else "FAIL"
        lines.append(f"{status} {name} [{ANCHORS.get(rep['anchor'], rep['anchor'])}]: "
                     f"{rep['violations']} violations, worst margin {rep['worst_margin']}")
    return Result(out, passed=out["pass"], summary="\n".join(lines))


def cmd_grain_probe(cfg: RunConfig) -> Result:
    from .omegaf import grain_of_sand_probe
    p = cfg.params
    spec = resolve_spec(p["spec"])
    rep = grain_of_sand_probe(spec, float(p["theta"]), float(p["z0"]), float(p["r"]), float(p["R"]),
                              u_halfwidth=float(p["u_halfwidth"]), delta=float(p["delta"]),
                              samples=int(p["samples"]),
                              u_height=None if p["u_height"] is None else float(p["u_height"]))
    status = rep.details["status"]
    # an unmet hypothesis is informational, not a failure of the lemma
    ok = status in ("pass", "hypothesis-not-met")
    msg = f"{status.upper()} grain-of-sand [{ANCHORS['grain-of-sand']}]: worst margin {rep.worst_margin:.3e}"
    return Result(rep.to_json(), passed=ok, summary=msg)


def cmd_omegaf_build(cfg: RunConfig) -> Result:
    from .omegaf import build_omega_f, hull_vertices_match
    from .render import render_omega_f
    p = cfg.params
    spec = resolve_spec(p["spec"])
    B = build_omega_f(spec, int(p["grid_n"]))
    payload = {"spec": spec.to_dict(), "grid_n": B.grid_n, "angles": len(B.angles),
               "facets": len(B.b), "generators_are_vertices": hull_vertices_match(B),
               "max_height": float(B.heights.max())}
    svg = render_omega_f(B, metadata=cfg.header())
    return Result(payload, svg=svg, summary=f"{len(B.b)} facets over {len(B.angles)} angles")


def cmd_shadow_lemma(cfg: RunConfig) -> Result:
    from .shadows import shadow_lemma_probe
    p = cfg.params
    G = resolve_group(p["group"])
    lam = G.limit_set(int(p["L"]))
    rep = shadow_lemma_probe(G.body, lam, p["R_grid"], trials=int(p["trials"]), seed=int(p["seed"]),
                             k=int(p["k"]))
    status = "PASS" if rep.passed else "FAIL"
    msg = f"{status} shadow-lemma [{ANCHORS['shadow-lemma']}]: threshold R* = {rep.threshold}"
    return Result(rep.to_json(), passed=rep.passed, summary=msg)


COMMANDS: dict[str, Callable[[RunConfig], Result]] = {
    "distance": cmd_distance, "face": cmd_face, "ball": cmd_ball, "shadow": cmd_shadow,
    "limitset": cmd_limitset, "coverage": cmd_coverage, "verify-facts": cmd_verify_facts,
    "grain-probe": cmd_grain_probe, "omegaf-build": cmd_omegaf_build, "shadow-lemma": cmd_shadow_lemma,
}

HELP = {
    "distance": "Hilbert distance between two interior points",
    "face": "open face of a closure point",
    "ball": "samples of a closed ball on the closure (CSV)",
    "shadow": "boundary samples in the shadow of a ball (CSV)",
    "limitset": "approximate proximal limit set of a group (CSV: chart coordinates, word length)",
    "coverage": "coverage gap of the limit set approximation by level",
    "verify-facts": "sampled checks of the homothety bounds and lower semi-continuity",
    "grain-probe": "grain-of-sand probe on an Omega_f wall point",
    "omegaf-build": "build an Omega_f hull and render its two views",
    "shadow-lemma": "estimate the radius at which shadows always contain limit points",
}


def _float_or_none(s):
    return None if s in (None, "none", "None") else float(s)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilbertkit", description="Computations in Hilbert geometries.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name])
        sp.add_argument("--config", help="JSON run config {command, params}")
        sp.add_argument("--out", help="write the main artifact here (JSON or CSV)")
        sp.add_argument("--svg", help="write an SVG rendering here when available")
        sp.add_argument("--seed", type=int)
        for key, default in DEFAULTS[name].items():
            flag = "--" + key.replace("_", "-")
            if isinstance(default, bool):
                sp.add_argument(flag, dest=key, type=lambda s: s.lower() in ("1", "true", "yes"))
            elif isinstance(default, int) and not isinstance(default, bool):
                sp.add_argument(flag, dest=key, type=int)
            elif isinstance(default, float) or key in ("u_height",):
                sp.add_argument(flag, dest=key, type=_float_or_none)
            elif key == "R_grid":
                sp.add_argument(flag, dest=key, type=lambda s: [float(c) for c in s.split(",")])
            else:
                sp.add_argument(flag, dest=key)
    return ap


def _write(path: str, text: str):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def run(argv: list | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    overrides = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    try:
        cfg = load_config(ns.command, ns.config, overrides)
        res = COMMANDS[ns.command](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (HilbertKitError, ValueError, np.linalg.LinAlgError) as e:
        print(f"computation error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    out, svg = cfg.params.get("out"), cfg.params.get("svg")
    doc = {"config": cfg.header(), "result": res.payload, "pass": res.passed}
    if out:
        _write(out, res.csv if res.csv is not None else hio.dumps(doc))
    if svg and res.svg is not None:
        _write(svg, res.svg)
    print(res.summary, file=stdout)
    return EXIT_OK if res.passed else EXIT_PROBE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
