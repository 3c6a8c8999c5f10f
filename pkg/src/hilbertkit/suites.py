"""Standard probe suites shared by the CLI, the scripts and the acceptance tests."""
from __future__ import annotations

import io
import math
import os

import numpy as np

from .bodies import box, regular_polygon
from .facts import (ConvergingPairs, ball_ratio, check_face_in_scaled_ball, check_scaled_ball_in_ball,
                    face_sequences, random_fact_configuration, random_polytope, semicontinuity_probe)
from .omegaf import StepFunctionSpec, jump_sequences, wall_distance


def fact_configurations(n: int, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return [random_fact_configuration(rng) for _ in range(n)]


def _aggregate(reports, anchor: str) -> dict:
    bad = [r for r in reports if not r.passed]
    return {"pass": not bad, "anchor": anchor, "configs": len(reports), "violations": len(bad),
            "worst_margin": min((r.worst_margin for r in reports), default=math.inf),
            "witnesses": [r.config for r in bad[:5]]}


def hand_cases(mu_rule: str = "stated") -> dict:
    """Square-edge cases worked out by hand."""
    sq = box([1.0, 1.0])
    r = 0.5 * math.log(3)
    f1 = check_face_in_scaled_ball(sq, [1.0, 0.0], r)
    f2 = check_scaled_ball_in_ball(sq, [1.0, 0.0], r, 0.5 * math.log(9), rule=mu_rule)
    return {"lambda_square_edge": f1.details["lambda"],
            "mu_formula_e2r_2_e2R_4": ball_ratio(0.5 * math.log(2), 0.5 * math.log(4), "stated"),
            "face_in_scaled_ball_square_edge": f1.passed,
            "scaled_ball_in_ball_square_edge": f2.passed,
            "scaled_ball_in_ball_square_edge_mu": f2.details["mu"]}


def standard_sequences(seed: int = 0) -> list:
    """(body or None, sequences, distance) triples making up the standard semi-continuity suite."""
    sq = box([1.0, 1.0])
    n = np.arange(1, 25)
    k = 2.0 ** -n
    # interior points approaching two points of the right edge
    x_n = np.column_stack([1 - k, np.zeros_like(k)])
    y_n = np.column_stack([1 - k, np.full_like(k, 0.4)])
    edge = ConvergingPairs(x_n, y_n, np.array([1.0, 0.0]), np.array([1.0, 0.4]), "square:edge")
    c = np.array([0.2, -0.3])
    const = ConvergingPairs(np.tile(c, (8, 1)), np.tile(c, (8, 1)), c, c, "square:constant")
    jump = StepFunctionSpec((0.0,), (1.0,), {0.0: 2.0})
    P3 = random_polytope(np.random.default_rng(seed + 1), 3)
    return [
        (sq, [edge, const] + face_sequences(sq, seed=seed), None),
        (regular_polygon(6), face_sequences(regular_polygon(6), seed=seed), None),
        (P3, face_sequences(P3, seed=seed), None),
        (None, jump_sequences(jump), lambda p, q: wall_distance(jump, p, q)),
    ]


def semicontinuity_suite(tol: float = 1e-6, seed: int = 0) -> dict:
    reports = [semicontinuity_probe(b, seqs, tol=tol, distance=dist)
               for b, seqs, dist in standard_sequences(seed)]
    out = _aggregate(reports, "lower-semicontinuity")
    out["violations"] = sum(len(r.witnesses) for r in reports)
    out["sequences"] = sum(r.config["sequences"] for r in reports)
    out["witnesses"] = [w for r in reports for w in r.witnesses][:5]
    return out


def standard_fact_suite(n_configs: int = 100, samples: int = 256, mu_rule: str = "stated",
                        tol: float = 1e-6, seed: int = 0) -> dict:
    configs = fact_configurations(n_configs, seed)
    f1 = [check_face_in_scaled_ball(b, x, r, samples) for b, x, r, R in configs]
    f2 = [check_scaled_ball_in_ball(b, x, r, R, samples, rule=mu_rule) for b, x, r, R in configs]
    probes = {
        "face-in-scaled-ball": _aggregate(f1, "face-in-scaled-ball"),
        "scaled-ball-in-ball": _aggregate(f2, "scaled-ball-in-ball"),
        "lower-semicontinuity": semicontinuity_suite(tol, seed),
    }
    hand = hand_cases(mu_rule)
    ok = all(p["pass"] for p in probes.values())
    return {"pass": ok, "probes": probes, "hand_cases": hand, "mu_rule": mu_rule}


# every command once, writing its artifacts; used for the determinism check
CLI_SUITE = [
    ("distance", ["--body", "disk", "--x", "0,0", "--y", "0.5,0"], ("json",)),
    ("face", ["--body", "square", "--x", "1,0.3"], ("json",)),
    ("ball", ["--body", "square", "--x", "1,0", "--R", "0.5493061443340549"], ("csv", "svg")),
    ("shadow", [], ("csv", "svg")),
    ("limitset", ["--group", "simplex-diagonal", "--L", "6"], ("csv", "svg")),
    ("limitset", ["--group", "triangle", "--L", "6"], ("csv", "svg")),
    ("coverage", ["--group", "triangle", "--L", "6"], ("json",)),
    ("verify-facts", ["--configs", "10", "--mu-rule", "sharp"], ("json",)),
    ("grain-probe", ["--spec", "jump"], ("json",)),
    ("omegaf-build", ["--spec", "jump"], ("json", "svg")),
    ("shadow-lemma", ["--group", "triangle", "--L", "6", "--trials", "10"], ("json",)),
]


def run_cli_suite(outdir: str, seed: int = 0) -> dict:
    """Run CLI_SUITE into ``outdir``; returns {artifact name: (exit code, bytes)}."""
    from .cli import run
    os.makedirs(outdir, exist_ok=True)
    results = {}
    for i, (cmd, args, kinds) in enumerate(CLI_SUITE):
        stem = os.path.join(outdir, f"{i:02d}-{cmd}")
        argv = [cmd, *args, "--seed", str(seed)]
        main = [k for k in kinds if k != "svg"][0]
        argv += ["--out", f"{stem}.{main}"]
        if "svg" in kinds:
            argv += ["--svg", f"{stem}.svg"]
        buf = io.StringIO()
        code = run(argv, stdout=buf)
        for k in kinds:
            path = f"{stem}.{k}"
            with open(path, "rb") as fh:
                results[os.path.basename(path)] = (code, fh.read())
        results[f"{i:02d}-{cmd}.stdout"] = (code, buf.getvalue().encode())
    return results
