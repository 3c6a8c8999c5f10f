"""Vertical-face distances on the hull of Omega_f against the closed form, across grid sizes."""
import argparse
import math
import time

import numpy as np

from hilbertkit.faces import extended_distance
from hilbertkit.omegaf import StepFunctionSpec, build_omega_f, vertical_face_distance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", default="90,180,720,2880")
    ap.add_argument("--pairs", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    spec = StepFunctionSpec((0.0, 2.0, 4.0), (1.0, 1.7, 1.2), {0.0: 2.5})
    rng = np.random.default_rng(args.seed)
    th = rng.uniform(0, 2 * math.pi, args.pairs)
    zs = rng.uniform(-0.95, 0.95, (args.pairs, 2))
    for n in (int(v) for v in args.grids.split(",")):
        t0 = time.perf_counter()
        B = build_omega_f(spec, n)
        build = time.perf_counter() - t0
        err = 0.0
        for t, (u1, u2) in zip(th, zs):
            f = spec(t)
            a = float(vertical_face_distance(spec, t, u1 * f, u2 * f))
            b = float(extended_distance(B, B.wall_point(t, u1 * f), B.wall_point(t, u2 * f)))
            err = max(err, abs(a - b))
        print(f"grid_n={n:5d} facets={len(B.b):6d} build={build:.2f}s max error={err:.3e}")


if __name__ == "__main__":
    main()
