"""Shadow-lemma hit rates on the deformed triangle group as the level L grows."""
import argparse

from hilbertkit.dynamics import build_triangle_reflection_group
from hilbertkit.shadows import shadow_lemma_probe


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", default="4,6,8")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    G = build_triangle_reflection_group(3, 3, 4, t=args.t, L0=10)
    for L in (int(v) for v in args.levels.split(",")):
        rep = shadow_lemma_probe(G.body, G.limit_set(L), trials=args.trials, seed=args.seed)
        m = sorted(rep.pair_minima)
        print(f"L={L:2d} points={rep.config['limit_points']:5d} R*={rep.threshold} "
              f"median pair minimum={m[len(m) // 2]:.4f} max={m[-1]:.4f}")


if __name__ == "__main__":
    main()
