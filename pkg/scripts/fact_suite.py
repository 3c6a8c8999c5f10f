"""Homothety bounds and lower semi-continuity on random configurations, for both ball-ratio rules."""
import argparse

from hilbertkit.io import dumps
from hilbertkit.suites import standard_fact_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", type=int, default=1000)
    ap.add_argument("--samples", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    out = {}
    for rule in ("stated", "sharp"):
        res = standard_fact_suite(args.configs, args.samples, rule, seed=args.seed)
        out[rule] = res
        for name, p in res["probes"].items():
            print(f"{rule:7s} {name:22s} {'PASS' if p['pass'] else 'FAIL'}  "
                  f"violations={p['violations']} worst_margin={p['worst_margin']}")
    print("hand cases:", out["stated"]["hand_cases"])
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps(out))


if __name__ == "__main__":
    main()
