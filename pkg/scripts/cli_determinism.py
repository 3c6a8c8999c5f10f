"""Run every CLI command twice with the same seed and compare artifact hashes."""
import argparse
import hashlib
import sys
import tempfile

from hilbertkit.suites import run_cli_suite


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    with tempfile.TemporaryDirectory() as d:
        a = run_cli_suite(f"{d}/a", args.seed)
        b = run_cli_suite(f"{d}/b", args.seed)
    ok = True
    for k in sorted(a):
        same = a[k] == b.get(k)
        ok &= same
        print(f"{'same' if same else 'DIFF'} exit={a[k][0]} {hashlib.sha256(a[k][1]).hexdigest()[:16]} {k}")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
