#!/usr/bin/env python3
"""
Repeatability harness: run the same experiment suite twice; assert byte-identical outputs.
Exits 0 if stable, 1 if unstable. Prints the differing files on failure.

Usage: python scripts/repeatability_check.py [--seed 7] [--scale desk] [--experiments 1-18] [--workdir DIR]

The full desk suite takes minutes; pass e.g. --experiments 1,4 for a quick check.
"""

import argparse
import filecmp
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli import main as d3fl_main

DEFAULT_SEED = 7
DEFAULT_SCALE = "desk"


def _files(root: Path) -> list[Path]:
    return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())


def compare_trees(a: Path, b: Path) -> list[str]:
    """Relative paths that are missing on one side or differ in content."""
    fa, fb = _files(a), _files(b)
    problems = [f"only in first: {p}" for p in sorted(set(fa) - set(fb))]
    problems += [f"only in second: {p}" for p in sorted(set(fb) - set(fa))]
    for rel in sorted(set(fa) & set(fb)):
        if not filecmp.cmp(a / rel, b / rel, shallow=False):
            problems.append(f"differs: {rel}")
    return problems


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--scale", default=DEFAULT_SCALE)
    parser.add_argument("--experiments", default=None, help="eval.experiments override, e.g. 1-3")
    parser.add_argument("--workdir", type=Path, default=None, help="keep both runs here (default: temp dir)")
    args = parser.parse_args()

    workdir = args.workdir or Path(tempfile.mkdtemp(prefix="d3fl-repeat-"))
    runs = [workdir / "r1", workdir / "r2"]
    extra = ["--set", f"eval.experiments={args.experiments}"] if args.experiments else []

    for out in runs:
        print(f"Running experiment suite into {out} ...")
        code = d3fl_main(["experiment", "--scale", args.scale, "--seed", str(args.seed), "--out", str(out), *extra])
        if code != 0:
            print(f"Error: suite exited with {code}", file=sys.stderr)
            sys.exit(1)

    problems = compare_trees(*runs)
    if problems:
        print("\n=== VARIANCE REPORT ===\n")
        for p in problems:
            print(f"  {p}")
        print("\nRepeatability check FAILED.")
        sys.exit(1)
    print(f"\nPASS: {len(_files(runs[0]))} files byte-identical across both runs.")
    sys.exit(0)


if __name__ == "__main__":
    main()
