#!/usr/bin/env python3
"""
Simple test runner for the itembound library
"""

import argparse
import subprocess
import sys
from pathlib import Path

TEST_FILES = {
    "core": "itemsets, families, frequencies, distributions",
    "query": "query parsing and evaluation",
    "graph": "frontiers, ranks, minimal safe sets",
    "cut": "mutual information weights, min cuts, restricted safe sets",
    "lp": "exact simplex",
    "bounds": "frequency intervals and policies",
    "junction": "triangulation, junction trees, factorized programs",
    "maxent": "iterative proportional fitting",
    "miner": "transaction parsing, modified Apriori",
    "cli": "command line and experiment report",
    "server": "MCP tools",
}


def parse_args(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="Run the itembound test suite",
        epilog="test files: " + ", ".join(
            f"{name} ({about})" for name, about in TEST_FILES.items()))
    parser.add_argument("pattern", nargs="?", default=None,
                        help="Only run tests matching this -k expression")
    parser.add_argument("--all", action="store_true",
                        help="Include the slow property runs")
    parser.add_argument("--file", choices=sorted(TEST_FILES), default=None,
                        help="Run a single test file, e.g. graph for tests/test_graph.py")
    return parser.parse_args(argv)


def build_command(args):
    """The pytest invocation for the parsed arguments."""
    target = f"tests/test_{args.file}.py" if args.file else "tests/"
    cmd = [sys.executable, "-m", "pytest", target, "-v", "--tb=short"]
    if args.pattern:
        cmd += ["-k", args.pattern]
    if not args.all:
        cmd += ["-m", "not slow"]
    return cmd


def main(argv=None):
    args = parse_args(argv)
    if not Path("tests").exists():
        print("❌ Tests directory not found. Make sure you're in the project root.")
        return 1

    scope = f"tests/test_{args.file}.py" if args.file else "all tests"
    extras = " including slow runs" if args.all else ""
    print(f"🧪 Running {scope}{extras}")
    print("=" * 50)
    try:
        code = subprocess.run(build_command(args), check=False).returncode
    except OSError as e:
        print(f"❌ Error running tests: {e}")
        return 1

    if code == 0:
        print("\n✅ All tests passed!")
    else:
        print(f"\n❌ Tests failed with return code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
