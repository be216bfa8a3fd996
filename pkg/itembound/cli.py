"""
Command-line front end.

    python -m itembound mine --data D --sigma S [--max-size K] [--out FILE]
    python -m itembound safeset --family F --attrs b,c [--max-size M]
    python -m itembound bound --family F --query "b & c" [--policy safe] [--json]
    python -m itembound maxent --family F [--attrs a,b] [--tol T]
    python -m itembound experiment --data D --sigma S [--queries N] [--seed S] ...

Exit codes: 0 on success, 1 when the frequencies admit no distribution,
2 for usage, input and format errors.
"""

import argparse
import json
import logging
import random
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from .bounds import (FrequencyInterval, bound_with_policy, frequency_interval,
                     interval_ratio, parse_policy)
from .config import Settings, configure_logging
from .core import FrequencyAssignment, Itemset, read_family, write_family
from .cut import restricted_safe_set
from .errors import (ConfigurationError, InconsistentFrequenciesError,
                     ItemboundError)
from .graph import iter_growth, minimal_safe_set
from .maxent import expectations, ipf_maxent, verify_marginal_theorem
from .miner import MinerConfig, modified_apriori, read_transactions
from .query import (format_formula, parse, random_conjunction, random_formula,
                    support)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
RATIO_BINS = ("[0.0,0.2)", "[0.2,0.4)", "[0.4,0.6)", "[0.6,0.8)", "[0.8,1.0)", "{1}")
# full-set maxent fits for the deviation report stay below this many items
MAXENT_DEVIATION_LIMIT = 16


def _attrs(text: str) -> List[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    if not names:
        raise argparse.ArgumentTypeError("expected a comma-separated list of attributes")
    return names


def _query_size(text: str) -> Tuple[int, int]:
    match = re.fullmatch(r"(\d+)(?:\.\.(\d+))?", text.strip())
    if not match:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}")
    lo = int(match.group(1))
    hi = int(match.group(2) or lo)
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"invalid query size range {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itembound",
        description="Bound boolean query frequencies from itemset frequencies")
    parser.add_argument("--log-level", default=None,
                        help="Log level (default: ITEMBOUND_LOG_LEVEL or INFO)")
    commands = parser.add_subparsers(dest="command", required=True)

    mine = commands.add_parser("mine", help="Mine itemsets with the relative threshold")
    mine.add_argument("--data", required=True, help="FIMI transaction file")
    mine.add_argument("--sigma", type=float, required=True, help="Threshold sigma")
    mine.add_argument("--max-size", type=int, default=None, help="Largest itemset size")
    mine.add_argument("--absolute", action="store_true",
                      help="Use the plain support threshold instead of the relative one")
    mine.add_argument("--out", default=None, help="Family file to write (default: stdout)")
    mine.add_argument("--progress", action="store_true", help="Show a progress bar")
    mine.set_defaults(handler=cmd_mine)

    safeset = commands.add_parser("safeset", help="Minimal or restricted safe set")
    safeset.add_argument("--family", required=True, help="Family+frequency file")
    safeset.add_argument("--attrs", type=_attrs, required=True, help="e.g. b,c")
    safeset.add_argument("--max-size", type=int, default=None,
                         help="Budget M for a restricted safe set")
    safeset.set_defaults(handler=cmd_safeset)

    bound = commands.add_parser("bound", help="Frequency interval of a query")
    bound.add_argument("--family", required=True, help="Family+frequency file")
    bound.add_argument("--query", required=True, help='Boolean query, e.g. "b & !c"')
    bound.add_argument("--policy", default="safe",
                       help="trivial | safe | restricted:M | factorized (default: safe)")
    bound.add_argument("--json", action="store_true", help="Print a JSON record")
    bound.set_defaults(handler=cmd_bound)

    maxent = commands.add_parser("maxent", help="Maximum-entropy fit of the frequencies")
    maxent.add_argument("--family", required=True, help="Family+frequency file")
    maxent.add_argument("--attrs", type=_attrs, default=None,
                        help="Fit on the minimal safe set of these attributes")
    maxent.add_argument("--tol", type=float, default=None, help="IPF tolerance")
    maxent.add_argument("--max-iter", type=int, default=None, help="IPF cycle cap")
    maxent.set_defaults(handler=cmd_maxent)

    experiment = commands.add_parser("experiment", help="Trivial vs restricted-safe intervals")
    experiment.add_argument("--data", required=True, help="FIMI transaction file")
    experiment.add_argument("--sigma", type=float, required=True, help="Threshold sigma")
    experiment.add_argument("--mine-max-size", type=int, default=None,
                            help="Largest mined itemset size")
    experiment.add_argument("--queries", type=int, default=100, help="Number of queries")
    experiment.add_argument("--query-size", type=_query_size, default=(2, 4),
                            help="Attributes per query, N or LO..HI (default: 2..4)")
    experiment.add_argument("--max-size", type=int, default=8,
                            help="Restricted safe set budget M (default: 8)")
    experiment.add_argument("--seed", type=int, default=0, help="Random seed")
    experiment.add_argument("--formulas", choices=("conjunction", "general"),
                            default="conjunction", help="Query shape")
    experiment.add_argument("--threads", type=int, default=None,
                            help="Worker threads (default: ITEMBOUND_THREADS)")
    experiment.add_argument("--json", default=None, help="Write the JSON report here")
    experiment.add_argument("--progress", action="store_true", help="Show a progress bar")
    experiment.set_defaults(handler=cmd_experiment)
    return parser


def _names(theta: FrequencyAssignment, itemset: Itemset) -> List[str]:
    return list(theta.universe.names_of(itemset))


# --- mine ------------------------------------------------------------------

def cmd_mine(args: argparse.Namespace, settings: Settings) -> int:
    data = read_transactions(args.data)
    cfg = MinerConfig(args.sigma, args.max_size, relative=not args.absolute)
    _, theta = modified_apriori(data, cfg, progress=args.progress)
    write_family(theta, args.out if args.out else sys.stdout)
    return 0


# --- safeset ---------------------------------------------------------------

def _edge_text(theta: FrequencyAssignment, edge: Tuple[int, int]) -> str:
    u, v = edge
    return f"({theta.universe.names[u]},{theta.universe.names[v]})"


def cmd_safeset(args: argparse.Namespace, settings: Settings) -> int:
    theta = read_family(args.family)
    universe = theta.universe
    base = universe.itemset(args.attrs)
    for step in iter_growth(base, theta.family):
        ranks = ", ".join(f"{universe.names[x]}={rank}"
                          for x, rank in sorted(step.ranks.items()))
        print(f"+ {universe.format(step.added)} at radius {step.radius} (ranks: {ranks})")
    if args.max_size is None:
        print(universe.format(minimal_safe_set(base, theta.family)))
        return 0

    result = restricted_safe_set(base, theta, args.max_size)
    line = universe.format(result.itemset)
    if result.removed_edges:
        line += "; removed " + ",".join(_edge_text(theta, e) for e in result.removed_edges)
    if not result.within_budget:
        line += f"; exceeds budget {args.max_size}"
    print(line)
    return 0


# --- bound -----------------------------------------------------------------

def _fraction(value: Fraction) -> str:
    return str(Fraction(value))


def cmd_bound(args: argparse.Namespace, settings: Settings) -> int:
    theta = read_family(args.family)
    f = parse(args.query)
    policy = parse_policy(args.policy)
    report = bound_with_policy(f, theta, policy)
    if args.json:
        record = {
            "query": format_formula(f),
            "policy": str(report.policy),
            "lo": _fraction(report.interval.lo),
            "hi": _fraction(report.interval.hi),
            "projection": _names(theta, report.projection),
            "variables": report.variables,
            "metadata": report.metadata,
        }
        print(json.dumps(record, sort_keys=True, default=str))
        return 0
    print(f"{report.interval.lo} {report.interval.hi}")
    print(f"projection: {theta.universe.format(report.projection)}")
    print(f"variables: {report.variables}")
    for key, value in sorted(report.metadata.items()):
        print(f"{key}: {value}")
    return 0


# --- maxent ----------------------------------------------------------------

def cmd_maxent(args: argparse.Namespace, settings: Settings) -> int:
    theta = read_family(args.family)
    universe = theta.universe
    tol = args.tol if args.tol is not None else settings.maxent_tol
    max_iter = args.max_iter if args.max_iter is not None else settings.maxent_max_iter
    attrs = None
    if args.attrs:
        attrs = minimal_safe_set(universe.itemset(args.attrs), theta.family)
    result = ipf_maxent(theta, attrs, tol, max_iter)
    for fitted in expectations(result, theta):
        print(f"{universe.format(fitted.itemset)}\t{fitted.target}\t"
              f"{fitted.fitted:.9f}\t{fitted.residual:.3e}")
    print(f"cycles: {result.iterations}, residual: {result.residual:.3e}, "
          f"converged: {'yes' if result.converged else 'no'}")
    if attrs is not None and universe.K <= MAXENT_DEVIATION_LIMIT:
        deviation = verify_marginal_theorem(theta, attrs, tol, max_iter)
        print(f"deviation from full fit on {universe.format(attrs)}: {deviation:.3e}")
    return 0


# --- experiment ------------------------------------------------------------

@dataclass
class QueryRecord:
    id: int
    query: str
    support: List[str]
    c_trivial: List[str]
    c_used: List[str]
    i1: FrequencyInterval
    i2: FrequencyInterval
    r: Fraction
    kind: str
    safe_set_size: int

    def as_json(self) -> Dict[str, object]:
        return {
            "id": self.id,
            "query": self.query,
            "B": self.support,
            "C_trivial": self.c_trivial,
            "C_used": self.c_used,
            "i1": [_fraction(self.i1.lo), _fraction(self.i1.hi)],
            "i2": [_fraction(self.i2.lo), _fraction(self.i2.hi)],
            "r": _fraction(self.r),
            "class": self.kind,
            "safe_set_size": self.safe_set_size,
        }


def ratio_bin(r: Fraction) -> int:
    if r >= 1:
        return len(RATIO_BINS) - 1
    return min(int(r * 5), len(RATIO_BINS) - 2)


def _evaluate(item: Tuple[int, object], theta: FrequencyAssignment,
              max_size: int) -> QueryRecord:
    qid, f = item
    B = support(f, theta.universe)
    i1 = frequency_interval(f, theta, B)
    restricted = restricted_safe_set(B, theta, max(max_size, len(B)))
    i2 = frequency_interval(f, restricted.theta, restricted.itemset)
    safe_size = len(minimal_safe_set(B, theta.family))
    kind = "Trivial" if restricted.itemset == B else "Complex"
    return QueryRecord(qid, format_formula(f), _names(theta, B), _names(theta, B),
                       _names(theta, restricted.itemset), i1, i2,
                       interval_ratio(i1, i2), kind, safe_size)


def build_report(records: Sequence[QueryRecord], parameters: Dict[str, object],
                 family_size: int) -> Dict[str, object]:
    bins = {"Complex": [0] * len(RATIO_BINS), "All": [0] * len(RATIO_BINS)}
    ones = {"Complex": 0, "All": 0}
    totals = {"Complex": 0, "All": 0}
    sizes: Dict[int, int] = {}
    for rec in records:
        groups = ("Complex", "All") if rec.kind == "Complex" else ("All",)
        for g in groups:
            bins[g][ratio_bin(rec.r)] += 1
            totals[g] += 1
            ones[g] += rec.r == 1
        sizes[rec.safe_set_size] = sizes.get(rec.safe_set_size, 0) + 1
    share = {g: _fraction(Fraction(ones[g], totals[g])) if totals[g] else None
             for g in totals}
    return {
        "schema_version": SCHEMA_VERSION,
        "parameters": parameters,
        "family_size": family_size,
        "records": [rec.as_json() for rec in records],
        "bin_labels": list(RATIO_BINS),
        "bins": bins,
        "counts": {"Trivial": totals["All"] - totals["Complex"],
                   "Complex": totals["Complex"], "All": totals["All"]},
        "ratio_one_share": share,
        "safe_set_sizes": {str(k): sizes[k] for k in sorted(sizes)},
    }


def format_report(report: Dict[str, object]) -> str:
    counts = report["counts"]
    lines = [f"queries: {counts['All']} (trivial {counts['Trivial']}, "
             f"complex {counts['Complex']})",
             f"{'r':<12}{'Complex':>10}{'All':>10}"]
    for i, label in enumerate(report["bin_labels"]):
        lines.append(f"{label:<12}{report['bins']['Complex'][i]:>10}"
                     f"{report['bins']['All'][i]:>10}")

    def pct(value: Optional[str]) -> str:
        return "-" if value is None else f"{float(Fraction(value)) * 100:.1f}%"

    share = report["ratio_one_share"]
    lines.append(f"{'r = 1':<12}{pct(share['Complex']):>10}{pct(share['All']):>10}")
    sizes = " ".join(f"{k}:{v}" for k, v in report["safe_set_sizes"].items())
    lines.append(f"safe set sizes: {sizes}")
    return "\n".join(lines)


def cmd_experiment(args: argparse.Namespace, settings: Settings) -> int:
    data = read_transactions(args.data)
    _, theta = modified_apriori(data, MinerConfig(args.sigma, args.mine_max_size),
                                progress=args.progress)
    universe = theta.universe
    names = [universe.names[U.members[0]] for U in theta.family if len(U) == 1]
    lo, hi = args.query_size
    if len(names) < lo:
        raise ValueError(f"only {len(names)} frequent items; queries need {lo}")

    rng = random.Random(args.seed)
    queries = []
    for qid in range(args.queries):
        size = rng.randint(lo, min(hi, len(names)))
        if args.formulas == "general":
            queries.append((qid, random_formula(names, size, rng)))
        else:
            queries.append((qid, random_conjunction(names, size, rng)))

    threads = args.threads if args.threads is not None else settings.threads
    if threads < 1:
        raise ValueError(f"--threads must be at least 1, got {threads}")
    logger.info(f"Evaluating {len(queries)} queries with {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = pool.map(lambda q: _evaluate(q, theta, args.max_size), queries)
        records = list(tqdm(results, total=len(queries), desc="Queries",
                            disable=not args.progress, file=sys.stderr))
    records.sort(key=lambda rec: rec.id)

    parameters = {
        "data": str(args.data),
        "sigma": args.sigma,
        "queries": args.queries,
        "query_size": [lo, hi],
        "max_size": args.max_size,
        "seed": args.seed,
        "formulas": args.formulas,
    }
    report = build_report(records, parameters, len(theta))
    print(format_report(report))
    if args.json:
        with open(args.json, 'w', encoding='utf-8') as f:
            json.dump(report, f, sort_keys=True, indent=2)
            f.write("\n")
        logger.info(f"Wrote report to {args.json}")
    return 0


# --- entry point -----------------------------------------------------------

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings.from_env()
    except ConfigurationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 2
    if args.log_level:
        settings = replace(settings, log_level=args.log_level.upper())
    configure_logging(settings)

    try:
        return args.handler(args, settings)
    except InconsistentFrequenciesError as e:
        logger.error(f"Inconsistent frequencies: {e}")
        return 1
    except (ItemboundError, OSError, ValueError, KeyError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
