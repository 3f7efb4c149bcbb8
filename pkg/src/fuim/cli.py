"""Batch command-line front end.

Subcommands: mine, oracle, diff, generate, bench, convert. All file
formats are line-oriented text; every output file starts with comment
lines recording the run manifest so results are reproducible. Result
files are byte-identical across reruns of the same manifest.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 resource
limit, 5 result mismatch (diff or bench disagreement).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources

from .core import (
    FuimError,
    FuzzyItemset,
    ParseError,
    QuantitativeDatabase,
    ResourceLimitExceeded,
    Threshold,
    ValidationError,
    build_database,
    load_database,
    parse_utilities,
    resolve_threshold,
    serialize_transactions,
    serialize_utilities,
)
from .baseline import OracleConfig, oracle_mine, tpfu_mine
from .datagen import GeneratorSpec, generate_database
from .fuzzifier import (
    MembershipFunction,
    default_membership_function,
    load_membership_function,
    serialize_membership_function,
)
from .miner import (
    ASCENDING,
    DESCENDING,
    MinerConfig,
    MiningResult,
    mine,
    variant_config,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RESOURCE = 4
EXIT_MISMATCH = 5

RESULT_TOLERANCE = 1e-9

BENCH_VARIANTS = ("FUIM", "FUIM1", "FUIM2", "FUIM3", "TPFU", "ORACLE")


@dataclass
class RunManifest:
    """Everything needed to reproduce a run, embedded in output headers.

    The timestamp is recorded in stats files only; result files must be
    byte-identical across reruns, so their headers carry just the
    deterministic fields.
    """

    command: str
    params: dict = field(default_factory=dict)
    timestamp: float = field(default_factory=time.time)

    def header_lines(self, kind: str) -> list[str]:
        lines = [f"# fuim-{kind} v1", f"# command: {self.command}"]
        lines += [f"# {k}: {v}" for k, v in self.params.items()]
        return lines

    def as_dict(self) -> dict:
        return {"command": self.command, "params": dict(self.params), "timestamp": self.timestamp}


def render_itemset(itemset: FuzzyItemset, db: QuantitativeDatabase, mf: MembershipFunction) -> str:
    return ",".join(f"{db.labels[m.item]}.{mf.regions[m.region].name}" for m in itemset)


def format_result_file(
    result: MiningResult,
    db: QuantitativeDatabase,
    mf: MembershipFunction,
    manifest: RunManifest,
) -> str:
    lines = manifest.header_lines("result")
    for itemset, fu in result.hfuis:
        lines.append(f"{render_itemset(itemset, db, mf)} #FU: {fu!r}")
    return "\n".join(lines) + "\n"


def parse_result_file(path: str) -> dict[frozenset, float]:
    """Result lines keyed by the unordered set of rendered fuzzy items."""
    out: dict[frozenset, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            body, sep, value = line.partition("#FU:")
            if not sep:
                raise ParseError("expected 'itemset #FU: value'", path, line_no)
            key = frozenset(p.strip() for p in body.strip().split(","))
            try:
                out[key] = float(value.strip())
            except ValueError:
                raise ParseError(f"invalid utility {value.strip()!r}", path, line_no) from None
    return out


def utilities_close(a: float, b: float, tol: float = RESULT_TOLERANCE) -> bool:
    return abs(a - b) <= max(tol * max(abs(a), abs(b)), 1e-12)


def compare_result_sets(a: dict[frozenset, float], b: dict[frozenset, float]) -> str | None:
    """None when equal within tolerance, else a one-line description of the
    first difference (deterministic order)."""
    for key in sorted(a.keys() - b.keys(), key=sorted):
        return f"only in first: {','.join(sorted(key))} #FU: {a[key]!r}"
    for key in sorted(b.keys() - a.keys(), key=sorted):
        return f"only in second: {','.join(sorted(key))} #FU: {b[key]!r}"
    for key in sorted(a, key=sorted):
        if not utilities_close(a[key], b[key]):
            return (
                f"utility mismatch for {','.join(sorted(key))}: "
                f"{a[key]!r} vs {b[key]!r}"
            )
    return None


def result_entries(result: MiningResult, db, mf) -> dict[frozenset, float]:
    return {
        frozenset(render_itemset(itemset, db, mf).split(",")): fu
        for itemset, fu in result.hfuis
    }


def _default_mf_path() -> str | None:
    cfg_dir = os.environ.get("FUIM_CONFIG_DIR")
    if cfg_dir:
        candidate = os.path.join(cfg_dir, "default.mf")
        if os.path.exists(candidate):
            return candidate
    return None


def load_mf_arg(path: str | None) -> tuple[MembershipFunction, str]:
    if path is not None:
        return load_membership_function(path), path
    env_path = _default_mf_path()
    if env_path is not None:
        return load_membership_function(env_path), env_path
    return default_membership_function(), "<bundled default>"


def bundled_sample_paths() -> tuple[str, str, str]:
    """Paths of the packaged sample database, utilities, and membership function."""
    base = resources.files("fuim").joinpath("data")
    return (
        str(base.joinpath("sample.qdb")),
        str(base.joinpath("sample.eu")),
        str(base.joinpath("default.mf")),
    )


def _threshold_from_args(args) -> Threshold:
    if args.gamma is not None:
        return Threshold(gamma=args.gamma, is_rate=False)
    return Threshold(gamma=args.gamma_rate, is_rate=True)


def _add_io_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--db", required=True, help="transaction file (tid:item=qty,...)")
    p.add_argument("--eu", required=True, help="external-utility file (item value)")
    p.add_argument("--mf", default=None, help="membership-function file (default: bundled)")


def _add_threshold_arguments(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", type=float, default=None, help="absolute utility threshold")
    g.add_argument(
        "--gamma-rate",
        type=float,
        default=None,
        help="threshold as a fraction of the database's total crisp utility",
    )


def _write_stats(path: str | None, manifest: RunManifest, gamma: float, result: MiningResult) -> None:
    if path is None:
        return
    payload = {
        "manifest": manifest.as_dict(),
        "resolvedGamma": gamma,
        "hfuiCount": len(result.hfuis),
        "stats": result.stats.as_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_mine(args) -> int:
    db = load_database(args.db, args.eu)
    mf, mf_path = load_mf_arg(args.mf)
    gamma = resolve_threshold(_threshold_from_args(args), db)
    if gamma == 0.0:
        print("warning: threshold 0 reports every positive-support itemset", file=sys.stderr)

    cfg = variant_config(args.variant, gamma, DESCENDING if args.order == "desc" else ASCENDING)
    if args.no_remaining_prune:
        cfg.prune_remaining = False
    if args.no_expended_prune:
        cfg.prune_expended = False
    if args.exhaustive:
        cfg.prune_fuub = False
        cfg.allow_exhaustive = True
    cfg.max_pattern_length = args.max_length

    result = mine(db, mf, cfg)
    manifest = RunManifest(
        command="mine",
        params={
            "db": args.db,
            "eu": args.eu,
            "mf": mf_path,
            "threshold": f"gamma={args.gamma!r}" if args.gamma is not None else f"rate={args.gamma_rate!r}",
            "resolved_gamma": repr(gamma),
            "variant": args.variant,
            "order": cfg.order,
            "prune_fuub": cfg.prune_fuub,
            "prune_remaining": cfg.prune_remaining,
            "prune_expended": cfg.prune_expended,
            "max_pattern_length": cfg.max_pattern_length,
        },
    )
    content = format_result_file(result, db, mf, manifest)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(content)
    _write_stats(args.stats, manifest, gamma, result)
    print(f"{len(result.hfuis)} itemsets -> {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    db = load_database(args.db, args.eu)
    mf, mf_path = load_mf_arg(args.mf)
    gamma = resolve_threshold(_threshold_from_args(args), db)
    result = oracle_mine(db, mf, gamma, OracleConfig(max_items=args.max_items))
    manifest = RunManifest(
        command="oracle",
        params={
            "db": args.db,
            "eu": args.eu,
            "mf": mf_path,
            "threshold": f"gamma={args.gamma!r}" if args.gamma is not None else f"rate={args.gamma_rate!r}",
            "resolved_gamma": repr(gamma),
            "max_items": args.max_items,
        },
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_result_file(result, db, mf, manifest))
    _write_stats(args.stats, manifest, gamma, result)
    print(f"{len(result.hfuis)} itemsets -> {args.out}")
    return EXIT_OK


def cmd_diff(args) -> int:
    a = parse_result_file(args.first)
    b = parse_result_file(args.second)
    delta = compare_result_sets(a, b)
    if delta is None:
        print("result files agree")
        return EXIT_OK
    print(delta, file=sys.stderr)
    return EXIT_MISMATCH


def cmd_generate(args) -> int:
    lo, sep, hi = args.qty_range.partition("-")
    if not sep:
        raise ValidationError(f"quantity range must look like '1-6', got {args.qty_range!r}")
    try:
        qty_low, qty_high = int(lo), int(hi)
    except ValueError:
        raise ValidationError(f"quantity range must be integral, got {args.qty_range!r}") from None
    mf, _ = load_mf_arg(args.mf)
    spec = GeneratorSpec(
        items=args.items,
        transactions=args.transactions,
        avg_length=args.avg_length,
        qty_low=qty_low,
        qty_high=qty_high,
        seed=args.seed,
        utility_mu=args.mu,
        utility_sigma=args.sigma,
        popularity=args.popularity,
    )
    db = generate_database(spec, max_quantity=mf.max_quantity())
    manifest = RunManifest(
        command="generate",
        params={
            "items": spec.items,
            "transactions": spec.transactions,
            "avg_length": spec.avg_length,
            "qty_range": f"{qty_low}-{qty_high}",
            "seed": spec.seed,
            "mu": spec.utility_mu,
            "sigma": spec.utility_sigma,
            "popularity": spec.popularity,
        },
    )
    header = "\n".join(manifest.header_lines("dataset")) + "\n"
    with open(args.out_db, "w", encoding="utf-8") as fh:
        fh.write(header)
        fh.write(serialize_transactions(db))
    with open(args.out_eu, "w", encoding="utf-8") as fh:
        fh.write(header)
        fh.write(serialize_utilities(db))
    print(f"wrote {args.out_db} and {args.out_eu}")
    return EXIT_OK


def cmd_convert(args) -> int:
    """Recover quantities from SPMF utility-format lines
    (``item item ...:TU:itemUtility ...``) by dividing by external utilities."""
    utilities = parse_utilities(open(args.eu, "r", encoding="utf-8").read(), args.eu)
    out_lines = []
    with open(args.spmf, "r", encoding="utf-8") as fh:
        tid = 0
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("@"):
                continue
            parts = line.split(":")
            if len(parts) != 3:
                raise ParseError("expected 'items:TU:utilities'", args.spmf, line_no)
            items = parts[0].split()
            utils = parts[2].split()
            if len(items) != len(utils):
                raise ParseError("item and utility counts differ", args.spmf, line_no)
            tid += 1
            entries = []
            for label, u in zip(items, utils):
                if label not in utilities:
                    raise ValidationError(f"item {label!r} has no external utility")
                q = float(u) / utilities[label]
                q_int = round(q)
                if q_int < 1 or abs(q - q_int) > 1e-9:
                    raise ValidationError(
                        f"{args.spmf}:{line_no}: utility {u} of item {label!r} is not an "
                        f"integral multiple of its external utility {utilities[label]!r}"
                    )
                entries.append(f"{label}={q_int}")
            out_lines.append(f"{tid}:{','.join(entries)}")
    with open(args.out_db, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out_lines) + ("\n" if out_lines else ""))
    print(f"wrote {args.out_db} ({tid} transactions)")
    return EXIT_OK


def _prefix_database(db: QuantitativeDatabase, pct: int) -> QuantitativeDatabase:
    keep = max(1, (len(db.transactions) * pct) // 100)
    rows = [
        (t.tid, [(db.labels[i], q) for i, q in t.entries])
        for t in db.transactions[:keep]
    ]
    utilities = {label: db.external_utility[i] for i, label in enumerate(db.labels)}
    return build_database(rows, utilities)


def run_variant(
    variant: str,
    db: QuantitativeDatabase,
    mf: MembershipFunction,
    gamma: float,
    *,
    tpfu_cap: int | None,
    oracle_max_items: int,
):
    """Returns (result, capped_candidate_count); exactly one is not None."""
    if variant == "TPFU":
        try:
            return tpfu_mine(db, mf, gamma, candidate_cap=tpfu_cap), None
        except ResourceLimitExceeded as exc:
            return None, exc.count
    if variant == "ORACLE":
        return oracle_mine(db, mf, gamma, OracleConfig(max_items=oracle_max_items)), None
    return mine(db, mf, variant_config(variant, gamma)), None


def cmd_bench(args) -> int:
    db_full = load_database(args.db, args.eu)
    mf, mf_path = load_mf_arg(args.mf)
    variants = [v.strip().upper() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in BENCH_VARIANTS:
            raise ValidationError(f"unknown variant {v!r}; choose from {','.join(BENCH_VARIANTS)}")

    if args.gammas is not None:
        thresholds = [(g, Threshold(float(g), is_rate=False)) for g in args.gammas.split(",")]
    else:
        thresholds = [(g, Threshold(float(g), is_rate=True)) for g in args.gamma_rates.split(",")]

    dataset_name = os.path.basename(args.db)
    if args.scale_prefixes:
        pcts = [int(p) for p in args.scale_prefixes.split(",")]
        datasets = [(f"{dataset_name}@{p}%", _prefix_database(db_full, p)) for p in pcts]
    else:
        datasets = [(dataset_name, db_full)]

    manifest = RunManifest(
        command="bench",
        params={
            "db": args.db,
            "eu": args.eu,
            "mf": mf_path,
            "gammas": args.gammas or f"rates:{args.gamma_rates}",
            "variants": ",".join(variants),
            "repeat": args.repeat,
            "tpfu_cap": args.tpfu_cap,
            "scale_prefixes": args.scale_prefixes,
            "no_walltime": args.no_walltime,
        },
    )

    buf = io.StringIO()
    buf.write("\n".join(manifest.header_lines("bench")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["dataset", "gamma", "variant", "candidates", "visitedNodes", "wallTime", "peakMemoryEstimate"]
    )

    for ds_name, db in datasets:
        for gamma_label, threshold in thresholds:
            gamma = resolve_threshold(threshold, db)
            reference: dict[frozenset, float] | None = None
            reference_variant = None
            rows = []
            for variant in variants:
                wall_times = []
                result = None
                capped = None
                for _ in range(args.repeat):
                    result, capped = run_variant(
                        variant,
                        db,
                        mf,
                        gamma,
                        tpfu_cap=args.tpfu_cap,
                        oracle_max_items=args.oracle_max_items,
                    )
                    if capped is not None:
                        break
                    wall_times.append(result.stats.wall_time)
                if capped is not None:
                    buf.write(
                        f"# {variant} capped: dataset={ds_name} gamma={gamma_label} "
                        f"candidates>{args.tpfu_cap} (generated {capped})\n"
                    )
                    print(
                        f"note: {variant} exceeded the candidate cap at gamma={gamma_label} "
                        f"on {ds_name}; row excluded",
                        file=sys.stderr,
                    )
                    continue
                entries = result_entries(result, db, mf)
                if reference is None:
                    reference, reference_variant = entries, variant
                else:
                    delta = compare_result_sets(reference, entries)
                    if delta is not None:
                        print(
                            f"variant disagreement on {ds_name} gamma={gamma_label}: "
                            f"{reference_variant} vs {variant}: {delta}",
                            file=sys.stderr,
                        )
                        return EXIT_MISMATCH
                mean_wall = sum(wall_times) / len(wall_times)
                rows.append(
                    [
                        ds_name,
                        gamma_label,
                        variant,
                        result.stats.constructed_lists,
                        result.stats.visited_nodes,
                        "0.0" if args.no_walltime else repr(mean_wall),
                        result.stats.peak_memory_estimate,
                    ]
                )
            for row in rows:
                writer.writerow(row)

    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    print(f"bench table -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuim", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("mine", help="mine high fuzzy utility itemsets")
    _add_io_arguments(p)
    _add_threshold_arguments(p)
    p.add_argument("--out", required=True, help="result file to write")
    p.add_argument("--stats", default=None, help="stats JSON to write")
    p.add_argument("--variant", default="FUIM", choices=["FUIM", "FUIM1", "FUIM2", "FUIM3"])
    p.add_argument("--order", default="asc", choices=["asc", "desc"])
    p.add_argument("--no-remaining-prune", action="store_true")
    p.add_argument("--no-expended-prune", action="store_true")
    p.add_argument("--exhaustive", action="store_true", help="disable the 1-item upper-bound filter")
    p.add_argument("--max-length", type=int, default=None)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("oracle", help="exhaustive reference miner")
    _add_io_arguments(p)
    _add_threshold_arguments(p)
    p.add_argument("--out", required=True)
    p.add_argument("--stats", default=None)
    p.add_argument("--max-items", type=int, default=12)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("diff", help="compare two result files (order-insensitive)")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("generate", help="generate a synthetic dataset")
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--transactions", type=int, required=True)
    p.add_argument("--avg-length", type=float, required=True)
    p.add_argument("--qty-range", default="1-6")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mu", type=float, default=5.0, help="log-normal mu for external utilities")
    p.add_argument("--sigma", type=float, default=1.2, help="log-normal sigma for external utilities")
    p.add_argument("--popularity", default="uniform", choices=["uniform", "zipf"],
                   help="item-frequency model for transaction contents")
    p.add_argument("--mf", default=None, help="membership function used to validate the quantity range")
    p.add_argument("--out-db", required=True)
    p.add_argument("--out-eu", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="benchmark variants over a gamma sweep")
    _add_io_arguments(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--gammas", default=None, help="comma-separated absolute thresholds")
    g.add_argument("--gamma-rates", default=None, help="comma-separated threshold rates")
    p.add_argument("--variants", default="FUIM,FUIM2,FUIM3,TPFU")
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--tpfu-cap", type=int, default=10_000_000)
    p.add_argument("--oracle-max-items", type=int, default=12)
    p.add_argument(
        "--scale-prefixes",
        default=None,
        help="comma-separated transaction percentages, e.g. 40,55,70,85,100",
    )
    p.add_argument(
        "--no-walltime",
        action="store_true",
        help="report wallTime as 0.0 so the CSV is byte-reproducible",
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("convert", help="convert an SPMF utility file to a quantity database")
    p.add_argument("--spmf", required=True)
    p.add_argument("--eu", required=True)
    p.add_argument("--out-db", required=True)
    p.set_defaults(func=cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceLimitExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except FuimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
