"""Command-line entry point.

    hybridaug run --config run.toml --out results/
    hybridaug grid --config grid.json --protocol leaky --out results/
    hybridaug leak-demo --dataset migraine.csv --out results/
    hybridaug analyze --dataset migraine.csv --out results/
    hybridaug reproduce {table7,fidelity,diffs,progression} --out results/

Exit status: 0 when every executed cell completed, 1 when a cell failed (or,
with ``--strict``, when a reproduced value missed its tolerance), 2 on usage,
config or dataset errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .cohort import aggregation_audit
from .harness import (
    ConfigError,
    canonical_json,
    load_config,
    render_pivot_csv,
    render_summary,
    run_grid,
    write_outputs,
)
from .reproduce import (
    MISS,
    Reproduction,
    dataset_path,
    hemiplegic_pair,
    leak_demo,
    load_migraine,
    reproduce_audit,
    reproduce_diffs,
    reproduce_fidelity,
    reproduce_progression,
    reproduce_table7,
)
from .tabular import DatasetError

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
TARGETS = ("table7", "fidelity", "diffs", "progression")


def _common(p: argparse.ArgumentParser, config: bool = False) -> None:
    if config:
        p.add_argument("--config", required=True, help="run config (.json or .toml)")
        p.add_argument("--protocol", choices=("clean", "leaky"))
        p.add_argument("--workers", type=int, help="processes used to run cells in parallel")
    p.add_argument("--dataset", help="dataset CSV (overrides the config and HYBRIDAUG_DATASET)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--k", type=int, help="number of folds")
    p.add_argument("--out", default="hybridaug-out", help="directory for all output files")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text", help="console output format")
    p.add_argument("--strict", action="store_true", help="treat tolerance misses as failures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridaug", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="run the cells of a config"), config=True)
    _common(sub.add_parser("grid", help="run a classifier x augmentation grid and print pivots"), config=True)
    leak = sub.add_parser("leak-demo", help="compare clean and leaky protocols on one cell")
    _common(leak)
    leak.add_argument("--classifier", default="prior_knn")
    leak.add_argument("--augmentation", default="smote")
    an = sub.add_parser("analyze", help="per-feature separability of two classes")
    _common(an)
    an.add_argument("--class-a", help="defaults to the sporadic hemiplegic class")
    an.add_argument("--class-b", help="defaults to the familial hemiplegic class")
    an.add_argument("--threshold", type=float, default=0.3)
    rep = sub.add_parser("reproduce", help="reproduce a published table")
    rep.add_argument("target", choices=TARGETS)
    _common(rep)
    rep.add_argument("--workers", type=int, default=1)
    return parser


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _text_table(rows: list[list[str]]) -> str:
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def _write_reproduction(rep: Reproduction, out: Path, fmt: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    stem = f"reproduce_{rep.target}".replace("-", "_")
    (out / f"{stem}.json").write_text(canonical_json(rep.to_json()))
    (out / f"{stem}.csv").write_text(_csv(rep.table()))
    (out / f"{stem}.txt").write_text(_text_table(rep.table()))
    if fmt == "json":
        _emit(canonical_json({k: v for k, v in rep.to_json().items() if k not in ("report", "clean", "leaky")}))
    elif fmt == "csv":
        _emit(_csv(rep.table()))
    else:
        _emit(_text_table(rep.table()))


def _reproduction_status(rep: Reproduction, strict: bool) -> int:
    if rep.failed_cells:
        return EXIT_FAILED
    if strict and any(r.verdict == MISS for r in rep.rows):
        return EXIT_FAILED
    return EXIT_OK


def cmd_run(args) -> int:
    config = load_config(args.config).with_overrides(
        seed=args.seed, k=args.k, protocol=args.protocol, workers=args.workers, dataset_path=args.dataset
    )
    report = run_grid(config)
    write_outputs(report, args.out)
    if args.format == "json":
        _emit(canonical_json(report))
    elif args.format == "csv":
        _emit(render_pivot_csv(report["pivots"]["macro_f1"]))
    else:
        _emit(render_summary(report))
    failed = [c["name"] for c in report["cells"] if c["status"] == "failed"]
    return EXIT_FAILED if failed else EXIT_OK


def cmd_leak_demo(args) -> int:
    path = dataset_path(args.dataset)
    ds = load_migraine(path)
    rep = leak_demo(ds, args.classifier, args.augmentation, _seed(args), _k(args), str(path))
    _write_reproduction(rep, Path(args.out), args.format)
    return _reproduction_status(rep, args.strict)


def cmd_analyze(args) -> int:
    ds = load_migraine(args.dataset)
    if args.class_a and args.class_b:
        a, b = args.class_a, args.class_b
    else:
        a, b = hemiplegic_pair(ds)
    audit = aggregation_audit(ds, a, b, args.threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "feature_diffs.csv").write_text(audit.table.to_csv())
    (out / "audit.json").write_text(canonical_json(audit.to_json()))
    (out / "audit.txt").write_text(audit.summary() + "\n")
    if args.format == "json":
        _emit(canonical_json(audit.to_json()))
    elif args.format == "csv":
        _emit(audit.table.to_csv())
    else:
        _emit(audit.summary())
    if a == hemiplegic_pair(ds)[0] and b == hemiplegic_pair(ds)[1]:
        rep = reproduce_audit(ds, args.threshold)
        (out / "reproduce_audit.json").write_text(canonical_json(rep.to_json()))
        return _reproduction_status(rep, args.strict)
    return EXIT_OK


def _seed(args) -> int:
    return 42 if args.seed is None else args.seed


def _k(args) -> int:
    return 5 if args.k is None else args.k


def cmd_reproduce(args) -> int:
    if args.target == "fidelity":
        path = dataset_path(args.dataset)
        ds = load_migraine(path) if path.is_file() else None
        rep = reproduce_fidelity(ds)
    else:
        path = dataset_path(args.dataset)
        ds = load_migraine(path)
        if args.target == "diffs":
            rep = reproduce_diffs(ds)
        elif args.target == "table7":
            rep = reproduce_table7(ds, _seed(args), _k(args), args.workers, str(path))
        else:
            rep = reproduce_progression(ds, _seed(args), _k(args), args.workers, str(path))
    _write_reproduction(rep, Path(args.out), args.format)
    return _reproduction_status(rep, args.strict)


COMMANDS = {"run": cmd_run, "grid": cmd_run, "leak-demo": cmd_leak_demo, "analyze": cmd_analyze,
            "reproduce": cmd_reproduce}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DatasetError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
