"""Command-line interface.

Subcommands: derive-mcc, evaluate, compare, simulate, eda, validate,
gen-stub. Exit codes: 0 on success, 1 on validation or data errors, 2 on
usage errors. ``FRESHCOST_ASSUMPTIONS`` supplies a default assumptions
path when ``--assumptions`` is omitted.

Report paths write machine-readable JSON plus a delimited breakdown and
a rendered figure next to it; tables printed to stdout use one-decimal
currency display (totals in whole dollars), JSON carries full precision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import cost_model, dataset_eda, evaluation, prediction_io, simulator
from .errors import FreshcostError, ValidationError

ENV_ASSUMPTIONS = "FRESHCOST_ASSUMPTIONS"


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    def fmt(cells):
        return "  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(cells, widths)))
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines)


def _money(x: float, decimals: int = 1) -> str:
    return cost_model.format_money(x, decimals)


def _load_assumptions(args) -> cost_model.BusinessAssumptions:
    path = args.assumptions or os.environ.get(ENV_ASSUMPTIONS)
    if not path:
        raise UsageError(
            f"--assumptions is required (or set {ENV_ASSUMPTIONS})"
        )
    return prediction_io.load_assumptions(path)


class UsageError(Exception):
    """Bad flag combination discovered after argparse; exits 2 like argparse does."""


def _cmd_derive_mcc(args) -> int:
    a = _load_assumptions(args)
    mcc = cost_model.mcc_matrix(a)
    if args.format == "json":
        print(json.dumps({"classes": list(mcc.labels), "values": mcc.values.tolist()}, indent=2))
    elif args.format == "csv":
        print("actual," + ",".join(mcc.labels))
        for i, label in enumerate(mcc.labels):
            print(label + "," + ",".join(repr(float(v)) for v in mcc.values[i]))
    else:
        rows = [
            [label] + [_money(v) for v in mcc.values[i]]
            for i, label in enumerate(mcc.labels)
        ]
        print("MCC matrix ($ per item; rows = actual, columns = predicted)")
        print(_table(["actual"] + list(mcc.labels), rows))
    return 0


def _print_report(report: evaluation.MetricsReport) -> None:
    print(f"model: {report.model_id}   items: {report.confusion.total}")
    print(
        _table(
            ["metric", "value"],
            [
                ["accuracy", f"{report.accuracy:.2%}"],
                ["macro precision", f"{report.macro_precision:.2%}"],
                ["macro recall", f"{report.macro_recall:.2%}"],
                ["cumulative MCC", f"${_money(report.cumulative_mcc, 0)}"],
            ],
        )
    )
    contributions = [
        [report.labels[i], report.labels[j],
         str(int(report.confusion.counts[i, j])), f"${_money(report.per_cell_mcc[i, j])}"]
        for i in range(len(report.labels))
        for j in range(len(report.labels))
        if i != j and report.confusion.counts[i, j] > 0
    ]
    if contributions:
        print()
        print("cost by mistake (actual -> predicted):")
        print(_table(["actual", "predicted", "count", "cost"], contributions))
    for flag in report.flags:
        print(f"note: {flag}")


def _write_report_files(report: evaluation.MetricsReport, out: Path) -> None:
    """JSON report plus the delimited per-cell breakdown and a confusion figure."""
    prediction_io.write_report(report, out)
    cells_path = out.with_name(out.stem + "_cells.csv")
    with cells_path.open("w") as fh:
        fh.write("actual,predicted,count,mcc_per_item,cost\n")
        for i, actual in enumerate(report.labels):
            for j, predicted in enumerate(report.labels):
                fh.write(
                    f"{actual},{predicted},{int(report.confusion.counts[i, j])},"
                    f"{float(report.mcc.values[i, j])!r},{float(report.per_cell_mcc[i, j])!r}\n"
                )
    from .plots import save_confusion_heatmap

    figure_path = out.with_name(out.stem + "_confusion.png")
    save_confusion_heatmap(report.confusion, figure_path, f"Confusion matrix: {report.model_id}")
    print(f"report written: {out}, {cells_path.name}, {figure_path.name}")


def _evaluate_file(path: Path, a: cost_model.BusinessAssumptions) -> evaluation.MetricsReport:
    pset = prediction_io.read_predictions(path)
    model_id = pset.model_id or path.stem
    return evaluation.evaluate(pset.records, a, model_id=model_id)


def _cmd_evaluate(args) -> int:
    a = _load_assumptions(args)
    report = _evaluate_file(Path(args.predictions), a)
    _print_report(report)
    if args.report:
        _write_report_files(report, Path(args.report))
    return 0


def _cmd_compare(args) -> int:
    a = _load_assumptions(args)
    reports = [_evaluate_file(Path(p), a) for p in args.predictions]
    ranked = evaluation.rank_models(reports)
    rows = [
        [str(r.rank), r.model_id, f"{r.accuracy:.2%}", f"${_money(r.cumulative_mcc, 0)}"]
        for r in ranked
    ]
    print("ranking (cheapest mistakes first):")
    print(_table(["rank", "model", "accuracy", "MCC"], rows))
    return 0


def _summary_rows(s: simulator.SimSummary) -> list[list[str]]:
    return [
        ["items", str(s.n)],
        ["mean realized regret", f"${_money(s.mean_realized_regret, 4)}"],
        ["std error", f"${_money(s.std_error, 4)}"],
        ["total revenue", f"${_money(s.total_revenue, 2)}"],
        ["incidents", str(s.incident_count)],
        ["seed", str(s.seed)],
    ]


def _cmd_simulate(args) -> int:
    a = _load_assumptions(args)
    if args.cell:
        actual_label, predicted_label = args.cell
        try:
            actual = a.class_index(actual_label)
            predicted = a.class_index(predicted_label)
        except KeyError as exc:
            raise UsageError(str(exc)) from exc
        summary = simulator.estimate_mcc_empirical(a, actual, predicted, args.n, args.seed)
        analytic = cost_model.mcc_cell(a, actual, predicted)
        if args.format == "json":
            doc = asdict(summary)
            doc["analytic_mcc"] = analytic
            print(json.dumps(doc, indent=2))
        else:
            print(f"cell {actual_label}|{predicted_label}: analytic MCC ${_money(analytic, 4)}")
            print(_table(["field", "value"], _summary_rows(summary)))
    else:
        pset = prediction_io.read_predictions(args.items)
        try:
            items = [
                simulator.SimItem(a.class_index(r.actual), a.class_index(r.predicted))
                for r in pset.records
            ]
        except KeyError as exc:
            raise FreshcostError(f"{args.items}: {exc}") from exc
        summary, _ = simulator.simulate_day(a, items, args.seed)
        if args.format == "json":
            doc = asdict(summary)
            doc["total_realized_regret"] = summary.mean_realized_regret * summary.n
            print(json.dumps(doc, indent=2))
        else:
            total = summary.mean_realized_regret * summary.n
            print(f"day total realized regret: ${_money(total, 2)}")
            print(_table(["field", "value"], _summary_rows(summary)))
    return 0


def _cmd_eda(args) -> int:
    manifest = dataset_eda.scan_dataset(args.root, args.classes)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")

    rows = [
        [split, *(str(manifest.counts[split].get(c, 0)) for c in args.classes),
         str(manifest.split_total(split))]
        for split in manifest.splits
    ]
    print(_table(["split", *args.classes, "total"], rows))
    for note in manifest.missing_class_dirs:
        print(f"note: missing folder {note}")
    for note in manifest.unknown_dirs:
        print(f"note: unexpected folder {note} (not counted)")
    for note in manifest.undecodable:
        print(f"note: undecodable file {note}")

    histograms = []
    root = Path(args.root)
    for cls in args.classes:
        paths = []
        for split in manifest.splits:
            cls_dir = root / split / cls
            if cls_dir.is_dir():
                paths.extend(dataset_eda.list_images(cls_dir))
        if paths:
            histograms.append(dataset_eda.pixel_histogram(paths, cls))
    if histograms:
        summary = dataset_eda.histogram_report(histograms, out_dir, plots=args.plots)
        print()
        print(
            _table(
                ["class", "images", "pixels", "mean pixel", "mass >= 128"],
                [
                    [r["class"], str(r["images"]), str(r["pixels"]),
                     f"{r['mean_pixel']:.2f}", f"{r['mass_above_128']:.4f}"]
                    for r in summary.rows
                ],
            )
        )
        written = [str(out_dir / "manifest.json"), str(summary.csv_path)]
        written += [str(p) for p in summary.plot_paths]
        if args.plots:
            from .plots import save_class_balance_bar

            balance_path = out_dir / "class_balance.png"
            totals = {c: sum(manifest.counts[s].get(c, 0) for s in manifest.splits)
                      for c in args.classes}
            save_class_balance_bar(totals, balance_path)
            written.append(str(balance_path))
        print("written: " + ", ".join(written))
    else:
        print("no images found; wrote manifest only")
    return 0


def _cmd_validate(args) -> int:
    path = args.assumptions or os.environ.get(ENV_ASSUMPTIONS)
    if not path:
        raise UsageError(f"--assumptions is required (or set {ENV_ASSUMPTIONS})")
    try:
        prediction_io.load_assumptions(path)
    except ValidationError as exc:
        print(f"{path}: {len(exc.violations)} violation(s)", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return 1
    print("OK")
    return 0


def _cmd_gen_stub(args) -> int:
    cm, model_id = prediction_io.read_confusion(args.confusion)
    records = prediction_io.stub_records(cm, model_id=model_id)
    prediction_io.write_predictions(records, args.out, classes=cm.labels, model_id=model_id)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freshcost",
        description="Cost-sensitive evaluation toolkit for freshness classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_assumptions(p):
        p.add_argument(
            "--assumptions",
            metavar="A.json",
            help=f"assumptions document (default: ${ENV_ASSUMPTIONS})",
        )

    p = sub.add_parser("derive-mcc", help="print the misclassification-cost matrix")
    add_assumptions(p)
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.set_defaults(func=_cmd_derive_mcc)

    p = sub.add_parser("evaluate", help="score one prediction file")
    add_assumptions(p)
    p.add_argument("--predictions", metavar="P.jsonl", required=True)
    p.add_argument("--report", metavar="out.json", help="write JSON report + CSV + figure")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("compare", help="rank several prediction files by cost")
    add_assumptions(p)
    p.add_argument("--predictions", metavar="P.jsonl", nargs="+", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("simulate", help="Monte-Carlo check of the analytic costs")
    add_assumptions(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--cell", nargs=2, metavar=("ACTUAL", "PRED"),
                      help="estimate one matrix cell")
    mode.add_argument("--items", metavar="items.jsonl",
                      help="simulate a day over a prediction file")
    p.add_argument("--n", type=int, default=None, help="draws for --cell mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("eda", help="scan a dataset tree; histogram pixel values")
    p.add_argument("--root", metavar="DIR", required=True)
    p.add_argument("--classes", nargs="+", default=["Fresh", "Half-Fresh", "Spoiled"])
    p.add_argument("--out-dir", metavar="D", default=".")
    p.add_argument("--plots", action="store_true", help="also render PNG charts")
    p.set_defaults(func=_cmd_eda)

    p = sub.add_parser("validate", help="check an assumptions document")
    add_assumptions(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("gen-stub", help="synthesize predictions from confusion counts")
    p.add_argument("--confusion", metavar="C.json", required=True)
    p.add_argument("--out", metavar="P.jsonl", required=True)
    p.set_defaults(func=_cmd_gen_stub)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.cell:
        if args.n is None:
            parser.error("--cell requires --n")
        if args.n < 1:
            parser.error(f"--n must be >= 1, got {args.n}")
    if args.command == "simulate" and args.seed < 0:
        parser.error("--seed must be a non-negative 64-bit integer")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (FreshcostError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
