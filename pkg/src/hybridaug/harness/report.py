"""Report hashing, serialisation and augmenter x classifier pivot tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

AVG = "Avg"
CLASSIFIER_AVG = "Classifier avg."
OUT_OF_SCOPE = "OUT_OF_SCOPE"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def content_hash(body: dict) -> str:
    body = {k: v for k, v in body.items() if k != "content_hash"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest()


def finalize_report(body: dict) -> dict:
    out = dict(body)
    out["content_hash"] = content_hash(out)
    return out


def verify_report(report: dict) -> bool:
    return report.get("content_hash") == content_hash(report)


def report_bytes(report: dict) -> bytes:
    return canonical_json(report).encode()


def _cell_text(cell: dict, metric: str) -> str:
    if cell["status"] == "ok":
        m = cell[metric]
        return f"{m['mean']:.3f} ± {m['std']:.3f}"
    if cell["status"] == "out_of_scope":
        return OUT_OF_SCOPE
    return f"FAILED({cell['reason']})"


def _mean(values):
    return sum(values) / len(values) if values else None


def pivot(cells: list[dict], metric: str = "macro_f1") -> dict:
    """Augmenters as rows, classifiers as columns, with row and column averages.

    Averages use completed cells only.  ``best`` names, per classifier, the
    augmenter with the highest mean (first listed wins ties).
    """
    rows = list(dict.fromkeys(c["augmentation"] for c in cells))
    cols = list(dict.fromkeys(c["classifier"] for c in cells))
    grid = {r: {} for r in rows}
    for c in cells:
        entry = {"status": c["status"], "text": _cell_text(c, metric)}
        if c["status"] == "ok":
            entry.update(mean=c[metric]["mean"], std=c[metric]["std"])
        grid[c["augmentation"]][c["classifier"]] = entry

    def ok_means(entries):
        return [e["mean"] for e in entries if e and e["status"] == "ok"]

    row_avg = {r: _mean(ok_means(grid[r].values())) for r in rows}
    col_avg = {c: _mean(ok_means(grid[r].get(c) for r in rows)) for c in cols}
    best = {}
    for c in cols:
        scored = [(grid[r][c]["mean"], r) for r in rows if c in grid[r] and grid[r][c]["status"] == "ok"]
        if scored:
            top = max(m for m, _ in scored)
            best[c] = next(r for m, r in scored if m == top)
    return {
        "metric": metric,
        "rows": rows,
        "columns": cols,
        "values": grid,
        "row_avg": row_avg,
        "column_avg": col_avg,
        "overall_avg": _mean([v for v in row_avg.values() if v is not None]),
        "best": best,
    }


def _fmt_avg(v) -> str:
    return "-" if v is None else f"{v:.3f}"


def pivot_matrix(p: dict, mark_best: bool = True) -> list[list[str]]:
    header = ["Augmenter", *p["columns"], AVG]
    out = [header]
    for r in p["rows"]:
        line = [r]
        for c in p["columns"]:
            e = p["values"][r].get(c)
            text = "" if e is None else e["text"]
            if mark_best and p["best"].get(c) == r:
                text += " *"
            line.append(text)
        line.append(_fmt_avg(p["row_avg"][r]))
        out.append(line)
    out.append([CLASSIFIER_AVG, *(_fmt_avg(p["column_avg"][c]) for c in p["columns"]), _fmt_avg(p["overall_avg"])])
    return out


def render_pivot_text(p: dict) -> str:
    m = pivot_matrix(p)
    widths = [max(len(row[j]) for row in m) for j in range(len(m[0]))]

    def line(row):
        return "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()

    rule = "-" * len(line(m[0]))
    body = [line(m[0]), rule, *(line(r) for r in m[1:-1]), rule, line(m[-1])]
    return "\n".join(body) + "\n* best augmenter per classifier\n"


def render_pivot_csv(p: dict) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(pivot_matrix(p, mark_best=False))
    return buf.getvalue()


def render_summary(report: dict) -> str:
    env = report["environment"]
    head = [
        f"protocol: {report['protocol']}",
        f"seed: {env['seed']}  k: {env['k']}  version: {env['version']}",
        f"config: {env['config_hash'][:16]}  report: {report['content_hash'][:16]}",
        "",
        "macro-F1 (mean ± std over folds)",
    ]
    text = "\n".join(head) + "\n" + render_pivot_text(report["pivots"]["macro_f1"])
    if report["protocol"] == "leaky":
        text += "\naccuracy (mean ± std over folds)\n" + render_pivot_text(report["pivots"]["accuracy"])
    return text


def write_outputs(report: dict, out_dir: str | Path, stem: str = "report") -> dict[str, Path]:
    """Write the JSON report, a pivot CSV per metric and a text summary under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"json": out / f"{stem}.json", "text": out / f"{stem}.txt"}
    paths["json"].write_bytes(report_bytes(report))
    paths["text"].write_text(render_summary(report))
    for metric, p in report["pivots"].items():
        key = f"csv_{metric}"
        paths[key] = out / f"{stem}_{metric}.csv"
        paths[key].write_text(render_pivot_csv(p))
    return paths
