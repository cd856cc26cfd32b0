import csv
import json
from pathlib import Path
from typing import Iterable

from .engine import RunResult
from .graph_core import Graph, Labeling


def _prepare(filename) -> Path:
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def format_labels(f: Labeling) -> str:
    return "".join(f"{v} {f[v]:+d}\n" for v in f)


def format_run_log(result: RunResult) -> str:
    return "".join(f"{r.step} {r.phase.value} {r.vertex} {r.label:+d}\n" for r in result.log)


def export_edge_list(g: Graph, filename):
    """Write the graph in edge-list format"""
    path = _prepare(filename)
    path.write_text(format_edge_list(g), encoding="utf-8", newline="\n")
    return path


def export_labels(f: Labeling, filename):
    path = _prepare(filename)
    path.write_text(format_labels(f), encoding="utf-8", newline="\n")
    return path


def export_run_log(result: RunResult, filename):
    path = _prepare(filename)
    path.write_text(format_run_log(result), encoding="utf-8", newline="\n")
    return path


def export_to_json(data, filename):
    """Export data to JSON format"""
    path = _prepare(filename)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, ensure_ascii=False, default=str)
        f.write("\n")
    return path


def export_to_csv(header: list[str], rows: Iterable[Iterable], filename):
    """Export rows to CSV format"""
    path = _prepare(filename)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path
