"""Delimited artifact output: CSV bodies under a one-line JSON header.

Numeric cells go through repr, which round-trips binary64 exactly, so a
fixed (config, seed) pair reproduces every table byte for byte.  Figures
are rendered headlessly to files next to the tables they visualize; the
CSV stays the machine contract.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import matplotlib

matplotlib.use("Agg")  # render to files; never require a display

import matplotlib.pyplot as plt


def jsonable(v: Any) -> Any:
    """Lossless JSON image of a metadata value; complex becomes [re, im]."""
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: jsonable(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(u) for u in v]
    return v


def format_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        # plain-float repr also for numpy scalars, which repr differently
        return repr(float(v))
    return str(v)


def write_table(
    path: str | Path,
    metadata: dict,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> Path:
    """CSV with a single-line JSON metadata comment above the column row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(
            "# "
            + json.dumps(jsonable(metadata), sort_keys=True, separators=(",", ":"))
            + "\n"
        )
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_cell(v) for v in row])
    return path


def read_table(path: str | Path) -> tuple[dict, list[str], list[list[str]]]:
    """Inverse of write_table; cells come back as strings."""
    with open(path, newline="") as f:
        head = f.readline()
        if not head.startswith("# "):
            raise ValueError(f"{path} has no JSON metadata header")
        metadata = json.loads(head[2:])
        body = list(csv.reader(f))
    return metadata, body[0], body[1:]


def line_figure(
    path: str | Path,
    x: Sequence[float],
    series: dict[str, Sequence[float]],
    xlabel: str,
    ylabel: str,
    logy: bool = False,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, ys in series.items():
        ax.plot(x, ys, marker="o", label=label)
    if logy and any(v > 0 for ys in series.values() for v in ys):
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    if len(series) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def histogram_figure(
    path: str | Path,
    values: Sequence[float],
    xlabel: str,
    bins: int = 60,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(values, bins=bins)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
