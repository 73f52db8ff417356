"""CSV / JSON emission, gnuplot scripts and the run manifest."""
from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

NUMBER_FORMAT = "{:.11e}"  # 12 significant digits


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return NUMBER_FORMAT.format(x)


def write_csv(path: Path, header: list[str], rows) -> Path:
    """Header names carry units in brackets, e.g. ``tau[ns]``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row of length {len(row)} does not match header of {len(header)}")
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return None if math.isnan(x) else float(fmt(x))
    return obj


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_gnuplot(path: Path, csv_name: str, x_col: int, y_cols: list[int], title: str, xlabel: str, ylabel: str) -> Path:
    """Plain-text gnuplot script plotting columns of a CSV (1-based columns)."""
    path = Path(path)
    lines = [
        f"# {title}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set terminal pngcairo size 900,600",
        f"set output '{path.stem}.png'",
    ]
    parts = [f"'{csv_name}' using {x_col}:{c} with lines" for c in y_cols]
    lines.append("plot " + ", \\\n     ".join(parts))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_manifest(out_dir: Path, config_echo: dict, derived_echo: dict, version: str, wall_time: float, outputs) -> Path:
    out_dir = Path(out_dir)
    files = {
        os.path.relpath(p, out_dir): sha256(p) for p in sorted(Path(p) for p in outputs)
    }
    manifest = {
        "config": config_echo,
        "derived": derived_echo,
        "version": version,
        "wall_time_s": wall_time,
        "outputs": files,
    }
    return write_json(out_dir / "manifest.json", manifest)
