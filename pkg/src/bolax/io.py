"""Deterministic CSV/JSON emission and run manifests.

Floats are printed with 17 significant digits so a read-back reproduces the
double exactly; identical configs and seeds therefore produce byte-identical
files.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path


def fmt(x) -> str:
    if isinstance(x, (int,)):
        return str(x)
    return "%.17g" % float(x)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if not isinstance(v, str) else v for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_csv(path):
    lines = Path(path).read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def write_manifest(out_dir, command: str, config: dict, outputs, seeds=None,
                   started: float | None = None) -> Path:
    import numpy
    from . import __version__

    manifest = {
        "schema": 1,
        "command": command,
        "config": config,
        "package": {"name": "bolax", "version": __version__,
                    "numpy": numpy.__version__},
        "seeds": seeds if seeds is not None else {},
        "wall_time_s": None if started is None else round(time.time() - started, 3),
        "outputs": [str(Path(p).name) for p in outputs],
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def manifest_hash(manifest_path) -> str:
    data = Path(manifest_path).read_bytes()
    return hashlib.sha256(data).hexdigest()[:12]
