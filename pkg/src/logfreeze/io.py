"""Deterministic text output: run summaries and delimited numeric tables.

Every file starts with a header naming the tool version, the hash of the
effective configuration and the master seed.  Timestamps and wall-clock
times live on one separate metadata line so that reruns with the same
seed produce byte-identical files apart from that line.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .experiments import RunSummary
from .theory import TheoryCurve

_FLOAT_FMT = "%.17g"


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _header_lines(cfg_hash: str, master_seed, wall_seconds: float | None) -> list[str]:
    lines = [
        f"# logfreeze {__version__}",
        f"# config-hash: {cfg_hash}",
        f"# master-seed: {master_seed}",
    ]
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    meta = f"# generated: {stamp}"
    if wall_seconds is not None:
        meta += f"; wall-seconds: {wall_seconds:.3f}"
    lines.append(meta)
    return lines


def _format_value(v):
    if isinstance(v, float):
        return float(_FLOAT_FMT % v)
    if isinstance(v, (np.floating,)):
        return float(_FLOAT_FMT % float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, dict):
        return {k: _format_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_format_value(x) for x in v]
    return v


def write_summary(path: str | Path, summary: RunSummary) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = _format_value(summary.body_dict())
    text = yaml.safe_dump(body, sort_keys=False, default_flow_style=False)
    lines = _header_lines(config_hash(summary.config), summary.master_seed, summary.wall_seconds)
    path.write_text("\n".join(lines) + "\n" + text)
    return path


def write_table(path: str | Path, columns: dict[str, np.ndarray], config: dict,
                master_seed, extra_header: list[str] | None = None) -> Path:
    """Tab-separated numeric table with one named column per statistic."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.asarray(columns[k]) for k in names]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ValueError("table columns must share one length")
    lines = _header_lines(config_hash(config), master_seed, None)
    if extra_header:
        lines.extend(f"# {h}" for h in extra_header)
    lines.append("\t".join(names))
    for i in range(n):
        lines.append("\t".join(_FLOAT_FMT % float(a[i]) for a in arrays))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_curve(path: str | Path, curve: TheoryCurve, params: dict) -> Path:
    return write_table(
        path,
        {"abscissa": curve.abscissa, "value": curve.value},
        params,
        params.get("seed", 0),
        extra_header=[f"curve: {curve.equation_tag}"],
    )


def strip_timestamp(text: str) -> str:
    """Drop the metadata line, leaving the deterministic content."""
    return "\n".join(l for l in text.splitlines() if not l.startswith("# generated:"))
