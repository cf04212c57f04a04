"""Deterministic CSV and JSON writers."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np

CSV_HEADER = "index,theta,rx,ry,rz,r_dot_q"


def format_number(x) -> str:
    """Shortest decimal that round-trips to the same float; ``-0`` prints as ``0``.

    Integers print without a fractional part, so ``0.0`` becomes ``0``.
    """
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x) + 0.0
    if not math.isfinite(x):
        return repr(x)
    s = repr(x)
    if s.endswith(".0"):
        s = s[:-2]
    return s


def trajectory_csv(traj) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for k, th, r, rq in zip(traj.index, traj.theta, traj.r, traj.r_dot_q):
        buf.write(",".join([format_number(k), format_number(th), *(format_number(c) for c in r), format_number(rq)]))
        buf.write("\n")
    return buf.getvalue()


def write_text(path, text: str):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def emit_csv(traj, path):
    """Write ``traj`` as CSV (UTF-8, LF line endings)."""
    return write_text(path, trajectory_csv(traj))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def emit_json(obj, path):
    return write_text(path, dumps(obj))


def trajectory_record(traj) -> dict:
    cfg = traj.config
    meta = {"method": traj.method}
    if cfg is not None:
        meta.update(config_record(cfg))
    return {
        "meta": meta,
        "samples": [
            {"index": int(k), "theta": float(th), "r": [float(c) for c in r], "r_dot_q": float(rq)}
            for k, th, r, rq in zip(traj.index, traj.theta, traj.r, traj.r_dot_q)
        ],
    }


def config_record(cfg) -> dict:
    rec = {
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "lambda": cfg.lam,
        "p": cfg.p,
        "q": cfg.q,
        "r0": cfg.r0,
        "chi0": cfg.chi0,
        "omega": cfg.omega,
    }
    for key in ("exact_alpha_deg", "exact_beta_deg", "exact_lam"):
        val = getattr(cfg, key)
        if val is not None:
            rec[key] = str(val)
    return rec
