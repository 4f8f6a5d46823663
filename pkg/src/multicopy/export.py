"""CSV / JSON writers for result tables, angle and value tables, trajectories.

CSV files are UTF-8 with a header row and LF line endings; floats are
written with ``repr`` so they round-trip exactly (up to 17 significant
digits).  JSON documents are ``{"meta": {...}, "data": [row, ...]}``.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import __version__


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def json_text(columns, rows, meta) -> str:
    data = [{c: _jsonable(row.get(c)) for c in columns} for row in rows]
    doc = {"meta": {**meta, "version": __version__}, "data": data}
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render(columns, rows, fmt: str, meta=None) -> str:
    if fmt == "csv":
        return csv_text(columns, rows)
    if fmt == "json":
        return json_text(columns, rows, meta or {})
    raise ValueError(f"unknown format {fmt!r}")


def write_text(text: str, path):
    """Write to ``path``, or to stdout when path is None or '-'."""
    if path in (None, "-"):
        import sys

        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# angle and value tables

TABLE_COLUMNS = ("stage", "sample", "credulity")


def policy_to_dict(policy, n_copies: int) -> dict:
    """Stage-major JSON structure of a table policy for an ``n_copies`` run."""
    grid = policy.grid
    return {
        "kind": "angle_table",
        "alpha": policy.alpha,
        "n_copies": n_copies,
        "s": grid.s,
        "credulity": grid.points.tolist(),
        "angles": policy.stage_table(n_copies).tolist(),
    }


def policy_from_dict(doc: dict):
    from .schemes_dp import AnglePolicy

    stage_major = np.asarray(doc["angles"], dtype=float)
    return AnglePolicy.from_table(stage_major[::-1], doc.get("alpha"))


def value_tables_to_dict(result, n_copies: int) -> dict:
    """Stage-major value tables; stage ``n`` holds R_n (copies n+1..N still to measure)."""
    tables = result.value_tables
    if tables is None:
        raise ValueError("result was computed without keep_tables=True")
    stages = [tables[n_copies - n].actual().tolist() for n in range(n_copies + 1)]
    return {
        "kind": "value_table",
        "n_copies": n_copies,
        "s": result.grid.s,
        "credulity": result.grid.points.tolist(),
        "values": stages,
    }


def table_rows(stage_major, credulity, name: str, first_stage: int = 1):
    rows = []
    for k, row in enumerate(stage_major):
        for j, (p, v) in enumerate(zip(credulity, row)):
            rows.append({"stage": first_stage + k, "sample": j, "credulity": float(p), name: float(v)})
    return rows


def policy_csv(policy, n_copies: int) -> str:
    rows = table_rows(policy.stage_table(n_copies), policy.grid.points, "angle")
    return csv_text(TABLE_COLUMNS + ("angle",), rows)


def value_tables_csv(result, n_copies: int) -> str:
    doc = value_tables_to_dict(result, n_copies)
    rows = table_rows(doc["values"], doc["credulity"], "value", first_stage=0)
    return csv_text(TABLE_COLUMNS + ("value",), rows)


# ---------------------------------------------------------------------------
# trajectories

TRAJECTORY_COLUMNS = ("trial", "stage", "credulity_before", "angle", "outcome", "credulity_after")


def trajectory_rows(trajectories):
    rows = []
    for tr in trajectories:
        for st in tr.steps:
            rows.append({
                "trial": tr.trial,
                "stage": st.stage,
                "credulity_before": st.credulity_before,
                "angle": st.angle,
                "outcome": st.outcome,
                "credulity_after": st.credulity_after,
            })
    return rows


def trajectories_csv(trajectories) -> str:
    return csv_text(TRAJECTORY_COLUMNS, trajectory_rows(trajectories))


def trajectories_jsonl(trajectories) -> str:
    lines = []
    for tr in trajectories:
        lines.append(json.dumps({
            "trial": tr.trial,
            "true_sign": tr.true_sign,
            "final_guess": tr.final_guess,
            "correct": tr.correct,
            "steps": [[s.stage, s.credulity_before, s.angle, s.outcome, s.credulity_after]
                      for s in tr.steps],
        }))
    return "\n".join(lines) + ("\n" if lines else "")
