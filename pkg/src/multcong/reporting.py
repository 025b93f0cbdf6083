"""Deterministic report files.

Bodies are byte-stable for identical inputs and config: fixed key order,
LF line endings, no timestamps unless explicitly stamped.  Run metadata
lives in a separate header block so bodies stay diffable.  Writes are
atomic (temp file + rename).
"""

from __future__ import annotations

import io
import json
import os

SCHEMA_SEARCH_CSV = "multcong.search-csv/1"

SEARCH_CSV_COLUMNS = ("A", "B", "p", "k", "scan", "rhs", "certainty", "status")


def report_document(body: dict, *, config: dict | None = None,
                    stamp: str | None = None) -> dict:
    meta: dict = {"tool": "multcong", "schema": body.get("schema", "multcong/1")}
    if config:
        meta["config"] = config
    if stamp:
        meta["timestamp"] = stamp
    return {"meta": meta, "body": body}


def render_json(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=True) + "\n").encode("ascii")


def render_search_csv(report_body: dict, *, config: dict | None = None,
                      stamp: str | None = None) -> bytes:
    """Hit table with the fixed column set A,B,p,k,scan,rhs,certainty,status."""
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA_SEARCH_CSV}\n")
    if config:
        buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    if stamp:
        buf.write(f"# timestamp: {stamp}\n")
    buf.write(",".join(SEARCH_CSV_COLUMNS) + "\n")
    for hit in report_body.get("hits", []):
        row = (hit["A"], hit["B"], hit["p"], hit["k"], hit["scan"],
               hit["total"], hit["total_certainty"], hit["status"])
        buf.write(",".join(str(x) for x in row) + "\n")
    return buf.getvalue().encode("ascii")


def write_report(data: bytes, path: str) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"writing report {path}: {exc}") from None
