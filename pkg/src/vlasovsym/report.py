"""Check reports shared by all CLI commands.

Reports are deterministic for a fixed configuration: records are sorted by
name and the JSON field order is fixed (timings are reported but excluded
from the determinism contract).  The JSON layout is pinned by the schema
shipped in docs/report.schema.json.
"""
from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    name: str
    ok: bool
    detail: str
    seconds: float


@dataclass
class Report:
    command: str
    config: dict
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str, seconds: float = 0.0):
        self.records.append(CheckRecord(name, bool(ok), detail,
                                        round(seconds, 6)))

    @contextmanager
    def timed(self, name: str):
        """Collect a record from a block; the block returns via record()."""
        start = time.perf_counter()
        slot: dict = {}

        def record(ok: bool, detail: str):
            slot["ok"] = ok
            slot["detail"] = detail

        try:
            yield record
        except Exception as exc:  # surface failures as failed records
            self.add(name, False, f"error: {exc}",
                     time.perf_counter() - start)
            return
        self.add(name, slot.get("ok", False), slot.get("detail", ""),
                 time.perf_counter() - start)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    def sorted_records(self) -> list[CheckRecord]:
        return sorted(self.records, key=lambda r: r.name)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": {k: str(v) for k, v in sorted(self.config.items())},
            "records": [
                {"name": r.name, "ok": r.ok, "detail": r.detail,
                 "seconds": r.seconds}
                for r in self.sorted_records()
            ],
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"# {self.command}"]
        for r in self.sorted_records():
            flag = "ok  " if r.ok else "FAIL"
            lines.append(f"[{flag}] {r.name}: {r.detail} ({r.seconds:.3f}s)")
        lines.append(f"overall: {'ok' if self.ok else 'FAIL'}")
        return "\n".join(lines)


REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "vlasovsym check report",
    "type": "object",
    "required": ["command", "config", "records", "ok"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "config": {
            "type": "object",
            "additionalProperties": {"type": "string"},
        },
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "ok", "detail", "seconds"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "ok": {"type": "boolean"},
                    "detail": {"type": "string"},
                    "seconds": {"type": "number"},
                },
            },
        },
        "ok": {"type": "boolean"},
    },
}
