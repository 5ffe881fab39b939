"""Run reports shared by the CLI subcommands."""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field

SCHEMA = "crossedhom.report/1"


@dataclass
class Check:
    name: str
    passed: bool
    residual: float | None = None
    tolerance: float | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.residual is not None:
            out["residual"] = _num(self.residual)
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.detail:
            out["detail"] = self.detail
        return out


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


@dataclass
class RunReport:
    command: list
    inputs: dict
    seed: int | None = None
    checks: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    started: float = field(default_factory=time.perf_counter)
    wall_time: float | None = None

    def add(self, name: str, passed: bool, residual=None, tolerance=None, detail: str = "") -> Check:
        c = Check(name, bool(passed), None if residual is None else float(residual), tolerance, detail)
        self.checks.append(c)
        return c

    def check_below(self, name: str, residual: float, tolerance: float, detail: str = "") -> Check:
        return self.add(name, residual < tolerance, residual, tolerance, detail)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def digest(self) -> str:
        blob = json.dumps(self.inputs, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def finish(self) -> "RunReport":
        self.wall_time = time.perf_counter() - self.started
        return self

    def to_json(self, include_time: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "inputs_digest": self.digest,
            "seed": self.seed,
            "status": "pass" if self.ok else "fail",
            "checks": [c.to_json() for c in self.checks],
            "verdicts": self.verdicts,
            "tables": self.tables,
        }
        if include_time:
            out["wall_time"] = self.wall_time
        return out

    def to_text(self) -> str:
        lines = [f"command: {' '.join(self.command)}", f"inputs digest: {self.digest}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        if self.checks:
            width = max(len(c.name) for c in self.checks)
            for c in self.checks:
                status = "PASS" if c.passed else "FAIL"
                res = "" if c.residual is None else f"  residual={c.residual:.3e}"
                tol = "" if c.tolerance is None else f"  tol={c.tolerance:.0e}"
                det = f"  {c.detail}" if c.detail else ""
                lines.append(f"  [{status}] {c.name:<{width}}{res}{tol}{det}")
        for name, table in self.tables.items():
            lines.append(f"{name}:")
            lines.extend("  " + row for row in format_table(table["columns"], table["rows"]))
        for v in self.verdicts:
            lines.append(f"  verdict {v['path']}: {v['summary']}")
        lines.append(f"status: {'pass' if self.ok else 'fail'}")
        if self.wall_time is not None:
            lines.append(f"wall time: {self.wall_time:.2f}s")
        return "\n".join(lines)


def format_table(columns: list, rows: list) -> list[str]:
    cells = [[str(c) for c in columns]] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(columns))]
    return ["  ".join(x.rjust(w) for x, w in zip(r, widths)) for r in cells]
