"""Validation report: a list of named checks, rendered as a table and a key=value block."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    observed: float
    tolerance: float
    passed: bool
    stderr: Optional[float] = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: List[Check] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def table(self) -> str:
        head = f"{'check':<34} {'expected':>14} {'observed':>14} {'tolerance':>10} {'stderr':>10}  result"
        rows = [head, "-" * len(head)]
        for c in self.checks:
            se = "" if c.stderr is None else f"{c.stderr:10.3g}"
            rows.append(f"{c.name:<34} {c.expected:14.6g} {c.observed:14.6g} {c.tolerance:10.3g} {se:>10}  "
                        f"{'PASS' if c.passed else 'FAIL'}" + (f"  {c.detail}" if c.detail else ""))
        return "\n".join(rows)

    def to_keyvalue(self) -> str:
        lines = []
        for c in self.checks:
            p = f"check.{c.name}"
            lines += [f"{p}.expected={_f(c.expected)}", f"{p}.observed={_f(c.observed)}",
                      f"{p}.tolerance={_f(c.tolerance)}", f"{p}.passed={int(c.passed)}"]
            if c.stderr is not None:
                lines.append(f"{p}.stderr={_f(c.stderr)}")
            if c.detail:
                lines.append(f"{p}.detail={c.detail}")
        lines.append(f"passed={int(self.passed)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_keyvalue(cls, text: str) -> "ValidationReport":
        order: list = []
        data: dict = {}
        for line in text.splitlines():
            if not line.startswith("check."):
                continue
            key, val = line.split("=", 1)
            name, attr = key[len("check."):].rsplit(".", 1)
            if name not in data:
                order.append(name)
                data[name] = {}
            data[name][attr] = val
        checks = []
        for name in order:
            d = data[name]
            checks.append(Check(name, float(d["expected"]), float(d["observed"]), float(d["tolerance"]),
                                d["passed"] == "1", float(d["stderr"]) if "stderr" in d else None,
                                d.get("detail", "")))
        return cls(checks)


def _f(x: float) -> str:
    return "%.17g" % x if math.isfinite(x) else repr(float(x))
