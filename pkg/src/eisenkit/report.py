"""Verification report records: one row per named check, JSON/CSV output."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field


@dataclass
class CheckRow:
    name: str
    ref: str                  # identity being checked, in plain words
    inputs: dict
    residual: float
    tol: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "paper_ref": self.ref,
            "inputs": self.inputs,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.passed,
        }


@dataclass
class VerificationReport:
    checks: list[CheckRow] = field(default_factory=list)
    errata: list[str] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)

    def add(self, name: str, ref: str, inputs: dict, residual: float, tol: float) -> CheckRow:
        row = CheckRow(name, ref, _plain(inputs), float(residual), float(tol),
                       bool(residual <= tol))
        self.checks.append(row)
        return row

    def note_assumption(self, text: str):
        if text not in self.assumptions:
            self.assumptions.append(text)

    def note_erratum(self, text: str):
        if text not in self.errata:
            self.errata.append(text)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        for e in other.errata:
            self.note_erratum(e)
        for a in other.assumptions:
            self.note_assumption(a)
        return self

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.checks)

    def to_json(self) -> dict:
        return {
            "checks": [r.to_json() for r in self.checks],
            "errata": list(self.errata),
            "assumptions": list(self.assumptions),
        }

    def json_bytes(self, pretty: bool = True) -> bytes:
        return json.dumps(self.to_json(), indent=2 if pretty else None,
                          sort_keys=True).encode() + b"\n"

    def csv_bytes(self) -> bytes:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["name", "paper_ref", "inputs", "residual", "tol", "pass"])
        for r in self.checks:
            wr.writerow([r.name, r.ref, json.dumps(r.inputs, sort_keys=True),
                         repr(r.residual), repr(r.tol), r.passed])
        return buf.getvalue().encode()

    def summary_lines(self) -> list[str]:
        out = []
        for r in self.checks:
            flag = "PASS" if r.passed else "FAIL"
            out.append(f"{flag} {r.name}: residual {r.residual:.3e} (tol {r.tol:.1e})")
        return out


def _plain(obj):
    """Round-trip inputs through JSON-safe primitives."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def write_atomic(path: str, data: bytes):
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)
