"""Structured pass/fail reports.

A report is a list of :class:`Check` records plus a digest of the
configuration that produced it. Two serializations are provided: a
line-oriented tab-separated text format (lossless, see :meth:`to_text`) and
CSV. Floats are written with ``repr`` so that parsing restores them bit for
bit.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Optional

_HEADER = "# mfrl-report v1"
_COLUMNS = ("name", "observed", "threshold", "standard_error", "pass", "notes")


def config_digest(config) -> str:
    """SHA-256 of the canonical JSON form of ``config``."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _jsonable(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "__dict__"):
        return {k: v for k, v in vars(obj).items() if not k.startswith("_")}
    return repr(obj)


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_float(text: str) -> float:
    return float(text)


@dataclass
class Check:
    name: str
    observed: tuple
    threshold: float
    passed: bool
    standard_error: Optional[float] = None
    notes: str = ""

    def __post_init__(self):
        if isinstance(self.observed, (int, float)):
            self.observed = (float(self.observed),)
        else:
            self.observed = tuple(float(v) for v in self.observed)
        self.threshold = float(self.threshold)
        self.passed = bool(self.passed)
        if self.standard_error is not None:
            self.standard_error = float(self.standard_error)

    @property
    def value(self) -> float:
        """The first observed value, for single-valued checks."""
        return self.observed[0]

    def _fields(self):
        return (
            self.name,
            ";".join(_fmt(v) for v in self.observed),
            _fmt(self.threshold),
            "" if self.standard_error is None else _fmt(self.standard_error),
            "1" if self.passed else "0",
            json.dumps(self.notes),
        )

    @classmethod
    def _from_fields(cls, fields):
        name, observed, threshold, se, passed, notes = fields
        obs = tuple(_parse_float(v) for v in observed.split(";")) if observed else ()
        return cls(
            name=name,
            observed=obs,
            threshold=_parse_float(threshold),
            standard_error=None if se == "" else _parse_float(se),
            passed=passed == "1",
            notes=json.loads(notes),
        )


@dataclass
class DiagnosticsReport:
    checks: list = field(default_factory=list)
    config_digest: str = ""

    def add(self, name, observed, threshold, passed, standard_error=None, notes=""):
        chk = Check(name, observed, threshold, passed, standard_error, notes)
        self.checks.append(chk)
        return chk

    def extend(self, other: "DiagnosticsReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(
                Check(prefix + c.name, c.observed, c.threshold, c.passed, c.standard_error, c.notes)
            )
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_text(self) -> str:
        """One tab-separated line per check; notes are JSON-quoted."""
        lines = [_HEADER, f"# config_digest {self.config_digest}", "\t".join(_COLUMNS)]
        for c in self.checks:
            lines.append("\t".join(c._fields()))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DiagnosticsReport":
        lines = text.splitlines()
        if not lines or lines[0] != _HEADER:
            raise ValueError("not an mfrl report")
        digest = lines[1].split(" ", 2)[2] if len(lines) > 1 else ""
        checks = [Check._from_fields(line.split("\t")) for line in lines[3:] if line]
        return cls(checks=checks, config_digest=digest)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_COLUMNS)
        for c in self.checks:
            f = list(c._fields())
            f[-1] = c.notes
            w.writerow(f)
        return buf.getvalue()

    def summary(self) -> str:
        out = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            obs = ", ".join(f"{v:.6g}" for v in c.observed[:4])
            if len(c.observed) > 4:
                obs += ", ..."
            se = "" if c.standard_error is None else f" se={c.standard_error:.3g}"
            out.append(f"[{flag}] {c.name}: observed=({obs}) threshold={c.threshold:.6g}{se}")
        return "\n".join(out)
