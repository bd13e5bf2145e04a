"""
Time-series recording and report export helpers.
"""
import csv
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence


@dataclass
class SeriesRow:
    t: float
    values: Dict[str, float] = field(default_factory=dict)


@dataclass
class CheckResult:
    check: str
    tolerance: float
    observed: float
    passed: Optional[bool] = None

    def __post_init__(self):
        # An explicit verdict (e.g. monotonicity) is combined with the tolerance test
        within = bool(abs(self.observed) <= self.tolerance)
        self.passed = within if self.passed is None else bool(self.passed) and within

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "tolerance": self.tolerance,
            "observed": self.observed,
            "pass": self.passed,
        }


class StatsLogger:
    """Tracks per-time-step observables and verification results."""

    def __init__(self):
        self.history: List[SeriesRow] = []
        self.checks: List[CheckResult] = []

    def record(self, t: float, **values: float):
        self.history.append(SeriesRow(t, {k: float(v) for k, v in values.items()}))

    def record_check(self, result: CheckResult):
        self.checks.append(result)

    def extend_checks(self, results: Sequence[CheckResult]):
        self.checks.extend(results)

    @property
    def failed(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def column(self, name: str) -> List[float]:
        if name == "t":
            return [row.t for row in self.history]
        return [row.values[name] for row in self.history]

    def export_json(self, path: str, extra: Optional[dict] = None):
        payload = {"checks": [c.to_dict() for c in self.checks]}
        if extra:
            payload.update(extra)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)

    def export_csv(self, path: str):
        if not self.history:
            return
        columns = list(self.history[0].values.keys())
        fieldnames = ["t"] + columns
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=fieldnames)
            writer.writeheader()
            for row in self.history:
                out = {"t": repr(row.t)}
                out.update({name: repr(row.values[name]) for name in columns})
                writer.writerow(out)


def export_moller_csv(path: str, reports: Sequence):
    """One row per (direction, T) with the raw defect and the Cauchy step."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["t", "direction", "defect", "cauchy"])
        writer.writeheader()
        for report in reports:
            steps = [float("nan")] + list(report.cauchy)
            for T, defect, step in zip(report.times, report.defects, steps):
                writer.writerow({"t": repr(T), "direction": report.direction,
                                 "defect": repr(defect), "cauchy": repr(step)})


def export_spectrum_csv(path: str, eigenvalues: Sequence[float], k: Sequence[float],
                        oracle_phase: Sequence[float], exact_phase: Sequence[float]):
    """Oracle eigenvalues followed by the phase-shift table; empty cells where a row has no entry."""
    n = max(len(eigenvalues), len(k))
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["index", "eigenvalue", "k", "delta_oracle", "delta_exact"])
        writer.writeheader()
        for i in range(n):
            row = {"index": i}
            if i < len(eigenvalues):
                row["eigenvalue"] = repr(float(eigenvalues[i]))
            if i < len(k):
                row.update(k=repr(float(k[i])), delta_oracle=repr(float(oracle_phase[i])),
                           delta_exact=repr(float(exact_phase[i])))
            writer.writerow(row)
