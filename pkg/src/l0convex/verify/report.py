"""Running suites and collecting per-trial records."""
from __future__ import annotations

import json
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..serialize import to_json
from .scenario import Scenario
from .suites import build_instance, check_instance, encode_instance, get_suite

__all__ = ["TrialRecord", "Report", "run_trial", "run_suite"]

PASS, FAIL, ERROR = "pass", "fail", "error"


@dataclass(frozen=True)
class TrialRecord:
    suite: str
    trial: int
    status: str
    max_deviation: float
    witness: dict | None = None

    def to_dict(self) -> dict:
        out = {"suite": self.suite, "trial": self.trial, "status": self.status,
               "max_deviation": to_json(self.max_deviation)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    scenario: Scenario
    records: list = field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(r.status != PASS for r in self.records)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    @property
    def max_deviation(self) -> float:
        devs = [r.max_deviation for r in self.records if not math.isnan(r.max_deviation)]
        return max(devs, default=0.0)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def summary(self) -> dict:
        return {"suite": self.scenario.suite, "trials": len(self.records), "failures": self.failures,
                "max_deviation": to_json(self.max_deviation)}

    def lines(self) -> list:
        rows = [r.to_dict() for r in self.records] + [self.summary()]
        return [json.dumps(row, allow_nan=False) for row in rows]

    def write(self, fh) -> None:
        for line in self.lines():
            fh.write(line + "\n")


def run_trial(sc: Scenario, trial: int) -> TrialRecord:
    inst = None
    try:
        inst = build_instance(sc, trial)
        out = check_instance(sc, inst)
    except Exception as exc:  # a crash in library code is a reportable result, not a harness failure
        witness = {"error": f"{type(exc).__name__}: {exc}", "traceback": traceback.format_exc(limit=4)}
        if inst is not None:
            witness["instance"] = encode_instance(inst)
        return TrialRecord(sc.suite, trial, ERROR, float("nan"), witness)
    status = PASS if out.passed else FAIL
    witness = None
    if not out.passed or (out.detail is not None and sc.suite == "counterexample"):
        witness = {"instance": encode_instance(inst), "detail": to_json(out.detail)}
    return TrialRecord(sc.suite, trial, status, float(out.deviation), witness)


def _run_chunk(args) -> list:
    sc, trials = args
    return [run_trial(sc, t) for t in trials]


def run_suite(sc: Scenario) -> Report:
    """Run every trial of the scenario's suite; records come back in trial order."""
    suite = get_suite(sc.suite)
    if suite.requires is not None:
        problem = suite.requires(sc)
        if problem:
            raise ConfigError(problem)
    trials = list(range(sc.trials))
    if sc.jobs == 1:
        records = [run_trial(sc, t) for t in trials]
    else:
        chunks = [(sc, trials[k::sc.jobs]) for k in range(sc.jobs)]
        with ProcessPoolExecutor(max_workers=sc.jobs) as pool:
            records = [r for part in pool.map(_run_chunk, chunks) for r in part]
        records.sort(key=lambda r: r.trial)
    return Report(sc, records)
