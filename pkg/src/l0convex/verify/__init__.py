"""Seeded property suites and the ``verify`` command line front end."""
from .report import Report, TrialRecord, run_suite
from .scenario import Scenario
from .suites import SUITES, Outcome, generate, replay

__all__ = ["Scenario", "Report", "TrialRecord", "Outcome", "SUITES", "generate", "run_suite", "replay"]
