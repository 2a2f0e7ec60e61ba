import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator


@dataclass
class RunMetrics:
    command: str = ""
    checks_performed: int = 0
    checks_passed: int = 0
    checks_failed: int = 0
    partial_results: int = 0

    phase_timings: dict[str, float] = field(default_factory=dict)
    total_time: float = 0.0

    def add_timing(self, phase: str, duration: float) -> None:
        """Record timing for a phase (parse, compute, render)."""
        self.phase_timings[phase] = self.phase_timings.get(phase, 0.0) + duration
        self.total_time += duration

    @contextmanager
    def timed(self, phase: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.add_timing(phase, time.perf_counter() - start)

    def record(self, passed: bool, checks: int = 1) -> None:
        """Count ``checks`` checks under one verdict."""
        self.checks_performed += checks
        if passed:
            self.checks_passed += checks
        else:
            self.checks_failed += checks

    def to_dict(self) -> dict:
        """Convert metrics to dictionary for reporting/export."""
        return {
            "summary": {
                "command": self.command,
                "checks_performed": self.checks_performed,
                "breakdown": {
                    "passed": self.checks_passed,
                    "failed": self.checks_failed,
                },
                "partial_results": self.partial_results,
            },
            "performance": {
                "total_time_ms": round(self.total_time * 1000, 2),
                "phase_timings_ms": {
                    k: round(v * 1000, 2)
                    for k, v in self.phase_timings.items()
                }
            }
        }
