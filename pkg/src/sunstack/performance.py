"""Wall-clock timing of simulation stages."""

from __future__ import annotations

import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator

from sunstack.config.validators import log_info


@dataclass
class OperationMetric:
    """Duration (s) of one timed operation."""

    name: str
    duration: float
    metadata: dict[str, Any] = field(default_factory=dict)
    timestamp: float = field(default_factory=time.time)


class PerformanceMetrics:
    """Collects durations of named operations (J-V runs, sweep cells, study steps)."""

    def __init__(self) -> None:
        self.metrics: list[OperationMetric] = []

    def record(self, name: str, duration: float, **metadata: Any) -> None:
        """Record a duration measured elsewhere (e.g. in a worker process)."""
        self.metrics.append(OperationMetric(name=name, duration=duration, metadata=metadata))

    @contextmanager
    def timer(self, name: str, **metadata: Any) -> Iterator[None]:
        """Time the enclosed block, recording it even if it raises."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record(name, time.perf_counter() - start, **metadata)

    def get_summary(self) -> dict[str, dict[str, float]]:
        """count/total_duration/min/max/avg per operation name."""
        summary: dict[str, dict[str, float]] = defaultdict(
            lambda: {"count": 0, "total_duration": 0.0, "min": float("inf"), "max": 0.0}
        )
        for metric in self.metrics:
            s = summary[metric.name]
            s["count"] += 1
            s["total_duration"] += metric.duration
            s["min"] = min(s["min"], metric.duration)
            s["max"] = max(s["max"], metric.duration)
        for s in summary.values():
            s["avg"] = s["total_duration"] / s["count"]
        return dict(summary)

    def log_summary(self, title: str = "Timing summary") -> None:
        for name, stats in self.get_summary().items():
            log_info(
                title,
                operation=name,
                count=int(stats["count"]),
                total_s=round(stats["total_duration"], 3),
                avg_s=round(stats["avg"], 3),
            )

    def clear(self) -> None:
        self.metrics.clear()


__all__ = ["OperationMetric", "PerformanceMetrics"]
