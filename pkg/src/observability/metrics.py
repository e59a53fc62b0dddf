import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from src.observability.logger import get_logger

logger = get_logger(__name__)


@dataclass
class StageMetrics:
    stage: str
    start_time: float
    end_time: Optional[float] = None
    duration_ms: Optional[float] = None
    success: bool = True
    error: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def finish(self, success: bool = True, error: Optional[str] = None) -> None:
        self.end_time = time.perf_counter()
        self.duration_ms = (self.end_time - self.start_time) * 1000
        self.success = success
        self.error = error


@dataclass
class RunMetrics:
    run_id: str
    task: str
    start_time: float
    end_time: Optional[float] = None
    total_duration_ms: Optional[float] = None
    stages: List[StageMetrics] = field(default_factory=list)
    counters: Dict[str, int] = field(default_factory=lambda: defaultdict(int))

    def add_stage(self, metric: StageMetrics) -> None:
        self.stages.append(metric)

    def increment(self, name: str, amount: int = 1) -> None:
        self.counters[name] += amount

    def finish(self) -> None:
        self.end_time = time.perf_counter()
        self.total_duration_ms = (self.end_time - self.start_time) * 1000

    def get_summary(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "task": self.task,
            "total_duration_ms": self.total_duration_ms,
            "stages": {
                m.stage: {"duration_ms": m.duration_ms, "success": m.success, "error": m.error}
                for m in self.stages
            },
            "counters": dict(self.counters),
        }


class MetricsCollector:
    def __init__(self) -> None:
        self.runs: Dict[str, RunMetrics] = {}
        self.stage_counts: Dict[str, int] = defaultdict(int)
        self.error_counts: Dict[str, int] = defaultdict(int)

    def start_run(self, run_id: str, task: str) -> RunMetrics:
        run = RunMetrics(run_id=run_id, task=task, start_time=time.perf_counter())
        self.runs[run_id] = run
        logger.debug(f"Started metrics tracking for run: {run_id}", task=task)
        return run

    def get_run(self, run_id: str) -> Optional[RunMetrics]:
        return self.runs.get(run_id)

    def start_stage(self, run_id: str, stage: str, **metadata: Any) -> StageMetrics:
        self.stage_counts[stage] += 1
        return StageMetrics(stage=stage, start_time=time.perf_counter(), metadata=metadata)

    def finish_stage(
        self,
        run_id: str,
        metric: StageMetrics,
        success: bool = True,
        error: Optional[str] = None,
    ) -> None:
        metric.finish(success=success, error=error)
        run = self.get_run(run_id)
        if run:
            run.add_stage(metric)
        if not success:
            self.error_counts[metric.stage] += 1
        logger.debug(
            f"Finished stage: {metric.stage}",
            stage=metric.stage,
            duration_ms=metric.duration_ms,
            success=success,
        )

    def finish_run(self, run_id: str) -> Dict[str, Any]:
        run = self.runs[run_id]
        run.finish()
        logger.info(
            f"Run finished: {run_id}", task=run.task, duration_ms=run.total_duration_ms
        )
        return run.get_summary()


_metrics_collector: Optional[MetricsCollector] = None


def get_metrics_collector() -> MetricsCollector:
    global _metrics_collector
    if _metrics_collector is None:
        _metrics_collector = MetricsCollector()
    return _metrics_collector
