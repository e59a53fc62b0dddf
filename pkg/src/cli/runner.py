"""Task dispatch: split a config into independent shards, run them, merge and write."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from src.cli.config import ExperimentConfig
from src.cli.tables import emit_report, emit_tables, write_atomic
from src.observability.logger import get_logger
from src.observability.metrics import get_metrics_collector
from src.oracle.checks import (
    duality_sweep,
    marginal_duality_check,
    pitman_recovery_sweep,
    stable_master_sweep,
    total_mass_check,
)
from src.oracle.models import SampleRow, VerificationReport, merge_reports
from src.oracle.montecarlo import mc_compare
from src.sampler.coupled import sample_coupled
from src.sampler.paths import materialize_paths
from src.sampler.streams import RandomStreams

logger = get_logger(__name__)


@dataclass
class ShardResult:
    report: VerificationReport
    artifacts: Dict[str, str] = field(default_factory=dict)


@dataclass
class RunOutcome:
    report: VerificationReport
    files: List[Path] = field(default_factory=list)
    metrics: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 0 if self.report.passed else 1


def _sample_shard(config: ExperimentConfig, seed: int) -> ShardResult:
    assert config.model is not None
    hier = config.model.hier()
    streams = RandomStreams(seed)
    rows: List[SampleRow] = []
    lines: List[str] = []
    for draw_index in range(config.draws):
        draw = sample_coupled(hier, streams.for_draw(draw_index))
        materialize_paths(draw)
        rows.append(
            SampleRow(
                seed=seed,
                draw=draw_index,
                phi=draw.phi,
                k_tilde=draw.k_tilde,
                totals=list(draw.group_totals),
                fine_counts=list(draw.fine_counts),
            )
        )
        lines.append(draw.model_dump_json())

    report = VerificationReport(
        sweep_id=f"sample-{seed}",
        task="sample",
        model=hier.describe(),
        samples=rows,
        details={
            f"mean_phi[{seed}]": sum(r.phi for r in rows) / len(rows),
            "expected_phi": hier.species_mass,
        },
    )
    return ShardResult(report=report, artifacts={f"draws-{seed}.jsonl": "\n".join(lines) + "\n"})


def _shard_count(config: ExperimentConfig) -> int:
    if config.task in ("verify-duality", "normalize", "marginalize"):
        return len(config.sweep_totals())
    if config.task in ("stable-master", "recover-pitman"):
        return len(config.stable)
    return len(config.seeds)


def run_shard(config: ExperimentConfig, index: int) -> ShardResult:
    """Run one independent piece of a task. Module level so worker processes can import it."""
    tol = config.resolved_tolerances()
    task = config.task
    if task in ("verify-duality", "normalize", "marginalize"):
        assert config.model is not None
        sweep: Dict[str, Callable[..., VerificationReport]] = {
            "verify-duality": duality_sweep,
            "normalize": total_mass_check,
            "marginalize": marginal_duality_check,
        }
        totals = config.sweep_totals()[index]
        return ShardResult(sweep[task](config.model.hier(), totals, tolerances=tol))
    if task == "stable-master":
        params = config.stable[index]
        return ShardResult(
            stable_master_sweep(
                params,
                config.n_max,
                config.zetas,
                mixing_n_max=config.mixing_n_max,
                tolerances=tol,
            )
        )
    if task == "recover-pitman":
        return ShardResult(pitman_recovery_sweep(config.stable[index], config.n_max, tol))
    if task == "mc-compare":
        assert config.model is not None
        report = mc_compare(
            config.model.hier(),
            config.draws,
            config.seeds[index],
            statistics=config.statistics,
            count_cap=config.count_cap,
            tolerances=tol,
        )
        return ShardResult(report)
    return _sample_shard(config, config.seeds[index])


def execute(config: ExperimentConfig, jobs: int = 1) -> List[ShardResult]:
    indices = list(range(_shard_count(config)))
    if jobs <= 1 or len(indices) <= 1:
        return [run_shard(config, i) for i in indices]
    with ProcessPoolExecutor(max_workers=min(jobs, len(indices))) as pool:
        return list(pool.map(run_shard, [config] * len(indices), indices))


def run(config: ExperimentConfig, out_dir: Path, jobs: int = 1) -> RunOutcome:
    """Execute the task, then write the JSON report, CSV tables and any draw files."""
    collector = get_metrics_collector()
    run_id = f"{config.task}-{len(collector.runs)}"
    metrics = collector.start_run(run_id, config.task)
    logger.set_context(task=config.task, sweep_id=run_id)
    try:
        stage = collector.start_stage(run_id, "execute", jobs=jobs)
        try:
            results = execute(config, jobs)
        except Exception as exc:
            collector.finish_stage(run_id, stage, success=False, error=str(exc))
            raise
        collector.finish_stage(run_id, stage)
        metrics.increment("shards", len(results))

        report = merge_reports([r.report for r in results], sweep_id=config.task)
        if config.record_wall_clock:
            report.wall_clock_ms = stage.duration_ms

        stage = collector.start_stage(run_id, "write")
        out_dir = Path(out_dir)
        files: List[Path] = [emit_report(report, out_dir / config.outputs.report)]
        if config.outputs.tables:
            files.extend(emit_tables(report, out_dir))
        if config.outputs.draws:
            for result in results:
                for name, text in sorted(result.artifacts.items()):
                    files.append(write_atomic(out_dir / name, text))
        collector.finish_stage(run_id, stage)
        metrics.increment("files", len(files))
        summary = collector.finish_run(run_id)

        failed: Optional[List[str]] = report.failed_criteria() or None
        logger.info(
            f"{config.task}: {len(report.criteria)} criteria, "
            f"{'all passed' if failed is None else 'failed ' + ', '.join(failed)}",
            files=len(files),
        )
    finally:
        logger.clear_context()
    return RunOutcome(report=report, files=files, metrics=summary)
