import argparse
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from src.cli.config import MAX_SEED, load_config
from src.cli.runner import run
from src.config import get_settings
from src.errors import ConfigError, PhibpError
from src.observability.logger import get_logger, setup_logging

TASKS = [
    "verify-duality",
    "normalize",
    "sample",
    "mc-compare",
    "stable-master",
    "recover-pitman",
    "marginalize",
]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _seed(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {value}")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phibp", description="Coagulation-fragmentation duality checks and samplers"
    )
    parser.add_argument("task", choices=TASKS, help="What to run")
    parser.add_argument("--config", type=Path, required=True, help="Experiment JSON file")
    parser.add_argument("--out", type=Path, default=Path("out"), help="Output directory")
    parser.add_argument("--seed", type=_seed, default=None, help="Overrides the config seeds")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes for shards")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(settings.log_level)
    logger = get_logger(__name__, task=args.task)

    try:
        config = load_config(args.config).with_seed(args.seed)
        if config.task != args.task:
            raise ConfigError(
                f"config is for task '{config.task}', not '{args.task}'", f"{args.config}: task"
            )
    except (ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        outcome = run(config, args.out, jobs=max(1, args.jobs))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhibpError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED

    for criterion in outcome.report.criteria:
        status = "ok" if criterion.passed else "FAILED"
        print(
            f"{criterion.name}: {criterion.value:.3e} "
            f"({criterion.kind} {criterion.tolerance:.1e}) {status}",
            file=sys.stderr,
        )
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
