"""Run the acceptance criteria end to end with the default tolerances."""
import argparse
import itertools
import sys
import time
from pathlib import Path
from typing import Callable, List, Tuple

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.levy.models import GammaModel, GenGammaModel  # noqa: E402
from src.observability.logger import setup_logging  # noqa: E402
from src.oracle.checks import (  # noqa: E402
    duality_sweep,
    pitman_recovery_sweep,
    stable_master_sweep,
    stirling_check,
    total_mass_check,
)
from src.oracle.models import VerificationReport, merge_reports  # noqa: E402
from src.oracle.montecarlo import mc_compare  # noqa: E402
from src.oracle.quadrature import bell_moment_check, quadrature_oracle_check  # noqa: E402
from src.phibp.models import HierModel  # noqa: E402
from src.stable.duality import stable_hierarchy  # noqa: E402
from src.stable.models import StableDualityParams  # noqa: E402

GG_HIER = HierModel(
    tau0=GenGammaModel(alpha=0.4, theta=1.0, zeta=0.5),
    taus=(
        GenGammaModel(alpha=0.3, theta=1.0, zeta=0.2),
        GenGammaModel(alpha=0.6, theta=2.0, zeta=0.1),
    ),
    gammas=(1.0, 1.5),
)
HALF_HIER = HierModel(
    tau0=GenGammaModel(alpha=0.5, theta=1.0, zeta=0.5),
    taus=(GenGammaModel(alpha=0.5, theta=0.8, zeta=0.3),),
    gammas=(1.2,),
)
STABLE = StableDualityParams(alpha=0.6, beta=0.3)
MC_STATISTICS = ("phi", "x_tilde", "first_block", "totals")


def unified_duality() -> VerificationReport:
    return duality_sweep(GG_HIER, (3, 2))


def normalization() -> VerificationReport:
    grid = itertools.product(range(1, 7), repeat=2)
    return merge_reports(
        [total_mass_check(GG_HIER, t) for t in grid if sum(t) <= 6], "normalization"
    )


def stable_master() -> VerificationReport:
    return stable_master_sweep(STABLE, n_max=6, zetas=(0.25, 1.0, 4.0), mixing_n_max=8)


def pitman_recovery() -> VerificationReport:
    return merge_reports(
        [pitman_recovery_sweep(STABLE.model_copy(update={"theta": t}), 6) for t in (0.0, 0.5)],
        "pitman",
    )


def monte_carlo(draws: int, seed: int) -> VerificationReport:
    return mc_compare(stable_hierarchy(STABLE, 1.0), draws, seed, statistics=MC_STATISTICS)


def bell_moments() -> VerificationReport:
    return merge_reports(
        [
            bell_moment_check(GammaModel(theta=1.5, zeta=0.7), 1.3, 0.8, 6),
            bell_moment_check(GenGammaModel(alpha=0.5, theta=1.0, zeta=0.5), 1.3, 0.8, 6),
        ]
        + [quadrature_oracle_check(HALF_HIER, (n,)) for n in range(0, 7)],
        "bell",
    )


def stirling() -> VerificationReport:
    return stirling_check((0.0, 0.25, 0.5, 0.75), 12)


def determinism(draws: int, seed: int) -> VerificationReport:
    first = monte_carlo(draws, seed).model_dump_json()
    second = monte_carlo(draws, seed).model_dump_json()
    report = VerificationReport(sweep_id="determinism", task="determinism")
    report.add_criterion("byte_identical_reports", float(first != second), 0.0)
    return report


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--draws", type=int, default=1_000_000, help="Monte-Carlo draws")
    parser.add_argument("--seed", type=int, default=20240601)
    args = parser.parse_args()
    setup_logging("WARNING")

    checks: List[Tuple[str, Callable[[], VerificationReport]]] = [
        ("unified duality", unified_duality),
        ("normalization", normalization),
        ("stable master equation", stable_master),
        ("pitman recovery", pitman_recovery),
        ("monte carlo", lambda: monte_carlo(args.draws, args.seed)),
        ("bell moments", bell_moments),
        ("generalized stirling", stirling),
        ("determinism", lambda: determinism(min(args.draws, 10_000), args.seed)),
    ]

    print("=" * 60)
    print("Acceptance run")
    print("=" * 60)
    failures = 0
    for name, check in checks:
        start = time.perf_counter()
        report = check()
        elapsed = time.perf_counter() - start
        status = "PASS" if report.passed else "FAIL"
        failures += not report.passed
        print(f"\n[{status}] {name} ({elapsed:.1f}s)")
        for c in report.criteria:
            mark = "ok" if c.passed else "!!"
            print(f"   {mark} {c.name}: {c.value:.3e} ({c.kind} {c.tolerance:.1e})")

    print("\n" + "=" * 60)
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
