"""Step-function paths of a coupled draw."""
from src.errors import PhibpError
from src.sampler.models import CoupledDraw, DrawPaths, StepFunction


def materialize_paths(draw: CoupledDraw) -> DrawPaths:
    """I_j jumps at fine-block tags, A_j and Z_j at species tags, F_{j,l} per species."""
    individuals = []
    allocation = []
    counts = []
    fragments = []
    for j in range(draw.n_groups):
        fine_jumps = [
            (b.tag, b.count) for s in draw.species for b in s.subblocks[j]
        ]
        individuals.append(StepFunction.from_jumps(fine_jumps))
        allocation.append(
            StepFunction.from_jumps([(s.tag, s.x[j]) for s in draw.species if s.x[j] > 0])
        )
        counts.append(
            StepFunction.from_jumps(
                [(s.tag, s.counts[j]) for s in draw.species if s.counts[j] > 0]
            )
        )
        fragments.append(
            tuple(
                StepFunction.from_jumps([(b.tag, b.count) for b in s.subblocks[j]])
                for s in draw.species
            )
        )

        if individuals[j].total != counts[j].total:
            raise PhibpError(
                f"group {j}: fine total {individuals[j].total} != coarse total {counts[j].total}"
            )

    return DrawPaths(
        individuals=tuple(individuals),
        allocation=tuple(allocation),
        counts=tuple(counts),
        fragments=tuple(fragments),
    )
