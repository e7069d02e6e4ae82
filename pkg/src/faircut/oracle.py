"""Independent brute-force verifiers.

These enumerate complete candidate spaces (no sampling) within hard caps and
serve as correctness anchors for the solvers, never as performance paths.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, InstanceTooLarge
from .necklace1d import BeadString

MAX_ORACLE_BEADS = 24
DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class OracleReport:
    instance: str
    space_size: int
    best_objective: float
    witness: object
    feasible: bool = True


def oracle_necklace(beads: BeadString, k: int, max_cuts=None) -> OracleReport:
    """Minimal fair cut count by plain enumeration of cut sets and labelings.

    Deliberately naive (slices and dict counting, full labeling product) so it
    shares no machinery with the discrete solver it cross-checks.
    """
    seq = beads.beads
    n = len(seq)
    if n > MAX_ORACLE_BEADS:
        raise InstanceTooLarge(f"{n} beads exceeds oracle cap {MAX_ORACLE_BEADS}")
    counts = beads.counts()
    if any(c % k for c in counts.values()):
        raise ValueError("type counts must divide k")
    quota = {t: c // k for t, c in counts.items()}
    t = len(counts)
    cap = t * (k - 1) if max_cuts is None else max_cuts
    tried = 0
    for n_cuts in range(cap + 1):
        for cut_set in itertools.combinations(range(1, n), n_cuts):
            edges = (0,) + cut_set + (n,)
            pieces = [seq[edges[i]:edges[i + 1]] for i in range(len(edges) - 1)]
            for assign in itertools.product(range(k), repeat=len(pieces)):
                tried += 1
                tallies = [dict.fromkeys(counts, 0) for _ in range(k)]
                for piece, thief in zip(pieces, assign):
                    for bead in piece:
                        tallies[thief][bead] += 1
                if all(tally == quota for tally in tallies):
                    return OracleReport(
                        instance=f"beads={''.join(seq)} k={k}",
                        space_size=tried,
                        best_objective=float(n_cuts),
                        witness={"cuts": list(cut_set), "labels": list(assign)},
                    )
    return OracleReport(
        instance=f"beads={''.join(seq)} k={k}",
        space_size=tried,
        best_objective=float("inf"),
        witness=None,
        feasible=False,
    )


def oracle_grid_equipartition(residual_fn, candidates,
                              budget=DEFAULT_BUDGET) -> OracleReport:
    """Best max-residual over an exhaustively enumerated candidate family.

    ``candidates`` yields parameter tuples; ``residual_fn`` maps one to its
    max share deviation.  Raises BudgetExceeded past ``budget`` candidates.
    """
    best = np.inf
    witness = None
    size = 0
    for cand in candidates:
        size += 1
        if size > budget:
            raise BudgetExceeded(f"candidate family exceeds budget {budget}")
        r = float(residual_fn(cand))
        if r < best:
            best = r
            witness = cand
    return OracleReport(
        instance="grid equipartition scan",
        space_size=size,
        best_objective=best,
        witness=witness,
        feasible=np.isfinite(best),
    )


def grid_1d(lo, hi, step):
    return np.arange(lo, hi + step * 0.5, step)


def quadrant_candidates(xs, ys, orientations=None):
    """Corner positions x sign patterns for axis-parallel quadrant scans."""
    if orientations is None:
        orientations = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    for sx, sy in orientations:
        for x in xs:
            for y in ys:
                yield (float(x), float(y), sx, sy)
