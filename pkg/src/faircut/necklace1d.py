"""One-dimensional necklace splitting among k thieves.

Prime k goes through the equivariant join solver with at most t(k-1) cuts;
composite k is reached by splitting into the first prime factor and
recursively splitting the restrictions, which preserves the t(k-1) total cut
bound.  A separate exhaustive solver handles discrete bead strings.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .busolver import join_zero
from .errors import InstanceTooLarge, NoZeroFound
from .measures import average_measure

DEFAULT_TOL_1D = 1e-9


@dataclass(frozen=True)
class NecklaceSplit:
    """Sorted cut positions and one thief label per resulting interval."""

    cuts: tuple
    labels: tuple
    thieves: int
    shares: tuple = ()  # per measure, per thief
    residual: float = 0.0

    def __post_init__(self):
        if len(self.labels) != len(self.cuts) + 1:
            raise ValueError("need exactly one label per interval")

    @property
    def n_cuts(self):
        return len(self.cuts)

    def thief_of(self, x):
        return self.labels[int(np.searchsorted(self.cuts, x, side="right"))]


@dataclass(frozen=True)
class BeadString:
    """Open necklace of beads; per-type counts must be divisible by k to split."""

    beads: tuple

    @staticmethod
    def from_text(text):
        return BeadString(tuple(ch for ch in text if not ch.isspace()))

    @property
    def types(self):
        return tuple(sorted(set(self.beads)))

    def counts(self):
        return {t: self.beads.count(t) for t in self.types}


def _cdf_table(measure):
    return measure.cdf_knots


def _interval_shares(measures, cuts, labels, k):
    """Exact per-thief shares of each measure for a cut/label vector."""
    tables = [_cdf_table(m) for m in measures]
    cuts = np.asarray(cuts, dtype=float)
    shares = np.zeros((len(measures), k))
    for j, (xs, Fs) in enumerate(tables):
        vals = np.interp(cuts, xs, Fs, left=0.0, right=1.0)
        parts = np.diff(np.concatenate([[0.0], vals, [1.0]]))
        np.add.at(shares[j], np.asarray(labels), parts)
    return shares


class _NecklaceMap:
    """Join test map: barycentric weights prescribe reference-measure masses
    of consecutive intervals; residuals are label-class shares minus 1/k."""

    def __init__(self, measures, k, floor=1e-6):
        self.k = k
        self.t = len(measures)
        self.m = self.t * (k - 1) + 1
        self.tables = [_cdf_table(m) for m in measures]
        # tiny full-support floor: large floors turn measure-support gaps
        # into wide flat plateaus of the parametrization that trap the search
        ref = average_measure(measures, floor=floor)
        xs, Fs = ref.cdf_knots
        self.ref_q = (np.asarray(Fs), np.asarray(xs))
        self._cache = None  # (grid array, part-mass tensor)

    def cuts_from_bary(self, bary):
        b = np.atleast_2d(np.asarray(bary, dtype=float))
        q = np.cumsum(b, axis=1)[:, :-1]
        Fs, xs = self.ref_q
        return np.interp(np.clip(q, 0.0, 1.0), Fs, xs)

    def part_masses(self, bary):
        cuts = self.cuts_from_bary(np.atleast_2d(bary))
        G = cuts.shape[0]
        out = np.empty((G, self.t, self.m))
        for j, (xs, Fs) in enumerate(self.tables):
            vals = np.interp(cuts, xs, Fs, left=0.0, right=1.0)
            padded = np.concatenate(
                [np.zeros((G, 1)), vals, np.ones((G, 1))], axis=1
            )
            out[:, j, :] = np.diff(padded, axis=1)
        return out

    def cuts_from_bary_single(self, bary):
        return self.cuts_from_bary(np.atleast_2d(bary))[0]

    def part_mass_tensor(self, B):
        # part masses do not depend on labels, so one tensor serves every
        # labeling evaluated on the same grid; identity check avoids stale
        # hits from recycled array ids
        if self._cache is not None and self._cache[0] is B:
            return self._cache[1]
        tensor = self.part_masses(B)
        self._cache = (B, tensor)
        return tensor

    _tensor = part_mass_tensor

    def batch(self, B, labels):
        tensor = self._tensor(B)
        onehot = np.zeros((self.m, self.k))
        onehot[np.arange(self.m), np.asarray(labels)] = 1.0
        shares = np.einsum("gtm,mk->gtk", tensor, onehot)
        return (shares - 1.0 / self.k).reshape(len(B), -1)

    def __call__(self, bary, labels):
        return self.batch(np.atleast_2d(np.asarray(bary, dtype=float)), labels)[0]

    def shift(self, residuals):
        r = residuals.reshape(self.t, self.k)
        return np.roll(r, 1, axis=1).ravel()

    def labeling_feasible(self, labels):
        # a thief receiving no interval has share 0, residual >= 1/k
        return len(set(labels)) == self.k


def _prune(cuts, labels):
    """Drop zero-width intervals and merge equal-label neighbours."""
    out_cuts, out_labels = [], []
    prev = -np.inf
    for i, lab in enumerate(labels):
        right = np.inf if i == len(cuts) else cuts[i]
        if right <= prev:
            continue
        if out_labels and out_labels[-1] == lab:
            out_cuts[-1] = right
        else:
            out_labels.append(lab)
            out_cuts.append(right)
        prev = right
    out_cuts.pop()  # the final +inf sentinel
    return tuple(float(c) for c in out_cuts), tuple(int(l) for l in out_labels)


def split_prime(measures, k, tol=None, cfg=None):
    """Fair k-thief split of t one-dimensional measures, k prime.

    Every thief receives 1/k +- tol of every measure using at most t(k-1)
    cuts.  Shares are re-verified by independent mass evaluation before the
    split is returned.
    """
    if any(m.dim != 1 for m in measures):
        raise ValueError("split_prime needs 1-dimensional measures")
    if not _is_prime(k):
        raise ValueError(f"k={k} is not prime; use split_composite")
    tol = DEFAULT_TOL_1D if tol is None else tol
    t = len(measures)
    # reference floors reshape the quantile parametrization wholesale, so a
    # search stalled under one floor usually succeeds under another
    sol = f = None
    for floor in (1e-6, 0.3, 0.12):
        f = _NecklaceMap(measures, k, floor=floor)
        try:
            sol = join_zero(f, m=f.m, k=k, tol=tol, cfg=cfg,
                            output_shift=f.shift)
            break
        except NoZeroFound:
            if floor == 0.12:
                raise
    cuts = f.cuts_from_bary_single(np.asarray(sol.barycentric))
    cuts, labels = _prune(list(cuts), list(sol.labels))
    shares = _interval_shares(measures, cuts, labels, k)
    residual = float(np.max(np.abs(shares - 1.0 / k)))
    assert len(cuts) <= t * (k - 1)
    assert residual <= 2 * tol, f"verification failed: residual {residual}"
    return NecklaceSplit(cuts, labels, k, tuple(map(tuple, shares)), residual)


def split_composite(measures, k, tol=None, cfg=None, factors=None):
    """Fair split for composite k by recursive composition over prime factors.

    The measures are first split among the leading prime factor m with
    t(m-1) cuts; each class is restricted (exact in 1-D) and split among the
    remaining factor l, for a total of t(m-1) + m*t(l-1) = t(ml-1) cuts.
    The tolerance budget is divided evenly across recursion levels.
    """
    tol = DEFAULT_TOL_1D if tol is None else tol
    explicit = factors is not None
    factors = list(factors) if explicit else prime_factors(k)
    if int(np.prod(factors)) != k:
        raise ValueError("provided factors do not multiply to k")
    t = len(measures)
    try:
        split = _split_by_factors(measures, factors, tol / len(factors), cfg)
    except NoZeroFound:
        # the recursion order is a free choice and changes the child
        # instances entirely; the reversed order often succeeds where a
        # spiky restricted child defeated the first
        reversed_factors = list(reversed(factors))
        if explicit or reversed_factors == factors:
            raise
        split = _split_by_factors(measures, reversed_factors,
                                  tol / len(factors), cfg)
    shares = _interval_shares(measures, split.cuts, split.labels, k)
    residual = float(np.max(np.abs(shares - 1.0 / k)))
    assert split.n_cuts <= t * (k - 1)
    return NecklaceSplit(split.cuts, split.labels, k,
                         tuple(map(tuple, shares)), residual)


def _split_by_factors(measures, factors, level_tol, cfg):
    k = int(np.prod(factors))
    if len(factors) == 1:
        return split_prime(measures, factors[0], tol=level_tol, cfg=cfg)
    m_factor, rest = factors[0], factors[1:]
    l_factor = int(np.prod(rest))
    outer = split_prime(measures, m_factor, tol=level_tol, cfg=cfg)
    all_cuts = list(outer.cuts)
    piece_labels = {}
    for ci in range(m_factor):
        regions = _class_regions(outer, ci)
        if not regions:
            continue
        restricted = []
        for m in measures:
            piles = []
            for lo, hi in regions:
                piles.extend(_clip_atoms(m, lo, hi))
            restricted.append(_pile_measure(piles))
        child = _split_by_factors(restricted, rest, level_tol, cfg)
        all_cuts.extend(child.cuts)
        piece_labels[ci] = child
    all_cuts = sorted(set(all_cuts))
    labels = []
    bounds = [-np.inf] + all_cuts + [np.inf]
    for i in range(len(all_cuts) + 1):
        mid = _interval_midpoint(bounds[i], bounds[i + 1])
        ci = outer.thief_of(mid)
        child = piece_labels[ci]
        labels.append(ci * l_factor + child.thief_of(mid))
    cuts, labels = _prune(all_cuts, labels)
    return NecklaceSplit(tuple(cuts), tuple(labels), k)


def _interval_midpoint(a, b):
    if np.isinf(a) and np.isinf(b):
        return 0.0
    if np.isinf(a):
        return b - 1.0
    if np.isinf(b):
        return a + 1.0
    return 0.5 * (a + b)


def _class_regions(split, thief):
    bounds = [-np.inf] + list(split.cuts) + [np.inf]
    return [
        (bounds[i], bounds[i + 1])
        for i, lab in enumerate(split.labels)
        if lab == thief
    ]


def _clip_atoms(measure, lo, hi):
    piles = []
    for (alo,), (ahi,), w in measure.atoms:
        a, b = max(alo, lo), min(ahi, hi)
        if b > a:
            piles.append(((a,), (b,), w * (b - a) / (ahi - alo)))
    return piles


def _pile_measure(piles):
    from .measures import box_measure

    if not piles:
        raise ValueError("restriction has no mass")
    return box_measure(1, piles)


def prime_factors(k):
    factors = []
    n = k
    p = 2
    while p * p <= n:
        while n % p == 0:
            factors.append(p)
            n //= p
        p += 1
    if n > 1:
        factors.append(n)
    if not factors:
        raise ValueError(f"k={k} has no prime factors")
    return factors


def _is_prime(k):
    return k >= 2 and len(prime_factors(k)) == 1


# ---------------------------------------------------------------------------
# Discrete bead strings


MAX_BEADS = 24


def discrete_split(beads: BeadString, k: int) -> NecklaceSplit:
    """Minimum-cut fair split of a bead string, by exhaustive search.

    Cut sets of increasing size are enumerated; for each, a subset-sum scan
    over packed per-type counts finds a fair assignment.  Guaranteed to
    succeed with at most t(k-1) cuts when all type counts divide by k.
    """
    seq = beads.beads
    n = len(seq)
    if n > MAX_BEADS:
        raise InstanceTooLarge(f"{n} beads exceeds exhaustive budget {MAX_BEADS}")
    types = beads.types
    counts = beads.counts()
    for tname, c in counts.items():
        if c % k != 0:
            raise ValueError(f"count of type {tname!r} not divisible by {k}")
    t = len(types)
    index = {name: i for i, name in enumerate(types)}
    # prefix counts packed into one integer, 5 bits per type
    shift = [5 * i for i in range(t)]
    packed = [0] * (n + 1)
    for i, bead in enumerate(seq):
        packed[i + 1] = packed[i] + (1 << shift[index[bead]])
    target = 0
    for name, c in counts.items():
        target += (c // k) << shift[index[name]]

    max_cuts = t * (k - 1)
    gaps = list(range(1, n))
    for n_cuts in range(0, max_cuts + 1):
        for cut_set in itertools.combinations(gaps, n_cuts):
            edges = (0,) + cut_set + (n,)
            seg = [packed[edges[i + 1]] - packed[edges[i]]
                   for i in range(len(edges) - 1)]
            assign = _fair_assignment(seg, k, target)
            if assign is not None:
                return NecklaceSplit(
                    tuple(float(c) for c in cut_set), tuple(assign), k
                )
    raise InstanceTooLarge(
        f"no fair split with <= {max_cuts} cuts; theorem bound violated?"
    )


def _fair_assignment(segments, k, target):
    """Assign each packed segment to a thief so every thief totals ``target``."""
    n_seg = len(segments)
    if k == 2:
        for mask in range(1 << n_seg):
            tot = 0
            for i in range(n_seg):
                if mask >> i & 1:
                    tot += segments[i]
            if tot == target:
                return [1 if mask >> i & 1 else 0 for i in range(n_seg)]
        return None
    for assign in itertools.product(range(k), repeat=n_seg):
        sums = [0] * k
        for seg, thief in zip(segments, assign):
            sums[thief] += seg
        if all(s == target for s in sums):
            return list(assign)
    return None


def verify_bead_split(beads: BeadString, split: NecklaceSplit) -> bool:
    """Check that each thief gets exactly count/k of every bead type."""
    seq = beads.beads
    k = split.thieves
    edges = [0] + [int(c) for c in split.cuts] + [len(seq)]
    per_thief = {t: [0] * k for t in beads.types}
    for i, lab in enumerate(split.labels):
        for bead in seq[edges[i]:edges[i + 1]]:
            per_thief[bead][lab] += 1
    return all(
        all(c == beads.counts()[t] // k for c in row)
        for t, row in per_thief.items()
    )
