"""Measures as weighted unions of axis-aligned boxes, plus exact mass evaluation.

Masses against convex regions use exact polytope clipping for d <= 3 and
seeded stratified Monte Carlo above that.  Densities of overlapping boxes
add; the induced measure assigns zero mass to every hyperplane.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import _geometry as geom
from .errors import DimensionError, PrecisionError

MASS_TOL = 1e-12


@dataclass(frozen=True)
class Halfspace:
    """The set {x : normal . x <= offset} (strict inequality if not closed)."""

    normal: tuple
    offset: float
    closed: bool = True

    def flipped(self):
        return Halfspace(tuple(-c for c in self.normal), -self.offset, not self.closed)


@dataclass(frozen=True)
class ConvexRegion:
    """Intersection of halfspaces; the empty region is representable."""

    dim: int
    halfspaces: tuple = ()

    @staticmethod
    def full(dim):
        return ConvexRegion(dim, ())

    @staticmethod
    def empty(dim):
        return ConvexRegion(dim, (Halfspace((0.0,) * dim, -1.0),))

    def with_halfspace(self, normal, offset, closed=True):
        hs = Halfspace(tuple(float(c) for c in normal), float(offset), closed)
        return ConvexRegion(self.dim, self.halfspaces + (hs,))

    def intersect(self, other):
        if other.dim != self.dim:
            raise DimensionError("cannot intersect regions of different dimension")
        return ConvexRegion(self.dim, self.halfspaces + other.halfspaces)

    def contains(self, point):
        x = np.asarray(point, dtype=float)
        for hs in self.halfspaces:
            v = float(np.dot(hs.normal, x))
            if hs.closed:
                if v > hs.offset:
                    return False
            elif v >= hs.offset:
                return False
        return True

    def pairs(self):
        """Finite-offset (normal, offset) pairs, dropping +/-inf no-ops."""
        out = []
        for hs in self.halfspaces:
            if hs.offset == np.inf:
                continue
            if hs.offset == -np.inf:
                return None  # empty
            out.append((np.asarray(hs.normal, dtype=float), hs.offset))
        return out


def halfspace_le(normal, offset, dim=None):
    """Region {x : normal . x <= offset}."""
    normal = tuple(float(c) for c in normal)
    return ConvexRegion(dim or len(normal), (Halfspace(normal, float(offset)),))


def halfspace_ge(normal, offset, dim=None):
    """Region {x : normal . x >= offset}."""
    normal = tuple(float(c) for c in normal)
    off = -float(offset) if np.isfinite(offset) else float(-offset)
    return ConvexRegion(
        dim or len(normal), (Halfspace(tuple(-c for c in normal), off),)
    )


def box_region(lo, hi):
    r = ConvexRegion.full(len(lo))
    for axis, (a, b) in enumerate(zip(lo, hi)):
        e = [0.0] * len(lo)
        e[axis] = 1.0
        r = r.with_halfspace(tuple(-c for c in e), -a).with_halfspace(tuple(e), b)
    return r


@dataclass(frozen=True)
class BoxMeasure:
    """Probability measure with density a weighted sum of box indicators.

    ``atoms`` is a tuple of (lo, hi, weight) with lo/hi coordinate tuples.
    Weights are normalized to sum to 1; ``raw_total`` records the
    pre-normalization total.
    """

    dim: int
    atoms: tuple
    raw_total: float = 1.0

    @cached_property
    def _arrays(self):
        los = np.array([a[0] for a in self.atoms], dtype=float)
        his = np.array([a[1] for a in self.atoms], dtype=float)
        ws = np.array([a[2] for a in self.atoms], dtype=float)
        return los, his, ws

    @property
    def total_mass(self):
        return float(self._arrays[2].sum())

    def bounding_box(self):
        los, his, _ = self._arrays
        return los.min(axis=0), his.max(axis=0)

    @cached_property
    def cdf_knots(self):
        """1-D only: knots (xs, Fs) of the piecewise-linear CDF."""
        if self.dim != 1:
            raise DimensionError("cdf_knots requires a 1-D measure")
        los, his, ws = self._arrays
        xs = np.unique(np.concatenate([los[:, 0], his[:, 0]]))
        lo = los[:, 0][None, :]
        hi = his[:, 0][None, :]
        frac = np.clip((xs[:, None] - lo) / (hi - lo), 0.0, 1.0)
        Fs = frac @ ws
        return xs, Fs

    def cdf(self, x):
        xs, Fs = self.cdf_knots
        return np.interp(x, xs, Fs, left=0.0, right=float(Fs[-1]))

    def translate(self, shift):
        shift = tuple(float(s) for s in shift)
        atoms = tuple(
            (
                tuple(a + s for a, s in zip(lo, shift)),
                tuple(b + s for b, s in zip(hi, shift)),
                w,
            )
            for lo, hi, w in self.atoms
        )
        return BoxMeasure(self.dim, atoms, self.raw_total)

    def marginal_density_bound(self, axis):
        """Exact max of the 1-D marginal density along ``axis``.

        Used as a Lipschitz constant for masses under translated cuts; the
        per-box bound is weight / axis-length.
        """
        los, his, ws = self._arrays
        dens = ws / (his[:, axis] - los[:, axis])
        events = sorted(
            [(los[i, axis], dens[i]) for i in range(len(ws))]
            + [(his[i, axis], -dens[i]) for i in range(len(ws))]
        )
        best = cur = 0.0
        for _, delta in events:
            cur += delta
            best = max(best, cur)
        return best


def box_measure(dim, atoms):
    """Build a normalized BoxMeasure from (lo, hi, weight) triples."""
    clean = []
    total = 0.0
    for lo, hi, w in atoms:
        lo = tuple(float(c) for c in lo)
        hi = tuple(float(c) for c in hi)
        if len(lo) != dim or len(hi) != dim:
            raise DimensionError(f"atom box has wrong dimension (expected {dim})")
        if any(not np.isfinite(c) for c in lo + hi):
            raise ValueError("box coordinates must be finite")
        if any(b <= a for a, b in zip(lo, hi)):
            raise ValueError("box must have positive volume")
        w = float(w)
        if w <= 0:
            raise ValueError("atom weight must be positive")
        clean.append((lo, hi, w))
        total += w
    if not clean:
        raise ValueError("measure needs at least one atom")
    atoms = tuple((lo, hi, w / total) for lo, hi, w in clean)
    return BoxMeasure(dim, atoms, raw_total=total)


def uniform_box(lo, hi):
    return box_measure(len(lo), [(lo, hi, 1.0)])


def average_measure(measures, floor=0.0, bounds=None):
    """Average of measures, optionally mixed with a uniform floor on ``bounds``.

    A positive floor guarantees full support on the bounding box, which the
    quantile parametrizations rely on.
    """
    dim = measures[0].dim
    atoms = []
    t = len(measures)
    for m in measures:
        if m.dim != dim:
            raise DimensionError("measures have mixed dimensions")
        for lo, hi, w in m.atoms:
            atoms.append((lo, hi, (1.0 - floor) * w / t))
    if floor > 0:
        if bounds is None:
            los = np.min([m.bounding_box()[0] for m in measures], axis=0)
            his = np.max([m.bounding_box()[1] for m in measures], axis=0)
        else:
            los, his = bounds
        atoms.append((tuple(los), tuple(his), floor))
    return box_measure(dim, atoms)


@dataclass(frozen=True)
class PointMeasure:
    """Discrete measure with exact rational weights (oracle use only).

    Violates the vanishing-on-hyperplanes assumption of the continuous
    solvers, so it is accepted only by oracle operations that state
    generic-position preconditions.
    """

    dim: int
    atoms: tuple  # ((coords tuple, Fraction weight), ...)

    def __post_init__(self):
        total = sum((w for _, w in self.atoms), Fraction(0))
        if total != 1:
            raise ValueError(f"point weights must sum to 1 exactly, got {total}")


def point_measure(dim, atoms):
    clean = tuple(
        (tuple(float(c) for c in pt), Fraction(w)) for pt, w in atoms
    )
    for pt, w in clean:
        if len(pt) != dim:
            raise DimensionError("point has wrong dimension")
        if w <= 0:
            raise ValueError("point weight must be positive")
    return PointMeasure(dim, clean)


def point_mass_of_region(m: PointMeasure, region: ConvexRegion) -> Fraction:
    if m.dim != region.dim:
        raise DimensionError("measure/region dimension mismatch")
    return sum(
        (w for pt, w in m.atoms if region.contains(pt)), Fraction(0)
    )


# ---------------------------------------------------------------------------
# Mass evaluation


def mass_of_region(m: BoxMeasure, region: ConvexRegion, *, return_stderr=False,
                   mc_samples=200_000, seed=0):
    """Mass of ``region`` under ``m``: sum of weight * vol(box & region)/vol(box).

    Exact clipping for d <= 3; stratified Monte Carlo with reported standard
    error beyond that.
    """
    if m.dim != region.dim:
        raise DimensionError(
            f"measure dim {m.dim} != region dim {region.dim}"
        )
    pairs = region.pairs()
    if pairs is None:
        return (0.0, 0.0) if return_stderr else 0.0
    if m.dim <= 3:
        total = 0.0
        for lo, hi, w in m.atoms:
            total += w * geom.clip_box_fraction(lo, hi, pairs)
        return (total, 0.0) if return_stderr else total
    total, var = _mass_monte_carlo(m, pairs, mc_samples, seed)
    return (total, var) if return_stderr else total


def _mass_monte_carlo(m, pairs, n_samples, seed):
    rng = np.random.default_rng(seed)
    total = 0.0
    var = 0.0
    A = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    for lo, hi, w in m.atoms:
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        # two strata per axis via antithetic reflection
        u = rng.random((n_samples // 2, m.dim))
        pts = np.vstack([lo + u * (hi - lo), hi - u * (hi - lo)])
        inside = np.all(pts @ A.T <= b, axis=1)
        p = inside.mean()
        total += w * p
        var += (w ** 2) * p * (1 - p) / len(pts)
    return total, float(np.sqrt(var))


def mass_of_union(m: BoxMeasure, regions) -> float:
    """Mass of a union of pairwise interior-disjoint regions (caller contract)."""
    return float(sum(mass_of_region(m, r) for r in regions))


# ---------------------------------------------------------------------------
# Restriction


@dataclass
class Restriction:
    """Box-pile approximation of a measure restricted to a convex region."""

    measure: BoxMeasure  # normalized
    mass: float  # mass of the region under the original measure
    achieved_error: float  # symmetric-difference mass bound of the pile
    piles: tuple = field(default_factory=tuple)  # raw (lo, hi, weight) triples


def _is_axis_aligned(pairs):
    for n, _ in pairs:
        nz = np.nonzero(np.abs(n) > 1e-15)[0]
        if len(nz) != 1:
            return False
    return True


def _clip_box_axis_aligned(lo, hi, pairs):
    lo = list(lo)
    hi = list(hi)
    for n, b in pairs:
        axis = int(np.nonzero(np.abs(n) > 1e-15)[0][0])
        c = n[axis]
        if c > 0:
            hi[axis] = min(hi[axis], b / c)
        else:
            lo[axis] = max(lo[axis], b / c)
    if any(b <= a for a, b in zip(lo, hi)):
        return None
    return tuple(lo), tuple(hi)


def restrict(m: BoxMeasure, region: ConvexRegion, rtol=1e-9,
             max_boxes=40_000, max_depth=48) -> Restriction:
    """Approximate the restriction of ``m`` to ``region`` by a box pile.

    Boxes fully inside are kept, straddling boxes are subdivided along their
    longest axis; leftover straddlers are emitted with their exact clipped
    mass, so the pile's total mass equals mass_of_region(m, region) exactly
    while the geometric symmetric-difference mass stays below ``rtol`` (or a
    PrecisionError reports the achieved bound).
    """
    if m.dim > 3:
        raise DimensionError("restrict requires d <= 3")
    if m.dim != region.dim:
        raise DimensionError("measure/region dimension mismatch")
    pairs = region.pairs()
    if pairs is None:
        raise ValueError("cannot restrict to an empty region")
    total_mass = mass_of_region(m, region)
    if total_mass <= 0:
        raise ValueError("region has zero mass; nothing to restrict to")

    if _is_axis_aligned(pairs):
        piles = []
        for lo, hi, w in m.atoms:
            dens = w / float(np.prod(np.subtract(hi, lo)))
            clipped = _clip_box_axis_aligned(lo, hi, pairs)
            if clipped is None:
                continue
            clo, chi = clipped
            piles.append((clo, chi, dens * float(np.prod(np.subtract(chi, clo)))))
        return _finish_restriction(m.dim, piles, total_mass, 0.0)

    kept = []
    straddle = []  # (neg straddle-mass, depth, lo, hi, density)
    import heapq

    for lo, hi, w in m.atoms:
        dens = w / float(np.prod(np.subtract(hi, lo)))
        straddle.append((-w, 0, tuple(lo), tuple(hi), dens))
    heapq.heapify(straddle)

    def classify(lo, hi):
        return geom.clip_box_fraction(lo, hi, pairs)

    committed = 0.0  # symmetric-difference mass of boxes emitted at the cap
    pending = sum(-s[0] for s in straddle)
    while straddle and committed + pending > rtol and \
            len(kept) + len(straddle) < max_boxes:
        negmass, depth, lo, hi, dens = heapq.heappop(straddle)
        box_mass = -negmass
        pending -= box_mass
        frac = classify(lo, hi)
        if frac >= 1.0 - 1e-15:
            kept.append((lo, hi, box_mass))
            continue
        if frac <= 1e-15:
            continue
        if depth >= max_depth:
            kept.append((lo, hi, box_mass * frac))
            committed += box_mass * min(frac, 1 - frac)
            continue
        axis = int(np.argmax(np.subtract(hi, lo)))
        mid = 0.5 * (lo[axis] + hi[axis])
        for piece_lo, piece_hi in (
            (lo, tuple(mid if i == axis else c for i, c in enumerate(hi))),
            (tuple(mid if i == axis else c for i, c in enumerate(lo)), hi),
        ):
            piece_mass = dens * float(np.prod(np.subtract(piece_hi, piece_lo)))
            heapq.heappush(straddle,
                           (-piece_mass, depth + 1, piece_lo, piece_hi, dens))
            pending += piece_mass

    achieved = committed
    for negmass, depth, lo, hi, dens in straddle:
        frac = classify(lo, hi)
        if frac > 1e-15:
            kept.append((lo, hi, -negmass * frac))
            achieved += -negmass * min(frac, 1 - frac)
    if achieved > rtol:
        raise PrecisionError(
            f"restriction error {achieved:.3e} above rtol {rtol:.3e}",
            achieved=achieved,
        )
    return _finish_restriction(m.dim, kept, total_mass, achieved)


def _finish_restriction(dim, piles, total_mass, achieved):
    piles = tuple((lo, hi, w) for lo, hi, w in piles if w > 0)
    measure = box_measure(dim, piles)
    return Restriction(measure=measure, mass=total_mass,
                       achieved_error=achieved, piles=piles)


# ---------------------------------------------------------------------------
# JSON I/O


def measure_from_json(obj):
    """Parse {"dim": d, "kind": "boxes"|"points", "atoms": [...]}.

    Returns (measure, normalization_factor); weights are auto-normalized and
    the factor echoes the raw total.
    """
    if not isinstance(obj, dict):
        raise ValueError("measure JSON must be an object")
    dim = int(obj["dim"])
    kind = obj.get("kind", "boxes")
    atoms = obj["atoms"]
    if kind == "boxes":
        triples = []
        for a in atoms:
            box = a["box"]
            lo = [float(p[0]) for p in box]
            hi = [float(p[1]) for p in box]
            triples.append((lo, hi, float(a.get("weight", 1.0))))
        m = box_measure(dim, triples)
        return m, m.raw_total
    if kind == "points":
        raw = [(a["point"], Fraction(str(a.get("weight", 1)))) for a in atoms]
        total = sum((w for _, w in raw), Fraction(0))
        m = point_measure(dim, [(pt, w / total) for pt, w in raw])
        return m, float(total)
    raise ValueError(f"unknown measure kind {kind!r}")


def load_measures(path):
    """Load one measure or a list of measures from a JSON file."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, list):
        out = [measure_from_json(o) for o in data]
        return [m for m, _ in out], [f for _, f in out]
    if "measures" in data:
        out = [measure_from_json(o) for o in data["measures"]]
        return [m for m, _ in out], [f for _, f in out]
    m, f = measure_from_json(data)
    return [m], [f]
