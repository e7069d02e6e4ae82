"""Nested fixed-direction hyperplane partitions and their fair k-splits.

A scheme tree prescribes the recursion: each node cuts its cell by a
hyperplane orthogonal to the node's direction, the left subtree partitioning
the upper side {v.x >= offset} and the right subtree the lower side.  A tree
with n nodes yields n+1 convex parts.  Offsets are parametrized through
reference-measure quantiles so the labeled configuration space is exactly the
join of n+1 label factors, searched by the equivariant join solver.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import _geometry as geom
from .busolver import JoinPoint, join_zero
from .errors import DimensionError, NoZeroFound, QuantileError
from .measures import (
    ConvexRegion,
    average_measure,
    halfspace_ge,
    halfspace_le,
    mass_of_region,
)
from .necklace1d import prime_factors

DEFAULT_TOL = {1: 1e-9, 2: 1e-6, 3: 1e-6}


@dataclass(frozen=True)
class SchemeTree:
    """Recursive cut scheme; ``direction=None`` marks a leaf."""

    direction: tuple = None
    left: "SchemeTree" = None
    right: "SchemeTree" = None

    def __post_init__(self):
        if self.direction is not None:
            v = np.asarray(self.direction, dtype=float)
            if not np.isfinite(v).all() or np.linalg.norm(v) < 1e-12:
                raise ValueError("node direction must be a nonzero vector")
            if self.left is None or self.right is None:
                raise ValueError("internal node needs both subtrees")

    @property
    def is_leaf(self):
        return self.direction is None

    @property
    def size(self):
        if self.is_leaf:
            return 0
        return 1 + self.left.size + self.right.size

    @property
    def n_parts(self):
        return self.size + 1

    @staticmethod
    def leaf():
        return SchemeTree()

    @staticmethod
    def chain(directions):
        """Right-chain scheme: each cut splits the remaining lower part."""
        node = SchemeTree.leaf()
        for v in reversed(list(directions)):
            node = SchemeTree(tuple(float(c) for c in _unit(v)),
                              SchemeTree.leaf(), node)
        return node

    @staticmethod
    def random(n, dim, rng):
        if n == 0:
            return SchemeTree.leaf()
        j = int(rng.integers(0, n))
        v = rng.standard_normal(dim)
        if dim == 1:
            v = np.array([1.0])
        return SchemeTree(tuple(_unit(v)),
                          SchemeTree.random(j, dim, rng),
                          SchemeTree.random(n - 1 - j, dim, rng))

    @staticmethod
    def from_json(obj):
        if obj is None:
            return SchemeTree.leaf()
        return SchemeTree(
            tuple(float(c) for c in obj["dir"]),
            SchemeTree.from_json(obj.get("left")),
            SchemeTree.from_json(obj.get("right")),
        )

    def to_json(self):
        if self.is_leaf:
            return None
        return {
            "dir": list(self.direction),
            "left": self.left.to_json(),
            "right": self.right.to_json(),
        }


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def load_scheme(path):
    with open(path) as fh:
        return SchemeTree.from_json(json.load(fh))


@dataclass(frozen=True)
class NestedPartition:
    """A scheme instantiated with offsets (pre-order) and part labels."""

    scheme: SchemeTree
    offsets: tuple
    labels: tuple
    dim: int
    thieves: int = 2

    def __post_init__(self):
        if len(self.offsets) != self.scheme.size:
            raise ValueError("one offset per scheme node required")
        if len(self.labels) != self.scheme.n_parts:
            raise ValueError("one label per part required")

    def relabel(self, perm):
        """Apply a thief permutation to all part labels."""
        return NestedPartition(self.scheme, self.offsets,
                               tuple(perm[l] for l in self.labels),
                               self.dim, self.thieves)

    def thief_of(self, point):
        x = np.asarray(point, dtype=float)
        node = self.scheme
        offsets = list(self.offsets)
        idx = 0
        part_start = 0

        def walk(node, idx, part_start):
            if node.is_leaf:
                return part_start, idx
            off = offsets[idx]
            idx += 1
            v = np.asarray(node.direction)
            if float(v @ x) >= off:
                return walk(node.left, idx, part_start)
            idx += node.left.size
            return walk(node.right, idx, part_start + node.left.n_parts)

        part, _ = walk(node, idx, part_start)
        return self.labels[part]


def parts(p: NestedPartition):
    """The n+1 convex regions, empty ones included, in part order."""
    out = []

    def walk(node, region, offsets):
        if node.is_leaf:
            out.append(region)
            return offsets
        off = offsets[0]
        rest = offsets[1:]
        v = node.direction
        rest = walk(node.left, region.intersect(halfspace_ge(v, off, p.dim)), rest)
        rest = walk(node.right, region.intersect(halfspace_le(v, off, p.dim)), rest)
        return rest

    walk(p.scheme, ConvexRegion.full(p.dim), tuple(p.offsets))
    return out


def geometric_duplicates(p: NestedPartition, bounds=None):
    """Index pairs of parts that are geometrically identical regions.

    Distinct recursive descriptions of the same region are kept as distinct
    parts (multiset semantics); this reports coincidences on request.
    """
    if bounds is None:
        bounds = (-100.0 * np.ones(p.dim), 100.0 * np.ones(p.dim))
    lo, hi = bounds
    regions = parts(p)
    rng = np.random.default_rng(0)
    probes = rng.uniform(lo, hi, size=(512, p.dim))
    masks = [
        np.array([r.contains(tuple(pt)) for pt in probes]) for r in regions
    ]
    out = []
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            # nonempty parts have disjoint interiors, so coincidences are
            # the quotiented empty descriptions (both masks all-False)
            if np.array_equal(masks[i], masks[j]):
                out.append((i, j))
    return out


def finite_hyperplanes(p: NestedPartition):
    """(direction, offset) of every node whose hyperplane is finite."""
    out = []

    def walk(node, offsets):
        if node.is_leaf:
            return offsets
        off = offsets[0]
        rest = offsets[1:]
        if np.isfinite(off):
            out.append((node.direction, off))
        rest = walk(node.left, rest)
        rest = walk(node.right, rest)
        return rest

    walk(p.scheme, tuple(p.offsets))
    return out


# ---------------------------------------------------------------------------
# Cells: dimension-specific polytope realizations inside a bounding box


class _RegionCell(tuple):
    """Cell as a tuple of (normal, offset) halfspace pairs (d = 3 path)."""


class _Cells:
    """Tree walk turning barycentric part masses into offsets and part cells.

    For d <= 2 cells are explicit polytopes and quantiles use closed-form
    directional profiles; for d = 3 cells are halfspace lists evaluated by
    exact box clipping, with Brent inversion for the quantiles.
    """

    def __init__(self, ref, bounds, dim):
        self.dim = dim
        self.ref = ref
        self.ref_pieces = []
        if dim <= 2:
            for lo, hi, w in ref.atoms:
                dens = w / float(np.prod(np.subtract(hi, lo)))
                self.ref_pieces.append((geom.box_polytope(lo, hi), dens))
            lo, hi = bounds
            self.root_poly = geom.box_polytope(lo, hi)
        else:
            self.root_poly = _RegionCell(())
        self.bounds = bounds

    def _clip_pieces(self, pieces, normal, offset):
        out = []
        for poly, dens in pieces:
            clipped = geom.clip_poly_halfspace(poly, self.dim, normal, offset)
            if geom.polytope_volume(clipped, self.dim) > 0:
                out.append((clipped, dens))
        return out

    def _region_mass(self, cell):
        total = 0.0
        for lo, hi, w in self.ref.atoms:
            total += w * geom.clip_box_fraction(lo, hi, cell)
        return total

    def _region_quantile(self, cell, v, target_upper):
        """alpha with ref(cell & {v.x >= alpha}) = target_upper, by Brent."""
        from scipy.optimize import brentq

        lo, hi = self.bounds
        corners = geom.box_polytope(tuple(lo), tuple(hi))
        proj = corners @ v
        s_lo, s_hi = float(proj.min()), float(proj.max())

        def upper_mass(alpha):
            return self._region_mass(
                _RegionCell(cell + ((tuple(-v), -alpha),))
            )

        return brentq(lambda a: upper_mass(a) - target_upper, s_lo, s_hi,
                      xtol=1e-13, maxiter=200)

    def realize(self, scheme, bary):
        """Returns (offsets pre-order, part cells in part order)."""
        bary = np.asarray(bary, dtype=float)
        offsets = []
        part_polys = []
        region_path = self.dim == 3

        def walk(node, poly, pieces, lo_part):
            if node.is_leaf:
                part_polys.append(poly)
                return
            j_parts = node.left.n_parts
            target = float(bary[lo_part:lo_part + j_parts].sum())
            v = np.asarray(node.direction, dtype=float)
            if region_path:
                total = self._region_mass(poly)
            else:
                total = sum(
                    dens * geom.polytope_volume(p, self.dim)
                    for p, dens in pieces
                )
            if target <= 1e-15 or total <= 1e-15:
                alpha = np.inf
            elif target >= total - 1e-15:
                alpha = -np.inf
            elif region_path:
                alpha = self._region_quantile(poly, v, target)
            else:
                profile = geom.DirectionalProfile(pieces, self.dim, v)
                if profile.total <= 0:
                    raise QuantileError("reference measure vanishes on cell")
                alpha = profile.quantile(profile.total - target)
            offsets.append(alpha)
            if region_path:
                if alpha == np.inf:
                    upper = _RegionCell(poly + (((0.0,) * 3, -1.0),))
                    lower = poly
                elif alpha == -np.inf:
                    upper = poly
                    lower = _RegionCell(poly + (((0.0,) * 3, -1.0),))
                else:
                    upper = _RegionCell(poly + ((tuple(-v), -alpha),))
                    lower = _RegionCell(poly + ((tuple(v), alpha),))
                walk(node.left, upper, None, lo_part)
                walk(node.right, lower, None, lo_part + j_parts)
                return
            if alpha == np.inf:
                upper_poly, upper_pieces = _empty_poly(self.dim), []
                lower_poly, lower_pieces = poly, pieces
            elif alpha == -np.inf:
                upper_poly, upper_pieces = poly, pieces
                lower_poly, lower_pieces = _empty_poly(self.dim), []
            else:
                upper_poly = geom.clip_poly_halfspace(poly, self.dim, -v, -alpha)
                lower_poly = geom.clip_poly_halfspace(poly, self.dim, v, alpha)
                upper_pieces = self._clip_pieces(pieces, -v, -alpha)
                lower_pieces = self._clip_pieces(pieces, v, alpha)
            walk(node.left, upper_poly, upper_pieces, lo_part)
            walk(node.right, lower_poly, lower_pieces, lo_part + j_parts)

        walk(scheme, self.root_poly,
             None if region_path else list(self.ref_pieces), 0)
        return offsets, part_polys


def _empty_poly(dim):
    if dim == 1:
        return (0.0, 0.0)
    if dim == 2:
        return np.zeros((0, 2))
    return np.zeros((0, 3))


def _mass_in_poly(measure, poly, dim):
    """Exact mass of a measure-like object inside a polytope cell."""
    if hasattr(measure, "mass_in_poly"):
        return measure.mass_in_poly(poly, dim)
    if isinstance(poly, _RegionCell):
        return float(sum(
            w * geom.clip_box_fraction(lo, hi, poly)
            for lo, hi, w in measure.atoms
        ))
    total = 0.0
    if dim == 1:
        lo_c, hi_c = poly
        if hi_c <= lo_c:
            return 0.0
        for (lo,), (hi,), w in measure.atoms:
            total += w * max(0.0, min(hi, hi_c) - max(lo, lo_c)) / (hi - lo)
        return total
    if geom.polytope_volume(poly, dim) <= 0:
        return 0.0
    for lo, hi, w in measure.atoms:
        piece = poly
        for axis in range(dim):
            e = np.zeros(dim)
            e[axis] = 1.0
            piece = geom.clip_poly_halfspace(piece, dim, e, hi[axis])
            piece = geom.clip_poly_halfspace(piece, dim, -e, -lo[axis])
        vol = geom.polytope_volume(piece, dim)
        if vol > 0:
            total += w * vol / float(np.prod(np.subtract(hi, lo)))
    return total


class RegionMeasure:
    """A measure conditioned on a union of convex cells, evaluated exactly.

    Used by the composite solver in place of box-pile restriction so that no
    approximation error enters the recursion.
    """

    def __init__(self, base, regions, dim):
        self.base = base
        self.dim = dim
        self.regions = list(regions)
        mass = sum(mass_of_region(base, r) for r in self.regions)
        if mass <= 0:
            raise ValueError("restriction carries no mass")
        self.norm = 1.0 / mass
        self.mass = mass

    @property
    def atoms(self):
        return self.base.atoms

    def bounding_box(self):
        return self.base.bounding_box()

    def mass_of_region(self, region):
        return self.norm * sum(
            mass_of_region(self.base, region.intersect(r)) for r in self.regions
        )

    def mass_in_poly(self, poly, dim):
        total = 0.0
        for r in self.regions:
            pairs = r.pairs()
            if pairs is None:
                continue
            if isinstance(poly, _RegionCell):
                combined = _RegionCell(
                    poly + tuple((tuple(n), b) for n, b in pairs)
                )
                total += _mass_in_poly(self.base, combined, dim)
                continue
            piece = poly
            for n, b in pairs:
                piece = geom.clip_poly_halfspace(piece, dim, n, b)
            total += _mass_in_poly(self.base, piece, dim)
        return self.norm * total


def _measure_region_mass(measure, region):
    if isinstance(measure, RegionMeasure):
        return measure.mass_of_region(region)
    return mass_of_region(measure, region)


def _base_measure(m):
    return m.base if isinstance(m, RegionMeasure) else m


# ---------------------------------------------------------------------------
# Join parametrization and solvers


def _default_bounds(measures, margin=0.25):
    los = np.min([_base_measure(m).bounding_box()[0] for m in measures], axis=0)
    his = np.max([_base_measure(m).bounding_box()[1] for m in measures], axis=0)
    pad = np.maximum(his - los, 1e-6) * margin
    return los - pad, his + pad


def _default_ref(measures, bounds, floor=1e-6):
    # the floor keeps full support; it stays tiny so that support gaps do
    # not become flat plateaus of the quantile parametrization
    return average_measure([_base_measure(m) for m in measures],
                           floor=floor, bounds=bounds)


def join_to_partition(x: JoinPoint, scheme: SchemeTree, ref_measure,
                      bounds=None, thieves=None) -> NestedPartition:
    """Instantiate a join point: barycentric weights prescribe reference-mass
    of each part; offsets follow by nested quantile inversion; labels copy."""
    if bounds is None:
        lo, hi = ref_measure.bounding_box()
        pad = np.maximum(np.subtract(hi, lo), 1e-6) * 0.25
        bounds = (np.subtract(lo, pad), np.add(hi, pad))
    dim = ref_measure.dim
    cells = _Cells(ref_measure, bounds, dim)
    offsets, _ = cells.realize(scheme, np.asarray(x.barycentric))
    k = thieves if thieves is not None else (max(x.labels) + 1)
    return NestedPartition(scheme, tuple(offsets), tuple(x.labels), dim, k)


class _NestedMap:
    """Join test map: stacked per-measure label-share deficits."""

    def __init__(self, measures, scheme, k, ref, bounds):
        self.measures = measures
        self.scheme = scheme
        self.k = k
        self.t = len(measures)
        self.m = scheme.n_parts
        self.dim = _base_measure(measures[0]).dim
        self.cells = _Cells(ref, bounds, self.dim)
        self._cache = None

    def part_mass_tensor(self, B):
        if self._cache is not None and self._cache[0] is B:
            return self._cache[1]
        B = np.atleast_2d(B)
        out = np.empty((len(B), self.t, self.m))
        for g, bary in enumerate(B):
            _, polys = self.cells.realize(self.scheme, bary)
            for j, meas in enumerate(self.measures):
                for i, poly in enumerate(polys):
                    out[g, j, i] = _mass_in_poly(meas, poly, self.dim)
        self._cache = (B, out)
        return out

    def batch(self, B, labels):
        tensor = self.part_mass_tensor(B)
        onehot = np.zeros((self.m, self.k))
        onehot[np.arange(self.m), np.asarray(labels)] = 1.0
        shares = np.einsum("gtm,mk->gtk", tensor, onehot)
        return (shares - 1.0 / self.k).reshape(len(tensor), -1)

    def __call__(self, bary, labels):
        return self.batch(np.atleast_2d(np.asarray(bary, dtype=float)),
                          labels)[0]

    def shift(self, residuals):
        return np.roll(residuals.reshape(self.t, self.k), 1, axis=1).ravel()

    def labeling_feasible(self, labels):
        return len(set(labels)) == self.k


def solve_nested(measures, scheme: SchemeTree, k: int, tol=None, cfg=None):
    """Fair k-split over the scheme's partitions, k prime.

    Requires scheme size n = t(k-1); returns a NestedPartition whose
    union-by-label masses are within tol of 1/k for every measure, verified
    independently through halfspace-region evaluation.
    """
    t = len(measures)
    dim = _base_measure(measures[0]).dim
    if dim > 3:
        raise DimensionError("solve_nested supports d <= 3")
    if scheme.size != t * (k - 1):
        raise ValueError(
            f"scheme size {scheme.size} != t(k-1) = {t * (k - 1)}"
        )
    if len(prime_factors(k)) != 1:
        raise ValueError(f"k={k} is not prime; use solve_nested_composite")
    tol = DEFAULT_TOL.get(dim, 1e-6) if tol is None else tol
    bounds = _default_bounds(measures)
    # retry under a different reference floor before giving up: the floor
    # reshapes the quantile parametrization and hence the search landscape
    sol = ref = None
    for floor in (1e-6, 0.3):
        ref = _default_ref(measures, bounds, floor=floor)
        f = _NestedMap(measures, scheme, k, ref, bounds)
        try:
            sol = join_zero(f, m=f.m, k=k, tol=tol, cfg=cfg,
                            output_shift=f.shift)
            break
        except NoZeroFound:
            if floor == 0.3:
                raise
    partition = join_to_partition(sol, scheme, ref, bounds=bounds, thieves=k)
    shares = partition_shares(partition, measures, k)
    residual = float(np.max(np.abs(shares - 1.0 / k)))
    assert residual <= 4 * tol, f"verification failed: residual {residual}"
    return partition


def partition_shares(partition: NestedPartition, measures, k):
    """Per-measure, per-thief masses through region-based evaluation."""
    regions = parts(partition)
    shares = np.zeros((len(measures), k))
    for j, m in enumerate(measures):
        for region, label in zip(regions, partition.labels):
            shares[j, label] += _measure_region_mass(m, region)
    return shares


@dataclass
class CompositeSplit:
    """Recursive composition of prime splits for composite k."""

    thieves: int
    outer: NestedPartition
    children: list
    regions: list
    labels: list
    n_hyperplanes: int
    shares: np.ndarray


def solve_nested_composite(measures, directions, k, tol=None, cfg=None,
                           factors=None):
    """Fair k-split with prescribed directions, composite k.

    Splits among the first prime factor with t(m-1) hyperplanes, conditions
    each class exactly (no box-pile approximation) and recurses with the
    remaining directions: t(m-1) + m t(l-1) = t(ml-1) hyperplanes in total.
    """
    t = len(measures)
    dim = _base_measure(measures[0]).dim
    directions = [tuple(_unit(v)) for v in directions]
    if len(directions) != t * (k - 1):
        raise ValueError(
            f"need t(k-1) = {t * (k - 1)} directions, got {len(directions)}"
        )
    tol = DEFAULT_TOL.get(dim, 1e-6) if tol is None else tol
    factors = list(factors) if factors is not None else prime_factors(k)
    if int(np.prod(factors)) != k:
        raise ValueError("factors do not multiply to k")
    result = _composite_recurse(measures, directions, factors,
                                tol / len(factors), cfg)
    shares = np.zeros((t, k))
    for j, m in enumerate(measures):
        for region, label in zip(result.regions, result.labels):
            shares[j, label] += _measure_region_mass(m, region)
    result.shares = shares
    return result


def _composite_recurse(measures, directions, factors, level_tol, cfg):
    t = len(measures)
    k = int(np.prod(factors))
    if len(factors) == 1:
        scheme = SchemeTree.chain(directions)
        part = solve_nested(measures, scheme, k, tol=level_tol, cfg=cfg)
        regions = parts(part)
        return CompositeSplit(
            thieves=k, outer=part, children=[], regions=regions,
            labels=list(part.labels), n_hyperplanes=scheme.size, shares=None,
        )
    m_f = factors[0]
    l_f = k // m_f
    n_outer = t * (m_f - 1)
    outer_scheme = SchemeTree.chain(directions[:n_outer])
    outer = solve_nested(measures, outer_scheme, m_f, tol=level_tol, cfg=cfg)
    outer_regions = parts(outer)
    dim = _base_measure(measures[0]).dim
    regions_all = []
    labels_all = []
    children = []
    n_planes = outer_scheme.size
    rest = directions[n_outer:]
    per_child = t * (l_f - 1)
    for ci in range(m_f):
        class_regions = [
            r for r, lab in zip(outer_regions, outer.labels) if lab == ci
        ]
        child_dirs = rest[ci * per_child:(ci + 1) * per_child]
        restricted = [RegionMeasure(_base_measure(m), class_regions, dim)
                      for m in measures]
        child = _composite_recurse(restricted, child_dirs, factors[1:],
                                   level_tol, cfg)
        children.append(child)
        n_planes += child.n_hyperplanes
        for region, lab in zip(child.regions, child.labels):
            for cls_region in class_regions:
                regions_all.append(region.intersect(cls_region))
                labels_all.append(ci * l_f + lab)
    return CompositeSplit(
        thieves=k, outer=outer, children=children, regions=regions_all,
        labels=labels_all, n_hyperplanes=n_planes, shares=None,
    )
