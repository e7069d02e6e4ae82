"""Chessboard colourings from fixed-direction hyperplane families.

A colouring takes up to n_i hyperplanes orthogonal to each direction v_i and
colours space so that cells sharing a facet differ; equivalently it is the
XOR of one two-colouring per direction.  Counts whose multinomial coefficient
is odd (pairwise disjoint binary expansions) admit a simultaneous halving of
S(n) measures; the solver searches the product of per-direction spheres,
where flipping any single factor negates the test map.
"""

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import brentq

from . import _geometry as geom
from .busolver import product_sphere_zero
from .errors import DimensionError, NotAdmissible, Unsupported
from .measures import average_measure, halfspace_le, mass_of_region

DEFAULT_TOL = 1e-6
MAX_TOTAL = 6
_BOUNDARY_EPS = 1e-12


def multinomial_parity(counts):
    """Parity of (S; n_1, ..., n_t) by direct integer arithmetic."""
    total = 0
    value = 1
    for c in counts:
        total += c
        value *= comb(total, c)
    return value % 2


def admissible(counts) -> bool:
    """True iff the multinomial coefficient of the counts is odd.

    Computed by bitwise-AND disjointness of the binary expansions (pairwise
    disjoint iff each entry is disjoint from the OR of its predecessors);
    cross-checked against the direct multinomial parity at small sizes.
    """
    result = True
    acc = 0
    total = 0
    for c in counts:
        c = int(c)
        if c <= 0:
            raise ValueError("counts must be positive integers")
        if acc & c:
            result = False
        acc |= c
        total += c
    if total <= 30:
        assert result == bool(multinomial_parity(counts)), (
            "bitwise admissibility disagrees with multinomial parity"
        )
    return result


@dataclass(frozen=True)
class ChessboardSpec:
    counts: tuple
    directions: tuple

    def __post_init__(self):
        if len(self.counts) != len(self.directions):
            raise ValueError("one direction per count required")

    @property
    def total(self):
        return sum(self.counts)

    @property
    def dim(self):
        return len(self.directions[0])


@dataclass(frozen=True)
class ChessboardColouring:
    """Per-direction sorted offsets plus a global parity bit.

    The colour of a point is 'A' iff parity + total crossed hyperplanes is
    even; adjacent cells across any used hyperplane therefore differ.
    """

    directions: tuple
    offsets: tuple  # tuple of sorted offset tuples, finite entries only
    parity: int
    dim: int

    def colour_of(self, point):
        x = np.asarray(point, dtype=float)
        crossings = 0
        for v, offs in zip(self.directions, self.offsets):
            s = float(np.dot(v, x))
            for o in offs:
                if abs(s - o) <= _BOUNDARY_EPS:
                    return "boundary"
                if s > o:
                    crossings += 1
        return "A" if (self.parity + crossings) % 2 == 0 else "B"


def colour_of(colouring: ChessboardColouring, point):
    return colouring.colour_of(point)


# ---------------------------------------------------------------------------
# Factor machinery


class _Factor:
    """One direction's two-colouring parametrized on an L1 sphere.

    Coordinates split into slab weights (absolute values) and slab sides
    (signs); offsets are reference-measure quantiles of the cumulative
    weights along the direction.
    """

    def __init__(self, direction, count, ref, bounds, dim):
        self.v = np.asarray(direction, dtype=float)
        self.count = count
        self.dim = dim
        self._build_quantile(ref, bounds)

    def _build_quantile(self, ref, bounds):
        if self.dim <= 2:
            pieces = []
            for lo, hi, w in ref.atoms:
                dens = w / float(np.prod(np.subtract(hi, lo)))
                pieces.append((geom.box_polytope(lo, hi), dens))
            profile = geom.DirectionalProfile(pieces, self.dim, self.v)
            self.quantile = lambda q: profile.quantile(q * profile.total)
        else:
            lo, hi = bounds
            corners = [float(self.v @ c) for c in
                       np.array(np.meshgrid(*zip(lo, hi))).T.reshape(-1, 3)]
            s_lo, s_hi = min(corners), max(corners)
            ref_m = ref

            def cdf(alpha):
                return mass_of_region(
                    ref_m, halfspace_le(tuple(self.v), alpha)
                )

            self.quantile = lambda q: brentq(
                lambda a: cdf(a) - q, s_lo, s_hi, xtol=1e-13
            )

    def realize(self, z):
        """Slab boundaries (extended reals) and slab signs from coordinates."""
        z = np.asarray(z, dtype=float)
        weights = np.abs(z)
        signs = np.where(z >= 0, 1.0, -1.0)
        cum = np.cumsum(weights)[:-1]
        bounds = []
        for q in cum:
            if q <= 0:
                bounds.append(-np.inf)
            elif q >= 1:
                bounds.append(np.inf)
            else:
                bounds.append(float(self.quantile(q)))
        return np.array(bounds), signs

    def sign_at(self, bounds, signs, s):
        idx = int(np.searchsorted(bounds, s, side="right"))
        return signs[idx]


def _axis_of(direction):
    v = np.asarray(direction, dtype=float)
    nz = np.nonzero(np.abs(v) > 1e-12)[0]
    if len(nz) == 1:
        return int(nz[0]), float(np.sign(v[nz[0]]))
    return None


def _signed_expectation(measure, factors, realized):
    """Integral of the product of factor signs against the measure (exact)."""
    axes = [_axis_of(f.v) for f in factors]
    if all(a is not None for a in axes):
        return _signed_expectation_axis(measure, factors, realized, axes)
    return _signed_expectation_general(measure, factors, realized)


def _signed_expectation_axis(measure, factors, realized, axes):
    total = 0.0
    dim = measure.dim
    by_axis = {}
    for f, (bounds, signs), (axis, orient) in zip(factors, realized, axes):
        by_axis.setdefault(axis, []).append((orient, bounds, signs))
    for lo, hi, w in measure.atoms:
        prod = w
        for axis in range(dim):
            if axis not in by_axis:
                continue
            prod *= _axis_signed_integral(
                lo[axis], hi[axis], by_axis[axis]
            ) / (hi[axis] - lo[axis])
        total += prod
    return total


def _axis_signed_integral(lo, hi, factor_list):
    """Integral over [lo, hi] of the product of slab signs along one axis."""
    pts = {lo, hi}
    for orient, bounds, signs in factor_list:
        for b in bounds:
            if np.isfinite(b):
                p = b / orient
                if lo < p < hi:
                    pts.add(float(p))
    pts = sorted(pts)
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        mid = 0.5 * (a + b)
        sign = 1.0
        for orient, bounds, signs in factor_list:
            idx = int(np.searchsorted(bounds, orient * mid, side="right"))
            sign *= signs[idx]
        total += sign * (b - a)
    return total


def _slab_pairs(v, bounds, idx):
    """Halfspace pairs carving out slab ``idx`` along direction ``v``."""
    pairs = []
    if idx > 0 and np.isfinite(bounds[idx - 1]):
        pairs.append((tuple(-v), -float(bounds[idx - 1])))
    if idx < len(bounds) and np.isfinite(bounds[idx]):
        pairs.append((tuple(v), float(bounds[idx])))
    return pairs


def _signed_expectation_general(measure, factors, realized):
    """Exact signed integral by enumerating per-factor slab combinations.

    Each combination is a convex region (intersection of slab halfspaces)
    with constant sign product; works for any directions in d <= 3.
    """
    import itertools

    total = 0.0
    slab_ranges = [range(len(signs)) for _, signs in realized]
    for combo in itertools.product(*slab_ranges):
        pairs = []
        sign = 1.0
        for f, (bounds, signs), idx in zip(factors, realized, combo):
            pairs.extend(_slab_pairs(f.v, bounds, idx))
            sign *= signs[idx]
        for lo, hi, w in measure.atoms:
            frac = geom.clip_box_fraction(lo, hi, pairs)
            if frac > 0:
                total += w * sign * frac
    return total


class _ChessboardMap:
    def __init__(self, measures, factors):
        self.measures = measures
        self.factors = factors
        self.sizes = [f.count + 1 for f in factors]
        t = len(factors)
        self.scale = 0.5 * ((-1.0) ** (t + 1))

    def split_coords(self, x):
        out = []
        start = 0
        for s in self.sizes:
            out.append(np.asarray(x[start:start + s], dtype=float))
            start += s
        return out

    def __call__(self, x):
        realized = [
            f.realize(z) for f, z in zip(self.factors, self.split_coords(x))
        ]
        return np.array([
            self.scale * _signed_expectation(m, self.factors, realized)
            for m in self.measures
        ])


def solve_chessboard(measures, spec: ChessboardSpec, tol=None, cfg=None):
    """Chessboard colouring halving all S(n) measures, admissible counts only."""
    counts = tuple(int(c) for c in spec.counts)
    if not admissible(counts):
        pretty = "(" + ",".join(str(c) for c in counts) + ")"
        raise NotAdmissible(f"inadmissible counts {pretty}")
    if spec.total > MAX_TOTAL:
        raise DimensionError(f"total count {spec.total} above cap {MAX_TOTAL}")
    dim = measures[0].dim
    if dim > 3:
        raise DimensionError("solve_chessboard supports d <= 3")
    if len(measures) != spec.total:
        raise ValueError(
            f"need S(n) = {spec.total} measures, got {len(measures)}"
        )
    tol = DEFAULT_TOL if tol is None else tol
    los = np.min([m.bounding_box()[0] for m in measures], axis=0)
    his = np.max([m.bounding_box()[1] for m in measures], axis=0)
    pad = np.maximum(his - los, 1e-6) * 0.25
    bounds = (los - pad, his + pad)
    ref = average_measure(measures, floor=1e-6, bounds=bounds)
    dirs = [np.asarray(v, dtype=float) / np.linalg.norm(v)
            for v in spec.directions]
    factors = [
        _Factor(v, c, ref, bounds, dim) for v, c in zip(dirs, counts)
    ]
    f = _ChessboardMap(measures, factors)
    x = product_sphere_zero(f, factor_dims=counts, tol=tol, cfg=cfg)
    colouring = _colouring_from_coords(f, np.asarray(x), dim)
    residuals = colouring_residuals(colouring, measures)
    assert np.max(np.abs(residuals)) <= 4 * tol
    return colouring


def _colouring_from_coords(f, x, dim):
    offsets = []
    base_A = 0
    for factor, z in zip(f.factors, f.split_coords(x)):
        bounds, signs = factor.realize(z)
        weights = np.abs(z)
        # used hyperplanes: sign changes between consecutive nonempty slabs
        used = []
        prev_sign = None
        first_sign = None
        for j in range(len(signs)):
            if weights[j] <= 1e-14:
                continue
            if first_sign is None:
                first_sign = signs[j]
            if prev_sign is not None and signs[j] != prev_sign:
                used.append(float(bounds[j - 1]))
            prev_sign = signs[j]
        if first_sign is None:
            first_sign = signs[0]
        if first_sign > 0:
            base_A += 1
        offsets.append(tuple(sorted(used)))
    parity = (base_A + 1) % 2
    return ChessboardColouring(
        directions=tuple(tuple(factor.v) for factor in f.factors),
        offsets=tuple(offsets),
        parity=parity,
        dim=dim,
    )


def colouring_residuals(colouring: ChessboardColouring, measures):
    """mu_j(A) - 1/2 by exact slab-combination decomposition.

    The slab index along each direction counts crossed hyperplanes, so each
    combination's colour follows from the parity bit directly.
    """
    import itertools

    slab_ranges = [range(len(offs) + 1) for offs in colouring.offsets]
    combos = []
    for combo in itertools.product(*slab_ranges):
        if (colouring.parity + sum(combo)) % 2 != 0:
            continue  # colour B
        pairs = []
        for v, offs, idx in zip(colouring.directions, colouring.offsets,
                                combo):
            vv = np.asarray(v, dtype=float)
            bounds = np.asarray(offs, dtype=float)
            pairs.extend(_slab_pairs(vv, bounds, idx))
        combos.append(pairs)
    out = []
    for m in measures:
        total = 0.0
        for pairs in combos:
            for lo, hi, w in m.atoms:
                total += w * geom.clip_box_fraction(lo, hi, pairs)
        out.append(total - 0.5)
    return np.array(out)


def merge_counts(counts):
    """(n_1 + n_2, n_3, ...): set-membership passes to the merged tuple."""
    if len(counts) < 2:
        raise ValueError("need at least two entries to merge")
    return (counts[0] + counts[1],) + tuple(counts[2:])


def solve_prescribed(measures, spec, split_matrix):
    """Prescribed per-measure direction subsets (permanently out of scope).

    Only the parity-multinomial case where every measure is split by the full
    hyperplane family is implemented; the general prescribed-split matrix
    variant is rejected."""
    raise Unsupported(
        "prescribed split matrices are not supported; only the "
        "multinomial-parity chessboard case is implemented"
    )
