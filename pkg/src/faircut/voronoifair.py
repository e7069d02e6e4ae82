"""Fair distribution over generalized weighted-Voronoi partitions.

Cells V_i(c) = {x : f_i(x) + c_i >= f_j(x) + c_j for all j} for linear f_i
are halfspace intersections; for the conical-simplex family (f_i the log of
the distance to facet i) pairwise comparisons are again linear inside the
simplex, so cells are convex there too.  Capacities w_i = mu(V_i(c)) under a
full-support reference measure parametrize the partitions over a simplex;
the fair-split solver searches the join of that simplex with thief labels.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _geometry as geom
from .busolver import join_zero
from .errors import DimensionError, NonConvergence
from .measures import ConvexRegion, mass_of_region, uniform_box
from .necklace1d import prime_factors

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class LinearFunctions:
    """f_i(x) = g_i . x with pairwise distinct gradients."""

    gradients: tuple

    def __post_init__(self):
        g = np.asarray(self.gradients, dtype=float)
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                if np.max(np.abs(g[i] - g[j])) < 1e-12:
                    raise ValueError("gradients must be pairwise distinct")

    @property
    def kind(self):
        return "linear"

    @property
    def n(self):
        return len(self.gradients)

    @property
    def dim(self):
        return len(self.gradients[0])

    def values(self, x):
        return np.asarray(self.gradients, dtype=float) @ np.asarray(x, dtype=float)


@dataclass(frozen=True)
class SimplexFunctions:
    """f_i(x) = log dist(x, facet i hyperplane) on the open simplex interior."""

    vertices: tuple

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float)
        n, d = V.shape
        if n != d + 1:
            raise ValueError("need n = dim + 1 simplex vertices")
        if abs(np.linalg.det(V[1:] - V[0])) < 1e-12:
            raise ValueError("simplex is degenerate")

    @property
    def kind(self):
        return "simplex"

    @property
    def n(self):
        return len(self.vertices)

    @property
    def dim(self):
        return len(self.vertices[0])

    def facets(self):
        """(a_i, b_i) with unit a_i and h_i(x) = a_i . x - b_i >= 0 inside."""
        V = np.asarray(self.vertices, dtype=float)
        out = []
        for i in range(self.n):
            others = np.delete(V, i, axis=0)
            base = others[0]
            span = others[1:] - base
            if self.dim == 1:
                a = np.array([1.0])
            else:
                _, _, vt = np.linalg.svd(span)
                a = vt[-1]
            a = a / np.linalg.norm(a)
            b = float(a @ base)
            if a @ V[i] - b < 0:
                a, b = -a, -b
            out.append((a, b))
        return out

    def distances(self, x):
        return np.array([a @ np.asarray(x, dtype=float) - b
                         for a, b in self.facets()])

    def values(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.maximum(self.distances(x), 0.0))

    def region(self):
        r = ConvexRegion.full(self.dim)
        for a, b in self.facets():
            r = r.with_halfspace(tuple(-a), -b)
        return r

    def polytope(self):
        return np.asarray(self.vertices, dtype=float)

    def volume(self):
        V = np.asarray(self.vertices, dtype=float)
        return abs(np.linalg.det(V[1:] - V[0])) / math.factorial(self.dim)


def functions_from_json(obj):
    kind = obj.get("kind")
    if kind == "linear":
        return LinearFunctions(tuple(tuple(map(float, g)) for g in obj["gradients"]))
    if kind == "simplex":
        return SimplexFunctions(tuple(tuple(map(float, v)) for v in obj["vertices"]))
    raise ValueError(f"unknown functions kind {kind!r}")


def validate_weight_vector(c, n):
    c = np.asarray(c, dtype=float)
    if c.size != n:
        raise ValueError(f"weight vector needs {n} entries")
    if not np.any(np.isfinite(c)):
        raise ValueError("at least one weight must be finite")
    if np.any(c == np.inf) or np.any(np.isnan(c)):
        raise ValueError("weights must be finite or -inf")
    return c


def validate_capacity_vector(w, n):
    w = np.asarray(w, dtype=float)
    if w.size != n or np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("capacities must be a simplex point")
    return np.maximum(w, 0.0)


@dataclass
class Cells:
    """Cell regions plus the simplex boundary law alpha_ij = exp(c_j - c_i)."""

    fns: object
    weights: np.ndarray
    regions: list

    def alpha(self, i, j):
        ci, cj = self.weights[i], self.weights[j]
        if ci == -np.inf:
            return np.inf
        return float(np.exp(cj - ci))

    def cell_index(self, x):
        vals = self.fns.values(x) + self.weights
        return int(np.argmax(vals))


def cells(fns, c) -> Cells:
    """Cell decomposition for the weight vector c (entries may be -inf)."""
    c = validate_weight_vector(c, fns.n)
    regions = []
    if fns.kind == "linear":
        g = np.asarray(fns.gradients, dtype=float)
        for i in range(fns.n):
            if c[i] == -np.inf:
                regions.append(ConvexRegion.empty(fns.dim))
                continue
            r = ConvexRegion.full(fns.dim)
            for j in range(fns.n):
                if j == i or c[j] == -np.inf:
                    continue
                r = r.with_halfspace(tuple(g[j] - g[i]), float(c[i] - c[j]))
            regions.append(r)
    else:
        facets = fns.facets()
        base = fns.region()
        for i in range(fns.n):
            if c[i] == -np.inf:
                regions.append(ConvexRegion.empty(fns.dim))
                continue
            r = base
            a_i, b_i = facets[i]
            for j in range(fns.n):
                if j == i:
                    continue
                if c[j] == -np.inf:
                    continue
                # clamp the exponent: an astronomically dominant neighbour is
                # geometrically the same halfspace, without inf/nan algebra
                alpha = float(np.exp(min(c[j] - c[i], 700.0)))
                # h_i >= alpha h_j  <=>  (alpha a_j - a_i) . x <= alpha b_j - b_i
                a_j, b_j = facets[j]
                r = r.with_halfspace(tuple(alpha * a_j - a_i),
                                     float(alpha * b_j - b_i))
            regions.append(r)
    return Cells(fns, c, regions)


def default_reference(fns, measures=None, pad=0.25):
    """Uniform measure on the working domain (box hull or the simplex)."""
    if fns.kind == "simplex":
        return _SimplexUniform(fns)
    if measures:
        los = np.min([m.bounding_box()[0] for m in measures], axis=0)
        his = np.max([m.bounding_box()[1] for m in measures], axis=0)
    else:
        los = -np.ones(fns.dim)
        his = np.ones(fns.dim)
    margin = np.maximum(his - los, 1e-6) * pad
    return uniform_box(tuple(los - margin), tuple(his + margin))


class _SimplexUniform:
    """Lebesgue measure on a simplex, evaluated by exact clipping for d <= 3.

    Regions are intersected with the simplex facets and clipped against the
    simplex bounding box, which stays exact in every supported dimension.
    """

    def __init__(self, fns):
        self.fns = fns
        self.dim = fns.dim
        V = np.asarray(fns.vertices, dtype=float)
        self._lo = tuple(V.min(axis=0))
        self._hi = tuple(V.max(axis=0))
        self._bbox_vol = float(np.prod(np.subtract(self._hi, self._lo)))
        # inward facet constraints a.x - b >= 0 as (normal, offset) pairs
        self._facet_pairs = [
            (tuple(-a), -b) for a, b in fns.facets()
        ]
        self._vol = fns.volume()

    def mass_of_region(self, region):
        pairs = region.pairs()
        if pairs is None:
            return 0.0
        frac = geom.clip_box_fraction(self._lo, self._hi,
                                      list(pairs) + self._facet_pairs)
        return frac * self._bbox_vol / self._vol

    def sample(self, n, rng):
        V = np.asarray(self.fns.vertices, dtype=float)
        bary = rng.dirichlet(np.ones(self.fns.n), size=n)
        return bary @ V


def _measure_mass(mu, region):
    if hasattr(mu, "mass_of_region"):
        return mu.mass_of_region(region)
    return mass_of_region(mu, region)


def capacities(fns, c, mu=None, method="exact", samples=200_000, seed=0):
    """w_i = mu(V_i(c)); exact clipping by default, seeded MC on request."""
    mu = default_reference(fns) if mu is None else mu
    if method == "exact":
        if fns.dim > 3:
            raise DimensionError("exact capacities require d <= 3")
        decomp = cells(fns, c)
        w = np.array([_measure_mass(mu, r) for r in decomp.regions])
    elif method == "mc":
        w = _capacities_mc(fns, c, mu, samples, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    if abs(w.sum() - 1.0) > 1e-9 and method == "exact":
        raise AssertionError(f"cell masses sum to {w.sum():.12f}, not 1")
    return w


def _sample_measure(mu, n, rng):
    if isinstance(mu, _SimplexUniform):
        return mu.sample(n, rng)
    atoms = mu.atoms
    weights = np.array([a[2] for a in atoms])
    counts = rng.multinomial(n, weights / weights.sum())
    chunks = []
    for (lo, hi, _), cnt in zip(atoms, counts):
        lo = np.asarray(lo)
        hi = np.asarray(hi)
        chunks.append(lo + rng.random((cnt, lo.size)) * (hi - lo))
    return np.vstack(chunks)


def _cell_assignment(fns, c, pts):
    c = np.asarray(c, dtype=float)
    if fns.kind == "linear":
        vals = pts @ np.asarray(fns.gradients, dtype=float).T + c
    else:
        facets = fns.facets()
        A = np.array([a for a, _ in facets])
        b = np.array([bb for _, bb in facets])
        dist = np.maximum(pts @ A.T - b, 1e-300)
        with np.errstate(divide="ignore"):
            vals = np.log(dist) + c
    return np.argmax(vals, axis=1)


def _capacities_mc(fns, c, mu, samples, seed):
    rng = np.random.default_rng(seed)
    pts = _sample_measure(mu, samples, rng)
    idx = _cell_assignment(fns, c, pts)
    return np.bincount(idx, minlength=fns.n) / len(pts)


def weights_from_capacities(fns, w_target, mu=None, tol=1e-9,
                            max_iters=400):
    """Invert the capacity map: find c with capacities(fns, c, mu) = w_target.

    Raising c_i only grows cell i, so a damped fixed-point step
    c += eta (w_target - w) ascends toward the target; stalls trigger a
    coordinate-wise monotone bisection sweep.  Zero targets pin c_i = -inf
    exactly.
    """
    c, resid = _invert_capacities(fns, w_target, mu, tol, max_iters)
    if resid > tol:
        raise NonConvergence(
            f"capacity inversion stalled at residual {resid:.3e}",
            residual=resid,
        )
    return c


def _invert_capacities(fns, w_target, mu, tol, max_iters, c0=None):
    """Best-effort inversion; returns (c pinned by shift, residual)."""
    mu = default_reference(fns) if mu is None else mu
    w_target = validate_capacity_vector(w_target, fns.n)
    active = w_target > 0
    if c0 is not None and np.all(np.isfinite(np.asarray(c0)[active])):
        c = np.asarray(c0, dtype=float).copy()
    else:
        c = np.zeros(fns.n)
    c[~active] = -np.inf
    idx_active = np.nonzero(active)[0]
    if len(idx_active) == 0:
        raise ValueError("capacity target must have a positive entry")

    def pinned(vec):
        out = vec.copy()
        out[active] -= vec[idx_active[0]]
        return out

    w_now = capacities(fns, c, mu)
    resid = float(np.max(np.abs(w_now - w_target)))
    eta = 2.0
    fp_budget = min(max_iters, 25)
    for _ in range(fp_budget):
        if resid <= tol:
            return pinned(c), resid
        prop = c.copy()
        prop[active] = c[active] + eta * (w_target[active] - w_now[active])
        w_prop = capacities(fns, prop, mu)
        r_prop = float(np.max(np.abs(w_prop - w_target)))
        if r_prop < resid:
            c, w_now, resid = prop, w_prop, r_prop
            eta = min(eta * 1.25, 8.0)
        else:
            eta *= 0.5
            if eta < 1e-3:
                break
    # Newton on the active coordinates (first one pinned for shift invariance)
    free = idx_active[1:]
    h = 1e-6
    for _ in range(max_iters):
        if resid <= tol or len(free) == 0:
            break
        J = np.empty((len(free), len(free)))
        for col, j in enumerate(free):
            trial = c.copy()
            trial[j] += h
            w_h = capacities(fns, trial, mu)
            J[:, col] = (w_h[free] - w_now[free]) / h
        try:
            step = np.linalg.solve(J, w_target[free] - w_now[free])
        except np.linalg.LinAlgError:
            step = None
        improved = False
        if step is not None and np.all(np.isfinite(step)):
            lam = 1.0
            for _ in range(12):
                prop = c.copy()
                prop[free] += lam * step
                w_prop = capacities(fns, prop, mu)
                r_prop = float(np.max(np.abs(w_prop - w_target)))
                if r_prop < resid:
                    c, w_now, resid = prop, w_prop, r_prop
                    improved = True
                    break
                lam *= 0.5
        if not improved:
            c = _bisection_sweep(fns, c, w_target, mu, idx_active)
            w_now = capacities(fns, c, mu)
            r_new = float(np.max(np.abs(w_now - w_target)))
            if r_new >= resid:
                resid = r_new
                break
            resid = r_new
    return pinned(c), resid


def _cap_single(fns, c, mu, i, value):
    trial = c.copy()
    trial[i] = value
    decomp = cells(fns, trial)
    return _measure_mass(mu, decomp.regions[i])


def _bisection_sweep(fns, c, w_target, mu, idx_active, steps=40):
    c = c.copy()
    for i in idx_active:
        lo, hi = c[i] - 1.0, c[i] + 1.0
        span = 1.0
        while _cap_single(fns, c, mu, i, lo) > w_target[i] and span < 1e6:
            span *= 2.0
            lo -= span
        span = 1.0
        while _cap_single(fns, c, mu, i, hi) < w_target[i] and span < 1e6:
            span *= 2.0
            hi += span
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            if _cap_single(fns, c, mu, i, mid) < w_target[i]:
                lo = mid
            else:
                hi = mid
        c[i] = 0.5 * (lo + hi)
    return c


@dataclass
class FairSplit:
    weights: np.ndarray  # the weight vector c (entries may be -inf)
    capacities: np.ndarray
    labels: tuple
    regions: list
    shares: np.ndarray
    residual: float


class _VoronoiMap:
    """Join map over capacity simplex x labelings."""

    def __init__(self, fns, measures, mu, k, inner_tol):
        self.fns = fns
        self.measures = measures
        self.mu = mu
        self.k = k
        self.t = len(measures)
        self.inner_tol = inner_tol
        self._cache = None
        self._warm = None
        self._realized = {}

    def realize(self, w):
        w = np.maximum(np.asarray(w, dtype=float), 0.0)
        total = w.sum()
        w = w / total if total > 0 else np.full(self.fns.n, 1.0 / self.fns.n)
        # value-keyed cache keeps realize a pure function of w (the audit
        # evaluates identical points under relabeling); warm-starting the
        # inversion from the previous solution exploits polish locality
        key = w.tobytes()
        hit = self._realized.get(key)
        if hit is not None:
            return hit
        c, _ = _invert_capacities(self.fns, w, self.mu, self.inner_tol, 200,
                                  c0=self._warm)
        self._warm = c
        out = (c, cells(self.fns, c))
        if len(self._realized) > 512:
            self._realized.clear()
        self._realized[key] = out
        return out

    def part_mass_tensor(self, B):
        if self._cache is not None and self._cache[0] is B:
            return self._cache[1]
        B = np.atleast_2d(B)
        out = np.empty((len(B), self.t, self.fns.n))
        for g, w in enumerate(B):
            _, decomp = self.realize(w)
            for j, m in enumerate(self.measures):
                for i, r in enumerate(decomp.regions):
                    out[g, j, i] = _measure_mass(m, r)
        self._cache = (B, out)
        return out

    def batch(self, B, labels):
        tensor = self.part_mass_tensor(B)
        onehot = np.zeros((self.fns.n, self.k))
        onehot[np.arange(self.fns.n), np.asarray(labels)] = 1.0
        shares = np.einsum("gtm,mk->gtk", tensor, onehot)
        return (shares - 1.0 / self.k).reshape(len(tensor), -1)

    def __call__(self, bary, labels):
        return self.batch(np.atleast_2d(np.asarray(bary, dtype=float)),
                          labels)[0]

    def shift(self, residuals):
        return np.roll(residuals.reshape(self.t, self.k), 1, axis=1).ravel()

    def labeling_feasible(self, labels):
        return len(set(labels)) == self.k


def solve_fair(fns, measures, k, tol=None, mu=None, cfg=None) -> FairSplit:
    """Distribute the n = t(k-1)+1 cells among k thieves fairly, k prime."""
    t = len(measures)
    if fns.n != t * (k - 1) + 1:
        raise ValueError(
            f"need n = t(k-1)+1 = {t * (k - 1) + 1} functions, got {fns.n}"
        )
    if len(prime_factors(k)) != 1:
        raise ValueError(f"k={k} is not prime")
    if any(m.dim != fns.dim for m in measures):
        raise DimensionError("measure/function dimension mismatch")
    tol = DEFAULT_TOL if tol is None else tol
    mu = default_reference(fns, measures) if mu is None else mu
    # inner inversion well below the Gauss-Newton finite-difference step,
    # otherwise parametrization noise swamps the Jacobian
    f = _VoronoiMap(fns, measures, mu, k, inner_tol=min(tol * 1e-3, 1e-10))
    sol = join_zero(f, m=fns.n, k=k, tol=tol, cfg=cfg, output_shift=f.shift)
    c, decomp = f.realize(np.asarray(sol.barycentric))
    w = capacities(fns, c, mu)
    shares = np.zeros((t, k))
    for j, m in enumerate(measures):
        for r, lab in zip(decomp.regions, sol.labels):
            shares[j, lab] += _measure_mass(m, r)
    residual = float(np.max(np.abs(shares - 1.0 / k)))
    assert residual <= 4 * tol, f"verification failed: residual {residual}"
    return FairSplit(
        weights=c, capacities=w, labels=tuple(sol.labels),
        regions=decomp.regions, shares=shares, residual=residual,
    )
