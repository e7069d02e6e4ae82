"""Two-direction plane partitions and stair-like halving paths.

A (0,1)-vector M of length n describes partitions of the plane into n
horizontal strips, each strip either wholly assigned to one side (entry 0) or
split by one vertical cut (entry 1).  This partition space is a sphere of
dimension n + w(M) - 1: strip heights come from the L1 weights of coordinate
groups (one coordinate per 0-entry, two per 1-entry) and the group signs
encode sides and cut positions.  Negating the sphere point swaps the sides,
so share-deficit test maps are antipodal and a Borsuk-Ulam zero gives the
equipartition.  Partitions of shape 1_s or 1_s*0 convert to y-monotone
axis-parallel paths with at most 2s-2 (resp. 2s-1) turns, which yields a
halving path with at most t-1 turns for any t measures.
"""

from dataclasses import dataclass

import numpy as np

from .busolver import OctahedralPoint, antipodal_zero
from .errors import DimensionError, UnsupportedShape

DEFAULT_TOL_2D = 1e-6


@dataclass(frozen=True)
class CutVector:
    """(0,1)-vector M; capacity t = n + w(M) is the sphere dimension + 1."""

    entries: tuple

    def __post_init__(self):
        if any(e not in (0, 1) for e in self.entries):
            raise ValueError("cut vector entries must be 0 or 1")

    @property
    def n(self):
        return len(self.entries)

    @property
    def weight(self):
        return sum(self.entries)

    @property
    def capacity(self):
        return self.n + self.weight

    @staticmethod
    def ones(s):
        return CutVector((1,) * s)

    @staticmethod
    def ones_zero(s):
        return CutVector((1,) * s + (0,))

    def group_slices(self):
        """Coordinate ranges per strip: one coordinate per 0, two per 1."""
        out = []
        start = 0
        for e in self.entries:
            size = 2 if e == 1 else 1
            out.append((start, start + size))
            start += size
        return out


@dataclass(frozen=True)
class Window:
    """Axis ranges identifying the compactified parameter [0,1] with [-inf,inf].

    The map tau -> mid + halfwidth * tan(pi (tau - 1/2)) is a smooth monotone
    bijection sending [1/4, 3/4] onto the window itself.
    """

    x_mid: float
    x_halfwidth: float
    y_mid: float
    y_halfwidth: float

    @staticmethod
    def around(measures, margin=1.0):
        los = np.min([m.bounding_box()[0] for m in measures], axis=0)
        his = np.max([m.bounding_box()[1] for m in measures], axis=0)
        mids = 0.5 * (los + his)
        hws = np.maximum(0.5 * (his - los), 1e-6) * (1.0 + margin)
        return Window(float(mids[0]), float(hws[0]), float(mids[1]), float(hws[1]))

    def x_real(self, tau):
        return _tau_to_real(tau, self.x_mid, self.x_halfwidth)

    def y_real(self, tau):
        return _tau_to_real(tau, self.y_mid, self.y_halfwidth)


def _tau_to_real(tau, mid, hw):
    tau = np.asarray(tau, dtype=float)
    out = np.where(
        tau <= 0.0,
        -np.inf,
        np.where(tau >= 1.0, np.inf, mid + hw * np.tan(np.pi * (np.clip(tau, 1e-12, 1 - 1e-12) - 0.5))),
    )
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class StairPartition:
    """Strips with per-strip side assignments or vertical cuts.

    ``strips`` holds ('full', side) with side in {'A','B'} for 0-entries and
    ('cut', x_position, a_on_left) for 1-entries; ``y_breaks`` are the n-1
    strip boundaries as extended reals, bottom strip first.
    """

    M: CutVector
    y_breaks: tuple
    strips: tuple
    window: Window

    def side_of(self, point):
        x, y = point
        idx = int(np.searchsorted(np.asarray(self.y_breaks), y, side="right"))
        kind = self.strips[idx]
        if kind[0] == "full":
            return kind[1]
        _, cut, a_left = kind
        if a_left:
            return "A" if x <= cut else "B"
        return "A" if x >= cut else "B"

    def swapped(self):
        strips = []
        for s in self.strips:
            if s[0] == "full":
                strips.append(("full", "B" if s[1] == "A" else "A"))
            else:
                strips.append(("cut", s[1], not s[2]))
        return StairPartition(self.M, self.y_breaks, tuple(strips), self.window)


def sphere_to_partition(x, M: CutVector, window: Window = None) -> StairPartition:
    """Realize an L1-sphere point as a strip partition (join construction).

    Continuous and antipode-equivariant: the image of -x is the side-swapped
    partition.  Strips with zero group weight are empty; degenerate cut
    strips carry the canonical midpoint cut.
    """
    coords = np.asarray(x.coords if isinstance(x, OctahedralPoint) else x,
                        dtype=float)
    if coords.size != M.capacity:
        raise DimensionError(
            f"need {M.capacity} coordinates for M={M.entries}, got {coords.size}"
        )
    window = window or Window(0.5, 0.5, 0.5, 0.5)
    slices = M.group_slices()
    weights = np.array([np.abs(coords[a:b]).sum() for a, b in slices])
    taus = np.cumsum(weights)[:-1]
    y_breaks = tuple(window.y_real(t) for t in taus)
    strips = []
    for (a, b), entry in zip(slices, M.entries):
        group = coords[a:b]
        if entry == 0:
            strips.append(("full", "A" if group[0] >= 0 else "B"))
        else:
            s = np.abs(group).sum()
            if s <= 0:
                strips.append(("cut", window.x_real(0.5), True))
                continue
            nu = group[0] / s
            if group[1] >= 0:
                tau, a_left = (nu + 1.0) / 2.0, True
            else:
                tau, a_left = (1.0 - nu) / 2.0, False
            strips.append(("cut", window.x_real(tau), a_left))
    return StairPartition(M, y_breaks, tuple(strips), window)


def partition_masses(p: StairPartition, measures):
    """mu_i(A) for each measure, by exact axis-aligned overlap products."""
    bounds = (-np.inf,) + p.y_breaks + (np.inf,)
    out = []
    for m in measures:
        total = 0.0
        for (lox, loy), (hix, hiy), w in m.atoms:
            for i, strip in enumerate(p.strips):
                ylen = min(bounds[i + 1], hiy) - max(bounds[i], loy)
                if ylen <= 0:
                    continue
                yfrac = ylen / (hiy - loy)
                if strip[0] == "full":
                    if strip[1] == "A":
                        total += w * yfrac
                    continue
                _, cut, a_left = strip
                if cut == np.inf:
                    xfrac = 1.0
                elif cut == -np.inf:
                    xfrac = 0.0
                else:
                    xfrac = min(max((cut - lox) / (hix - lox), 0.0), 1.0)
                total += w * yfrac * (xfrac if a_left else 1.0 - xfrac)
        out.append(total)
    return np.array(out)


class _StairMap:
    """Antipodal test map: per-measure A-share deficits over the sphere."""

    def __init__(self, measures, M, window):
        self.measures = measures
        self.M = M
        self.window = window
        self.slices = M.group_slices()
        self._starts = None

    def geometric_to_sphere(self, y_breaks, cuts, signs):
        """Sphere coordinates realizing given strip breaks, cut abscissae and
        orientation signs (one sign per strip)."""

        def to_tau(value, mid, hw):
            if value == np.inf:
                return 1.0
            if value == -np.inf:
                return 0.0
            return 0.5 + np.arctan((value - mid) / hw) / np.pi

        taus_y = [to_tau(y, self.window.y_mid, self.window.y_halfwidth)
                  for y in y_breaks]
        s = np.diff(np.concatenate([[0.0], taus_y, [1.0]]))
        coords = []
        ci = 0
        for i, e in enumerate(self.M.entries):
            if e == 0:
                coords.append(signs[i] * s[i])
            else:
                tau_c = to_tau(cuts[ci], self.window.x_mid,
                               self.window.x_halfwidth)
                ci += 1
                nu = 2.0 * tau_c - 1.0 if signs[i] > 0 else 1.0 - 2.0 * tau_c
                u = s[i] * nu
                v = signs[i] * (s[i] - abs(u))
                coords.extend([u, v])
        x = np.asarray(coords)
        norm = np.abs(x).sum()
        return x / norm if norm > 1e-12 else x

    def extra_starts(self, resolution):
        """Centers of arrangement cells that could contain a zero.

        Within a cell of the box-edge arrangement every mass is multilinear
        in the strip breaks and cuts, so its range is spanned by the cell
        corners: a cell is kept only if each measure's corner residuals
        straddle zero.  Zeros hiding in thin funnels below the max-norm
        plateau are exactly the ones this test surfaces.
        """
        if self._starts is not None:
            return self._starts
        n = self.M.n
        w = self.M.weight
        dims = (n - 1) + w
        if dims > 4:
            self._starts = np.zeros((0, self.M.capacity))
            return self._starts
        self._starts = np.asarray(self._certified_cell_centers())
        return self._starts

    def _axis_grid(self, axis):
        edges = set()
        for m in self.measures:
            for lo, hi, _ in m.atoms:
                edges.add(lo[axis])
                edges.add(hi[axis])
        edges = sorted(edges)
        lo, hi = edges[0], edges[-1]
        pad = max(hi - lo, 1e-6) * 0.5
        return np.array([lo - pad] + edges + [hi + pad])

    def _certified_cell_centers(self):
        import itertools

        entries = self.M.entries
        n = len(entries)
        cut_idx = [i for i, e in enumerate(entries) if e == 1]
        ygrid = self._axis_grid(1)
        xgrid = self._axis_grid(0)
        n_breaks = n - 1
        w = len(cut_idx)
        grids = [ygrid] * n_breaks + [xgrid] * w
        mesh = np.meshgrid(*grids, indexing="ij")
        out = []
        for signs in itertools.product((1.0, -1.0), repeat=n):
            if signs[0] < 0:
                continue  # antipodal dedup
            residuals = []
            for m in self.measures:
                acc = np.zeros_like(mesh[0])
                for (lox, loy), (hix, hiy), wgt in m.atoms:
                    ci = 0
                    for i in range(n):
                        ya = mesh[i - 1] if i > 0 else -np.inf
                        yb = mesh[i] if i < n - 1 else np.inf
                        ol = np.clip(np.minimum(yb, hiy) - np.maximum(ya, loy),
                                     0.0, None)
                        fy = ol / (hiy - loy)
                        if entries[i] == 0:
                            if signs[i] > 0:
                                acc += wgt * fy
                        else:
                            xc = mesh[n_breaks + ci]
                            fx = np.clip((xc - lox) / (hix - lox), 0.0, 1.0)
                            acc += wgt * fy * (fx if signs[i] > 0 else 1 - fx)
                        if entries[i] == 1:
                            ci += 1
                res = acc - 0.5
                # corner min/max over the cell hypercube via shifted slices
                cmin = res.copy()
                cmax = res.copy()
                for d in range(len(grids)):
                    sl_lo = [slice(None)] * len(grids)
                    sl_hi = [slice(None)] * len(grids)
                    sl_lo[d] = slice(0, -1)
                    sl_hi[d] = slice(1, None)
                    cmin = np.minimum(cmin[tuple(sl_lo)], cmin[tuple(sl_hi)])
                    cmax = np.maximum(cmax[tuple(sl_lo)], cmax[tuple(sl_hi)])
                residuals.append((cmin, cmax))
            keep = np.ones_like(residuals[0][0], dtype=bool)
            for cmin, cmax in residuals:
                keep &= (cmin <= 0) & (cmax >= 0)
            # respect ordering of strip breaks: y cell i must not sit above
            # y cell j for i < j
            idx = np.nonzero(keep)
            for cell in zip(*idx):
                lo_c = np.array([grids[d][cell[d]] for d in range(len(grids))])
                hi_c = np.array([grids[d][cell[d] + 1]
                                 for d in range(len(grids))])
                if any(lo_c[i] > lo_c[i + 1] for i in range(n_breaks - 1)):
                    continue
                point = self._cell_newton(lo_c, hi_c, signs, n_breaks)
                ybreaks = sorted(point[:n_breaks])
                cuts = point[n_breaks:]
                out.append(self.geometric_to_sphere(ybreaks, cuts, signs))
        return out if out else np.zeros((0, self.M.capacity))

    def _geometric_residual(self, point, signs, n_breaks):
        ybreaks = tuple(sorted(point[:n_breaks]))
        cuts = point[n_breaks:]
        strips = []
        ci = 0
        for i, e in enumerate(self.M.entries):
            if e == 0:
                strips.append(("full", "A" if signs[i] > 0 else "B"))
            else:
                strips.append(("cut", float(cuts[ci]), signs[i] > 0))
                ci += 1
        p = StairPartition(self.M, ybreaks, tuple(strips), self.window)
        return partition_masses(p, self.measures) - 0.5

    def _cell_newton(self, lo_c, hi_c, signs, n_breaks, iters=30):
        """Projected damped Newton on the in-cell multilinear system.

        Masses are smooth multilinear inside a cell, so Newton homes in on
        zeros even when they hug the cell boundary behind flat gaps that
        defeat the sphere-chart search.
        """
        p = 0.5 * (lo_c + hi_c)
        r = self._geometric_residual(p, signs, n_breaks)
        cur2 = float(r @ r)
        h = np.maximum(hi_c - lo_c, 1e-9) * 1e-7
        for _ in range(iters):
            if np.max(np.abs(r)) <= 1e-12:
                break
            J = np.empty((r.size, p.size))
            for d in range(p.size):
                q = p.copy()
                q[d] = min(q[d] + h[d], hi_c[d])
                step_len = q[d] - p[d]
                if step_len <= 0:
                    q[d] = p[d] - h[d]
                    step_len = q[d] - p[d]
                J[:, d] = (self._geometric_residual(q, signs, n_breaks) - r) \
                    / step_len
            try:
                step, *_ = np.linalg.lstsq(J, -r, rcond=None)
            except np.linalg.LinAlgError:
                break
            if not np.all(np.isfinite(step)):
                break
            improved = False
            lam = 1.0
            for _ in range(8):
                cand = np.clip(p + lam * step, lo_c, hi_c)
                rc = self._geometric_residual(cand, signs, n_breaks)
                c2 = float(rc @ rc)
                if c2 < cur2:
                    p, r, cur2 = cand, rc, c2
                    improved = True
                    break
                lam *= 0.5
            if not improved:
                break
        return p

    def __call__(self, x):
        p = sphere_to_partition(np.asarray(x, dtype=float), self.M, self.window)
        return partition_masses(p, self.measures) - 0.5

    def batch(self, X):
        X = np.asarray(X, dtype=float)
        G = X.shape[0]
        n = self.M.n
        weights = np.empty((G, n))
        for i, (a, b) in enumerate(self.slices):
            weights[:, i] = np.abs(X[:, a:b]).sum(axis=1)
        taus = np.cumsum(weights, axis=1)[:, : n - 1]
        ybreaks = _tau_to_real(taus, self.window.y_mid, self.window.y_halfwidth)
        sides = []  # per strip: ('full', sign (G,)) or ('cut', x (G,), a_left (G,))
        for (a, b), entry in zip(self.slices, self.M.entries):
            if entry == 0:
                sides.append(("full", X[:, a] >= 0))
            else:
                u, v = X[:, a], X[:, a + 1]
                s = np.abs(u) + np.abs(v)
                safe = np.where(s > 0, s, 1.0)
                nu = u / safe
                upper = v >= 0
                tau = np.where(upper, (nu + 1.0) / 2.0, (1.0 - nu) / 2.0)
                tau = np.where(s > 0, tau, 0.5)
                xcut = _tau_to_real(tau, self.window.x_mid, self.window.x_halfwidth)
                sides.append(("cut", xcut, upper))
        res = np.empty((G, len(self.measures)))
        lo_pad = np.full(G, -np.inf)
        hi_pad = np.full(G, np.inf)
        ycols = [lo_pad] + [ybreaks[:, i] for i in range(n - 1)] + [hi_pad]
        for j, m in enumerate(self.measures):
            acc = np.zeros(G)
            for (lox, loy), (hix, hiy), w in m.atoms:
                for i, strip in enumerate(sides):
                    ylen = np.minimum(ycols[i + 1], hiy) - np.maximum(ycols[i], loy)
                    yfrac = np.clip(ylen, 0.0, None) / (hiy - loy)
                    if strip[0] == "full":
                        acc += w * yfrac * strip[1]
                    else:
                        _, xcut, a_left = strip
                        xfrac = np.clip((xcut - lox) / (hix - lox), 0.0, 1.0)
                        acc += w * yfrac * np.where(a_left, xfrac, 1.0 - xfrac)
            res[:, j] = acc - 0.5
        return res


def solve_equipartition(measures, M: CutVector, tol=None, cfg=None):
    """Partition in the M-family halving all n + w(M) - 1 measures."""
    if any(m.dim != 2 for m in measures):
        raise DimensionError("solve_equipartition needs 2-D measures")
    if len(measures) != M.capacity - 1:
        raise DimensionError(
            f"M={M.entries} halves {M.capacity - 1} measures, got {len(measures)}"
        )
    tol = DEFAULT_TOL_2D if tol is None else tol
    window = Window.around(measures)
    f = _StairMap(measures, M, window)
    x = antipodal_zero(f, sphere_dim=M.capacity - 1, tol=tol, cfg=cfg)
    return sphere_to_partition(x, M, window)


@dataclass(frozen=True)
class Segment:
    kind: str  # 'V' or 'H'
    fixed: float  # x for V, y for H
    lo: float
    hi: float
    through_infinity: bool = False

    @property
    def length(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class StairPath:
    """y-monotone axis-parallel separating path, possibly wrapping at infinity."""

    segments: tuple
    turns: int
    partition: StairPartition = None

    def side_of(self, point):
        return self.partition.side_of(point)


def _effective_strips(p: StairPartition):
    """Visible strips with infinite cuts folded into full-side strips."""
    bounds = (-np.inf,) + p.y_breaks + (np.inf,)
    out = []
    for i, strip in enumerate(p.strips):
        y0, y1 = bounds[i], bounds[i + 1]
        if not y1 > y0:
            continue
        if strip[0] == "cut" and np.isinf(strip[1]):
            side = "A" if (strip[2] == (strip[1] > 0)) else "B"
            out.append(("full", side, y0, y1))
        elif strip[0] == "cut":
            out.append(("cut", (strip[1], strip[2]), y0, y1))
        else:
            out.append(("full", strip[1], y0, y1))
    return out


def to_path(p: StairPartition) -> StairPath:
    """Separating stair path for partitions of shape 1_s or 1_s*0.

    At most 2s-2 turns for M = 1_s and 2s-1 for M = 1_s*0; degenerate strips
    only remove turns.
    """
    entries = p.M.entries
    s = p.M.weight
    if not (entries == (1,) * s or entries == (1,) * s + (0,)):
        raise UnsupportedShape(f"no path conversion for M={entries}")

    strips = _effective_strips(p)
    segments = []

    def side_function(strip):
        # returns ('cut', c, a_left) or ('full', side)
        if strip[0] == "cut":
            c, a_left = strip[1]
            return ("cut", c, a_left)
        return ("full", strip[1])

    def emit_interface(y, below, above):
        if below[0] == "cut" and above[0] == "cut":
            _, c1, l1 = below
            _, c2, l2 = above
            if l1 == l2:
                if c1 != c2:
                    segments.append(Segment("H", y, min(c1, c2), max(c1, c2)))
            else:
                segments.append(Segment("H", y, c1, c2, through_infinity=True))
            return
        if below[0] == "full" and above[0] == "full":
            if below[1] != above[1]:
                segments.append(
                    Segment("H", y, -np.inf, np.inf, through_infinity=True)
                )
            return
        # one cut strip against one full side: boundary is a single ray
        cut = below if below[0] == "cut" else above
        full = above if below[0] == "cut" else below
        _, c, a_left = cut
        towards_plus = (full[1] == "A") == a_left
        if towards_plus:
            segments.append(Segment("H", y, c, np.inf))
        else:
            segments.append(Segment("H", y, -np.inf, c))

    prev = None
    for strip in strips:
        cur = side_function(strip)
        y0, y1 = strip[2], strip[3]
        if prev is not None:
            emit_interface(y0, prev, cur)
        if cur[0] == "cut":
            segments.append(Segment("V", cur[1], y0, y1))
        prev = cur

    turns = _count_turns(segments)
    return StairPath(tuple(segments), turns, p)


def _count_turns(segments):
    """Corners at finite meeting points of consecutive positive segments.

    A through-infinity horizontal contributes a corner at each of its finite
    endpoints, exactly like a direct one, via its two vertical neighbours.
    """
    turns = 0
    visible = [s for s in segments if s.length > 0 or s.through_infinity]
    for a, b in zip(visible, visible[1:]):
        if a.kind != b.kind:
            turns += 1
    return turns


def halve_with_path(measures, tol=None, cfg=None) -> StairPath:
    """Stair path with at most t-1 turns halving all t measures.

    t odd uses M = 1_s with t = 2s-1; t even uses M = 1_s*0 with t = 2s; both
    give a partition sphere of dimension t.
    """
    t = len(measures)
    if t < 1:
        raise ValueError("need at least one measure")
    if t % 2 == 1:
        M = CutVector.ones((t + 1) // 2)
    else:
        M = CutVector.ones_zero(t // 2)
    tol = DEFAULT_TOL_2D if tol is None else tol
    partition = solve_equipartition(measures, M, tol=tol, cfg=cfg)
    path = to_path(partition)
    assert path.turns <= t - 1, (
        f"turn bound violated: {path.turns} > {t - 1}"
    )
    return path
