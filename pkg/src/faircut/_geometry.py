"""Convex clipping and volume kernels for dimensions 1-3.

Polytopes are carried in dimension-specific representations:
  d=1  a pair (lo, hi), possibly empty (lo >= hi)
  d=2  an (m, 2) float array of vertices in counter-clockwise order
  d=3  an (m, 3) float array of vertices (order irrelevant; volumes go
       through a convex hull)

Halfspaces are (normal, offset) pairs meaning {x : normal . x <= offset}.
"""

import itertools

import numpy as np

_EPS = 1e-12


def box_polytope(lo, hi):
    """Vertex representation of an axis-aligned box."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    if d == 1:
        return (lo[0], hi[0])
    if d == 2:
        return np.array(
            [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]]
        )
    if d == 3:
        corners = list(itertools.product(*zip(lo, hi)))
        return np.array(corners, dtype=float)
    raise ValueError(f"box_polytope supports d <= 3, got d={d}")


def clip_interval(interval, normal, offset):
    """Clip a 1-D interval by {a*x <= b}."""
    lo, hi = interval
    a = float(np.asarray(normal).reshape(-1)[0])
    b = float(offset)
    if abs(a) < _EPS:
        return (lo, hi) if b >= 0 else (0.0, 0.0)
    if a > 0:
        hi = min(hi, b / a)
    else:
        lo = max(lo, b / a)
    if lo >= hi:
        return (0.0, 0.0)
    return (lo, hi)


def clip_polygon(verts, normal, offset):
    """Sutherland-Hodgman clip of a convex polygon by {n . x <= b}.

    Complementary halfspaces produce identical chord points, so the areas of
    the two pieces sum exactly to the original area.
    """
    if len(verts) == 0:
        return verts
    n = np.asarray(normal, dtype=float)
    if np.all(np.abs(n) < _EPS):
        return verts if offset >= 0 else verts[:0]
    d = verts @ n - offset
    if np.all(d <= _EPS):
        return verts
    if np.all(d >= -_EPS):
        return verts[:0]
    out = []
    m = len(verts)
    for i in range(m):
        j = (i + 1) % m
        di, dj = d[i], d[j]
        if di <= 0.0:
            out.append(verts[i])
        if (di < 0.0) != (dj < 0.0) and di != dj:
            t = di / (di - dj)
            out.append(verts[i] + t * (verts[j] - verts[i]))
    if not out:
        return verts[:0]
    return np.asarray(out)


def polygon_area(verts):
    if len(verts) < 3:
        return 0.0
    x = verts[:, 0]
    y = verts[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clip_polytope3(verts, halfspaces, base_halfspaces=None):
    """Vertices of a bounded 3-D polytope cut out by halfspaces.

    ``verts`` must be the vertex set of a box (used only for its bounding
    planes); the actual region is the intersection of the box with all
    ``halfspaces``.  Vertices are enumerated as feasible intersections of
    plane triples, which is robust at the handful-of-constraints scale used
    here.
    """
    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    planes = []
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = 1.0
        planes.append((e.copy(), hi[axis]))
        planes.append((-e, -lo[axis]))
    for n, b in halfspaces:
        n = np.asarray(n, dtype=float)
        if np.all(np.abs(n) < _EPS):
            if b < 0:
                return np.zeros((0, 3))
            continue
        planes.append((n, float(b)))
    A = np.array([p[0] for p in planes])
    b = np.array([p[1] for p in planes])
    scale = max(1.0, np.max(np.abs(hi)), np.max(np.abs(lo)))
    tol = 1e-9 * scale
    pts = []
    for trio in itertools.combinations(range(len(planes)), 3):
        M = A[list(trio)]
        rhs = b[list(trio)]
        try:
            x = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            continue
        if np.all(A @ x <= b + tol):
            pts.append(x)
    if not pts:
        return np.zeros((0, 3))
    pts = np.asarray(pts)
    keep = []
    for p in pts:
        if not any(np.max(np.abs(p - q)) < 10 * tol for q in keep):
            keep.append(p)
    return np.asarray(keep)


def polytope3_volume(verts):
    if len(verts) < 4:
        return 0.0
    from scipy.spatial import ConvexHull, QhullError

    try:
        return float(ConvexHull(verts).volume)
    except QhullError:
        return 0.0


def clip_box_fraction(lo, hi, halfspaces):
    """Fraction of an axis-aligned box inside an intersection of halfspaces.

    Exact for d <= 3.  ``halfspaces`` is an iterable of (normal, offset).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    vol = float(np.prod(hi - lo))
    if vol <= 0:
        return 0.0
    hs = list(halfspaces)
    if not hs:
        return 1.0
    if d == 1:
        iv = (lo[0], hi[0])
        for n, b in hs:
            iv = clip_interval(iv, n, b)
        return max(0.0, iv[1] - iv[0]) / vol
    if d == 2:
        poly = box_polytope(lo, hi)
        for n, b in hs:
            poly = clip_polygon(poly, n, b)
            if len(poly) == 0:
                return 0.0
        return polygon_area(poly) / vol
    if d == 3:
        verts = clip_polytope3(box_polytope(lo, hi), hs)
        return polytope3_volume(verts) / vol
    raise ValueError(f"exact clipping supports d <= 3, got d={d}")


def polytope_volume(poly, dim):
    if dim == 1:
        lo, hi = poly
        return max(0.0, hi - lo)
    if dim == 2:
        return polygon_area(poly)
    return polytope3_volume(poly)


def clip_poly_halfspace(poly, dim, normal, offset):
    if dim == 1:
        return clip_interval(poly, normal, offset)
    if dim == 2:
        return clip_polygon(poly, normal, offset)
    return clip_polytope3(poly, [(normal, offset)])


# ---------------------------------------------------------------------------
# Directional mass profiles: exact cumulative mass of weighted convex pieces
# swept by a moving hyperplane {v . x <= s}.


class DirectionalProfile:
    """Cumulative mass of weighted convex pieces along a direction.

    For d=2 the pieces are fan-triangulated and each triangle contributes a
    closed-form piecewise-quadratic ramp, so evaluation needs no clipping.
    """

    def __init__(self, pieces, dim, direction):
        # pieces: list of (poly, density); density = mass per unit volume
        self.dim = dim
        v = np.asarray(direction, dtype=float)
        self.direction = v
        self._tris = []  # (s1, s2, s3, mass) for d=2
        self._segs = []  # (s_lo, s_hi, mass) for d=1
        self.total = 0.0
        lo_all, hi_all = np.inf, -np.inf
        for poly, dens in pieces:
            if dim == 1:
                lo, hi = poly
                if hi - lo <= 0:
                    continue
                mass = dens * (hi - lo)
                a, b = sorted((v[0] * lo, v[0] * hi))
                self._segs.append((a, b, mass))
                self.total += mass
                lo_all = min(lo_all, a)
                hi_all = max(hi_all, b)
            elif dim == 2:
                if len(poly) < 3:
                    continue
                s = poly @ v
                for i in range(1, len(poly) - 1):
                    tri = poly[[0, i, i + 1]]
                    area = polygon_area(tri)
                    if area <= 0:
                        continue
                    ss = np.sort(s[[0, i, i + 1]])
                    self._tris.append((ss[0], ss[1], ss[2], dens * area))
                    self.total += dens * area
                lo_all = min(lo_all, float(s.min()))
                hi_all = max(hi_all, float(s.max()))
            else:
                raise ValueError("DirectionalProfile supports d <= 2")
        self.s_min = lo_all if np.isfinite(lo_all) else 0.0
        self.s_max = hi_all if np.isfinite(hi_all) else 0.0

    def cumulative(self, s):
        """Mass of {x : v . x <= s}."""
        total = 0.0
        if self.dim == 1:
            for a, b, m in self._segs:
                if s >= b:
                    total += m
                elif s > a:
                    total += m * (s - a) / (b - a)
            return total
        for s1, s2, s3, m in self._tris:
            if s >= s3:
                total += m
            elif s <= s1:
                continue
            elif s <= s2:
                if s2 > s1:
                    total += m * (s - s1) ** 2 / ((s2 - s1) * (s3 - s1))
            else:
                if s3 > s2:
                    total += m * (1.0 - (s3 - s) ** 2 / ((s3 - s2) * (s3 - s1)))
                else:
                    total += m
        return total

    def quantile(self, target):
        """Smallest s with cumulative(s) == target; target in (0, total)."""
        from scipy.optimize import brentq

        if self.total <= 0:
            raise ValueError("profile has no mass")
        lo, hi = self.s_min, self.s_max
        if target <= 0:
            return lo
        if target >= self.total:
            return hi
        f = lambda s: self.cumulative(s) - target
        return brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16, maxiter=200)
