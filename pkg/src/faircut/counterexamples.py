"""Numerical certificates for the two negative results.

Both claims are open conditions on concrete absolutely continuous instances,
so a finite scan plus a Lipschitz bound extends grid evidence to the whole
candidate continuum: the certificate states a margin delta > 0 below which no
candidate's worst share deviation can fall.  Lipschitz constants come from
exact marginal density bounds of the instance measures, never from guesses.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CertificateFailed
from .measures import box_measure, uniform_box

BIG = 1e9


@dataclass
class NonExistenceCertificate:
    claim: str
    grid_step: float
    delta: float  # certified lower bound on the continuum minimum
    grid_min: float  # minimum of the scan itself
    lipschitz: float
    params: dict = field(default_factory=dict)
    validated: bool = False
    witness: tuple = None  # best (least-bad) candidate found

    def to_json(self):
        return {
            "claim": self.claim,
            "grid_step": self.grid_step,
            "delta": self.delta,
            "grid_min": self.grid_min,
            "lipschitz": self.lipschitz,
            "params": {k: v for k, v in self.params.items()},
            "validated": self.validated,
            "witness": list(self.witness) if self.witness else None,
        }


# ---------------------------------------------------------------------------
# Claim: counts (1,1) admit no universal chessboard halving


def diagonal_segment_measures(width=2e-3, pixels=400, translation=0.05):
    """Two thin pixelated diagonal segments, the second translated
    orthogonally to the first; the standard witness pair for the claim."""
    atoms = []
    K = pixels
    for i in range(K):
        x0, x1 = i / K, (i + 1) / K
        atoms.append(((x0, x0 - width / 2), (x1, x1 + width / 2), 1.0 / K))
    m1 = box_measure(2, atoms)
    shift = translation / np.sqrt(2.0)
    m2 = m1.translate((-shift, shift))
    return m1, m2


def _axis_overlap(measure, axis, grid):
    """Per-atom cumulative overlap fractions F(grid) along one axis, stacked
    into (n_atoms, len(grid)) together with atom weights."""
    los, his, ws = measure._arrays
    lo = los[:, axis][:, None]
    hi = his[:, axis][:, None]
    frac = np.clip((grid[None, :] - lo) / (hi - lo), 0.0, 1.0)
    return frac, ws


def one_one_residual_grids(measures, xs, ys):
    """max_j |mu_j(A) - 1/2| over the corner grid for the two-line colouring.

    A (parity 0) = {x <= a, y <= b} union {x > a, y > b}; the opposite parity
    gives the complement and the same absolute deviation.
    """
    worst = None
    for m in measures:
        fx, w = _axis_overlap(m, 0, xs)
        fy, _ = _axis_overlap(m, 1, ys)
        Fx = w @ fx
        Fy = w @ fy
        G = (fx * w[:, None]).T @ fy  # joint CDF on the grid product
        mass_a = 1.0 - Fx[:, None] - Fy[None, :] + 2.0 * G
        r = np.abs(mass_a - 0.5)
        worst = r if worst is None else np.maximum(worst, r)
    return worst


def one_one_residual_at(measures, a, b):
    vals = []
    for m in measures:
        fx, w = _axis_overlap(m, 0, np.array([a]))
        fy, _ = _axis_overlap(m, 1, np.array([b]))
        Fx = float(w @ fx[:, 0])
        Fy = float(w @ fy[:, 0])
        G = float(w @ (fx[:, 0] * fy[:, 0]))
        vals.append(abs(1.0 - Fx - Fy + 2.0 * G - 0.5))
    return max(vals)


def refute_one_one(step=1e-3, width=2e-3, pixels=400, translation=0.05,
                   validate=True, measures=None) -> NonExistenceCertificate:
    """Certify that no (1,1)-chessboard halves both witness measures.

    Scans all intersection corners (x, y); sentinel grid values cover the
    degenerate single-line and empty colourings, where masses are constant in
    the escaped coordinate.
    """
    if measures is None:
        m1, m2 = diagonal_segment_measures(width, pixels, translation)
    else:
        m1, m2 = measures
    if translation == 0.0 and measures is None:
        raise CertificateFailed(
            "zero translation makes the two loci identical", best_residual=0.0
        )
    los = np.minimum(m1.bounding_box()[0], m2.bounding_box()[0])
    his = np.maximum(m1.bounding_box()[1], m2.bounding_box()[1])
    xs = np.concatenate([[-BIG], np.arange(los[0] - 2 * step,
                                           his[0] + 2 * step, step), [BIG]])
    ys = np.concatenate([[-BIG], np.arange(los[1] - 2 * step,
                                           his[1] + 2 * step, step), [BIG]])
    worst = one_one_residual_grids([m1, m2], xs, ys)
    idx = np.unravel_index(np.argmin(worst), worst.shape)
    grid_min = float(worst[idx])
    witness = (float(xs[idx[0]]), float(ys[idx[1]]))
    L = max(
        m.marginal_density_bound(0) + m.marginal_density_bound(1)
        for m in (m1, m2)
    )
    delta = grid_min - L * step / 2.0
    cert = NonExistenceCertificate(
        claim="one-one", grid_step=step, delta=delta, grid_min=grid_min,
        lipschitz=L, witness=witness,
        params={"width": width, "pixels": pixels, "translation": translation},
    )
    if delta <= 0 or L * step >= delta / 2.0:
        raise CertificateFailed(
            f"margin {delta:.3e} does not clear the Lipschitz slack "
            f"{L * step:.3e}",
            best_residual=grid_min, witness=witness,
        )
    if validate:
        cert.validated = _validate_one_one(
            [m1, m2], delta, (xs[1], xs[-2]), (ys[1], ys[-2])
        )
    return cert


def _validate_one_one(measures, delta, x_range, y_range, n=1000, seed=0):
    rng = np.random.default_rng(seed)
    pts_a = rng.uniform(*x_range, size=n)
    pts_b = rng.uniform(*y_range, size=n)
    for a, b in zip(pts_a, pts_b):
        if one_one_residual_at(measures, float(a), float(b)) < delta / 2.0:
            return False
    return True


def scan_one_one(measures, step=2e-3):
    """Best two-line corner over the scan grid (sanity-check helper)."""
    los = np.min([m.bounding_box()[0] for m in measures], axis=0)
    his = np.max([m.bounding_box()[1] for m in measures], axis=0)
    xs = np.concatenate([[-BIG], np.arange(los[0] - 2 * step,
                                           his[0] + 2 * step, step), [BIG]])
    ys = np.concatenate([[-BIG], np.arange(los[1] - 2 * step,
                                           his[1] + 2 * step, step), [BIG]])
    worst = one_one_residual_grids(measures, xs, ys)
    idx = np.unravel_index(np.argmin(worst), worst.shape)
    return (float(xs[idx[0]]), float(ys[idx[1]])), float(worst[idx])


def polish_one_one(measures, start, tol=1e-9, max_iter=200):
    """Compass descent of the corner residual from a scan witness."""
    a, b = start
    best = one_one_residual_at(measures, a, b)
    stepsize = 2e-3
    it = 0
    while stepsize > 1e-13 and best > tol and it < max_iter * 10:
        moved = False
        for da, db in ((stepsize, 0), (-stepsize, 0), (0, stepsize),
                       (0, -stepsize)):
            v = one_one_residual_at(measures, a + da, b + db)
            it += 1
            if v < best:
                a, b, best = a + da, b + db, v
                moved = True
        if not moved:
            stepsize *= 0.5
    return (a, b), best


# ---------------------------------------------------------------------------
# Claim: three measures no orthant can halve simultaneously


def collinear_box_measures(d=2, v=None, radius=0.01, count=3):
    """Small boxes centred at v, 2v, 3v along a direction with no zero or
    repeated coordinates."""
    if v is None:
        v = (1.0, 0.618, 0.755)[:d]
    v = np.asarray(v, dtype=float)
    out = []
    for i in range(1, count + 1):
        c = i * v
        out.append(uniform_box(tuple(c - radius), tuple(c + radius)))
    return out


def _orthant_mass_grids(measure, grids, pattern):
    """Mass of the orthant {sigma_a x_a >= sigma_a c_a} on the grid product."""
    los, his, ws = measure._arrays
    factors = []
    for axis, (grid, sigma) in enumerate(zip(grids, pattern)):
        lo = los[:, axis][:, None]
        hi = his[:, axis][:, None]
        inside = np.clip((grid[None, :] - lo) / (hi - lo), 0.0, 1.0)
        factors.append(1.0 - inside if sigma > 0 else inside)
    if len(grids) == 2:
        return np.einsum("n,na,nb->ab", ws, factors[0], factors[1])
    return np.einsum("n,na,nb,nc->abc", ws, factors[0], factors[1],
                     factors[2])


def _fine_axis_grid(measures, axis, step):
    """Union of per-measure support slabs (plus margin) and sentinels.

    Outside every slab the corner leaves some box uncut along this axis; part
    of the structural half-residual argument that exempts the rest of space
    from scanning.
    """
    pieces = [np.array([-BIG, BIG])]
    for m in measures:
        lo, hi = m.bounding_box()
        pieces.append(np.arange(lo[axis] - 2 * step, hi[axis] + 2 * step,
                                step))
    return np.unique(np.concatenate(pieces))


def orthant_residual_scan(measures, step=1e-3):
    """Scan all orthant corners; returns (min residual, witness, pattern).

    Corners where some box is untouched by every corner hyperplane leave that
    measure's mass at 0 or 1 (residual exactly 1/2), so only the union of
    support slabs needs a fine grid.
    """
    d = measures[0].dim
    grids = [_fine_axis_grid(measures, a, step) for a in range(d)]
    best = 0.5  # structural bound off the fine regions
    witness = None
    best_pattern = None
    patterns = []
    for bits in range(2 ** d):
        patterns.append(tuple(1 if (bits >> a) & 1 else -1 for a in range(d)))
    for pattern in patterns:
        worst = None
        for m in measures:
            r = np.abs(_orthant_mass_grids(m, grids, pattern) - 0.5)
            worst = r if worst is None else np.maximum(worst, r)
        idx = np.unravel_index(np.argmin(worst), worst.shape)
        if worst[idx] < best or witness is None:
            best = min(best, float(worst[idx]))
            witness = tuple(float(g[i]) for g, i in zip(grids, idx))
            best_pattern = pattern
    return best, witness, best_pattern


def orthant_residual_at(measures, corner, pattern):
    vals = []
    for m in measures:
        total = 0.0
        for lo, hi, w in m.atoms:
            frac = w
            for axis, (c, sigma) in enumerate(zip(corner, pattern)):
                if sigma > 0:
                    seg = max(0.0, min(hi[axis], BIG) - max(lo[axis], c))
                else:
                    seg = max(0.0, min(hi[axis], c) - max(lo[axis], -BIG))
                frac *= seg / (hi[axis] - lo[axis])
            total += frac
        vals.append(abs(total - 0.5))
    return max(vals)


def refute_orthant(d=2, v=None, radius=0.01, step=1e-3, validate=True,
                   measures=None) -> NonExistenceCertificate:
    """Certify that no orthant contains exactly half of each of the three
    collinear box measures."""
    if not 2 <= d <= 3:
        raise ValueError("refute_orthant supports d in {2, 3}")
    if measures is None:
        measures = collinear_box_measures(d, v, radius)
    grid_min, witness, pattern = orthant_residual_scan(measures, step)
    L = max(
        sum(m.marginal_density_bound(a) for a in range(d)) for m in measures
    )
    delta = grid_min - L * step / 2.0
    cert = NonExistenceCertificate(
        claim="orthant", grid_step=step, delta=delta, grid_min=grid_min,
        lipschitz=L, witness=witness,
        params={"d": d, "radius": radius,
                "v": list(v) if v is not None else None},
    )
    if delta <= 0 or L * step >= delta / 2.0:
        raise CertificateFailed(
            f"margin {delta:.3e} does not clear the Lipschitz slack "
            f"{L * step:.3e}",
            best_residual=grid_min, witness=witness,
        )
    if validate:
        cert.validated = _validate_orthant(measures, delta, seed=1)
    return cert


def _validate_orthant(measures, delta, n=1000, seed=1):
    rng = np.random.default_rng(seed)
    d = measures[0].dim
    los = np.min([m.bounding_box()[0] for m in measures], axis=0)
    his = np.max([m.bounding_box()[1] for m in measures], axis=0)
    for _ in range(n):
        corner = tuple(rng.uniform(los[a] - 0.2, his[a] + 0.2)
                       for a in range(d))
        pattern = tuple(rng.choice([-1, 1]) for _ in range(d))
        if orthant_residual_at(measures, corner, pattern) < delta / 2.0:
            return False
    return True


def find_halving_orthant(measures, step=1e-3, tol=1e-6):
    """Scan plus compass polish; sanity path for instances where a halving
    orthant exists (e.g. dropping the third collinear measure)."""
    grid_min, witness, pattern = orthant_residual_scan(measures, step)
    if witness is None:
        return None, None, grid_min
    corner = list(witness)
    best = orthant_residual_at(measures, corner, pattern)
    stepsize = step
    while stepsize > 1e-14 and best > tol:
        moved = False
        for axis in range(len(corner)):
            for s in (stepsize, -stepsize):
                cand = list(corner)
                cand[axis] += s
                val = orthant_residual_at(measures, cand, pattern)
                if val < best:
                    corner, best = cand, val
                    moved = True
        if not moved:
            stepsize *= 0.5
    return tuple(corner), pattern, best
