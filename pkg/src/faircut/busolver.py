"""Equivariant zero finding on octahedral spheres, joins and sphere products.

Every solver in the package reduces to a zero of a symmetric test map whose
existence is guaranteed topologically but not constructively, so the search
strategy here (multi-resolution lattices with symmetry dedup, probe-ranked
candidates, damped Gauss-Newton, compass search, LP minimax steps and seeded
jitter restarts) is an engineering choice.  Returned points are re-checked
against the claimed residual bound, and symmetry contracts are audited by
sampling before any search starts.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError, NoZeroFound

L1_TOL = 1e-12


@dataclass(frozen=True)
class OctahedralPoint:
    """Point on the L1 unit sphere; the antipode is coordinatewise negation."""

    coords: tuple

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if abs(np.abs(c).sum() - 1.0) > 1e-9:
            raise ValueError("octahedral coordinates must have L1 norm 1")

    @property
    def array(self):
        return np.asarray(self.coords, dtype=float)

    def antipode(self):
        return OctahedralPoint(tuple(-c for c in self.coords))


@dataclass(frozen=True)
class JoinPoint:
    """Point of the join [k]^{*n}: barycentric weights plus one label per factor.

    Labels on zero-weight factors are quotiented out: equality ignores them.
    """

    barycentric: tuple
    labels: tuple

    def __post_init__(self):
        b = np.asarray(self.barycentric, dtype=float)
        if len(self.barycentric) != len(self.labels):
            raise ValueError("barycentric/labels length mismatch")
        if np.any(b < -1e-12) or abs(b.sum() - 1.0) > 1e-9:
            raise ValueError("barycentric coordinates must be a simplex point")

    def __eq__(self, other):
        if not isinstance(other, JoinPoint):
            return NotImplemented
        if self.barycentric != other.barycentric:
            return False
        return all(
            la == lb
            for w, la, lb in zip(self.barycentric, self.labels, other.labels)
            if w > 0
        )

    def __hash__(self):
        sig = tuple(
            (w, l) if w > 0 else (w, None)
            for w, l in zip(self.barycentric, self.labels)
        )
        return hash(sig)


@dataclass
class SolverConfig:
    grid_levels: tuple = (4, 8, 16, 32)
    top_k: int = 24
    probe_k: int = 96
    probe_iterations: int = 3
    starts_per_labeling: int = 3
    jitter_restarts: int = 8
    labeling_beam: int = 160
    max_lattice: int = 150_000
    gn_iterations: int = 60
    minimax_iterations: int = 30
    minimax_threshold: float = 0.05
    max_extra_starts: int = 96
    pattern_budget: int = 2000
    max_barren_sweeps: int = 14
    audit_samples: int = 100
    audit_tol: float = 1e-9
    seed: int = 0
    eval_budget: int = 2_000_000


def _as_map(f):
    """Normalize callables to return 1-D residual arrays."""

    def g(x):
        return np.atleast_1d(np.asarray(f(x), dtype=float)).ravel()

    return g


# ---------------------------------------------------------------------------
# Lattices


def compositions(total, parts):
    """All nonnegative integer vectors of length ``parts`` summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def simplex_lattice(m, resolution):
    """(G, m) array of barycentric lattice points with denominator ``resolution``."""
    pts = np.array(list(compositions(resolution, m)), dtype=float)
    return pts / resolution


def octahedral_lattice(n_coords, resolution, antipodal_dedup=True):
    """Lattice on the L1 sphere in R^n_coords at the given resolution.

    With ``antipodal_dedup`` only the canonical representative of each
    antipodal pair (first nonzero coordinate positive) is produced.
    """
    points = []
    for comp in compositions(resolution, n_coords):
        nz = [i for i, c in enumerate(comp) if c > 0]
        if not nz:
            continue
        free = nz[1:] if antipodal_dedup else nz
        for signs in itertools.product((1.0, -1.0), repeat=len(free)):
            vec = np.array(comp, dtype=float) / resolution
            for i, s in zip(free, signs):
                vec[i] *= s
            points.append(vec)
    return np.array(points)


# ---------------------------------------------------------------------------
# Charts: local parametrizations used by the polishing stage


class _SimplexChart:
    """Barycentric simplex chart: free coordinates are all but the last."""

    def __init__(self, m):
        self.m = m
        self.dim = m - 1

    def to_chart(self, x):
        return np.asarray(x[:-1], dtype=float).copy()

    def project(self, u):
        u = np.maximum(u, 0.0)
        s = u.sum()
        if s > 1.0:
            u = u / s
        return u

    def embed(self, u):
        u = self.project(u)
        return np.append(u, max(0.0, 1.0 - u.sum()))


class _OctahedralChart:
    """Chart dropping the largest-|coordinate| axis of an L1-sphere point."""

    def __init__(self, x):
        x = np.asarray(x, dtype=float)
        self.pivot = int(np.argmax(np.abs(x)))
        self.sign = 1.0 if x[self.pivot] >= 0 else -1.0
        self.n = x.size
        self.dim = self.n - 1

    def to_chart(self, x):
        return np.delete(np.asarray(x, dtype=float), self.pivot)

    def project(self, u):
        s = np.abs(u).sum()
        if s > 1.0:
            u = u / s
        return u

    def embed(self, u):
        u = self.project(u)
        rest = max(0.0, 1.0 - np.abs(u).sum())
        return np.insert(u, self.pivot, self.sign * rest)


class _ProductChart:
    def __init__(self, charts):
        self.charts = charts
        self.dims = [c.dim for c in charts]
        self.dim = sum(self.dims)

    def split(self, u):
        out = []
        i = 0
        for d in self.dims:
            out.append(u[i:i + d])
            i += d
        return out

    def embed(self, u):
        return np.concatenate(
            [c.embed(piece) for c, piece in zip(self.charts, self.split(u))]
        )


# ---------------------------------------------------------------------------
# Local polish: Gauss-Newton, LP minimax, compass search, jitter restarts


def _residual_norm(r):
    return float(np.max(np.abs(r)))


def _gauss_newton(fun, u0, tol, cfg, counter, max_iters=None):
    """Damped Gauss-Newton; steps are accepted on the least-squares
    objective, while the returned point is the best max-norm iterate."""
    u = np.asarray(u0, dtype=float).copy()
    r = fun(u)
    counter[0] += 1
    cur2 = float(r @ r)
    best_u, best = u.copy(), _residual_norm(r)
    h = 1e-8
    for _ in range(max_iters if max_iters is not None else cfg.gn_iterations):
        if best <= tol:
            break
        q = u.size
        J = np.empty((r.size, q))
        for j in range(q):
            up = u.copy()
            up[j] += h
            J[:, j] = (fun(up) - r) / h
            counter[0] += 1
        try:
            step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        improved = False
        lam = 1.0
        for _ in range(10):
            cand = u + lam * step
            rc = fun(cand)
            counter[0] += 1
            c2 = float(rc @ rc)
            if c2 < cur2:
                u, r, cur2 = cand, rc, c2
                if _residual_norm(rc) < best:
                    best = _residual_norm(rc)
                    best_u = u.copy()
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    return best_u, best


def _minimax_step(fun, u, r, delta, counter, h=1e-8):
    """Trust-region step minimizing the local linear model of max|r_i|.

    Piecewise-linear residuals lock plain descent at kinks where two
    components trade the max with opposing slopes; the LP handles exactly
    that geometry.
    """
    from scipy.optimize import linprog

    q = u.size
    J = np.empty((r.size, q))
    for j in range(q):
        up = u.copy()
        up[j] += h
        J[:, j] = (fun(up) - r) / h
        counter[0] += 1
    # variables (delta, tau): minimize tau subject to +-(r + J delta) <= tau
    c = np.zeros(q + 1)
    c[-1] = 1.0
    A = np.vstack([
        np.hstack([J, -np.ones((r.size, 1))]),
        np.hstack([-J, -np.ones((r.size, 1))]),
    ])
    b = np.concatenate([-r, r])
    bounds = [(-delta, delta)] * q + [(None, None)]
    try:
        sol = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    except Exception:
        return None
    if not sol.success:
        return None
    return sol.x[:q]


def _minimax_polish(fun, u0, step0, tol, cfg, counter):
    u = np.asarray(u0, dtype=float).copy()
    r = fun(u)
    counter[0] += 1
    best = _residual_norm(r)
    delta = step0
    for _ in range(cfg.minimax_iterations):
        if best <= tol or delta < 1e-13:
            break
        step = _minimax_step(fun, u, r, delta, counter)
        if step is None:
            break
        cand = u + step
        rc = fun(cand)
        counter[0] += 1
        nc = _residual_norm(rc)
        if nc < best * (1 - 1e-12):
            u, r, best = cand, rc, nc
            delta = min(delta * 1.6, step0 * 4)
        else:
            delta *= 0.4
    return u, best


def _compass(fun, u0, step0, tol, cfg, counter):
    u = np.asarray(u0, dtype=float).copy()
    best = _residual_norm(fun(u))
    counter[0] += 1
    step = step0
    used = 0
    barren = 0  # consecutive sweeps without improvement
    q = u.size
    while (step > 1e-14 and best > tol and used < cfg.pattern_budget
           and barren < cfg.max_barren_sweeps):
        moved = False
        for j in range(q):
            for s in (step, -step):
                cand = u.copy()
                cand[j] += s
                v = _residual_norm(fun(cand))
                counter[0] += 1
                used += 1
                if v < best:
                    u, best = cand, v
                    moved = True
        if not moved:
            step *= 0.5
            barren += 1
        else:
            barren = 0
    return u, best


def _polish(fun, u0, step0, tol, cfg, counter):
    """Gauss-Newton and compass search plus jittered restarts on stall.

    Stalls typically sit on kinks bounding the true basin, so small seeded
    perturbations followed by fresh Gauss-Newton often cross over.
    """
    u, best = _gauss_newton(fun, u0, tol, cfg, counter)
    if best > tol:
        u2, b2 = _compass(fun, u, step0, tol, cfg, counter)
        if b2 < best:
            u, best = u2, b2
            u2, b2 = _gauss_newton(fun, u, tol, cfg, counter)
            if b2 < best:
                u, best = u2, b2
    if best > tol and cfg.jitter_restarts > 0:
        rng = np.random.default_rng(cfg.seed + 1)
        for _ in range(cfg.jitter_restarts):
            scale = step0 * rng.uniform(0.3, 1.5)
            cand0 = u + rng.uniform(-scale, scale, size=u.size)
            u2, b2 = _gauss_newton(fun, cand0, tol, cfg, counter,
                                   max_iters=15)
            if b2 < best:
                u, best = u2, b2
            if best <= tol:
                break
    if tol < best <= cfg.minimax_threshold and cfg.minimax_iterations > 0:
        # last resort for near misses: kink-locked minimax stalls yield to
        # the local linear-programming step
        u2, b2 = _minimax_polish(fun, u, step0, tol, cfg, counter)
        if b2 < best:
            u, best = u2, b2
    return u, best


# ---------------------------------------------------------------------------
# Audits


def audit_antipodal(f, n_coords, cfg):
    """Check f(-x) = -f(x) on random sphere points; abort on violation."""
    rng = np.random.default_rng(cfg.seed)
    g = _as_map(f)
    for _ in range(cfg.audit_samples):
        x = rng.standard_normal(n_coords)
        x /= np.abs(x).sum()
        gap = np.max(np.abs(g(-x) + g(x)))
        if gap > cfg.audit_tol:
            raise ContractError(
                f"antipodality violated: |f(-x)+f(x)| = {gap:.3e} at sampled x"
            )


def audit_join_equivariance(f, m, k, output_shift, cfg, samples=20):
    """Spot-check equivariance of a join map under the cyclic relabeling."""
    if output_shift is None:
        return
    rng = np.random.default_rng(cfg.seed)
    for _ in range(samples):
        b = rng.dirichlet(np.ones(m))
        labels = tuple(int(v) for v in rng.integers(0, k, size=m))
        shifted = tuple((l + 1) % k for l in labels)
        lhs = np.asarray(f(b, shifted), dtype=float).ravel()
        rhs = np.asarray(output_shift(np.asarray(f(b, labels), dtype=float).ravel()))
        gap = np.max(np.abs(lhs - rhs))
        if gap > cfg.audit_tol:
            raise ContractError(
                f"cyclic equivariance violated: gap {gap:.3e} at sampled point"
            )


# ---------------------------------------------------------------------------
# Solvers


def antipodal_zero(f, sphere_dim, tol=1e-9, cfg=None, audit=True):
    """Zero of an antipodal map f: S^sphere_dim -> R^sphere_dim.

    The sphere is the L1 sphere in R^(sphere_dim+1).  Raises NoZeroFound with
    the best residual if the budget runs out before reaching ``tol``.
    """
    cfg = cfg or SolverConfig()
    n_coords = sphere_dim + 1
    g = _as_map(f)
    probe = g(np.eye(n_coords)[0])
    if probe.size != sphere_dim:
        raise DimensionError(
            f"map returns {probe.size} residuals; expected {sphere_dim}"
        )
    if audit:
        audit_antipodal(f, n_coords, cfg)

    batch = getattr(f, "batch", None)
    best_overall = np.inf
    best_x = None
    counter = [0]
    from math import comb

    levels = [
        N for N in cfg.grid_levels
        if comb(N + n_coords - 1, n_coords - 1) * 2 ** (n_coords - 1)
        <= cfg.max_lattice
    ]
    extra = getattr(f, "extra_starts", None)
    extra_done = False
    for resolution in levels or [cfg.grid_levels[0]]:
        X = octahedral_lattice(n_coords, resolution)
        if batch is not None:
            R = np.asarray(batch(X), dtype=float)
            norms = np.max(np.abs(R), axis=1)
        else:
            norms = np.array([_residual_norm(g(x)) for x in X])
        counter[0] += len(X)
        order = np.argsort(norms, kind="stable")
        # diverse starts: near-optimal basins cluster, keep them apart
        starts = []
        radius = 2.5 / resolution
        for idx in order:
            if len(starts) >= cfg.top_k:
                break
            p = X[int(idx)]
            if all(np.abs(p - q).sum() >= radius for q in starts):
                starts.append(p)
        if best_x is not None:
            starts.insert(0, np.asarray(best_x))
        if extra is not None and not extra_done:
            # privileged map-provided starts: polished unconditionally, since
            # residual ranking can bury thin basins under broad plateaus;
            # capped by their own residual order, not generation order
            pts = np.asarray(extra(resolution), dtype=float)
            extra_done = True
            if pts.size:
                if len(pts) > cfg.max_extra_starts:
                    if batch is not None:
                        extra_norms = np.max(
                            np.abs(np.asarray(batch(pts), dtype=float)), axis=1
                        )
                    else:
                        extra_norms = np.array(
                            [_residual_norm(g(x)) for x in pts]
                        )
                    counter[0] += len(pts)
                    keep = np.argsort(extra_norms, kind="stable")
                    pts = pts[keep[: cfg.max_extra_starts]]
                starts = list(pts) + starts
        for x0 in starts:
            chart = _OctahedralChart(x0)
            fun = lambda u: g(chart.embed(u))
            u, res = _polish(fun, chart.to_chart(x0), 1.0 / resolution, tol,
                             cfg, counter)
            x = chart.embed(u)
            res = _residual_norm(g(x))
            if res < best_overall:
                best_overall, best_x = res, x
            if res <= tol:
                return OctahedralPoint(tuple(best_x))
        if counter[0] > cfg.eval_budget:
            break
    raise NoZeroFound(
        f"no zero within tolerance {tol:.1e}; best residual {best_overall:.3e}",
        best_residual=best_overall,
        details={"best_point": None if best_x is None else tuple(best_x)},
    )


def _canonical_labelings(m, k):
    """Lex-minimal representatives of label vectors under cyclic relabeling."""
    out = []
    for labels in itertools.product(range(k), repeat=m):
        shifts = [tuple((l + a) % k for l in labels) for a in range(k)]
        if labels == min(shifts):
            out.append(labels)
    return out


def join_zero(f, m, k, tol=1e-9, cfg=None, output_shift=None, audit=True):
    """Zero of a Z_k-equivariant map on the join [k]^{*m}.

    ``f(barycentric, labels)`` returns a residual vector; equivariance under
    the cyclic relabeling is spot-checked through ``output_shift`` (the action
    of the relabeling generator on residuals).  Labelings are enumerated up to
    cyclic symmetry; for each, the map restricted to the barycentric simplex
    is searched by lattice + polish.  The first labeling (in the deterministic
    candidate order) reaching ``tol`` wins.
    """
    cfg = cfg or SolverConfig()
    if k < 2:
        raise ValueError("need at least two thieves")
    if audit:
        audit_join_equivariance(f, m, k, output_shift, cfg)

    labelings = _canonical_labelings(m, k)
    feasible = getattr(f, "labeling_feasible", None)
    if feasible is not None:
        labelings = [L for L in labelings if feasible(L)]
        if not labelings:
            raise ValueError("no feasible labeling for this map")
    batch = getattr(f, "batch", None)
    tensor_fn = getattr(f, "part_mass_tensor", None)
    counter = [0]
    best_overall = np.inf
    best_carry = None  # (residual, labeling index, bary) carried across levels
    chart = _SimplexChart(m)
    from math import comb

    levels = [N for N in cfg.grid_levels
              if comb(N + m - 1, m - 1) <= cfg.max_lattice]
    prev_norms = None  # per-labeling best norm at the previous level
    for resolution in levels or [cfg.grid_levels[0]]:
        B = simplex_lattice(m, resolution)
        large_lattice = len(B) * len(labelings) > 4_000_000
        if prev_norms is None or not large_lattice or (
                len(labelings) <= cfg.labeling_beam):
            active = list(range(len(labelings)))
        else:
            # beam: when the full lattice x labelings product is too big,
            # only labelings that looked promising at coarser levels advance
            active = sorted(range(len(labelings)),
                            key=lambda li: prev_norms[li])[: cfg.labeling_beam]
            if best_carry is not None and best_carry[1] not in active:
                active.append(best_carry[1])
        level_norms = {}
        if tensor_fn is not None:
            T = np.asarray(tensor_fn(B), dtype=float)
            G, t_dim, _ = T.shape
            Tflat = T.reshape(G * t_dim, m)
            inv_k = 1.0 / k
        candidates = []
        for li in active:
            labels = labelings[li]
            if tensor_fn is not None:
                onehot = np.zeros((m, k))
                onehot[np.arange(m), np.asarray(labels)] = 1.0
                shares = (Tflat @ onehot).reshape(G, t_dim, k)
                norms = np.max(np.abs(shares - inv_k), axis=(1, 2))
            elif batch is not None:
                R = np.asarray(batch(B, labels), dtype=float)
                norms = np.max(np.abs(R), axis=1)
            else:
                norms = np.array(
                    [_residual_norm(np.asarray(f(b, labels)).ravel()) for b in B]
                )
            counter[0] += len(B)
            level_norms[li] = float(np.min(norms))
            # diverse starts per labeling: the lowest residuals cluster in a
            # single basin, so accept starts only if far from those already
            # taken (several near-optimal basins can share grid-limited
            # residuals while only one contains the zero)
            order_local = np.argsort(norms, kind="stable")
            taken = []
            radius = 2.5 / resolution
            for idx in order_local:
                if len(taken) >= cfg.starts_per_labeling:
                    break
                p = B[int(idx)]
                if all(np.abs(p - q).sum() >= radius for q in taken):
                    taken.append(p)
                    candidates.append((float(norms[idx]), li, p))
            if norms[order_local[0]] < best_overall:
                best_overall = float(norms[order_local[0]])
        candidates.sort(key=lambda c: (c[0], c[1]))
        if best_carry is not None:
            candidates = [best_carry] + candidates

        def make_fun(labels):
            return lambda u: np.asarray(
                f(chart.embed(u), labels), dtype=float
            ).ravel()

        # probe phase: a few Gauss-Newton steps re-rank many candidates
        # cheaply, surfacing labelings whose coarse best hides a deep basin
        probed = []
        for coarse, li, start in candidates[: cfg.probe_k]:
            fun = make_fun(labelings[li])
            u, res = _gauss_newton(fun, chart.to_chart(np.asarray(start)),
                                   tol, cfg, counter,
                                   max_iters=cfg.probe_iterations)
            if res <= tol:
                bary = chart.embed(u)
                if res < best_overall:
                    best_overall = res
                return JoinPoint(tuple(bary), tuple(labelings[li]))
            probed.append((res, li, chart.embed(u)))
            if res < best_overall:
                best_overall = res
                best_carry = (res, li, chart.embed(u))
        probed.sort(key=lambda c: (c[0], c[1]))
        for coarse, li, start in probed[: cfg.top_k]:
            labels = labelings[li]
            fun = make_fun(labels)
            u, res = _polish(fun, chart.to_chart(np.asarray(start)),
                             1.0 / resolution, tol, cfg, counter)
            bary = chart.embed(u)
            res = _residual_norm(fun(u))
            if res < best_overall:
                best_overall = res
                best_carry = (res, li, bary)
            if res <= tol:
                return JoinPoint(tuple(bary), tuple(labels))
        if prev_norms is None:
            prev_norms = level_norms
        else:
            prev_norms.update(level_norms)
        if counter[0] > cfg.eval_budget:
            break
    raise NoZeroFound(
        f"no join zero within {tol:.1e}; best residual {best_overall:.3e}",
        best_residual=best_overall,
        details={} if best_carry is None else {
            "labels": labelings[best_carry[1]],
            "barycentric": tuple(best_carry[2]),
        },
    )


def audit_factor_flips(f, factor_dims, cfg=None, samples=40):
    """Check that flipping any single sphere factor negates the map."""
    cfg = cfg or SolverConfig()
    sizes = [d + 1 for d in factor_dims]
    g = _as_map(f)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(min(cfg.audit_samples, samples)):
        pieces = []
        for s in sizes:
            v = rng.standard_normal(s)
            pieces.append(v / np.abs(v).sum())
        x = np.concatenate(pieces)
        base = g(x)
        i0 = int(rng.integers(0, len(sizes)))
        start = sum(sizes[:i0])
        y = x.copy()
        y[start:start + sizes[i0]] *= -1
        gap = np.max(np.abs(g(y) + base))
        if gap > cfg.audit_tol:
            raise ContractError(
                f"factor-flip antipodality violated: gap {gap:.3e}"
            )


def product_sphere_zero(f, factor_dims, tol=1e-9, cfg=None, audit=True):
    """Zero of a map on a product of L1 spheres, antipodal in each factor.

    ``f`` takes the concatenated coordinates of all factors (factor i lives on
    S^{factor_dims[i]}, i.e. uses factor_dims[i]+1 coordinates).  Flipping any
    single factor must negate the map; this is audited by sampling.  The
    global flip symmetry is used to halve the first factor's lattice.
    """
    cfg = cfg or SolverConfig()
    sizes = [d + 1 for d in factor_dims]
    g = _as_map(f)

    if audit:
        audit_factor_flips(f, factor_dims, cfg)

    counter = [0]
    best_overall = np.inf
    best_x = None
    for resolution in cfg.grid_levels:
        grids = [
            octahedral_lattice(s, resolution, antipodal_dedup=(i == 0))
            for i, s in enumerate(sizes)
        ]
        combos = itertools.product(*[range(len(gr)) for gr in grids])
        pts = [
            np.concatenate([grids[i][c[i]] for i in range(len(sizes))])
            for c in combos
        ]
        X = np.array(pts)
        norms = np.array([_residual_norm(g(x)) for x in X])
        counter[0] += len(X)
        order = np.argsort(norms, kind="stable")
        for idx in order[: cfg.top_k]:
            x0 = X[idx]
            charts = []
            start = 0
            for s in sizes:
                charts.append(_OctahedralChart(x0[start:start + s]))
                start += s
            chart = _ProductChart(charts)
            u0 = np.concatenate(
                [c.to_chart(x0[sum(sizes[:i]):sum(sizes[:i + 1])])
                 for i, c in enumerate(charts)]
            )
            fun = lambda u: g(chart.embed(u))
            u, res = _polish(fun, u0, 1.0 / resolution, tol, cfg, counter)
            x = chart.embed(u)
            res = _residual_norm(g(x))
            if res < best_overall:
                best_overall, best_x = res, x
            if res <= tol:
                return tuple(best_x)
        if counter[0] > cfg.eval_budget:
            break
    raise NoZeroFound(
        f"no product-sphere zero within {tol:.1e}; best {best_overall:.3e}",
        best_residual=best_overall,
        details={"best_point": None if best_x is None else tuple(best_x)},
    )


def join_point_to_octahedral(p: JoinPoint) -> OctahedralPoint:
    """Identify [2]^{*n} with the L1 sphere: sign = label, magnitude = weight."""
    coords = tuple(
        w if l == 0 else -w for w, l in zip(p.barycentric, p.labels)
    )
    return OctahedralPoint(coords)


def octahedral_to_join_point(x) -> JoinPoint:
    arr = np.asarray(x.coords if isinstance(x, OctahedralPoint) else x, dtype=float)
    bary = tuple(float(abs(c)) for c in arr)
    labels = tuple(0 if c >= 0 else 1 for c in arr)
    return JoinPoint(bary, labels)
