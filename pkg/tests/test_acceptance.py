"""Acceptance suite: one test per criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
Independent verification paths (conftest oracles, Pascal parity, Monte
Carlo) are used wherever a solver claim is checked.
"""

import itertools
import json
import time

import numpy as np

import faircut.busolver as bu
import faircut.chessboard as cb
import faircut.necklace1d as nk
import faircut.nested as ns
import faircut.stairpath as sp
import faircut.voronoifair as vf
from conftest import necklace_shares, random_measures_1d, random_measures_2d
from faircut.cli_io import run as cli_run
from faircut.counterexamples import (
    collinear_box_measures,
    find_halving_orthant,
    refute_one_one,
    refute_orthant,
)
from faircut.measures import uniform_box
from faircut.oracle import oracle_necklace


def _report(criterion, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


# ---------------------------------------------------------------------------
# 1. Necklace cut bound


def test_criterion_1_necklace_cut_bound():
    rng = np.random.default_rng(20260808)
    combos = [(t, k) for t in (1, 2, 3) for k in (2, 3, 4, 6)]
    t0 = time.monotonic()
    worst_share = 0.0
    for i in range(50):
        t, k = combos[i % len(combos)]
        measures = random_measures_1d(rng, t)
        solver = (nk.split_prime if len(nk.prime_factors(k)) == 1
                  else nk.split_composite)
        split = solver(measures, k, tol=1e-7)
        assert split.n_cuts <= t * (k - 1), (i, t, k, split.n_cuts)
        shares = necklace_shares(measures, split.cuts, split.labels, k)
        err = float(np.max(np.abs(shares - 1.0 / k)))
        worst_share = max(worst_share, err)
        assert err <= 1e-6, (i, t, k, err)
    elapsed = time.monotonic() - t0
    _report(1, elapsed <= 60.0,
            f"50 instances, cuts <= t(k-1), worst share error "
            f"{worst_share:.2e} <= 1e-6, runtime {elapsed:.1f}s <= 60s")


# ---------------------------------------------------------------------------
# 2. Discrete oracle equivalence


def _canonical_beads(seq):
    """Representative under bead-type renaming and reversal."""
    best = None
    for cand in (seq, seq[::-1]):
        mapping = {}
        out = []
        for ch in cand:
            if ch not in mapping:
                mapping[ch] = len(mapping)
            out.append(mapping[ch])
        key = tuple(out)
        if best is None or key < best:
            best = key
    return best


def _valid_strings(max_len=12, max_types=3, k=2):
    for t in range(1, max_types + 1):
        for length in range(t, max_len + 1):
            for seq in itertools.product(range(t), repeat=length):
                counts = [0] * t
                for ch in seq:
                    counts[ch] += 1
                if 0 in counts:
                    continue  # fewer than t types actually present
                if any(c % k for c in counts):
                    continue
                yield seq, t


def test_criterion_2_discrete_oracle_equivalence():
    t0 = time.monotonic()
    cache = {}
    n_strings = 0
    n_classes = 0
    n_spot = 0
    for seq, t in _valid_strings():
        n_strings += 1
        canon = _canonical_beads(seq)
        hit = cache.get(canon)
        if hit is None:
            beads = nk.BeadString(tuple("abc"[c] for c in canon))
            split = nk.discrete_split(beads, 2)
            report = oracle_necklace(beads, 2)
            assert report.feasible
            assert report.best_objective <= t * (2 - 1), (seq, report)
            assert split.n_cuts == report.best_objective, (seq, split, report)
            assert nk.verify_bead_split(beads, split)
            hit = split.n_cuts
            cache[canon] = hit
            n_classes += 1
        if n_strings % 97 == 0:
            # invariance spot check: solve the raw string directly
            beads = nk.BeadString(tuple("abc"[c] for c in seq))
            direct = nk.discrete_split(beads, 2)
            assert direct.n_cuts == hit, (seq, direct.n_cuts, hit)
            assert nk.verify_bead_split(beads, direct)
            n_spot += 1
    elapsed = time.monotonic() - t0
    _report(2, n_strings > 100_000 and n_classes > 5_000,
            f"{n_strings} strings ({n_classes} canonical classes, "
            f"{n_spot} direct spot checks), solver == oracle minimum "
            f"<= t(k-1) everywhere, {elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 3. Stair paths


def _independent_path_masses(partition, measures):
    """Strip-overlap mass computation kept separate from the package path."""
    bounds = [-np.inf] + list(partition.y_breaks) + [np.inf]
    out = []
    for m in measures:
        total = 0.0
        for (lox, loy), (hix, hiy), w in m.atoms:
            for i, strip in enumerate(partition.strips):
                y0, y1 = bounds[i], bounds[i + 1]
                overlap = min(y1, hiy) - max(y0, loy)
                if overlap <= 0:
                    continue
                frac_y = overlap / (hiy - loy)
                if strip[0] == "full":
                    if strip[1] == "A":
                        total += w * frac_y
                else:
                    cut, a_left = strip[1], strip[2]
                    left = min(max((cut - lox) / (hix - lox), 0.0), 1.0)
                    total += w * frac_y * (left if a_left else 1.0 - left)
        out.append(total)
    return np.array(out)


def test_criterion_3_stair_paths():
    rng = np.random.default_rng(31)
    worst = 0.0
    for i in range(25):
        t = (1, 2, 3, 4)[i % 4]
        measures = random_measures_2d(rng, t)
        path = sp.halve_with_path(measures, tol=1e-7)
        assert path.turns <= t - 1, (i, t, path.turns)
        vs = [s for s in path.segments if s.kind == "V"]
        ys = [s.lo for s in vs]
        assert ys == sorted(ys), "path is not y-monotone"
        assert all(s.kind in ("V", "H") for s in path.segments)
        masses = _independent_path_masses(path.partition, measures)
        err = float(np.max(np.abs(masses - 0.5)))
        worst = max(worst, err)
        assert err <= 1e-6, (i, t, err)
    # closed-form offset-squares instance
    m1 = uniform_box((0.0, 0.0), (1.0, 1.0))
    m2 = uniform_box((2.0, 1.0), (3.0, 2.0))
    path = sp.halve_with_path([m1, m2], tol=1e-12)
    verts = [s for s in path.segments if s.kind == "V" and s.length > 0]
    cut = verts[0].fixed
    ybreak = path.partition.y_breaks[0]
    closed_form = (abs(cut - 0.5) <= 1e-9 and abs(ybreak - 1.5) <= 1e-9) or (
        abs(cut - 2.5) <= 1e-9 and abs(ybreak - 0.5) <= 1e-9)
    _report(3, closed_form,
            f"25 instances y-monotone with <= t-1 turns, worst residual "
            f"{worst:.2e} <= 1e-6; offset-squares closed form within 1e-9")


# ---------------------------------------------------------------------------
# 4. Nested partitions


def test_criterion_4_nested_partitions():
    rng = np.random.default_rng(41)
    worst = 0.0
    for t in (1, 2):
        for k in (2, 3):
            for d in (1, 2):
                n = t * (k - 1)
                scheme = ns.SchemeTree.random(n, d, rng)
                measures = (random_measures_1d(rng, t) if d == 1
                            else random_measures_2d(rng, t))
                part = ns.solve_nested(measures, scheme, k, tol=1e-7)
                regions = ns.parts(part)
                assert len(regions) == n + 1, (t, k, d)
                shares = ns.partition_shares(part, measures, k)
                err = float(np.max(np.abs(shares - 1.0 / k)))
                worst = max(worst, err)
                assert err <= 1e-6, (t, k, d, err)
    # d=1 chain scheme agrees with the necklace solver
    measures = random_measures_1d(rng, 2)
    chain = ns.SchemeTree.chain([(1.0,)] * 2)
    part = ns.solve_nested(measures, chain, 2, tol=1e-7)
    shares_nested = ns.partition_shares(part, measures, 2)
    split = nk.split_prime(measures, 2, tol=1e-7)
    gap = float(np.max(np.abs(
        np.sort(shares_nested, axis=1) - np.sort(np.asarray(split.shares),
                                                 axis=1))))
    assert gap <= 2e-6, gap
    # composite path: t=1, k=4 uses exactly t(ml-1) = 3 cuts
    m = uniform_box((0.0, 0.0), (1.0, 1.0))
    comp = ns.solve_nested_composite([m], [(1.0, 0.0)] * 3, 4, tol=1e-7)
    offsets = sorted(
        off
        for prt in [comp.outer] + [c.outer for c in comp.children]
        for _, off in ns.finite_hyperplanes(prt)
    )
    assert comp.n_hyperplanes == 3
    assert np.allclose(offsets, [0.25, 0.5, 0.75], atol=1e-6)
    _report(4, True,
            f"all (t,k,d) combos: n+1 parts, worst share error {worst:.2e} "
            f"<= 1e-6; d=1 chain matches necklace within 2e-6 (gap "
            f"{gap:.2e}); composite k=4 used exactly 3 cuts")


# ---------------------------------------------------------------------------
# 5. Chessboard admissibility and solve


def _pascal_parity_table(n_max):
    table = [[0] * (n_max + 1) for _ in range(n_max + 1)]
    table[0][0] = 1
    for n in range(1, n_max + 1):
        table[n][0] = 1
        for k in range(1, n + 1):
            table[n][k] = (table[n - 1][k - 1] + table[n - 1][k]) % 2
    return table


def test_criterion_5_chessboard():
    table = _pascal_parity_table(20)
    t0 = time.monotonic()
    n_checked = 0
    stack = [((), 0, 1)]
    while stack:
        prefix, s, parity = stack.pop()
        for v in range(1, 20 - s + 1):
            tup = prefix + (v,)
            p = parity & table[s + v][v]
            assert cb.admissible(tup) == bool(p), tup
            n_checked += 1
            stack.append((tup, s + v, p))
    elapsed = time.monotonic() - t0
    assert n_checked == 2 ** 20 - 1
    assert elapsed < 5.0, f"exhaustive check took {elapsed:.2f}s"
    assert cb.admissible((1, 1)) is False
    assert cb.admissible((1, 2)) is True
    m1 = uniform_box((0.0, 0.0), (1.0, 1.0))
    m2 = uniform_box((3.0, 0.5), (4.0, 1.5))
    m3 = uniform_box((0.5, 3.0), (1.5, 4.0))
    spec = cb.ChessboardSpec((1, 2), ((1.0, 0.0), (0.0, 1.0)))
    colouring = cb.solve_chessboard([m1, m2, m3], spec, tol=1e-7)
    res = cb.colouring_residuals(colouring, [m1, m2, m3])
    err = float(np.max(np.abs(res)))
    _report(5, err <= 1e-6,
            f"{n_checked} tuples agree with Pascal parity in {elapsed:.2f}s "
            f"< 5s; (1,1) false, (1,2) true; three-squares solve residual "
            f"{err:.2e} <= 1e-6")


# ---------------------------------------------------------------------------
# 6. Negative certificates


def test_criterion_6_negative_certificates():
    t0 = time.monotonic()
    cert1 = refute_one_one(step=1e-3)
    t1 = time.monotonic() - t0
    assert cert1.delta > 0
    assert cert1.lipschitz * cert1.grid_step < cert1.delta / 2
    assert cert1.validated
    assert t1 <= 120.0
    t0 = time.monotonic()
    cert2 = refute_orthant(d=2, step=1e-3)
    t2 = time.monotonic() - t0
    assert cert2.delta > 0
    assert cert2.lipschitz * cert2.grid_step < cert2.delta / 2
    assert cert2.validated
    assert t2 <= 120.0
    two = collinear_box_measures(d=2)[:2]
    corner, pattern, res = find_halving_orthant(two)
    _report(6, res <= 1e-6,
            f"one-one delta {cert1.delta:.3e} ({t1:.1f}s), orthant delta "
            f"{cert2.delta:.3e} ({t2:.1f}s), slack satisfied at step 1e-3; "
            f"two-measure sanity found halving orthant residual {res:.1e}")


# ---------------------------------------------------------------------------
# 7. Voronoi unification


def test_criterion_7_voronoi():
    rng = np.random.default_rng(71)
    # 1-D linear functions reproduce necklace shares
    measures = random_measures_1d(rng, 2)
    fns = vf.LinearFunctions(((0.0,), (1.0,), (2.0,)))
    fair = vf.solve_fair(fns, measures, 2, tol=1e-6)
    split = nk.split_prime(measures, 2, tol=1e-6)
    gap = float(np.max(np.abs(
        np.sort(fair.shares, axis=1) - np.sort(np.asarray(split.shares),
                                               axis=1))))
    assert gap <= 2e-6, gap
    # triangle conical instance with Monte Carlo mass verification
    tri = vf.SimplexFunctions(((0.0, 0.0), (3.0, 0.0), (0.0, 3.0)))
    m1 = uniform_box((0.2, 0.2), (0.8, 0.8))
    m2 = uniform_box((1.2, 0.3), (1.8, 0.9))
    fair_tri = vf.solve_fair(tri, [m1, m2], 2, tol=1e-6)
    assert abs(fair_tri.capacities.sum() - 1.0) <= 1e-9
    mc_rng = np.random.default_rng(777)
    labels = np.asarray(fair_tri.labels)
    worst_mc = 0.0
    for m in (m1, m2):
        pts = vf._sample_measure(m, 4_000_000, mc_rng)
        idx = vf._cell_assignment(tri, fair_tri.weights, pts)
        for thief in (0, 1):
            share = float(np.mean(labels[idx] == thief))
            worst_mc = max(worst_mc, abs(share - 0.5))
    assert worst_mc <= 1e-3, worst_mc
    # pairwise cell overlaps carry no mass (exact clipping)
    mu = vf.default_reference(tri)
    for i in range(3):
        for j in range(i + 1, 3):
            inter = fair_tri.regions[i].intersect(fair_tri.regions[j])
            assert mu.mass_of_region(inter) <= 1e-9
    # capacity round trip on 10 random instances
    worst_rt = 0.0
    for i in range(10):
        n = int(rng.integers(2, 5))
        slopes = np.sort(rng.normal(size=n) * 2)
        while np.min(np.diff(slopes)) < 1e-3:
            slopes = np.sort(rng.normal(size=n) * 2)
        fns_i = vf.LinearFunctions(tuple((float(s),) for s in slopes))
        mu_i = uniform_box((-1.0,), (1.0,))
        target = rng.dirichlet(np.ones(n))
        if i % 3 == 0 and n > 2:
            target[0] = 0.0
            target /= target.sum()
        c = vf.weights_from_capacities(fns_i, target, mu_i, tol=1e-8)
        w_back = vf.capacities(fns_i, c, mu_i)
        worst_rt = max(worst_rt, float(np.max(np.abs(w_back - target))))
    _report(7, worst_rt <= 1e-6,
            f"necklace share gap {gap:.2e} <= 2e-6; triangle MC shares "
            f"within {worst_mc:.2e} <= 1e-3 with disjoint cover; capacity "
            f"round-trip worst {worst_rt:.2e} <= 1e-6 on 10 instances")


# ---------------------------------------------------------------------------
# 8. Engine contracts


def test_criterion_8_engine_contracts(tmp_path, capsys, monkeypatch):
    cfg = bu.SolverConfig()
    # necklace join map
    m1d = random_measures_1d(np.random.default_rng(81), 2)
    neck = nk._NecklaceMap(m1d, 2)
    bu.audit_join_equivariance(neck, neck.m, 2, neck.shift, cfg)
    # stairpath antipodal map
    m2d = random_measures_2d(np.random.default_rng(82), 2)
    window = sp.Window.around(m2d)
    stair = sp._StairMap(m2d, sp.CutVector.ones_zero(1), window)
    bu.audit_antipodal(stair, 3, cfg)
    # nested join map
    scheme = ns.SchemeTree.chain([(1.0, 0.0), (0.0, 1.0)])
    bounds = ns._default_bounds(m2d)
    ref = ns._default_ref(m2d, bounds)
    nested_map = ns._NestedMap(m2d, scheme, 2, ref, bounds)
    bu.audit_join_equivariance(nested_map, nested_map.m, 2, nested_map.shift,
                               cfg)
    # chessboard product map
    m3 = [uniform_box((0.0, 0.0), (1.0, 1.0)),
          uniform_box((3.0, 0.5), (4.0, 1.5)),
          uniform_box((0.5, 3.0), (1.5, 4.0))]
    lo = np.array([-0.5, -0.5])
    hi = np.array([4.5, 4.5])
    from faircut.measures import average_measure

    ref_cb = average_measure(m3, floor=0.25, bounds=(lo, hi))
    factors = [cb._Factor((1.0, 0.0), 1, ref_cb, (lo, hi), 2),
               cb._Factor((0.0, 1.0), 2, ref_cb, (lo, hi), 2)]
    board = cb._ChessboardMap(m3, factors)
    bu.audit_factor_flips(board, (1, 2), cfg)
    # voronoi join map
    fns = vf.LinearFunctions(((0.0,), (1.0,), (2.0,)))
    mu = vf.default_reference(fns, m1d)
    vmap = vf._VoronoiMap(fns, m1d, mu, 2, inner_tol=1e-10)
    bu.audit_join_equivariance(vmap, 3, 2, vmap.shift, cfg)

    # determinism: identical seeds give byte-identical JSON and SVG
    measures_file = tmp_path / "m.json"
    measures_file.write_text(json.dumps({"measures": [
        {"dim": 2, "kind": "boxes",
         "atoms": [{"box": [[0, 1], [0, 1]], "weight": 1.0}]},
        {"dim": 2, "kind": "boxes",
         "atoms": [{"box": [[2, 3], [1, 2]], "weight": 1.0}]},
    ]}))
    outputs = []
    for name in ("a", "b"):
        d = tmp_path / name
        d.mkdir()
        monkeypatch.chdir(d)
        code = cli_run(["stairpath", "--measures", str(measures_file),
                        "--svg", "out.svg", "--seed", "3"])
        assert code == 0
        outputs.append(capsys.readouterr().out)
    svg_a = (tmp_path / "a" / "out.svg").read_bytes()
    svg_b = (tmp_path / "b" / "out.svg").read_bytes()
    _report(8, outputs[0] == outputs[1] and svg_a == svg_b,
            "antipodality/equivariance audits pass on all five solver maps; "
            "repeated runs byte-identical (JSON and SVG)")
