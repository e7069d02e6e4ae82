"""Admissibility parity, XOR colourings and chessboard equipartitions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rect_mass
from faircut.chessboard import (
    ChessboardColouring,
    ChessboardSpec,
    admissible,
    colour_of,
    colouring_residuals,
    merge_counts,
    multinomial_parity,
    solve_chessboard,
)
from faircut.errors import NotAdmissible
from faircut.measures import uniform_box


def test_one_one_not_admissible():
    assert admissible((1, 1)) is False


def test_one_two_admissible():
    # C(3;1,2) = 3 odd; binary 01 and 10 disjoint
    assert admissible((1, 2)) is True


def test_single_direction_admissible():
    assert admissible((1,)) is True
    assert admissible((5,)) is True


def test_admissible_agrees_with_parity_small():
    def tuples_up_to(s_max, max_len=4):
        for length in range(1, max_len + 1):
            def rec(prefix, left):
                if len(prefix) == length:
                    yield tuple(prefix)
                    return
                for v in range(1, left + 1):
                    yield from rec(prefix + [v], left - v)
            yield from rec([], s_max)

    for counts in tuples_up_to(12):
        assert admissible(counts) == bool(multinomial_parity(counts))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 15), min_size=1, max_size=4))
def test_admissible_random_vs_comb(counts):
    direct = 1
    total = 0
    for c in counts:
        total += c
        direct *= math.comb(total, c)
    assert admissible(tuple(counts)) == (direct % 2 == 1)


def test_colour_no_offsets_everything_a():
    c = ChessboardColouring(((1.0, 0.0),), ((),), parity=0, dim=2)
    assert colour_of(c, (5.0, -3.0)) == "A"


def test_colour_single_vertical_offset():
    c = ChessboardColouring(((1.0, 0.0),), ((0.0,),), parity=0, dim=2)
    assert colour_of(c, (-1.0, 0.0)) == "A"
    assert colour_of(c, (1.0, 0.0)) == "B"
    assert colour_of(c, (0.0, 7.0)) == "boundary"


def test_colour_quadrant_chessboard():
    c = ChessboardColouring(
        ((1.0, 0.0), (0.0, 1.0)), ((0.0,), (0.0,)), parity=0, dim=2
    )
    assert colour_of(c, (1.0, 1.0)) == colour_of(c, (-1.0, -1.0))
    assert colour_of(c, (1.0, -1.0)) == colour_of(c, (-1.0, 1.0))
    assert colour_of(c, (1.0, 1.0)) != colour_of(c, (1.0, -1.0))


def test_adjacent_cells_differ():
    c = ChessboardColouring(
        ((1.0, 0.0), (0.0, 1.0)), ((0.3, 0.9), (0.5,)), parity=1, dim=2
    )
    eps = 1e-6
    assert colour_of(c, (0.3 - eps, 0.1)) != colour_of(c, (0.3 + eps, 0.1))
    assert colour_of(c, (0.1, 0.5 - eps)) != colour_of(c, (0.1, 0.5 + eps))


def test_solve_single_count_median(unit_square):
    spec = ChessboardSpec((1,), ((1.0, 0.0),))
    col = solve_chessboard([unit_square], spec, tol=1e-9)
    assert len(col.offsets[0]) <= 1
    assert col.offsets[0][0] == pytest.approx(0.5, abs=1e-8)
    res = colouring_residuals(col, [unit_square])
    assert np.max(np.abs(res)) <= 1e-8


def test_solve_one_two_three_squares():
    m1 = uniform_box((0.0, 0.0), (1.0, 1.0))
    m2 = uniform_box((3.0, 0.5), (4.0, 1.5))
    m3 = uniform_box((0.5, 3.0), (1.5, 4.0))
    spec = ChessboardSpec((1, 2), ((1.0, 0.0), (0.0, 1.0)))
    col = solve_chessboard([m1, m2, m3], spec, tol=1e-7)
    assert len(col.offsets[0]) <= 1
    assert len(col.offsets[1]) <= 2
    res = colouring_residuals(col, [m1, m2, m3])
    assert np.max(np.abs(res)) <= 1e-7
    # independent verification by rectangle masses of the XOR cells
    for m in (m1, m2, m3):
        a_mass = _xor_mass_by_rectangles(m, col)
        assert a_mass == pytest.approx(0.5, abs=1e-7)


def _xor_mass_by_rectangles(measure, col):
    xs = [-100.0] + list(col.offsets[0]) + [100.0]
    ys = [-100.0] + list(col.offsets[1]) + [100.0]
    total = 0.0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            mid = (0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))
            if colour_of(col, mid) == "A":
                total += rect_mass(measure, (xs[i], ys[j]),
                                   (xs[i + 1], ys[j + 1]))
    return total


def test_solve_rejects_inadmissible():
    m1 = uniform_box((0.0, 0.0), (1.0, 1.0))
    m2 = uniform_box((2.0, 2.0), (3.0, 3.0))
    spec = ChessboardSpec((1, 1), ((1.0, 0.0), (0.0, 1.0)))
    with pytest.raises(NotAdmissible):
        solve_chessboard([m1, m2], spec)


def test_merging_delegation():
    # (1,2) admissible and merged (3,) admissible: the merged solve must also
    # succeed on an instance the original solves
    assert merge_counts((1, 2)) == (3,)
    assert admissible((3,))
    m1 = uniform_box((0.0, 0.0), (1.0, 1.0))
    m2 = uniform_box((3.0, 0.5), (4.0, 1.5))
    m3 = uniform_box((0.5, 3.0), (1.5, 4.0))
    spec = ChessboardSpec((3,), ((0.0, 1.0),))
    col = solve_chessboard([m1, m2, m3], spec, tol=1e-7)
    res = colouring_residuals(col, [m1, m2, m3])
    assert np.max(np.abs(res)) <= 1e-7


def test_solve_diagonal_direction(unit_square):
    # non-axis directions go through the general exact path
    v = (1.0 / np.sqrt(2), 1.0 / np.sqrt(2))
    spec = ChessboardSpec((1,), (v,))
    col = solve_chessboard([unit_square], spec, tol=1e-7)
    res = colouring_residuals(col, [unit_square])
    assert np.max(np.abs(res)) <= 1e-7
