"""Grid + Lipschitz certificates for the negative claims."""

import numpy as np
import pytest

from faircut.counterexamples import (
    collinear_box_measures,
    diagonal_segment_measures,
    find_halving_orthant,
    one_one_residual_at,
    polish_one_one,
    refute_one_one,
    refute_orthant,
    scan_one_one,
)
from faircut.errors import CertificateFailed


def test_one_one_certificate_default():
    cert = refute_one_one()
    assert cert.delta > 0
    assert cert.lipschitz * cert.grid_step < cert.delta / 2
    assert cert.validated
    d = cert.to_json()
    assert d["claim"] == "one-one" and d["delta"] == cert.delta


def test_one_one_zero_translation_fails():
    with pytest.raises(CertificateFailed):
        refute_one_one(translation=0.0)


def test_one_one_identical_measures_fail():
    m1, _ = diagonal_segment_measures()
    with pytest.raises(CertificateFailed):
        refute_one_one(measures=(m1, m1))


def test_single_measure_locus_has_zero():
    # one diagonal measure alone is halvable by a corner on its locus
    m1, _ = diagonal_segment_measures()
    witness, res = scan_one_one([m1])
    assert res <= 5e-3
    _, polished = polish_one_one([m1], witness)
    assert polished <= 1e-6


def test_one_one_certificate_consistent_with_pointwise():
    cert = refute_one_one(validate=False)
    m1, m2 = diagonal_segment_measures()
    rng = np.random.default_rng(12)
    for _ in range(200):
        a = rng.uniform(-0.2, 1.2)
        b = rng.uniform(-0.2, 1.2)
        assert one_one_residual_at([m1, m2], a, b) >= cert.delta


def test_orthant_certificate_d2():
    cert = refute_orthant(d=2)
    assert cert.delta > 0
    assert cert.lipschitz * cert.grid_step < cert.delta / 2
    assert cert.validated
    # structural part: some box is always uncut, so the grid min is 1/2
    assert cert.grid_min == pytest.approx(0.5, abs=1e-12)


def test_orthant_two_measures_finds_halving():
    measures = collinear_box_measures(d=2)[:2]
    with pytest.raises(CertificateFailed):
        refute_orthant(d=2, measures=measures)
    corner, pattern, res = find_halving_orthant(measures)
    assert res <= 1e-6


def test_orthant_overlapping_radius_fails():
    # heavily overlapping boxes are nearly identical, so some orthant comes
    # close to halving all three and the margin sinks below the slack
    with pytest.raises(CertificateFailed):
        refute_orthant(d=2, radius=8.0, step=2e-2)


def test_orthant_d3_coarse():
    cert = refute_orthant(d=3, step=4e-3, radius=0.05)
    assert cert.delta > 0
    assert cert.grid_min == pytest.approx(0.5, abs=1e-12)
