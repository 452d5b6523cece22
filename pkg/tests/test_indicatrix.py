import math

import numpy as np
import pytest

from writhekit.curves import make_circle, make_torus_knot, transformed
from writhekit.indicatrix import (
    IndicatrixError, tangent_indicatrix, pick_anchor, enclosed_area,
    residual_mod2, fuller_check, reports_csv, CSV_HEADER,
)

TWO_PI = 2.0 * math.pi


def test_circle_indicatrix_is_equator(circle512):
    pts = tangent_indicatrix(circle512)
    assert pts.shape == (512, 3)
    assert np.allclose(pts[:, 2], 0.0, atol=1e-15)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)


def test_equator_encloses_hemisphere(circle512):
    area = enclosed_area(tangent_indicatrix(circle512))
    assert area == pytest.approx(TWO_PI, abs=1e-9)


def test_area_winding_multiplicity():
    # the same equator traversed twice accumulates twice the area
    t = TWO_PI * np.arange(256) / 128.0
    double = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)
    single = double[:128]
    a1 = enclosed_area(single, anchor=np.array([0.0, 0.0, 1.0]))
    a2 = enclosed_area(double, anchor=np.array([0.0, 0.0, 1.0]))
    assert a2 == pytest.approx(2.0 * a1, abs=1e-9)
    assert abs(a1) == pytest.approx(TWO_PI, abs=1e-9)


def test_area_sign_flips_with_orientation(circle512):
    pts = tangent_indicatrix(circle512)
    anchor = np.array([0.0, 0.0, 1.0])
    assert enclosed_area(pts[::-1], anchor=anchor) == pytest.approx(
        -enclosed_area(pts, anchor=anchor), abs=1e-12)


def test_enclosed_area_rejects_nonunit():
    pts = np.stack([np.linspace(0.5, 2.0, 8)] * 3, axis=1)
    with pytest.raises(IndicatrixError):
        enclosed_area(pts)


def test_anchor_avoids_path(circle512):
    pts = tangent_indicatrix(circle512)
    p = pick_anchor(pts)
    assert np.linalg.norm(p) == pytest.approx(1.0, abs=1e-12)
    # equator path: the anchor must keep a healthy polar clearance
    assert abs(p[2]) > 0.3


def test_indicatrix_collapses_constant_run(trefoil_rep):
    rep, _ = trefoil_rep
    pts = tangent_indicatrix(rep)
    assert pts.shape[0] < rep.n
    hop = np.linalg.norm(pts - np.roll(pts, 1, axis=0), axis=1)
    assert np.all(hop > 1e-12)


def test_residual_mod2_folds_to_even():
    assert residual_mod2(1.0, 3.0) == pytest.approx(0.0, abs=1e-15)
    assert residual_mod2(0.3, 0.0) == pytest.approx(0.3, abs=1e-15)
    assert residual_mod2(1.9, 0.0) == pytest.approx(0.1, abs=1e-12)
    assert residual_mod2(-0.05, 0.05) == pytest.approx(0.1, abs=1e-12)


def test_fuller_relation_circle(circle512):
    rep = fuller_check(circle512)
    assert rep.writhe == pytest.approx(0.0, abs=1e-12)
    assert rep.fuller_lhs == pytest.approx(1.0, abs=1e-12)
    assert rep.residual_mod2 < 1e-9


def test_fuller_relation_trefoil(trefoil1024):
    rep = fuller_check(trefoil1024)
    assert rep.residual_mod2 < 1e-4
    assert rep.residual_mod2 == pytest.approx(1.927124e-05, abs=1e-8)


def test_fuller_relation_mirror(trefoil1024):
    mirrored = transformed(trefoil1024, np.diag([1.0, 1.0, -1.0]))
    rep = fuller_check(mirrored)
    assert rep.writhe < 0
    assert rep.residual_mod2 < 1e-4


def test_fuller_relation_quadrature_method(trefoil1024):
    rep = fuller_check(trefoil1024, method="quadrature")
    assert rep.residual_mod2 < 1e-2
    with pytest.raises(IndicatrixError):
        fuller_check(trefoil1024, method="midpoint")


def test_fuller_csv(trefoil1024):
    rep = fuller_check(trefoil1024)
    csv = reports_csv([rep])
    lines = csv.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1].startswith("1024,")
