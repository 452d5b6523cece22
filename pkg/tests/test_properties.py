"""Invariants checked over randomized inputs rather than worked examples."""

import json
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from writhekit.curves import (
    curve_from_dict,
    curve_to_dict,
    make_perturbed_circle,
    make_torus_knot,
    transformed,
)
from writhekit.deform import (
    helix_params,
    minimal_rotation_to,
    scale_amplitude,
    tol_writhe,
)
from writhekit.indicatrix import enclosed_area, residual_mod2
from writhekit.writhe import writhe_polygonal

finite = st.floats(allow_nan=False, allow_infinity=False)
unit_box = st.floats(min_value=-1.0, max_value=1.0)


def _quat_matrix(q):
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


@pytest.fixture(scope="module")
def trefoil():
    return make_torus_knot(2, 3, 2.0, 1.0, 256)


@pytest.fixture(scope="module")
def trefoil_writhe(trefoil):
    return writhe_polygonal(trefoil).value


@settings(max_examples=25, deadline=None)
@given(q=st.tuples(unit_box, unit_box, unit_box, unit_box),
       shift=st.tuples(unit_box, unit_box, unit_box),
       scale=st.floats(min_value=0.05, max_value=20.0))
def test_writhe_invariant_under_similarity(trefoil, trefoil_writhe, q, shift, scale):
    q = np.asarray(q)
    assume(np.linalg.norm(q) > 1e-2)
    moved = transformed(trefoil, scale * _quat_matrix(q), 3.0 * np.asarray(shift))
    assert writhe_polygonal(moved).value == pytest.approx(trefoil_writhe, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(q=st.tuples(unit_box, unit_box, unit_box, unit_box))
def test_writhe_negates_under_reflection(trefoil, trefoil_writhe, q):
    # conjugating the mirror by any rotation is still orientation reversing
    q = np.asarray(q)
    assume(np.linalg.norm(q) > 1e-2)
    rot = _quat_matrix(q)
    mirror = rot @ np.diag([1.0, 1.0, -1.0]) @ rot.T
    assert writhe_polygonal(transformed(trefoil, mirror)).value == \
        pytest.approx(-trefoil_writhe, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(n=st.integers(min_value=1, max_value=12),
       frac=st.floats(min_value=-0.999, max_value=0.999),
       eps=st.floats(min_value=1e-3, max_value=10.0),
       s_amp=st.floats(min_value=1e-3, max_value=1.0))
def test_helix_pitch_identity(n, frac, eps, s_amp):
    w = frac * n
    spec = helix_params(w, n, eps, s_amp)
    assert abs(spec.sin_psi - (1.0 - abs(w) / n)) <= 1e-12
    # the n turns exactly fill the cleared height
    assert spec.p * spec.n == pytest.approx(spec.climb_rate * spec.span, rel=1e-12)
    assert abs(spec.p) * n <= s_amp * eps * (1.0 + 1e-12)
    assert spec.turn_ball_radius <= s_amp * eps / (2.0 * n) * (1.0 + 1e-12)


@settings(max_examples=50, deadline=None)
@given(k=st.integers(min_value=1, max_value=6),
       m=st.integers(min_value=64, max_value=257),
       phase=st.floats(min_value=0.0, max_value=6.28))
def test_enclosed_area_counts_equator_multiplicity(k, m, phase):
    t = phase + 2.0 * math.pi * k * np.arange(m) / m
    loop = np.stack([np.cos(t), np.sin(t), np.zeros(m)], axis=-1)
    area = enclosed_area(loop, anchor=np.array([0.0, 0.0, 1.0]))
    assert area == pytest.approx(-2.0 * math.pi * k, abs=1e-9 * k)
    assert enclosed_area(loop[::-1], anchor=np.array([0.0, 0.0, 1.0])) == \
        pytest.approx(2.0 * math.pi * k, abs=1e-9 * k)


@settings(max_examples=300, deadline=None)
@given(lhs=st.floats(min_value=-50, max_value=50),
       rhs=st.floats(min_value=-50, max_value=50),
       shift=st.integers(min_value=-5, max_value=5))
def test_residual_mod2_is_a_distance_mod_2(lhs, rhs, shift):
    res = residual_mod2(lhs, rhs)
    assert 0.0 <= res <= 1.0
    assert residual_mod2(lhs, lhs) == 0.0
    assert residual_mod2(rhs, lhs) == pytest.approx(res, abs=1e-9)
    assert residual_mod2(lhs + 2.0 * shift, rhs) == pytest.approx(res, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(min_value=64, max_value=100000))
def test_tolerance_budget_scales_inversely_with_resolution(n):
    assert tol_writhe(n) * n == pytest.approx(1e-2 * 4096, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(s=st.floats(min_value=0.0, max_value=1.0),
       t=st.floats(min_value=0.0, max_value=1.0))
def test_scale_amplitude_clamped_and_monotone(s, t):
    a, b = scale_amplitude(s), scale_amplitude(t)
    assert 0.0 <= a <= 1.0
    assert a == min(3.0 * s, 1.0)
    if s <= t:
        assert a <= b


@settings(max_examples=200, deadline=None)
@given(v=st.tuples(unit_box, unit_box, unit_box))
def test_minimal_rotation_is_proper_and_hits_target(v):
    v = np.asarray(v)
    assume(np.linalg.norm(v) > 1e-2)
    v = v / np.linalg.norm(v)
    assume(v[2] > -0.999)  # the antipodal branch has its own worked test
    rot = minimal_rotation_to(v)
    assert np.allclose(rot @ rot.T, np.eye(3), atol=1e-9)
    assert np.linalg.det(rot) == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(rot @ np.array([0.0, 0.0, 1.0]), v, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(variant=st.integers(min_value=0, max_value=2),
       n=st.sampled_from([128, 192, 256]),
       analytic=st.booleans())
def test_serialization_roundtrip_is_bitwise(variant, n, analytic):
    curve = make_perturbed_circle(variant, n)
    blob = json.dumps(curve_to_dict(curve, analytic=analytic))
    back = curve_from_dict(json.loads(blob))
    assert back.n == curve.n
    assert np.array_equal(back.samples, curve.samples)
