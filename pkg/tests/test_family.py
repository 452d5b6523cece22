import numpy as np
import pytest

from writhekit.corpus import make_writhe_varying_family
from writhekit.curves import reparameterize_constant
from writhekit.deform import tol_writhe
from writhekit.family import (
    FamilyError, ParamSpace, CurveFamily, sphere_space, product_space,
    make_space, adjacent_deviation, correct_family, omega_homotopy,
    phi_homotopy, family_csv, save_family, load_family, CSV_HEADER,
)


@pytest.fixture(scope="module")
def small_family():
    space = sphere_space(1, resolution=8)
    weights = 1.0 * np.sin(space.coords[:, 0])
    return space, make_writhe_varying_family(space, 512, weights)


@pytest.fixture(scope="module")
def corrected(small_family):
    space, fam = small_family
    return fam, correct_family(fam, method="polygonal", tol=10.0 * tol_writhe(512))


def test_sphere_space_s0():
    s = sphere_space(0)
    assert s.n_nodes == 2
    assert s.dist.tolist() == [0.0, 1.0]
    assert s.edges.shape == (0, 2)


def test_sphere_space_s1():
    s = sphere_space(1, resolution=8)
    assert s.n_nodes == 8
    assert s.dist[0] == 0.0
    assert s.dist.max() == pytest.approx(1.0)
    assert s.edges.shape == (8, 2)
    # antipode sits at normalized distance 1
    assert s.dist[4] == pytest.approx(1.0)


def test_sphere_space_s2():
    s = sphere_space(2, resolution=1)
    assert s.n_nodes == 42
    assert np.allclose(np.linalg.norm(s.coords, axis=1), 1.0, atol=1e-12)
    assert s.dist[0] == 0.0 and s.dist.max() <= 1.0 + 1e-12


def test_product_space():
    s = product_space(0, steps=5)
    assert s.kind == "sphere_cross_interval"
    assert s.n_nodes == 10
    assert s.interval_coord(0) == 0.0
    assert s.interval_coord(s.n_nodes - 1) == 1.0
    with pytest.raises(FamilyError):
        sphere_space(1, resolution=8).interval_coord(0)


def test_make_space_dispatch():
    assert make_space("sphere", 1, 8).n_nodes == 8
    with pytest.raises(FamilyError):
        make_space("torus", 1)
    with pytest.raises(FamilyError):
        sphere_space(3)


def test_param_space_validation():
    with pytest.raises(FamilyError):
        ParamSpace("sphere", 1, np.zeros((3, 1)), np.array([0.5, 0.0, 0.5]),
                   np.empty((0, 2)))


def test_family_node_count_checked():
    space = sphere_space(1, resolution=8)
    with pytest.raises(FamilyError):
        CurveFamily(space, [])


def test_varying_family_shape(small_family):
    space, fam = small_family
    assert len(fam.curves) == 8
    assert fam.curves[0].n == 512
    assert adjacent_deviation(space, fam.curves) > 0.0
    # basepoint keeps weight zero
    with pytest.raises(FamilyError):
        make_writhe_varying_family(space, 512, np.ones(8))


def test_correct_family_constancy(corrected):
    raw, fixed = corrected
    assert fixed.omega is not None
    outs = np.array([tr.wr_output for tr in fixed.traces])
    assert np.max(np.abs(outs - fixed.omega)) <= 10.0 * tol_writhe(512)
    n = fixed.meta["n"]
    ws = np.array([tr.w_applied for tr in fixed.traces])
    assert np.max(np.abs(ws)) < n
    assert fixed.traces[raw.space.basepoint].w_applied == pytest.approx(0.0, abs=1e-12)
    assert set(fixed.meta) >= {"epsilon", "n", "delta_in", "delta_out", "method"}


def test_correct_family_shares_epsilon(corrected):
    _, fixed = corrected
    eps = {tr.ctx.epsilon for tr in fixed.traces}
    assert len(eps) == 1
    assert eps.pop() == pytest.approx(fixed.meta["epsilon"])


def test_omega_homotopy_endpoints(corrected):
    raw, fixed = corrected
    assert omega_homotopy(raw, fixed, 1.0) is fixed
    at0 = omega_homotopy(raw, fixed, 0.0)
    rep0, _ = reparameterize_constant(raw.curves[0])
    assert np.array_equal(at0.curves[0].samples, rep0.samples)
    with pytest.raises(FamilyError):
        omega_homotopy(raw, fixed, 1.5)


def test_omega_homotopy_midpoint_is_tilde(corrected):
    raw, fixed = corrected
    mid = omega_homotopy(raw, fixed, 0.5)
    # at t = 1/2 the helix radius is zero: straight-segment family
    for k in (0, 3):
        tr = fixed.traces[k]
        chart = tr.ctx.to_chart(mid.curves[k].samples)
        s = np.arange(mid.curves[k].n) / mid.curves[k].n
        core = (s > tr.ctx.s1 + 0.02) & (s < tr.ctx.s2 - 0.02)
        assert np.max(np.abs(chart[core, :2])) < 1e-9


def test_phi_homotopy_requires_product(corrected):
    raw, fixed = corrected
    with pytest.raises(FamilyError):
        phi_homotopy(raw, fixed, 0.5)


def test_family_csv(corrected):
    raw, fixed = corrected
    csv = family_csv(fixed)
    lines = csv.splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + fixed.space.n_nodes
    with pytest.raises(FamilyError):
        family_csv(raw)


def test_save_load_roundtrip(tmp_path, corrected):
    _, fixed = corrected
    manifest = save_family(fixed, tmp_path / "fam")
    back = load_family(manifest)
    assert back.space.n_nodes == fixed.space.n_nodes
    assert back.omega == pytest.approx(fixed.omega)
    for k in range(fixed.space.n_nodes):
        assert np.array_equal(back.curves[k].samples, fixed.curves[k].samples)
