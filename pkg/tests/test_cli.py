import json
import os

import numpy as np
import pytest

from writhekit.cli import main
from writhekit.corpus import make_writhe_varying_family
from writhekit.curves import load_curve, make_torus_knot, save_curve
from writhekit.family import save_family, sphere_space
from writhekit.writhe import writhe_polygonal


@pytest.fixture(scope="module")
def trefoil_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "trefoil.json"
    save_curve(make_torus_knot(2, 3, 2.0, 1.0, 512), path)
    return str(path)


@pytest.fixture(scope="module")
def family_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_fam")
    space = sphere_space(1, resolution=8)
    fam = make_writhe_varying_family(space, 512, 0.8 * np.sin(space.coords[:, 0]))
    return save_family(fam, out)


def test_writhe_command(trefoil_file, capsys):
    assert main(["writhe", "--input", trefoil_file]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "method,N,band,value,oracle_delta"
    assert lines[1].startswith("quadrature,512,2,")
    assert lines[2].startswith("polygonal,512,0,")


def test_writhe_resolution_override(trefoil_file, capsys):
    assert main(["writhe", "--input", trefoil_file, "--n-samples", "256"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("quadrature,256,")


def test_fuller_command(trefoil_file, tmp_path, capsys):
    assert main(["fuller", "--input", trefoil_file, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "residual mod 2" in out
    csv = (tmp_path / "fuller.csv").read_text().splitlines()
    assert csv[0] == "N,writhe,area,fuller_lhs,fuller_rhs,residual_mod2"


def test_fix_writhe_roundtrip(trefoil_file, tmp_path, capsys):
    out = str(tmp_path / "fix")
    assert main(["fix-writhe", "--input", trefoil_file,
                 "--target", "0.0", "--out", out]) == 0
    capsys.readouterr()
    corrected = load_curve(os.path.join(out, "corrected.json"))
    assert abs(writhe_polygonal(corrected).value) < 4e-2 * 8  # N=512 policy
    with open(os.path.join(out, "trace.json")) as f:
        record = json.load(f)
    assert record["config"]["command"] == "fix-writhe"
    assert record["config"]["target"] == 0.0
    assert record["trace"]["helix"]["n"] >= 1
    assert record["trace"]["embedded_after"] is True


def test_fix_writhe_deterministic(trefoil_file, tmp_path, capsys):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    for out in (out1, out2):
        assert main(["fix-writhe", "--input", trefoil_file,
                     "--target", "1.5", "--out", out]) == 0
    capsys.readouterr()
    with open(os.path.join(out1, "corrected.json"), "rb") as f1, \
            open(os.path.join(out2, "corrected.json"), "rb") as f2:
        assert f1.read() == f2.read()
    texts = []
    for out in (out1, out2):
        with open(os.path.join(out, "trace.json")) as f:
            texts.append(f.read().replace(out, "OUT"))
    # the config echoes the out directory; identical otherwise
    assert texts[0] == texts[1]


def test_family_correct_command(family_dir, tmp_path, capsys):
    out = str(tmp_path / "fam_out")
    assert main(["family-correct", "--input", family_dir, "--out", out]) == 0
    text = capsys.readouterr().out
    assert "omega" in text and "n turns" in text
    csv = (tmp_path / "fam_out" / "nodes.csv").read_text().splitlines()
    assert csv[0] == "node_id,dist,wr_raw,wr_tilde,w,wr_final"
    assert len(csv) == 1 + 8
    assert os.path.exists(os.path.join(out, "manifest.json"))


def test_homotopy_sample_command(family_dir, tmp_path, capsys):
    out = str(tmp_path / "hom")
    assert main(["homotopy-sample", "--input", family_dir,
                 "--t", "0.5", "--out", out]) == 0
    text = capsys.readouterr().out
    assert text.startswith("t        = 0.5")
    assert os.path.exists(os.path.join(out, "manifest.json"))


def test_homotopy_rejects_bad_t(family_dir, capsys):
    assert main(["homotopy-sample", "--input", family_dir, "--t", "1.5"]) == 1
    record = json.loads(capsys.readouterr().out)
    assert record["error"] == "FamilyError"


def test_error_record_on_missing_file(capsys):
    assert main(["writhe", "--input", "/nonexistent/curve.json"]) == 1
    record = json.loads(capsys.readouterr().out)
    assert record["command"] == "writhe"
    assert record["error"] in ("FileNotFoundError", "OSError")


def test_error_record_on_unreachable_target(trefoil_file, capsys):
    # scale is fixed at 1 for the CLI; an unreachable target surfaces as a
    # clean DeformError record, not a traceback
    assert main(["fix-writhe", "--input", trefoil_file,
                 "--target", "40.0"]) == 1
    record = json.loads(capsys.readouterr().out)
    assert record["error"] == "DeformError"


def test_refuses_resampling_discrete_run_curve(tmp_path, capsys):
    from writhekit.curves import reparameterize_constant
    rep, _ = reparameterize_constant(make_torus_knot(2, 3, 2.0, 1.0, 512))
    path = tmp_path / "rep.json"
    save_curve(rep, path, analytic=False)
    assert main(["writhe", "--input", str(path), "--n-samples", "256"]) == 1
    record = json.loads(capsys.readouterr().out)
    assert record["error"] == "CurveError"
