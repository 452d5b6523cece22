"""End-to-end checks at reference scale (N=4096, 100 trials, seed 20260815).

One shared full run feeds the eight checks below, one per advertised
guarantee.  Each test prints its report block; the detail lines also appear
in the assertion message when a criterion fails.  Budget about three
minutes for the shared run.
"""

import pytest

from writhekit import corpus

N_FULL = 4096


@pytest.fixture(scope="module")
def results():
    out = corpus.run_all(n_samples=N_FULL, trials=100, seed=corpus.DEFAULT_SEED,
                         family_nodes=64, homotopy_nodes=16)
    print()
    print(corpus.format_report(out, N_FULL, corpus.DEFAULT_SEED))
    return {r["criterion"]: r for r in out}


def _check(results, idx):
    r = results[idx]
    detail = "\n".join(r["lines"])
    print("\ncriterion %d (%s): %s\n%s"
          % (idx, r["name"], "PASS" if r["ok"] else "FAIL", detail))
    assert r["ok"], "criterion %d (%s) failed:\n%s" % (idx, r["name"], detail)


def test_criterion_1_oracle_equivalence(results):
    # |quadrature - polygonal| < 1e-3 on the seven-curve corpus, under 60 s
    _check(results, 1)


def test_criterion_2_fuller_mod2_residual(results):
    # residual of 1 + Wr = A / 2 pi (mod 2) below 1e-2 on corpus and outputs
    _check(results, 2)


def test_criterion_3_randomized_writhe_fixing(results):
    # 100 random (curve, target) pairs: |Wr(out) - target| < 1e-2 by the
    # polygonal oracle, embeddedness kept, far samples bit-identical
    _check(results, 3)


def test_criterion_4_helix_pitch_and_containment(results):
    # 1000 parameter draws: pitch identity to 1e-12, turns inside their ball
    _check(results, 4)


def test_criterion_5_connector_cancellation(results):
    # net indicatrix area of the two connectors below 1e-6 per correction
    _check(results, 5)


def test_criterion_6_family_writhe_constancy(results):
    # 64-node circle family with unit writhe swing flattened to within 1e-2
    _check(results, 6)


def test_criterion_7_homotopy_endpoints_and_sweep(results):
    # t=1 bit-exact, t=1/2 matches the pushed family, jumps < 0.2 at dt=0.05
    _check(results, 7)


def test_criterion_8_oracle_delta_convergence(results):
    # quadrature-vs-polygonal deltas shrink along N = 256 ... 4096
    _check(results, 8)
