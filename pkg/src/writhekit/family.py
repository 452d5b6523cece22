"""Writhe correction across sampled parameter spaces.

A family assigns one closed curve to every node of a sampled parameter
space (a sphere S^n, or a product S^n x I).  correct_family runs the
helix-insertion pipeline at every node with a shared turn count n and a
node-dependent amplitude S(x) = min(3 |x|, 1), |x| being the normalized
geodesic distance from the basepoint, so the basepoint curve is left
untouched while every other node is corrected to the common writhe.
omega_homotopy / phi_homotopy realize the straight-line shrinking of the
construction: helix radius (2t-1) r on t in [1/2, 1], ball radius 2t eps
on t in [0, 1/2).
"""

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import (
    S0_DEFAULT, WIDTH_DEFAULT, ClosedCurve, from_samples, load_curve,
    min_self_distance, reparameterize_constant, save_curve,
)
from .writhe import BAND_DEFAULT, writhe_polygonal, writhe_quadrature
from .deform import (
    DeformError, DeformTrace, helix_params, insert_segment,
    make_splice_context, radial_push, scale_amplitude, splice_assembly,
    tol_writhe,
)

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSpace:
    """Sampled parameter space with basepoint and per-node distance.

    kind is "sphere" or "sphere_cross_interval"; coords holds one row per
    node (angle for S^1, unit vector for S^2, with the interval coordinate
    appended for products); dist is the normalized geodesic distance from
    the basepoint in [0, 1]; edges lists index pairs of adjacent nodes for
    continuity checks.
    """

    kind: str
    dim: int
    coords: np.ndarray
    dist: np.ndarray
    edges: np.ndarray
    basepoint: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("sphere", "sphere_cross_interval"):
            raise FamilyError(f"unknown parameter space kind {self.kind!r}")
        dist = np.asarray(self.dist, dtype=np.float64)
        if dist[self.basepoint] != 0.0:
            raise FamilyError("basepoint must have distance 0")
        if np.any(dist < 0.0) or np.any(dist > 1.0 + 1e-12):
            raise FamilyError("distances must lie in [0, 1]")
        for name in ("coords", "dist"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        edges = np.ascontiguousarray(np.asarray(self.edges, dtype=np.int64).reshape(-1, 2))
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def n_nodes(self):
        return self.coords.shape[0]

    def interval_coord(self, k):
        if self.kind != "sphere_cross_interval":
            raise FamilyError("node has no interval coordinate")
        return float(self.coords[k, -1])


def _icosphere(level):
    t = _GOLDEN
    verts = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=np.float64)
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [v for v in verts]
    for _ in range(level):
        cache = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    edges = sorted({(min(i, j), max(i, j))
                    for f in faces for i, j in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))})
    return np.array(verts), np.array(edges, dtype=np.int64)


def sphere_space(n, resolution=None):
    """Sampled S^n: 2 points (n=0), uniform circle grid (n=1, default 64
    nodes), icosphere (n=2, resolution = subdivision level, default 2 for
    162 nodes).  Node 0 is the basepoint."""
    if n == 0:
        coords = np.array([[1.0], [-1.0]])
        dist = np.array([0.0, 1.0])
        edges = np.empty((0, 2), dtype=np.int64)
        meta = {"resolution": 2}
    elif n == 1:
        k = 64 if resolution is None else int(resolution)
        if k < 4:
            raise FamilyError("need at least 4 nodes on the circle")
        idx = np.arange(k)
        coords = (2.0 * np.pi * idx / k)[:, None]
        dist = 2.0 * np.minimum(idx, k - idx) / k
        edges = np.stack([idx, (idx + 1) % k], axis=1)
        meta = {"resolution": k}
    elif n == 2:
        level = 2 if resolution is None else int(resolution)
        coords, edges = _icosphere(level)
        dist = np.arccos(np.clip(coords @ coords[0], -1.0, 1.0)) / math.pi
        meta = {"resolution": level}
    else:
        raise FamilyError("only S^0, S^1, S^2 grids are provided")
    return ParamSpace("sphere", n, coords, dist, edges, 0, meta)


def product_space(n, resolution=None, steps=32):
    """Sampled S^n x I with `steps` interval levels t = 0 .. 1; distance
    is sqrt(d_sphere^2 + t^2) / sqrt(2).  Basepoint is (sphere basepoint,
    t = 0)."""
    base = sphere_space(n, resolution)
    steps = int(steps)
    if steps < 2:
        raise FamilyError("need at least 2 interval levels")
    t = np.linspace(0.0, 1.0, steps)
    ks = base.n_nodes
    coords = np.concatenate(
        [np.tile(base.coords, (steps, 1)), np.repeat(t, ks)[:, None]], axis=1)
    dist = np.sqrt(np.tile(base.dist, steps) ** 2 + np.repeat(t, ks) ** 2) / math.sqrt(2.0)
    edges = []
    for j in range(steps):
        edges.append(base.edges + j * ks)
        if j + 1 < steps:
            lvl = np.arange(ks)
            edges.append(np.stack([lvl + j * ks, lvl + (j + 1) * ks], axis=1))
    edges = np.concatenate(edges, axis=0) if edges else np.empty((0, 2), dtype=np.int64)
    meta = {"resolution": base.meta["resolution"], "steps": steps}
    return ParamSpace("sphere_cross_interval", n, coords, dist, edges, 0, meta)


def make_space(kind, dim, resolution=None, steps=32):
    if kind == "sphere":
        return sphere_space(dim, resolution)
    if kind == "sphere_cross_interval":
        return product_space(dim, resolution, steps)
    raise FamilyError(f"unknown parameter space kind {kind!r}")


@dataclass(frozen=True)
class CurveFamily:
    """One closed curve per parameter-space node, plus the target writhe
    and per-node correction traces once corrected."""

    space: ParamSpace
    curves: list
    omega: float | None = None
    traces: list | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.curves) != self.space.n_nodes:
            raise FamilyError("one curve per node required")
        if self.traces is not None and len(self.traces) != self.space.n_nodes:
            raise FamilyError("one trace per node required")


def adjacent_deviation(space, curves):
    """Max over grid edges of the max sample-wise distance between the two
    node curves (the sampled continuity modulus of the family)."""
    worst = 0.0
    for a, b in space.edges:
        d = float(np.max(np.linalg.norm(curves[a].samples - curves[b].samples, axis=1)))
        worst = max(worst, d)
    return worst


def _writhe_fn(method, band):
    if method == "polygonal":
        return lambda c: writhe_polygonal(c).value
    if method == "quadrature":
        return lambda c: writhe_quadrature(c, band).value
    raise FamilyError(f"unknown writhe method {method!r}")


def _ensure_constant(curve, s0, width):
    ci = curve.const_interval
    if ci is not None and abs(ci.s0 - s0) < 1e-12 and abs((ci.s2 - ci.s1) - width) < 1e-12:
        return curve, ci
    return reparameterize_constant(curve, s0, width)


def correct_family(family, *, method="quadrature", band=BAND_DEFAULT,
                   s0=S0_DEFAULT, width=WIDTH_DEFAULT, tol=None):
    """Correct every node of a family to the common writhe omega.

    Two-phase: first reparameterize and build the gamma-tilde (pushed +
    segment) curve at every node with a shared ball radius epsilon (the
    smallest per-node default), measuring Wr(tilde); omega is the
    basepoint's value (or the family's preset target, which must agree at
    the basepoint); n is the smallest integer strictly greater than
    max - min of the measured values.  Then insert the per-node helix with
    amplitude S = min(3 dist, 1) and verify writhe, embeddedness, and
    family continuity.

    Returns
    -------
    CurveFamily
        Corrected family with traces; meta records epsilon, n, and the
        input/output continuity moduli.
    """
    wr_of = _writhe_fn(method, band)
    space = family.space
    k_n = space.n_nodes
    if tol is None:
        tol = tol_writhe(family.curves[0].n)

    reps, ctxs, tildes = [], [], []
    eps_candidates = []
    for k in range(k_n):
        rep, interval = _ensure_constant(family.curves[k], s0, width)
        ctx = make_splice_context(rep, interval)
        reps.append((rep, interval))
        ctxs.append(ctx)
        eps_candidates.append(ctx.epsilon)
    eps = min(eps_candidates)
    wr_raw, wr_tilde = np.empty(k_n), np.empty(k_n)
    for k in range(k_n):
        rep, interval = reps[k]
        ctx = replace(ctxs[k], epsilon=eps)
        ctxs[k] = ctx
        pushed = radial_push(rep, ctx, float(space.dist[k]))
        tilde = insert_segment(pushed, ctx, float(space.dist[k]))
        tildes.append(tilde)
        wr_raw[k] = wr_of(family.curves[k])
        wr_tilde[k] = wr_of(tilde)

    omega = family.omega
    if omega is None:
        omega = float(wr_tilde[space.basepoint])
    elif abs(omega - wr_tilde[space.basepoint]) > tol:
        raise FamilyError(
            f"basepoint writhe {wr_tilde[space.basepoint]:.8g} does not meet "
            f"the requested omega {omega:.8g} (basepoint cannot be corrected)")
    spread = float(np.max(wr_tilde) - np.min(wr_tilde))
    n_turns = math.floor(spread) + 1

    out_curves, traces = [], []
    for k in range(k_n):
        w = omega - float(wr_tilde[k])
        if abs(w) >= n_turns:
            raise FamilyError(
                f"shared turn count n={n_turns} failed at node {k}: |w|={abs(w):.6g}")
        s_amp = scale_amplitude(float(space.dist[k]))
        spec = helix_params(w, n_turns, eps, s_amp, span=ctxs[k].span)
        bar = tildes[k] if s_amp == 0.0 else splice_assembly(tildes[k], ctxs[k], spec)
        wr_final = wr_of(bar)
        if abs(wr_final - omega) > tol:
            raise FamilyError(
                f"node {k} missed tolerance: |{wr_final:.8g} - {omega:.8g}| > {tol:.3g}")
        d_after = min_self_distance(bar)
        if d_after <= 0.0:
            raise FamilyError(f"node {k} lost embeddedness")
        out_curves.append(bar)
        traces.append(DeformTrace(
            wr_input=float(wr_raw[k]), wr_tilde=float(wr_tilde[k]), w_applied=w,
            wr_output=wr_final, embedded_before=True, embedded_after=True,
            helix=spec, ctx=ctxs[k], scale=float(space.dist[k]),
            min_dist_output=d_after))

    delta_in = adjacent_deviation(space, family.curves)
    delta_out = adjacent_deviation(space, out_curves)
    if space.edges.shape[0] and delta_out > 3.0 * delta_in + 2.0 * eps:
        raise FamilyError(
            f"output family continuity degraded: {delta_out:.6g} vs input {delta_in:.6g}")
    meta = {"epsilon": eps, "n": n_turns, "delta_in": delta_in, "delta_out": delta_out,
            "method": method}
    return CurveFamily(space, out_curves, omega, traces, meta)


def _rebuild(raw_family, corrected, t, *, check_kind=None):
    if not (0.0 <= t <= 1.0):
        raise FamilyError("homotopy parameter must lie in [0, 1]")
    if corrected.traces is None:
        raise FamilyError("corrected family must carry per-node traces")
    space = corrected.space
    if check_kind is not None and space.kind != check_kind:
        raise FamilyError(f"expected a {check_kind} family")
    if t == 1.0:
        return corrected
    out = []
    for k in range(space.n_nodes):
        tr = corrected.traces[k]
        ctx = tr.ctx
        width = ctx.s2 - ctx.s1
        rep, _ = _ensure_constant(raw_family.curves[k], ctx.s0, width)
        if t == 0.0:
            out.append(rep)
            continue
        if t < 0.5:
            ctx_t = replace(ctx, epsilon=2.0 * t * ctx.epsilon)
            pushed = radial_push(rep, ctx_t, tr.scale)
            out.append(insert_segment(pushed, ctx_t, tr.scale))
            continue
        pushed = radial_push(rep, ctx, tr.scale)
        tilde = insert_segment(pushed, ctx, tr.scale)
        if t == 0.5 or tr.helix.S == 0.0:
            out.append(tilde)
            continue
        spec_t = replace(tr.helix, r=(2.0 * t - 1.0) * tr.helix.r)
        out.append(splice_assembly(tilde, ctx, spec_t))
    return CurveFamily(space, out, corrected.omega, None,
                       {"homotopy_t": float(t), **corrected.meta})


def omega_homotopy(family_raw, family_corrected, t):
    """Family homotopy from the raw reparameterized family (t = 0) through
    the gamma-tilde family (t = 1/2) to the corrected family (t = 1): on
    [1/2, 1] the helix radius is (2t-1) r; on [0, 1/2) the splice ball
    radius is 2t epsilon.  t = 1 returns the corrected family object
    itself (bit-exact)."""
    return _rebuild(family_raw, family_corrected, t)


def phi_homotopy(family_raw, family_corrected, t):
    """omega_homotopy for sphere-cross-interval families."""
    return _rebuild(family_raw, family_corrected, t,
                    check_kind="sphere_cross_interval")


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

CSV_HEADER = "node_id,dist,wr_raw,wr_tilde,w,wr_final"


def family_csv(family):
    if family.traces is None:
        raise FamilyError("family has no traces; run correct_family first")
    rows = [CSV_HEADER]
    for k, tr in enumerate(family.traces):
        rows.append("%d,%.12g,%.12g,%.12g,%.12g,%.12g" % (
            k, family.space.dist[k], tr.wr_input, tr.wr_tilde,
            tr.w_applied, tr.wr_output))
    return "\n".join(rows) + "\n"


def save_family(family, out_dir, prefix="node"):
    """Write a manifest plus one curve file per node into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    space = family.space
    nodes = []
    for k in range(space.n_nodes):
        fname = f"{prefix}_{k:04d}.json"
        save_curve(family.curves[k], os.path.join(out_dir, fname), analytic=False)
        nodes.append({"id": k, "dist": float(space.dist[k]),
                      "coords": [float(c) for c in space.coords[k]],
                      "curve": fname})
    manifest = {
        "kind": space.kind, "dim": space.dim,
        "resolution": space.meta.get("resolution"),
        "steps": space.meta.get("steps"),
        "basepoint": space.basepoint,
        "omega": family.omega,
        "nodes": nodes,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")
    return path


def load_family(manifest_path):
    with open(manifest_path) as f:
        manifest = json.load(f)
    space = make_space(manifest["kind"], manifest["dim"],
                       manifest.get("resolution"), manifest.get("steps") or 32)
    nodes = manifest["nodes"]
    if len(nodes) != space.n_nodes:
        raise FamilyError(
            f"manifest lists {len(nodes)} nodes, grid has {space.n_nodes}")
    for node in nodes:
        if abs(space.dist[node["id"]] - node["dist"]) > 1e-9:
            raise FamilyError(f"node {node['id']} distance mismatch with grid")
    base = os.path.dirname(os.path.abspath(manifest_path))
    curves = [load_curve(os.path.join(base, node["curve"])) for node in nodes]
    return CurveFamily(space, curves, manifest.get("omega"), None,
                       {"manifest": manifest_path})
