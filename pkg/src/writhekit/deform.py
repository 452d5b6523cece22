"""Local writhe correction by helix insertion.

Given a closed curve and a target writhe, a small ball around one curve
point is rebuilt: the curve is reparameterized to sit still on a parameter
interval, the ball contents are pushed radially toward the boundary
sphere, a straight segment bridges the cleared gap, and the segment is
then replaced by an n-turn helix (plus two connector arcs) whose tangent
indicatrix encloses exactly the cap area needed to move the writhe to the
target.  Everything outside the ball is untouched, sample for sample.

All shapes are built in a chart centered at the splice point with the
z-axis along the curve tangent there, then rotated and translated into
place.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curves import (
    G_ADJ, S0_DEFAULT, WIDTH_DEFAULT,
    ClosedCurve, circ_param_dist, fillet_joins, from_samples,
    interval_index_range, min_self_distance, reparameterize_constant,
)
from .writhe import BAND_DEFAULT, writhe_polygonal, writhe_quadrature
from . import indicatrix as _ind

TOL_WRITHE_REF = 1e-2  # at the reference resolution below
N_REF = 4096


class DeformError(ValueError):
    pass


def tol_writhe(n_samples):
    """Writhe tolerance policy: 1e-2 at N = 4096, halving as N doubles."""
    return TOL_WRITHE_REF * N_REF / n_samples


def scale_amplitude(scale):
    """Splice amplitude S = min(3*scale, 1) for a distance-like scale in
    [0, 1]; the amplitude reaches 1 at scale 1/3 and stays clamped."""
    return min(3.0 * scale, 1.0)


@dataclass(frozen=True)
class SpliceContext:
    """Geometry of one splice site.

    s1 < s3 < s4 < s2 bracket the constant interval [s1, s2] centered at
    s0 with s3, s4 at the inner quarter points.  epsilon is the working
    ball radius around center = gamma(s0); tangent is the unit curve
    tangent there; rotation is a proper rotation taking (0,0,1) to
    tangent (the chart map is p -> rotation @ p + center).
    """

    s0: float
    s1: float
    s2: float
    s3: float
    s4: float
    epsilon: float
    center: np.ndarray
    tangent: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        if not (self.s1 < self.s3 < self.s4 < self.s2):
            raise DeformError("need s1 < s3 < s4 < s2")
        if not (self.epsilon > 0):
            raise DeformError("epsilon must be positive")
        rot = np.asarray(self.rotation, dtype=np.float64)
        if np.max(np.abs(rot @ rot.T - np.eye(3))) > 1e-12 or abs(np.linalg.det(rot) - 1.0) > 1e-12:
            raise DeformError("rotation must be proper orthogonal to 1e-12")
        if abs(np.linalg.norm(np.asarray(self.tangent)) - 1.0) > 1e-9:
            raise DeformError("tangent must be a unit vector")
        for name in ("center", "tangent", "rotation"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def span(self):
        return self.s4 - self.s3

    def to_chart(self, points):
        return (np.asarray(points) - self.center) @ self.rotation

    def from_chart(self, points):
        return np.asarray(points) @ self.rotation.T + self.center


def minimal_rotation_to(direction):
    """Proper rotation taking (0,0,1) to `direction` about the common
    normal; pi about (1,0,0) in the antipodal case."""
    t = np.asarray(direction, dtype=np.float64)
    c = t[2]
    if c < -1.0 + 1e-12:
        return np.diag([1.0, -1.0, -1.0])
    kx, ky = -t[1], t[0]  # (0,0,1) x t
    k = np.array([[0.0, 0.0, ky], [0.0, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + k + (k @ k) / (1.0 + c)


def make_splice_context(curve, interval, epsilon=None):
    """Build the SpliceContext for a curve constant on `interval`.

    epsilon defaults to one quarter of the distance from the splice center
    to the samples whose parameter distance from s0 exceeds the interval
    width, which keeps the ball clear of all but the local strands.
    """
    if curve.const_interval is None:
        raise DeformError("curve must be reparameterized constant first")
    i1, i2 = interval_index_range(interval, curve.n)
    if i2 < i1:
        raise DeformError("constant interval contains no samples")
    center = curve.samples[i1]
    tangent = curve.tangents[i1]
    width = interval.s2 - interval.s1
    far = circ_param_dist(curve.params, interval.s0) > width
    if not np.any(far):
        raise DeformError("no samples outside the splice neighborhood")
    d_far = float(np.min(np.linalg.norm(curve.samples[far] - center, axis=1)))
    if d_far <= 0:
        raise DeformError("curve returns to the splice center: not embedded")
    if epsilon is None:
        epsilon = d_far / 4.0
    elif not (0 < epsilon < d_far / 2.0):
        raise DeformError(f"epsilon must lie in (0, {d_far / 2.0:.6g})")
    q = (interval.s2 - interval.s1) / 4.0
    return SpliceContext(
        s0=interval.s0, s1=interval.s1, s2=interval.s2,
        s3=interval.s1 + q, s4=interval.s2 - q,
        epsilon=float(epsilon), center=center, tangent=tangent,
        rotation=minimal_rotation_to(tangent),
    )


@dataclass(frozen=True)
class HelixSpec:
    """Helix parameters for a writhe deficit w spread over n turns at
    splice amplitude S inside a ball of radius epsilon: angular rate C,
    radius r, pitch parameter p (vertical climb per turn), and the
    parameter span s4 - s3 the turns occupy."""

    n: int
    w: float
    S: float
    epsilon: float
    C: float
    r: float
    p: float
    span: float

    @property
    def sin_psi(self):
        """Sine of the pitch angle psi, tan psi = p / (2 pi r)."""
        if self.r == 0.0:
            return 1.0
        return math.sin(math.atan(self.p / (2.0 * math.pi * self.r)))

    @property
    def climb_rate(self):
        """dz/ds along the helix."""
        return self.p * self.n / self.span

    @property
    def turn_ball_radius(self):
        """Radius of the ball containing any single turn (centered at the
        turn's vertical midpoint on the axis)."""
        return math.sqrt(self.r ** 2 + (self.p / 2.0) ** 2)


def helix_params(w, n, epsilon, S, span=WIDTH_DEFAULT / 2.0):
    """Helix achieving writhe correction w with n turns.

    The radius and pitch are chosen so the tangent indicatrix winds n
    times around a cap of area 2 pi |w| / n (pitch angle psi with
    sin psi = 1 - |w|/n), and each turn fits in a ball of radius
    S * epsilon / (2n).

    Parameters
    ----------
    w : float
        Writhe deficit, |w| < n.
    n : int
        Turn count, >= 1.
    epsilon : float
        Splice ball radius.
    S : float
        Splice amplitude in [0, 1].
    span : float
        Parameter length s4 - s3 the helix occupies.

    Returns
    -------
    HelixSpec
    """
    n = int(n)
    if n < 1:
        raise DeformError("n must be a positive integer")
    if abs(w) >= n:
        raise DeformError(f"need |w| < n, got |w|={abs(w)} with n={n}")
    if not (epsilon > 0 and span > 0):
        raise DeformError("epsilon and span must be positive")
    if not (0.0 <= S <= 1.0):
        raise DeformError("S must lie in [0, 1]")
    wa = abs(w) / n
    C = -np.sign(w) * 2.0 * math.pi * n / span
    r = S * (epsilon / (4.0 * math.pi * n)) * math.sqrt(2.0 * wa - wa * wa)
    p = S * (epsilon / (2.0 * n)) * (1.0 - wa)
    return HelixSpec(n=n, w=float(w), S=float(S), epsilon=float(epsilon),
                     C=float(C), r=float(r), p=float(p), span=float(span))


@dataclass(frozen=True)
class DeformTrace:
    """Record of one correction: measured writhes, the deficit actually
    applied, embeddedness flags, and the geometry used."""

    wr_input: float
    wr_tilde: float
    w_applied: float
    wr_output: float
    embedded_before: bool
    embedded_after: bool
    helix: HelixSpec
    ctx: SpliceContext
    scale: float
    min_dist_output: float

    def to_json_dict(self):
        h = self.helix
        return {
            "wr_input": self.wr_input, "wr_tilde": self.wr_tilde,
            "w_applied": self.w_applied, "wr_output": self.wr_output,
            "embedded_before": self.embedded_before,
            "embedded_after": self.embedded_after,
            "min_dist_output": self.min_dist_output,
            "scale": self.scale,
            "helix": {"n": h.n, "w": h.w, "S": h.S, "epsilon": h.epsilon,
                      "C": h.C, "r": h.r, "p": h.p, "span": h.span},
        }


# ---------------------------------------------------------------------------
# pipeline stages
# ---------------------------------------------------------------------------

def radial_push(curve, ctx, scale=1.0):
    """Push the ball contents toward the boundary sphere.

    In chart coordinates each sample with 0 < |z| < epsilon moves to
    [(1 - 3m/2)|z| + (3m/2) epsilon] * z/|z| with m = min(scale, 1/3), so
    the cleared gap sphere has radius min(3*scale, 1) * epsilon / 2.
    Samples with |z| >= epsilon keep their exact bits; constant-interval
    samples (at the center) are left for insert_segment to replace.
    scale = 0 is the identity.
    """
    if scale < 0:
        raise DeformError("scale must be nonnegative")
    if curve.const_interval is None:
        raise DeformError("curve must be constant on the splice interval")
    m = min(scale, 1.0 / 3.0)
    f = 1.5 * m
    if f == 0.0:
        return curve
    i1, i2 = interval_index_range(curve.const_interval, curve.n)
    idx = np.arange(curve.n)
    in_run = ((idx - i1) % curve.n) <= ((i2 - i1) % curve.n)
    z = curve.samples - ctx.center
    d = np.linalg.norm(z, axis=1)
    if np.any((d == 0.0) & ~in_run):
        raise DeformError("sample at the splice center outside the constant interval")
    move = (d < ctx.epsilon) & ~in_run & (d > 0.0)
    out = curve.samples.copy()
    out[move] = ctx.center + ((1.0 - f) * d[move, None] + f * ctx.epsilon) \
        * z[move] / d[move, None]
    return from_samples(out, meta={"kind": "derived", "op": "radial_push",
                                   "scale": float(scale), "from": curve.meta},
                        const_interval=curve.const_interval)


def insert_segment(curve, ctx, scale=1.0):
    """Replace the constant run by a straight segment spanning the cleared
    gap sphere: from -(S eps/2) T(s0) to +(S eps/2) T(s0) across [s1, s2],
    with S = min(3*scale, 1).  Joins are filleted to C1.  scale = 0 leaves
    the curve unchanged.
    """
    S = scale_amplitude(scale)
    half = S * ctx.epsilon / 2.0
    if half == 0.0:
        return curve
    if curve.const_interval is None:
        raise DeformError("curve must be constant on the splice interval")
    n = curve.n
    i1, i2 = interval_index_range(curve.const_interval, n)
    if i2 < i1 + 1:
        raise DeformError("constant interval too short to hold the segment")
    s = np.arange(i1, i2 + 1) / n
    frac = (s - ctx.s0) / ((ctx.s2 - ctx.s1) / 2.0)
    pts = curve.samples.copy()
    pts[i1:i2 + 1] = ctx.center + (half * frac)[:, None] * ctx.tangent
    pts = fillet_joins(pts, (i1, i2))
    return from_samples(pts, meta={"kind": "derived", "op": "insert_segment",
                                   "scale": float(scale), "from": curve.meta})


def _smoothstep(u):
    return u * u * (3.0 - 2.0 * u)


def _smootherstep(u):
    return u * u * u * (u * (6.0 * u - 15.0) + 10.0)


def _eval_helix(spec, ctx, s):
    # same point set as the analytic helix, but the parameter-to-phase
    # map is a quintic ease: the azimuth is frozen to second order at
    # both ends, so the tangent stencils across the junctions stay in a
    # single vertical plane no matter how fast the helix winds
    s = np.asarray(s, dtype=np.float64)
    u = (s - ctx.s3) / (ctx.s4 - ctx.s3)
    g = _smootherstep(u)
    phase = spec.C * (ctx.s3 + (ctx.s4 - ctx.s3) * g)
    z = spec.p * spec.n * (g - 0.5)
    return np.stack([spec.r * np.cos(phase), spec.r * np.sin(phase), z], axis=-1)


def _eval_iota(spec, ctx, s):
    # lead-in from the south pole (0,0,-S eps/2) to the helix start: a
    # planar arc in the vertical half-plane at the helix start azimuth,
    # radius r * smoothstep(u) (flat at both ends), z linear with slope
    # (S eps - p n)/2 > 0.  Vertical tangents at both ends; all tangent
    # directions, including the junction turns, live on one meridian of
    # the indicatrix sphere through the pole anchor, which encloses no
    # area at any pitch.
    s = np.asarray(s, dtype=np.float64)
    u = (s - ctx.s1) / (ctx.s3 - ctx.s1)
    rho = spec.r * _smoothstep(u)
    phase = spec.C * ctx.s3
    z0 = -spec.S * spec.epsilon / 2.0
    z1 = -spec.p * spec.n / 2.0
    z = z0 + (z1 - z0) * u
    return np.stack([rho * np.cos(phase), rho * np.sin(phase), z], axis=-1)


def _eval_xi(spec, ctx, s):
    # exact mirror: xi(s) = reflect_z( iota(s3 - (s - s4)) )
    s = np.asarray(s, dtype=np.float64)
    pts = _eval_iota(spec, ctx, ctx.s3 - (s - ctx.s4))
    pts[..., 2] = -pts[..., 2]
    return pts


def eval_assembly(spec, ctx, s):
    """The inserted assembly eta in chart coordinates: connector iota on
    [s1, s3), helix on [s3, s4], mirrored connector xi on (s4, s2]."""
    s = np.asarray(s, dtype=np.float64)
    out = np.empty(s.shape + (3,))
    m_iota = s < ctx.s3
    m_helix = (s >= ctx.s3) & (s <= ctx.s4)
    m_xi = s > ctx.s4
    out[m_iota] = _eval_iota(spec, ctx, s[m_iota])
    out[m_helix] = _eval_helix(spec, ctx, s[m_helix])
    out[m_xi] = _eval_xi(spec, ctx, s[m_xi])
    return out


def build_connectors(spec, ctx, n_each=65):
    """Sample the two connector arcs: iota over [s1, s3] and its mirror xi
    over [s4, s2].  Returns two (n_each, 3) arrays in chart coordinates."""
    si = np.linspace(ctx.s1, ctx.s3, n_each)
    sx = np.linspace(ctx.s4, ctx.s2, n_each)
    return _eval_iota(spec, ctx, si), _eval_xi(spec, ctx, sx)


def splice_assembly(tilde, ctx, spec):
    """Replace the straight segment of a gamma-tilde curve by the helix
    assembly, rotated and translated into place, with C1 fillets at the
    two splice joins and at the two helix joins.  Verifies containment
    of the assembly in the ball of radius S*epsilon/2."""
    n = tilde.n
    idx = np.arange(n)
    s = idx / n
    sel = (s >= ctx.s1 - 1e-12) & (s <= ctx.s2 + 1e-12)
    if not np.any(sel):
        raise DeformError("no samples on the splice interval")
    chart = eval_assembly(spec, ctx, s[sel])
    radii = np.linalg.norm(chart, axis=1)
    limit = spec.S * ctx.epsilon / 2.0  # the site's ball; spec.epsilon may lie
    if np.any(radii > limit * (1.0 + 1e-9)):
        raise DeformError(
            f"assembly exits its ball: max radius {radii.max():.6g} > {limit:.6g}")
    pts = tilde.samples.copy()
    pts[sel] = ctx.from_chart(chart)
    i1 = int(np.nonzero(sel)[0][0])
    i2 = int(np.nonzero(sel)[0][-1])
    i3 = int(round(ctx.s3 * n))
    i4 = int(round(ctx.s4 * n))
    pts = fillet_joins(pts, (i1, i2, i3, i4))
    return from_samples(pts, meta={"kind": "derived", "op": "splice_assembly",
                                   "from": tilde.meta})


def correct_writhe(curve, target_omega, ctx=None, *, scale=1.0,
                   s0=S0_DEFAULT, width=WIDTH_DEFAULT,
                   method="polygonal", band=BAND_DEFAULT, tol=None):
    """Deform `curve` inside one small ball so its writhe becomes
    target_omega.

    Pipeline: reparameterize constant on [s1, s2] (skipped if already
    done), push the ball contents outward, bridge the gap with a straight
    segment (gamma-tilde), measure w = target - Wr(gamma-tilde), then
    replace the segment with an n-turn helix assembly adding exactly w.

    Parameters
    ----------
    curve : ClosedCurve
        Embedded input curve.
    target_omega : float
        Desired writhe of the output.
    ctx : SpliceContext, optional
        Reuse a precomputed context (family mode); built from the
        reparameterized curve when omitted.
    scale : float
        Distance-like scale in [0, 1]; the splice amplitude is
        min(3*scale, 1).  At scale 0 the curve passes through unchanged
        and the target must already be met.
    method : str
        Writhe evaluator for the internal measurements, "polygonal" or
        "quadrature".
    tol : float, optional
        Acceptance tolerance on |Wr(output) - target|; defaults to the
        resolution policy 1e-2 * 4096 / N.

    Returns
    -------
    (ClosedCurve, DeformTrace)
    """
    wr_of = (lambda c: writhe_polygonal(c).value) if method == "polygonal" \
        else (lambda c: writhe_quadrature(c, band).value)
    d_before = min_self_distance(curve)
    if d_before <= 0.0:
        raise DeformError("input curve is not embedded")
    wr_input = wr_of(curve)

    ci = curve.const_interval
    if ci is not None and abs(ci.s0 - s0) < 1e-12 \
            and abs((ci.s2 - ci.s1) - width) < 1e-12:
        rep, interval = curve, ci
    else:
        rep, interval = reparameterize_constant(curve, s0, width)
    if ctx is None:
        ctx = make_splice_context(rep, interval)

    pushed = radial_push(rep, ctx, scale)
    tilde = insert_segment(pushed, ctx, scale)
    wr_tilde = wr_of(tilde)
    w = target_omega - wr_tilde
    n_turns = math.floor(abs(w)) + 1
    S = scale_amplitude(scale)
    spec = helix_params(w, n_turns, ctx.epsilon, S, span=ctx.span)
    if S == 0.0:
        bar = tilde
    else:
        bar = splice_assembly(tilde, ctx, spec)

    wr_output = wr_of(bar)
    d_after = min_self_distance(bar)
    if d_after <= 0.0:
        raise DeformError(
            f"embeddedness lost: min self distance {d_after:.6g} "
            f"(w={w:.4g}, n={n_turns}, eps={ctx.epsilon:.4g})")
    if tol is None:
        tol = tol_writhe(curve.n)
    if abs(wr_output - target_omega) > tol:
        raise DeformError(
            f"correction missed tolerance: |{wr_output:.8g} - {target_omega:.8g}| "
            f"= {abs(wr_output - target_omega):.3g} > {tol:.3g}")
    trace = DeformTrace(
        wr_input=wr_input, wr_tilde=wr_tilde, w_applied=w, wr_output=wr_output,
        embedded_before=True, embedded_after=True,
        helix=spec, ctx=ctx, scale=float(scale), min_dist_output=d_after,
    )
    return bar, trace


def connector_net_area(curve, ctx, margin=3):
    """Net signed indicatrix area contributed by the two connector arcs of
    a corrected curve: fan-triangle sums (anchored at the splice tangent)
    over the tangent sub-arcs from (s1, s3) and (s4, s2), interior samples
    only.  Each connector is planar in a vertical half-plane, so its
    tangent arc rides a meridian through the anchor and its fan sum is
    zero to roundoff; the mirror symmetry cancels whatever remains."""
    n = curve.n
    t = curve.tangents

    def arc_sum(lo, hi):
        i_lo = int(math.ceil(lo * n)) + margin
        i_hi = int(math.floor(hi * n)) - margin
        if i_hi - i_lo < 2:
            raise DeformError("connector arc has too few interior samples")
        u = t[i_lo:i_hi]
        v = t[i_lo + 1:i_hi + 1]
        p = ctx.tangent
        num = np.cross(u, v) @ p
        den = 1.0 + u @ p + np.einsum("ij,ij->i", u, v) + v @ p
        return float(np.sum(2.0 * np.arctan2(num, den)))

    return _ind.ORIENT * (arc_sum(ctx.s1, ctx.s3) + arc_sum(ctx.s4, ctx.s2))
