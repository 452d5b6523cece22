"""Closed space curves as dense uniform samplings.

A curve is stored as N samples gamma(i/N) on the circle [0,1] with wrap-around
indexing, plus unit tangents.  Constructors for analytic test curves, smooth
reparameterization with a constant sub-interval, discrete embeddedness
certificates, and a JSON file format live here.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

# adjacency guard for the discrete embeddedness certificate
G_ADJ = 2

# defaults for the constant sub-interval used by the splice pipeline
S0_DEFAULT = 0.5
WIDTH_DEFAULT = 0.25

_MIN_SAMPLES = 16


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class ConstantInterval:
    """Parameter interval [s1, s2] on which a curve is constant, with the
    distinguished interior parameter s0 it collapses to."""

    s1: float
    s2: float
    s0: float

    def __post_init__(self):
        if not (0.0 < self.s1 < self.s0 < self.s2 < 1.0):
            raise CurveError(
                "constant interval needs 0 < s1 < s0 < s2 < 1, got "
                f"({self.s1}, {self.s0}, {self.s2})"
            )


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Closed curve sampled at gamma(i/N), i = 0..N-1, with unit tangents.

    samples and tangents are (N, 3) float arrays; index arithmetic is mod N.
    const_interval, when set, declares the sub-interval on which the curve is
    constant by construction (tangents there repeat the through-going image
    tangent).  meta records the construction recipe.
    """

    samples: np.ndarray
    tangents: np.ndarray
    meta: dict = field(default_factory=dict)
    const_interval: ConstantInterval | None = None

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[1] != 3:
            raise CurveError(f"samples must be (N, 3), got {samples.shape}")
        if samples.shape[0] < _MIN_SAMPLES:
            raise CurveError(f"need at least {_MIN_SAMPLES} samples, got {samples.shape[0]}")
        if not np.all(np.isfinite(samples)):
            raise CurveError("samples contain non-finite values")
        tangents = np.ascontiguousarray(self.tangents, dtype=np.float64)
        if tangents.shape != samples.shape:
            raise CurveError("tangents must match samples shape")
        norms = np.linalg.norm(tangents, axis=1)
        if not np.all(np.abs(norms - 1.0) < 1e-9):
            raise CurveError("tangents must be unit vectors")
        samples.setflags(write=False)
        tangents.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "tangents", tangents)

    @property
    def n(self):
        return self.samples.shape[0]

    @property
    def params(self):
        return np.arange(self.n) / self.n


def circ_param_dist(s, t):
    """Circular distance on [0,1] between parameters s and t."""
    d = np.abs(np.asarray(s) - np.asarray(t)) % 1.0
    return np.minimum(d, 1.0 - d)


def central_velocities(samples):
    """Parameter derivatives gamma'(i/N) by central differences, exact to
    O(1/N^2) for smooth curves; zero on interior of constant runs."""
    n = samples.shape[0]
    return (np.roll(samples, -1, axis=0) - np.roll(samples, 1, axis=0)) * (n / 2.0)


def unit_tangents(samples, const_interval=None):
    """Unit tangents from central differences.

    Inside a declared constant interval the velocity vanishes; those samples
    get the through-going image tangent (direction from the sample before the
    run to the sample after it).  A vanishing velocity anywhere else raises.
    """
    n = samples.shape[0]
    vel = central_velocities(samples)
    speed = np.linalg.norm(vel, axis=1)
    scale = float(np.max(speed))
    if scale == 0.0:
        raise CurveError("curve is a single point")
    small = speed < 1e-12 * scale
    tangents = np.empty_like(samples)
    tangents[~small] = vel[~small] / speed[~small, None]
    if np.any(small):
        if const_interval is None:
            raise CurveError("vanishing tangent outside any declared constant interval")
        i1, i2 = interval_index_range(const_interval, n)
        idx = np.nonzero(small)[0]
        inside = ((idx - i1) % n) <= ((i2 - i1) % n)
        if not np.all(inside):
            raise CurveError("vanishing tangent outside the declared constant interval")
        before = samples[(i1 - 1) % n]
        after = samples[(i2 + 1) % n]
        through = after - before
        tn = np.linalg.norm(through)
        if tn == 0.0:
            raise CurveError("degenerate constant interval: no through direction")
        tangents[idx] = through / tn
    return tangents


def interval_index_range(interval, n):
    """First and last sample index with parameter in [s1, s2]."""
    i1 = int(math.ceil(interval.s1 * n - 1e-9))
    i2 = int(math.floor(interval.s2 * n + 1e-9))
    return i1, i2


def from_samples(samples, meta=None, const_interval=None, tangents=None):
    """Build a ClosedCurve from raw positions, deriving tangents if needed."""
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    if tangents is None:
        tangents = unit_tangents(samples, const_interval)
    return ClosedCurve(samples, tangents, dict(meta or {}), const_interval)


# ---------------------------------------------------------------------------
# analytic constructors
# ---------------------------------------------------------------------------

def make_circle(radius=1.0, n_samples=512):
    """Planar circle of given radius in the x1-x2 plane.

    Parameters
    ----------
    radius : float
        Circle radius, > 0.
    n_samples : int
        Number of samples N, at least 16.
    """
    if n_samples < _MIN_SAMPLES:
        raise CurveError(f"n_samples must be >= {_MIN_SAMPLES}")
    if radius <= 0:
        raise CurveError("radius must be positive")
    t = 2.0 * np.pi * np.arange(n_samples) / n_samples
    samples = np.stack([radius * np.cos(t), radius * np.sin(t), np.zeros_like(t)], axis=1)
    tangents = np.stack([-np.sin(t), np.cos(t), np.zeros_like(t)], axis=1)
    meta = {"kind": "analytic", "name": "circle", "radius": float(radius), "N": int(n_samples)}
    return ClosedCurve(samples, tangents, meta)


def make_torus_knot(p, q, R, r, n_samples):
    """Standard (p, q) torus knot on the torus with radii R > r > 0.

    The curve winds p times around the torus axis and q times around the
    tube.  Requires gcd(p, q) = 1 and n_samples >= 64 * max(p, q).
    """
    p, q = int(p), int(q)
    if p < 1 or q < 1:
        raise CurveError("p and q must be positive integers")
    if math.gcd(p, q) != 1:
        raise CurveError(f"({p},{q}) is not a knot: gcd must be 1")
    if not (R > r > 0):
        raise CurveError("need R > r > 0 for an embedded torus knot")
    if n_samples < 64 * max(p, q):
        raise CurveError(f"n_samples must be >= 64*max(p,q) = {64 * max(p, q)}")
    t = 2.0 * np.pi * np.arange(n_samples) / n_samples
    cq, sq = np.cos(q * t), np.sin(q * t)
    cp, sp = np.cos(p * t), np.sin(p * t)
    rad = R + r * cq
    samples = np.stack([rad * cp, rad * sp, r * sq], axis=1)
    vel = np.stack(
        [
            -q * r * sq * cp - p * rad * sp,
            -q * r * sq * sp + p * rad * cp,
            q * r * cq,
        ],
        axis=1,
    )
    tangents = vel / np.linalg.norm(vel, axis=1)[:, None]
    meta = {
        "kind": "analytic", "name": "torus_knot",
        "p": p, "q": q, "R": float(R), "r": float(r), "N": int(n_samples),
    }
    return ClosedCurve(samples, tangents, meta)


# fixed presets for mildly non-planar circles (small radial and vertical waves)
_PERTURBED_PRESETS = {
    0: dict(a=0.10, b=0.15, m=3, k=2, phi1=0.7, phi2=1.3),
    1: dict(a=0.07, b=0.22, m=5, k=3, phi1=2.1, phi2=0.4),
    2: dict(a=0.12, b=0.18, m=4, k=5, phi1=4.0, phi2=2.6),
}


def make_perturbed_circle(variant=0, n_samples=512):
    """Unit circle with a small fixed smooth 3D perturbation.

    Three deterministic presets (variant 0, 1, 2) give embedded near-planar
    curves with small nonzero writhe.
    """
    if variant not in _PERTURBED_PRESETS:
        raise CurveError(f"unknown perturbed-circle variant {variant}")
    if n_samples < _MIN_SAMPLES:
        raise CurveError(f"n_samples must be >= {_MIN_SAMPLES}")
    c = _PERTURBED_PRESETS[variant]
    a, b, m, k = c["a"], c["b"], c["m"], c["k"]
    t = 2.0 * np.pi * np.arange(n_samples) / n_samples
    rad = 1.0 + a * np.cos(m * t + c["phi1"])
    z = b * np.sin(k * t + c["phi2"])
    samples = np.stack([rad * np.cos(t), rad * np.sin(t), z], axis=1)
    drad = -a * m * np.sin(m * t + c["phi1"])
    vel = np.stack(
        [
            drad * np.cos(t) - rad * np.sin(t),
            drad * np.sin(t) + rad * np.cos(t),
            b * k * np.cos(k * t + c["phi2"]),
        ],
        axis=1,
    )
    tangents = vel / np.linalg.norm(vel, axis=1)[:, None]
    meta = {
        "kind": "analytic", "name": "perturbed_circle",
        "variant": int(variant), "N": int(n_samples),
    }
    return ClosedCurve(samples, tangents, meta)


# ---------------------------------------------------------------------------
# resampling and reparameterization
# ---------------------------------------------------------------------------

def interp_periodic(samples, u):
    """Evaluate the closed polygon through `samples` at parameters u in [0,1)
    by periodic linear interpolation (points stay on the polygon)."""
    n = samples.shape[0]
    x = (np.asarray(u, dtype=np.float64) % 1.0) * n
    i0 = np.floor(x).astype(np.int64) % n
    frac = x - np.floor(x)
    i1 = (i0 + 1) % n
    return samples[i0] * (1.0 - frac)[:, None] + samples[i1] * frac[:, None]


def resample(curve, n_samples, param_map=None):
    """Resample a curve at n_samples uniform parameters, optionally through a
    monotone parameter map u = param_map(s) (used for speed-profile tests)."""
    s = np.arange(n_samples) / n_samples
    u = param_map(s) if param_map is not None else s
    pts = interp_periodic(curve.samples, u)
    return from_samples(pts, meta={"kind": "derived", "op": "resample", "from": curve.meta})


def reparameterize_constant(curve, s0=S0_DEFAULT, width=WIDTH_DEFAULT):
    """Reparameterize so the curve is constant on [s0 - width/2, s0 + width/2].

    The image is unchanged (samples stay on the original polygon); outside the
    constant interval the parameter is rescaled by a smooth bump profile whose
    speed vanishes at the interval ends, so the result is C1 with a genuinely
    constant run.

    Returns
    -------
    (ClosedCurve, ConstantInterval)
    """
    if not (0.0 < s0 < 1.0):
        raise CurveError("s0 must avoid the wrap point: need 0 < s0 < 1")
    if not (0.0 < width <= 0.25):
        raise CurveError("width must lie in (0, 1/4]")
    s1, s2 = s0 - width / 2.0, s0 + width / 2.0
    if not (0.0 < s1 and s2 < 1.0):
        raise CurveError("constant interval must not touch the wrap point")
    interval = ConstantInterval(s1=s1, s2=s2, s0=s0)

    n = curve.n
    s = np.arange(n) / n
    u = np.empty(n)
    in_run = (s >= s1 - 1e-12) & (s <= s2 + 1e-12)
    u[in_run] = s0
    # complement [s2, 1 + s1] -> [s0, 1 + s0], smooth with zero end speeds:
    # F(x) = x - sin(2 pi x) / (2 pi), F'(0) = F'(1) = 0
    comp = ~in_run
    x = ((s[comp] - s2) % 1.0) / (1.0 - width)
    u[comp] = (s0 + x - np.sin(2.0 * np.pi * x) / (2.0 * np.pi)) % 1.0
    pts = interp_periodic(curve.samples, u)

    i1, i2 = interval_index_range(interval, n)
    pts[i1:i2 + 1] = pts[i1]  # exact constancy on the run
    out = from_samples(
        pts,
        meta={"kind": "derived", "op": "reparameterize_constant", "from": curve.meta},
        const_interval=interval,
    )
    return out, interval


# ---------------------------------------------------------------------------
# embeddedness and distance scans
# ---------------------------------------------------------------------------

@njit(cache=True)
def _min_pair_dist(pos, guard, lo, hi):
    n = pos.shape[0]
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            gap = j - i
            if n - gap < gap:
                gap = n - gap
            if gap <= guard:
                continue
            if lo >= 0 and lo <= i <= hi and lo <= j <= hi:
                continue
            dx = pos[j, 0] - pos[i, 0]
            dy = pos[j, 1] - pos[i, 1]
            dz = pos[j, 2] - pos[i, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 < best:
                best = d2
    return math.sqrt(best)


def min_self_distance(curve, guard=G_ADJ):
    """Minimum distance between samples whose circular index gap exceeds
    `guard`.  Strictly positive certifies discrete embeddedness.  Pairs both
    inside a declared constant interval are exempt (equal by construction)."""
    if curve.n <= 2 * guard:
        raise CurveError("need N > 2*guard")
    lo = hi = -1
    if curve.const_interval is not None:
        lo, hi = interval_index_range(curve.const_interval, curve.n)
    return float(_min_pair_dist(curve.samples, guard, lo, hi))


@njit(cache=True)
def _hausdorff_oneside(a, b):
    worst = 0.0
    for i in range(a.shape[0]):
        best = np.inf
        for j in range(b.shape[0]):
            dx = a[i, 0] - b[j, 0]
            dy = a[i, 1] - b[j, 1]
            dz = a[i, 2] - b[j, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 < best:
                best = d2
        if best > worst:
            worst = best
    return math.sqrt(worst)


def hausdorff_distance(curve_a, curve_b):
    """Symmetric Hausdorff distance between the two sample point sets."""
    a, b = curve_a.samples, curve_b.samples
    return float(max(_hausdorff_oneside(a, b), _hausdorff_oneside(b, a)))


def max_sample_spacing(curve):
    steps = np.roll(curve.samples, -1, axis=0) - curve.samples
    return float(np.max(np.linalg.norm(steps, axis=1)))


def transformed(curve, matrix=None, offset=None):
    """Apply an affine map x -> matrix @ x + offset to all samples.

    Tangents are mapped and renormalized, so rotations, reflections and
    uniform scalings are all valid.
    """
    pts = curve.samples
    tan = curve.tangents
    if matrix is not None:
        matrix = np.asarray(matrix, dtype=np.float64)
        pts = pts @ matrix.T
        tan = tan @ matrix.T
        tan = tan / np.linalg.norm(tan, axis=1)[:, None]
    if offset is not None:
        pts = pts + np.asarray(offset, dtype=np.float64)
    return ClosedCurve(
        pts, tan,
        {"kind": "derived", "op": "transformed", "from": curve.meta},
        curve.const_interval,
    )


# ---------------------------------------------------------------------------
# fillets
# ---------------------------------------------------------------------------

def fillet_joins(samples, join_indices):
    """C1 fillet: replace samples k-1, k, k+1 at each join k by points of the
    cubic Hermite arc from sample k-2 to k+2 with outside slopes.  Returns a
    new array; joins too close to each other are blended sequentially."""
    n = samples.shape[0]
    out = samples.copy()
    for k in join_indices:
        p0 = out[(k - 2) % n]
        p1 = out[(k + 2) % n]
        m0 = 2.0 * (out[(k - 1) % n] - out[(k - 3) % n])
        m1 = 2.0 * (out[(k + 3) % n] - out[(k + 1) % n])
        for off, t in ((-1, 0.25), (0, 0.5), (1, 0.75)):
            h00 = (1 + 2 * t) * (1 - t) ** 2
            h10 = t * (1 - t) ** 2
            h01 = t * t * (3 - 2 * t)
            h11 = t * t * (t - 1)
            out[(k + off) % n] = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
    return out


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def curve_to_dict(curve, analytic=True):
    """JSON-ready dict; the analytic recipe is preserved when available."""
    if analytic and curve.meta.get("kind") == "analytic":
        return dict(curve.meta)
    out = {"kind": "samples", "closed": True,
           "points": [[float(x), float(y), float(z)] for x, y, z in curve.samples]}
    ci = curve.const_interval
    if ci is not None:
        out["const_interval"] = {"s1": ci.s1, "s2": ci.s2, "s0": ci.s0}
    return out


def curve_from_dict(data):
    kind = data.get("kind")
    if kind == "samples":
        if not data.get("closed", False):
            raise CurveError("only closed curves are supported")
        ci = data.get("const_interval")
        if ci is not None:
            ci = ConstantInterval(ci["s1"], ci["s2"], ci["s0"])
        return from_samples(np.asarray(data["points"], dtype=np.float64),
                            meta={"kind": "file"}, const_interval=ci)
    if kind == "analytic":
        name = data.get("name")
        if name == "circle":
            return make_circle(data.get("radius", 1.0), data["N"])
        if name == "torus_knot":
            return make_torus_knot(data["p"], data["q"], data["R"], data["r"], data["N"])
        if name == "perturbed_circle":
            return make_perturbed_circle(data.get("variant", 0), data["N"])
        raise CurveError(f"unknown analytic curve name: {name!r}")
    raise CurveError(f"unknown curve kind: {kind!r}")


def save_curve(curve, path, analytic=True):
    with open(path, "w") as f:
        json.dump(curve_to_dict(curve, analytic=analytic), f)
        f.write("\n")


def load_curve(path):
    with open(path) as f:
        return curve_from_dict(json.load(f))
