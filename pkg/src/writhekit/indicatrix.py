"""Tangent indicatrix of a closed curve and the area form of Fuller's
mod-2 relation 1 + Wr = A / 2pi  (mod 2).

The indicatrix is the closed spherical polygon of unit tangents.  Its
enclosed area is accumulated with winding multiplicity: pick an anchor
point P away from the polygon, sum the signed van Oosterom-Strackee solid
angles of the fan triangles (P, u_k, u_{k+1}).  That equals the integral
of the winding number around the sphere, normalized so the region
containing P counts zero, and is exact for the polygon (no small-angle
approximation).  The accumulated value is returned unreduced; it is only
canonical mod 4pi, which is exactly the invariance Fuller's relation
needs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .writhe import writhe_polygonal, writhe_quadrature, BAND_DEFAULT

# Global orientation of the area form.  Calibrated once so that Fuller's
# relation closes on the torus-knot corpus with the same writhe sign
# convention as the Gauss double integral: the planar circle (tangents
# counterclockwise on the equator of the Gauss sphere) encloses +2pi.
ORIENT = -1.0

_DEDUP_TOL = 1e-12


class IndicatrixError(ValueError):
    pass


@dataclass(frozen=True)
class IndicatrixReport:
    """Fuller-relation check: writhe, accumulated indicatrix area, the two
    sides 1 + Wr and A / 2pi, and the mod-2 distance between them."""

    n_samples: int
    writhe: float
    area: float
    fuller_lhs: float
    fuller_rhs: float
    residual_mod2: float

    def csv_row(self):
        return "%d,%.12g,%.12g,%.12g,%.12g,%.12g" % (
            self.n_samples, self.writhe, self.area,
            self.fuller_lhs, self.fuller_rhs, self.residual_mod2)


CSV_HEADER = "N,writhe,area,fuller_lhs,fuller_rhs,residual_mod2"


def reports_csv(reports):
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in reports]) + "\n"


def tangent_indicatrix(curve):
    """Unit tangents with consecutive duplicates collapsed.

    Constant runs repeat one tangent; they contribute a single vertex.
    Raises if any tangent is non-finite or consecutive tangents are
    antipodal (the connecting great-circle arc would be ambiguous).
    """
    t = curve.tangents
    if not np.all(np.isfinite(t)):
        raise IndicatrixError("non-finite tangent")
    hop = np.linalg.norm(t - np.roll(t, 1, axis=0), axis=1)
    pts = t[hop > _DEDUP_TOL]
    if pts.shape[0] < 3:
        raise IndicatrixError("indicatrix collapsed to fewer than 3 vertices")
    dots = np.einsum("ij,ij->i", pts, np.roll(pts, -1, axis=0))
    if np.any(dots < -1.0 + 1e-12):
        raise IndicatrixError("consecutive tangents are antipodal: arc undefined")
    return pts


# deterministic anchor candidates, roughly equidistributed (Fibonacci sphere)
def _anchor_candidates(m=8):
    k = np.arange(m)
    z = (2.0 * k + 1.0) / m - 1.0
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = k * (math.pi * (3.0 - math.sqrt(5.0)))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _arc_clearance(q, u, v, axis, axis_norm):
    """Angular distance from point q to each great-circle arc (u -> v)."""
    end = np.minimum(np.arccos(np.clip(u @ q, -1, 1)),
                     np.arccos(np.clip(v @ q, -1, 1)))
    ok = axis_norm > 1e-15
    d = end.copy()
    if np.any(ok):
        n_hat = axis[ok] / axis_norm[ok, None]
        to_plane = np.abs(np.arcsin(np.clip(n_hat @ q, -1, 1)))
        # foot of q on the great circle lies within the arc iff it is on the
        # positive side of both arc endpoints' meridians
        inside = (np.einsum("ij,ij->i", np.cross(u[ok], np.broadcast_to(q, u[ok].shape)), n_hat) >= 0) \
            & (np.einsum("ij,ij->i", np.cross(np.broadcast_to(q, v[ok].shape), v[ok]), n_hat) >= 0)
        d[ok] = np.where(inside, np.minimum(to_plane, end[ok]), end[ok])
    return d


def pick_anchor(points):
    """Anchor for the winding accumulation: the fixed candidate whose pair
    {P, -P} stays farthest from every polygon arc."""
    u = points
    v = np.roll(points, -1, axis=0)
    axis = np.cross(u, v)
    axis_norm = np.linalg.norm(axis, axis=1)
    best, best_score = None, -1.0
    for cand in _anchor_candidates():
        score = min(float(np.min(_arc_clearance(cand, u, v, axis, axis_norm))),
                    float(np.min(_arc_clearance(-cand, u, v, axis, axis_norm))))
        if score > best_score:
            best, best_score = cand, score
    if best_score < 1e-3:
        raise IndicatrixError("indicatrix leaves no room for an area anchor")
    return best


def enclosed_area(points, anchor=None):
    """Signed spherical area enclosed by the closed polygon `points`,
    accumulated with winding multiplicity relative to `anchor` (chosen
    automatically if omitted).  Unreduced; canonical mod 4pi."""
    points = np.asarray(points, dtype=np.float64)
    norms = np.linalg.norm(points, axis=1)
    if not np.all(np.abs(norms - 1.0) < 1e-9):
        raise IndicatrixError("indicatrix points must be unit vectors")
    p = pick_anchor(points) if anchor is None else np.asarray(anchor, dtype=np.float64)
    u = points
    v = np.roll(points, -1, axis=0)
    num = np.cross(u, v) @ p
    den = 1.0 + u @ p + np.einsum("ij,ij->i", u, v) + v @ p
    omega = 2.0 * np.arctan2(num, den)
    return ORIENT * float(np.sum(omega))


def residual_mod2(lhs, rhs):
    """Distance from lhs - rhs to the nearest even integer, in [0, 1]."""
    d = (lhs - rhs) % 2.0
    return float(min(d, 2.0 - d))


def fuller_check(curve, method="polygonal", band=BAND_DEFAULT):
    """Evaluate both sides of Fuller's relation on one curve.

    The left side is 1 + Wr; the right side is the indicatrix area reduced
    to its mod-4pi representative in [-2pi, 2pi], over 2pi.  The report's
    `area` field keeps the unreduced accumulation.

    Returns
    -------
    IndicatrixReport
    """
    if method == "polygonal":
        wr = writhe_polygonal(curve).value
    elif method == "quadrature":
        wr = writhe_quadrature(curve, band).value
    else:
        raise IndicatrixError(f"unknown writhe method {method!r}")
    area = enclosed_area(tangent_indicatrix(curve))
    rhs = math.remainder(area, 4.0 * math.pi) / (2.0 * math.pi)
    lhs = 1.0 + wr
    return IndicatrixReport(curve.n, wr, area, lhs, rhs, residual_mod2(lhs, rhs))
