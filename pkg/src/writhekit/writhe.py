"""Writhe of a closed space curve, two ways.

writhe_quadrature discretizes the Gauss double integral

    Wr = (1/4pi) oint oint (gamma'(s) x gamma'(t)) . (gamma(t) - gamma(s))
                           / |gamma(t) - gamma(s)|^3  ds dt

with central-difference velocities and a small band of excluded
near-diagonal index pairs (the integrand vanishes on the diagonal, so the
excluded strip contributes O(1/N^2)).

writhe_polygonal evaluates the writhe of the inscribed closed polygon
exactly: for each pair of non-adjacent edges the Gauss-map solid angle is
accumulated via the van Oosterom-Strackee formula, which is the standard
exact method (Klenin & Langowski 2000, method 1a).  It serves as the
oracle the quadrature is validated against.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .curves import central_velocities, min_self_distance

BAND_DEFAULT = 2


class WritheError(ValueError):
    pass


@dataclass(frozen=True)
class WritheReport:
    """One writhe evaluation: method name, sample count, excluded band
    (polygonal evaluations report band 0), value, and the signed difference
    to a reference value when one was computed."""

    method: str
    n_samples: int
    band: int
    value: float
    oracle_delta: float = math.nan

    def csv_row(self):
        return "%s,%d,%d,%.12g,%.12g" % (
            self.method, self.n_samples, self.band, self.value, self.oracle_delta)


CSV_HEADER = "method,N,band,value,oracle_delta"


def reports_csv(reports):
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in reports]) + "\n"


@njit(cache=True)
def _gauss_pair_sum(pos, vel, band):
    n = pos.shape[0]
    total = 0.0
    bad = 0
    for i in range(n):
        for j in range(i + 1, n):
            gap = j - i
            if n - gap < gap:
                gap = n - gap
            if gap <= band:
                continue
            rx = pos[j, 0] - pos[i, 0]
            ry = pos[j, 1] - pos[i, 1]
            rz = pos[j, 2] - pos[i, 2]
            d2 = rx * rx + ry * ry + rz * rz
            if d2 == 0.0:
                # coincident samples: fine inside a constant run (zero
                # velocity), a genuine singularity otherwise
                vi = vel[i, 0] ** 2 + vel[i, 1] ** 2 + vel[i, 2] ** 2
                vj = vel[j, 0] ** 2 + vel[j, 1] ** 2 + vel[j, 2] ** 2
                if vi > 0.0 and vj > 0.0:
                    bad += 1
                continue
            cx = vel[i, 1] * vel[j, 2] - vel[i, 2] * vel[j, 1]
            cy = vel[i, 2] * vel[j, 0] - vel[i, 0] * vel[j, 2]
            cz = vel[i, 0] * vel[j, 1] - vel[i, 1] * vel[j, 0]
            num = cx * rx + cy * ry + cz * rz
            total += num / (d2 * math.sqrt(d2))
    return total, bad


def writhe_quadrature(curve, band=BAND_DEFAULT):
    """Writhe by banded quadrature of the Gauss double integral.

    Parameters
    ----------
    curve : ClosedCurve
    band : int
        Index pairs with circular gap <= band are excluded.  Must satisfy
        1 <= band < N/4.

    Returns
    -------
    WritheReport
    """
    n = curve.n
    if not (1 <= band < n / 4):
        raise WritheError(f"band must satisfy 1 <= band < N/4, got {band} at N={n}")
    vel = central_velocities(curve.samples)
    total, bad = _gauss_pair_sum(curve.samples, vel, band)
    if bad and min_self_distance(curve, band) <= 0.0:
        # coincidences at the edge of a declared constant run are harmless
        # (same curve point under a degenerate parameterization, excluded
        # like the diagonal); anything else is a genuine self-contact
        raise WritheError(f"singular integrand: {bad} coincident sample pairs")
    value = 2.0 * total / (4.0 * math.pi * n * n)
    if not math.isfinite(value):
        raise WritheError("quadrature diverged (curve too close to self-intersection)")
    return WritheReport("quadrature", n, band, value)


@njit(cache=True)
def _vos_angle(ax, ay, az, bx, by, bz, cx, cy, cz):
    # signed solid angle of the spherical triangle (a, b, c), in (-2pi, 2pi)
    num = (ax * (by * cz - bz * cy)
           + ay * (bz * cx - bx * cz)
           + az * (bx * cy - by * cx))
    den = 1.0 + (ax * bx + ay * by + az * bz) \
              + (bx * cx + by * cy + bz * cz) \
              + (cx * ax + cy * ay + cz * az)
    return 2.0 * math.atan2(num, den)


@njit(cache=True)
def _polygon_pair_sum(pos):
    n = pos.shape[0]
    total = 0.0
    bad = 0
    for i in range(n):
        ia = i
        ib = i + 1
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue  # edges adjacent through the wrap
            jc = j
            jd = (j + 1) % n
            # unit vectors from edge-i endpoints to edge-j endpoints
            acx = pos[jc, 0] - pos[ia, 0]
            acy = pos[jc, 1] - pos[ia, 1]
            acz = pos[jc, 2] - pos[ia, 2]
            adx = pos[jd, 0] - pos[ia, 0]
            ady = pos[jd, 1] - pos[ia, 1]
            adz = pos[jd, 2] - pos[ia, 2]
            bcx = pos[jc, 0] - pos[ib, 0]
            bcy = pos[jc, 1] - pos[ib, 1]
            bcz = pos[jc, 2] - pos[ib, 2]
            bdx = pos[jd, 0] - pos[ib, 0]
            bdy = pos[jd, 1] - pos[ib, 1]
            bdz = pos[jd, 2] - pos[ib, 2]
            nac = math.sqrt(acx * acx + acy * acy + acz * acz)
            nad = math.sqrt(adx * adx + ady * ady + adz * adz)
            nbc = math.sqrt(bcx * bcx + bcy * bcy + bcz * bcz)
            nbd = math.sqrt(bdx * bdx + bdy * bdy + bdz * bdz)
            if nac == 0.0 or nad == 0.0 or nbc == 0.0 or nbd == 0.0:
                # an endpoint of one edge lies on an endpoint of the other;
                # zero-length edges contribute nothing, true contacts are
                # self-intersections
                li = (pos[ib, 0] - pos[ia, 0]) ** 2 + (pos[ib, 1] - pos[ia, 1]) ** 2 \
                    + (pos[ib, 2] - pos[ia, 2]) ** 2
                lj = (pos[jd, 0] - pos[jc, 0]) ** 2 + (pos[jd, 1] - pos[jc, 1]) ** 2 \
                    + (pos[jd, 2] - pos[jc, 2]) ** 2
                if li > 0.0 and lj > 0.0:
                    bad += 1
                continue
            acx /= nac; acy /= nac; acz /= nac
            adx /= nad; ady /= nad; adz /= nad
            bcx /= nbc; bcy /= nbc; bcz /= nbc
            bdx /= nbd; bdy /= nbd; bdz /= nbd
            # quadrilateral (ac, ad, bd, bc) split into two triangles; this
            # vertex order makes the sign match the Gauss-integral convention
            omega = _vos_angle(acx, acy, acz, adx, ady, adz, bdx, bdy, bdz) \
                + _vos_angle(acx, acy, acz, bdx, bdy, bdz, bcx, bcy, bcz)
            total += omega
    return total, bad


def writhe_polygonal(curve):
    """Exact writhe of the closed polygon through the curve samples.

    Zero-length edges (repeated samples in constant runs) are collapsed
    first; the writhe of the polygon is unchanged.  Then the signed
    Gauss-map solid angle of every non-adjacent edge pair is accumulated.
    A vertex of one edge coinciding with a vertex of a non-adjacent edge
    raises (polygon touches itself).

    Returns
    -------
    WritheReport
    """
    pos = curve.samples
    keep = np.any(pos != np.roll(pos, 1, axis=0), axis=1)
    if not np.all(keep):
        pos = np.ascontiguousarray(pos[keep])
    if pos.shape[0] < 3:
        raise WritheError("polygon collapsed to fewer than 3 distinct vertices")
    total, bad = _polygon_pair_sum(pos)
    if bad:
        raise WritheError(f"polygon touches itself: {bad} coincident endpoint pairs")
    value = total / (2.0 * math.pi)
    if not math.isfinite(value):
        raise WritheError("polygonal writhe diverged")
    return WritheReport("polygonal", curve.n, 0, value)


def cross_validate(curve, band=BAND_DEFAULT):
    """Run both evaluations and attach the quadrature-minus-polygonal delta.

    Returns
    -------
    (WritheReport, WritheReport)
        The quadrature report (with oracle_delta set) and the polygonal one.
    """
    quad = writhe_quadrature(curve, band)
    poly = writhe_polygonal(curve)
    delta = quad.value - poly.value
    quad = WritheReport(quad.method, quad.n_samples, quad.band, quad.value, delta)
    return quad, poly
