"""Writhe of closed space curves: two independent evaluators (smooth
Gauss-integral quadrature and the exact polygonal solid-angle sum), the
tangent indicatrix with its mod-4pi spherical area bookkeeping, and a
local helix splice that deforms a curve, or a family of curves, to any
prescribed writhe while touching nothing outside one small ball."""

from .curves import (
    ClosedCurve, ConstantInterval, CurveError,
    make_circle, make_torus_knot, make_perturbed_circle,
    from_samples, resample, reparameterize_constant,
    min_self_distance, transformed, save_curve, load_curve,
)
from .writhe import (
    WritheError, WritheReport, writhe_quadrature, writhe_polygonal,
    cross_validate, BAND_DEFAULT,
)
from .indicatrix import (
    IndicatrixError, IndicatrixReport, tangent_indicatrix,
    enclosed_area, fuller_check, residual_mod2,
)
from .deform import (
    DeformError, SpliceContext, HelixSpec, DeformTrace,
    helix_params, make_splice_context, radial_push, insert_segment,
    eval_assembly, splice_assembly, correct_writhe, connector_net_area,
    tol_writhe, scale_amplitude,
)
from .family import (
    FamilyError, ParamSpace, CurveFamily, sphere_space, product_space,
    make_space, correct_family, omega_homotopy, phi_homotopy,
    save_family, load_family,
)

__version__ = "0.1.0"
