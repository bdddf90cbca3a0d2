"""p-group covers of curves through unipotent-matrix presentations, in exact arithmetic."""

from .arith import GF, FieldDescriptor, FqElement, artin_schreier_solve_fq, trace_to_prime
from .curves import (
    EllipticFunction,
    EllipticMarkedCurve,
    ProjectiveLine,
    elliptic_verdict,
    frobenius_on_h1,
    injectivity_probe,
    reduce_matrix_global,
    split_elliptic,
)
from .series import LaurentSeries, split_p1, wp_apply, wp_solve_local, wp_solve_tail
from .unipotent import (
    FqRing,
    LaurentRing,
    P1GlobalRing,
    UnipotentMatrix,
    lang_map,
    lang_section,
    orbit_classes,
    p_conjugate,
    p_equiv_decide,
)

__version__ = "0.1.0"
