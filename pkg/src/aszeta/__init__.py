"""Zeta functions and zero-angle statistics of Artin-Schreier covers
y^p - y = f(x) over small finite fields."""

__version__ = "0.1.0"

from .audit import audit_constants  # noqa: F401
from .family import FamilySpec, PolyOverFq  # noqa: F401
from .fields import base_field, build_field  # noqa: F401
from .lfun import (l_polynomial, l_polynomials_all, point_count,  # noqa: F401
                   zeta_numerator)
from .moments import (covariance_report, gaussian_experiment,  # noqa: F401
                      mean_square_check, moments_report, s_statistic,
                      variance_trend)
from .selberg import build_pair  # noqa: F401
from .zeros import curve_angles, find_angles  # noqa: F401
