"""Exact Darboux transformations of Bessel and Airy operators and their bispectral pairs."""

from .airy import AiryParam, airy_op
from .bessel import BesselParam, bessel_op, bessel_param
from .darboux import (
    BispectralPair,
    DarbouxPlane,
    build_plane,
    check_ab_bas,
    complete_pair,
    involution_a,
    involution_b,
    involution_s,
    minimal_L,
    monomial_closed_forms,
    one_point_laws,
    planes_equal,
    rank_of,
    spectral_algebra,
)
from .diffop import DiffOp
from .errors import BispectralError
from .examples import EXAMPLES, example_conditions
from .field import Q, RatFun, UniPoly
from .kernelspace import ConditionSet, PointSupport, ZeroSupport, ZeroTerm
from .verify import check_bispectral_symbolic, verify_pair, wave_series

__version__ = "0.1.0"
