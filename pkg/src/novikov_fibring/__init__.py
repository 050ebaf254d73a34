"""Exact certificates of Novikov acyclicity and algebraic fibring of group characters."""
from .chain import ChainComplex, dualize, load_resolution, parse_resolution, presentation_complex, verify_complex
from .cli import corpus_path
from .coefficients import CoefficientRing, parse_field, primes_of_denominators, reduce_mod_p
from .fibring import (
    Budget,
    Certificate,
    Verdict,
    extract_primes,
    flip_cobound,
    search_certificate,
    sikorav_verdict,
    sphere_sample,
    verify_certificate,
)
from .groupring import GroupRing, GroupRingElement, is_positive_support, truncate, valuation
from .novikov import NovikovApprox, NovikovMatrix, eliminate, geometric_transform, nov_add, nov_invert, nov_mul
from .oracle import abelian_kernel_fg, brown_sigma
from .presentation import (
    Character,
    Presentation,
    free_reduce,
    fox_derivative,
    knuth_bendix,
    normal_form,
    parse_character,
    parse_presentation,
    validate_character,
)

__all__ = [name for name in dir() if not name.startswith("_")]
