"""Eisenbud-Neumann invariants of graph links and twisted Alexander polynomials."""
from .laurent import LaurentPoly, degree_span, exact_divide, gcd_univariate, is_monic, parse_poly
from .perms import PermRep, load_rep, parse_rep
from .presentation import (GroupPresentation, abelianize, check_homomorphism, class_as_char, fox_derivative,
                           free_reduce, load_presentation, parse_presentation, wirtinger)
from .search import Certificate, SearchConfig, enumerate_homs, obstruction_sweep, verify_certificate
from .snf import SnfResult, smith_normal_form
from .splice import (SpliceDiagram, en_alexander, en_is_fibered, knot_genus, linking_number, load_splice,
                     mcmullen_check, parse_splice, specialize, thurston_norm)
from .twisted import (TensorRep, TwistedResult, alexander_matrix, delta_zero, fk_degree_test, tilde_norm_bound,
                      twisted_alexander)

__version__ = "0.1.0"
