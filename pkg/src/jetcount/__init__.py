"""Jet schemes of polynomial maps and point counts over Z/p^k."""
from .counting import count_fiber, count_points, count_points_jetring, count_points_naive, count_points_tree
from .deffile import load_definitions, parse_definitions
from .diagnostics import ScanSpec, esmooth_diagnostic, frs_diagnostic, jetflat_diagnostic, scan_gh
from .limits import BudgetExceeded, Limits, PrimeFloorError
from .measures import estimate_components, estimate_dimension, g_value, gh_record, h_value, langweil_check
from .polyring import IntPoly, parse_poly
from .presburger import classify_nonneg, eval_constructible, eval_motivic, parse_constructible, sup_over_domain
from .schemes import AffineScheme, PolyMorphism, affine_space, jet_morphism, jet_prolong

__version__ = "0.1.0"
