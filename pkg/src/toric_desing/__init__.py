"""Exact combinatorial embedded resolution for toric and binomial varieties."""

from .binomial import (Binomial, BinomialIdeal, Diagram, StandardBasis,
                       TorusLattice, divide, exponent_cmp, membership,
                       pth_power_test, standard_basis)
from .driver import (ResolutionProblem, ResolutionResult,
                     open_restriction_check, oracle_lattice_ideal,
                     resolve_embedded)
from .fan import Cone, Fan, barycentre, chart_transition, is_regular, orthant, star_subdivision
from .hypersurface import (LinearForm, cone_order_data, equimultiple_components,
                           fan_max_order, minimal_cones, resolve_hypersurface)
from .marked import (ChartEnv, ExceptionalRecord, MarkedMonomialIdeal,
                     build_marked, companion, factor_dq, marked_invariant,
                     maximal_contact_descent, resolve_marked,
                     resolve_monomial_case, sum_marked, support_components,
                     theta_resolve, transform_marked)
from .samuel import (ChartPresentation, HilbertSamuel, chart_blowup,
                     equimultiple_locus, hilbert_samuel_eval,
                     hs_after_blowup_check, hs_compare, presentation,
                     samuel_stratum_components)

__version__ = "0.1.0"
