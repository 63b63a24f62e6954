"""Bohr sets, locally polynomial phases, Lipschitz tools and nilsequence decomposition."""
from mobnil.phases.bohr import BohrSetSpec, bohr_enumerate, bohr_norm, bohr_property_report
from mobnil.phases.decompose import BUMPS, NilDecomposition, heis_bohr_support, heis_decompose, pi3_local_check
from mobnil.phases.lipschitz import TrigPolynomial, fejer_approx, lipschitz_extend, soft_threshold
from mobnil.phases.local import (TabulatedPhase, is_locally_polynomial, quad_growth_check,
                                 quartic_growth_check, second_derivative)
