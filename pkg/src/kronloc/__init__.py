"""Torus localization for moduli of Kronecker quiver representations.

Stability of bipartite quivers, the census of fixed-point data on the
abelian covering quiver, glueing of stable trees, tree generating
functions and closed-form Euler characteristics.
"""

from .covering import (
    LocalizationDatum,
    TreeDatum,
    caterpillar_witness,
    enumerate_localization_data,
    induced_arrows,
)
from .formulas import (
    conjecture_f,
    douglas_constant,
    euler_34,
    euler_d_dplus1,
    euler_nn,
    lower_bound_L,
)
from .glueing import decompose, family_counts, glue, starting_vector
from .quiver import (
    BipartiteQuiver,
    euler_form,
    find_destabilizing,
    is_generically_stable,
    kronecker_is_stable,
    normalize_kronecker,
)
from .series import (
    PhiSpec,
    TruncatedSeries,
    asymptotic_coeff_estimate,
    lagrange_power_coeff,
    solve_functional,
    x0_inverse,
)

__version__ = "0.1.0"
