"""Exact first moments of derivatives of quadratic Dirichlet L-functions over F_q[t] at s = 1/2."""

from .poly import FqPoly, field, factor, is_squarefree, moebius, poly_sqrt
from .quadvalue import QuadValue
from .characters import chi, coeff_A, char_sum_over_H, coprime_squarefree_count
from .lfunction import (
    LData,
    build_l,
    deriv_half_afe_even,
    deriv_half_afe_odd,
    deriv_half_direct,
    fe_symmetry_check,
    rh_roots_check,
)
from .asymptotics import (
    bernoulli_plus,
    delta_jet,
    faulhaber,
    g_deriv_series,
    h_n_eval,
    lemma_main,
    thm1_main,
    thm2_main,
)
from .ensemble import (
    BudgetExceeded,
    EnsembleSpec,
    MomentReport,
    compare,
    empirical_moment,
    empirical_S,
    empirical_T,
    exact_M_sum,
    exact_N_sum,
)

__version__ = "0.1.0"
